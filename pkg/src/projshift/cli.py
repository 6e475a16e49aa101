"""Command-line entry point: ``projshift --spec FILE --command NAME --out DIR``.

Exit codes: 0 success, 2 invalid spec, 3 capacity exceeded, 1 any other
computation error.
"""
from __future__ import annotations

import sys
from pathlib import Path

import click

from . import __version__, corpus
from .errors import CapacityError, ShiftError, SpecError
from .report import COMMANDS, run_report
from .system import parse_system_spec

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_SPEC = 2
EXIT_CAPACITY = 3


def _load(spec: str):
    if spec.startswith("corpus:"):
        return corpus.load(spec.split(":", 1)[1])
    try:
        data = Path(spec).read_bytes()
    except OSError as e:
        raise SpecError(f"cannot read spec file: {e.strerror or e}") from None
    return parse_system_spec(data)


@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--spec", "spec_path", required=True, metavar="PATH",
              help="JSON system spec, or corpus:NAME for a built-in system.")
@click.option("--command", "command", type=click.Choice(COMMANDS), default="full",
              show_default=True, help="Which computation to run.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".",
              show_default=True, help="Directory for report.json and entropy.csv.")
@click.option("--max-cells", type=click.IntRange(min=1), default=None,
              help="Override the enumeration capacity (cells per extended window).")
@click.option("--margin-sweep", type=click.IntRange(min=0), default=0, show_default=True,
              help="Also rerun with margins {-j..j}^d for j = 0..K and flag unstable verdicts.")
@click.version_option(__version__, prog_name="projshift")
def main(spec_path, command, out_dir, max_cells, margin_sweep):
    """Compute entropies, projections and irreducibility verdicts for a Z^d SFT."""
    try:
        spec = _load(spec_path)
        report = run_report(spec, command, margin_sweep=margin_sweep, max_cells=max_cells)
        report_path, csv_path = report.write(out_dir)
    except SpecError as e:
        click.echo(f"spec error: {e}", err=True)
        sys.exit(EXIT_SPEC)
    except CapacityError as e:
        click.echo(f"capacity exceeded: {e} (raise --max-cells or shrink the windows)", err=True)
        sys.exit(EXIT_CAPACITY)
    except ShiftError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_ERROR)
    summary = report.payload["results"].get("summary")
    if summary:
        click.echo(summary["statement"])
    click.echo(f"wrote {report_path} and {csv_path}")


if __name__ == "__main__":
    main()
