"""Run a command over a system spec and assemble a reproducible report.

The report payload is deterministic: it depends only on the spec, the command,
the capacity override and the tool version. Wall-clock timings are kept apart
from it so that two runs can be compared byte for byte.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .entropy import EntropyBound, EntropyReport, TransferBound, entropy_report
from .errors import ShiftError
from .irreducibility import (
    GluingWitness,
    IrreducibilityVerdict,
    check_product_irreducibility,
    check_strong_irreducibility,
)
from .lattice import FiniteSet, TransversalSection, centered_box
from .projection import compare_window, product_count, projectional_entropy, sub_windows
from .shiftspace import Pattern
from .system import SystemSpec

COMMANDS = ("entropy", "proj-entropy", "product-check", "irreducibility", "full")
CSV_COLUMNS = ("window_sides", "margin_id", "count", "value_nats", "exact")

EQUAL = "equal_at_scale"
STRICT = "strict_inclusion"
VIOLATED = "inclusion_violated"


# ---------------------------------------------------------------------------
# canonical JSON


def _number(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def canonical_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """Sorted keys, floats at 17 significant digits, infinities as strings."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _number(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {canonical_json(obj[k], indent, _level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(x, (int, str)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(canonical_json(x) for x in obj) + "]"
        items = [pad + canonical_json(x, indent, _level + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# record builders


def margin_id(margin: FiniteSet) -> str:
    """``r<j>`` when the margin is the cube {-j..j}^d, ``custom`` otherwise."""
    lo, hi = margin.bounding_box()
    j = hi[0]
    if all(a == -j and b == j for a, b in zip(lo, hi)) and margin == centered_box(j, margin.dim):
        return f"r{j}"
    return "custom"


def _pattern(p: Pattern, spec: SystemSpec) -> dict:
    return {"points": p.support.to_list(), "symbols": [spec.alphabet[v] for v in p.values]}


def _bound_row(b: EntropyBound) -> dict:
    return {
        "window_sides": list(b.window.extents()),
        "cells": len(b.window),
        "margin_id": margin_id(b.margin),
        "count": b.count,
        "value_nats": b.value,
        "exact": b.exact,
        "certified_upper": b.certified_upper,
    }


def _transfer_row(t: TransferBound, mid: str) -> dict:
    return {
        "kind": t.kind,
        "width": t.width,
        "states": t.states,
        "edges": t.edges,
        "spectral_radius": t.spectral_radius,
        "value_nats": t.value,
        "margin_id": mid,
        "certified_upper": t.certified_upper,
    }


def _best(rep: EntropyReport, mid: str, strip_mid: str) -> dict:
    rows = [("window", {"window_sides": list(b.window.extents()), "margin_id": mid}, b.value)
            for b in rep.bounds]
    rows += [(t.kind, {"width": t.width, "margin_id": strip_mid}, t.value)
             for t in rep.transfer_bounds]
    kind, where, value = min(rows, key=lambda r: r[2])
    return {"value_nats": value, "source": kind, **where, "certified_upper": True}


def _entropy_section(rep: EntropyReport, margin: FiniteSet, strip_margin: str) -> dict:
    mid = margin_id(margin)
    return {
        "log_base": rep.log_base,
        "windows": [_bound_row(b) for b in rep.bounds],
        "transfer": [_transfer_row(t, strip_margin) for t in rep.transfer_bounds],
        "best_upper": _best(rep, mid, strip_margin),
        "exact_value_nats": rep.exact_value,
    }


def _witness(w: GluingWitness | None, spec: SystemSpec) -> dict | None:
    if w is None:
        return None
    return {"b1": w.b1.to_list(), "b2": w.b2.to_list(),
            "pattern1": _pattern(w.pattern1, spec), "pattern2": _pattern(w.pattern2, spec)}


def _verdict(v: IrreducibilityVerdict, spec: SystemSpec, mid: str) -> dict:
    return {
        "status": v.status,
        "scale": v.scale,
        "pairs_checked": v.pairs_checked,
        "mixing_shape": [list(p) for p in spec.mixing_shape],
        "margin_id": mid,
        "witness": _witness(v.witness, spec),
        "exact_witness": v.exact_witness,
        "note": v.note,
    }


# ---------------------------------------------------------------------------
# commands


@dataclass
class _Context:
    spec: SystemSpec
    margin: FiniteSet
    max_cells: int | None
    timings: dict[str, float] = field(default_factory=dict)

    def timed(self, step: str, fn: Callable[[], Any]):
        t0 = time.perf_counter()
        try:
            return fn()
        except ShiftError as e:
            # add command context, keep the error class (and so the exit code)
            raise _with_context(e, step)
        finally:
            self.timings[step] = round(time.perf_counter() - t0, 6)


def _with_context(e: ShiftError, step: str) -> ShiftError:
    e.args = (f"{step}: {e.args[0] if e.args else e}",) + tuple(e.args[1:])
    return e


def _entropy(ctx: _Context) -> dict:
    spec = ctx.spec
    rep = ctx.timed("entropy", lambda: entropy_report(
        spec.sft(), spec.window_sets(), ctx.margin,
        strip_widths=spec.strip_widths, max_cells=ctx.max_cells))
    return _entropy_section(rep, ctx.margin, "none")


def _subgroup_info(spec: SystemSpec) -> dict:
    H = spec.subgroup_basis()
    return {
        "rows": [list(r) for r in H.rows],
        "rank": H.rank,
        "hnf": [list(r) for r in H.hnf],
        "invariants": list(H.invariants),
        "free_rank": H.free_rank,
        "index": H.index_label,
    }


def _proj_entropy(ctx: _Context) -> dict:
    spec = ctx.spec
    H = spec.subgroup_basis()
    subs = sub_windows(spec.window_sets(), H.rank)
    rep = ctx.timed("proj-entropy", lambda: projectional_entropy(
        spec.sft(), H, subs, ctx.margin, strip_widths=spec.strip_widths, max_cells=ctx.max_cells))
    out = _entropy_section(rep, ctx.margin, margin_id(ctx.margin))
    out["subgroup"] = _subgroup_info(spec)
    return out


def _product_check(ctx: _Context) -> dict:
    spec = ctx.spec
    H = spec.subgroup_basis()
    sft = spec.sft()
    section = TransversalSection(H)
    mid = margin_id(ctx.margin)

    def run():
        rows = []
        for F in spec.window_sets():
            cmp = compare_window(sft, H, F, ctx.margin, section=section, max_cells=ctx.max_cells)
            pieces_total = product_count(sft, H, F, ctx.margin, section=section, max_cells=ctx.max_cells)
            rows.append({
                "window_sides": list(F.extents()),
                "margin_id": mid,
                "x_count": cmp.x_count,
                "product_count": cmp.product_count,
                "piece_count_product": pieces_total,
                "included": cmp.included,
                "equal": cmp.equal,
                "violations": cmp.violations,
                "mode": cmp.mode,
                "witness": None if cmp.witness is None else _pattern(cmp.witness, spec),
            })
        return rows

    rows = ctx.timed("product-check", run)
    if any(not r["included"] for r in rows):
        verdict = VIOLATED
    elif all(r["equal"] for r in rows):
        verdict = EQUAL
    else:
        verdict = STRICT
    witness = next(({"window_sides": r["window_sides"], "pattern": r["witness"]}
                    for r in rows if r["witness"] is not None), None)
    return {"verdict": verdict, "windows": rows, "strict_witness": witness,
            "subgroup": _subgroup_info(spec)}


def _irreducibility(ctx: _Context) -> dict:
    spec = ctx.spec
    D = spec.mixing()
    sft = spec.sft()
    mid = margin_id(ctx.margin)
    x = ctx.timed("irreducibility", lambda: check_strong_irreducibility(
        sft, D, spec.scale, ctx.margin, max_cells=ctx.max_cells))
    out = {"x": _verdict(x, spec, mid)}
    if spec.subgroup is not None:
        H = spec.subgroup_basis()
        prod = ctx.timed("irreducibility-product", lambda: check_product_irreducibility(
            sft, H, D, spec.scale, ctx.margin, max_cells=ctx.max_cells))
        out["product"] = _verdict(prod, spec, mid)
    return out


def _fmt(x: float) -> str:
    return format(x, ".6f") if math.isfinite(x) else str(x)


def _summary(results: dict) -> dict:
    irr = results["irreducibility"]["x"]["status"]
    hx = results["entropy"]["best_upper"]["value_nats"]
    hx_exact = results["entropy"]["exact_value_nats"]
    ph = results["proj_entropy"]
    hh = ph["best_upper"]["value_nats"]
    hh_exact = ph["exact_value_nats"]
    verdict = results["product_check"]["verdict"]
    equal = verdict == EQUAL
    gap_bounds = hh - hx
    # exact h(X_H) minus an upper bound (or the exact value) of h(X)
    certified = None if hh_exact is None else hh_exact - (hx if hx_exact is None else hx_exact)

    if verdict == VIOLATED:
        conclusion = "inclusion of X in the product system failed; the margin languages are inconsistent"
    elif equal:
        conclusion = "X agrees with the product system on every tested window"
    elif certified is not None and certified > 0:
        conclusion = ("h(X) < h(X_H) is certified, so X is a proper subsystem of the product system, "
                      "as the witness confirms")
    elif irr != "pass_at_scale":
        conclusion = ("X is not strongly irreducible at this scale and differs from the product "
                      "system; the mixing hypothesis is what fails")
    else:
        conclusion = ("X differs from the product system; the entropy bounds do not separate "
                      "h(X) from h(X_H) at this scale")
    hh_text = f"h(X_H) = {_fmt(hh_exact)}" if hh_exact is not None else f"h(X_H) <= {_fmt(hh)}"
    hx_text = f"h(X) = {_fmt(hx_exact)}" if hx_exact is not None else f"h(X) <= {_fmt(hx)}"
    line = (f"irreducibility: {irr}; {hx_text}; {hh_text}; "
            f"product equality at scale: {'yes' if equal else 'no'}; {conclusion}")
    return {
        "irreducibility": irr,
        "h_x_best_upper": results["entropy"]["best_upper"],
        "h_x_exact_nats": hx_exact,
        "h_xh_best_upper": ph["best_upper"],
        "h_xh_exact_nats": hh_exact,
        "product_verdict": verdict,
        "product_equal_at_scale": equal,
        "strict_witness": results["product_check"]["strict_witness"],
        "entropy_gap_between_bounds": gap_bounds,
        "certified_gap_lower_bound": certified,
        "statement": line,
    }


def _execute(spec: SystemSpec, command: str, margin: FiniteSet, max_cells: int | None) -> tuple[dict, dict]:
    ctx = _Context(spec, margin, max_cells)
    if command in ("proj-entropy", "product-check", "full"):
        spec.subgroup_basis()
    if command in ("irreducibility", "full"):
        spec.mixing()
    results: dict[str, Any] = {}
    if command in ("entropy", "full"):
        results["entropy"] = _entropy(ctx)
    if command in ("proj-entropy", "full"):
        results["proj_entropy"] = _proj_entropy(ctx)
    if command in ("product-check", "full"):
        results["product_check"] = _product_check(ctx)
    if command in ("irreducibility", "full"):
        results["irreducibility"] = _irreducibility(ctx)
    if command == "full":
        results["summary"] = _summary(results)
    return results, ctx.timings


def _sweep_verdicts(results: dict) -> dict:
    out = {}
    if "entropy" in results:
        out["h_x_best_upper"] = results["entropy"]["best_upper"]["value_nats"]
    if "proj_entropy" in results:
        out["h_xh_best_upper"] = results["proj_entropy"]["best_upper"]["value_nats"]
        out["h_xh_exact_nats"] = results["proj_entropy"]["exact_value_nats"]
    if "product_check" in results:
        out["product_verdict"] = results["product_check"]["verdict"]
    if "irreducibility" in results:
        out["irreducibility"] = results["irreducibility"]["x"]["status"]
        if "product" in results["irreducibility"]:
            out["product_irreducibility"] = results["irreducibility"]["product"]["status"]
    return out


_DISCRETE = ("product_verdict", "irreducibility", "product_irreducibility")


# ---------------------------------------------------------------------------
# public entry point


@dataclass(frozen=True)
class RunReport:
    payload: dict
    timings: dict

    def to_json(self, *, include_timings: bool = True) -> str:
        body = dict(self.payload)
        if include_timings:
            body["timings_seconds"] = self.timings
        return canonical_json(body) + "\n"

    def entropy_rows(self) -> list[dict]:
        """Window-bound rows for ``entropy.csv``; X rows first, then X_H rows."""
        rows = []
        results = self.payload["results"]
        for key, prefix in (("entropy", "X"), ("proj_entropy", "X_H")):
            for r in results.get(key, {}).get("windows", []):
                rows.append({
                    "window_sides": f"{prefix}:" + "x".join(str(s) for s in r["window_sides"]),
                    "margin_id": r["margin_id"],
                    "count": r["count"],
                    "value_nats": _number(r["value_nats"]).strip('"'),
                    "exact": "true" if r["exact"] else "false",
                })
        return rows

    def entropy_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.entropy_rows())
        return buf.getvalue()

    def write(self, out_dir: str | Path) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        rj, ec = out / "report.json", out / "entropy.csv"
        rj.write_text(self.to_json(), encoding="utf-8")
        ec.write_text(self.entropy_csv(), encoding="utf-8")
        return rj, ec


def run_report(spec: SystemSpec, command: str, *, margin_sweep: int = 0,
               max_cells: int | None = None) -> RunReport:
    """Run ``command`` on ``spec`` and, optionally, repeat it with margins {-j..j}^d.

    A margin sweep flags instability when a discrete verdict (product verdict or
    irreducibility status) changes with the margin.
    """
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    if margin_sweep < 0:
        raise ValueError("margin sweep depth must be >= 0")
    results, timings = _execute(spec, command, spec.margin_set(), max_cells)
    payload: dict[str, Any] = {
        "tool": {"name": "projshift", "version": __version__},
        "command": command,
        "max_cells": max_cells,
        "spec": spec.to_dict(),
        "results": results,
    }
    if margin_sweep:
        runs = []
        for j in range(margin_sweep + 1):
            m = centered_box(j, spec.dim)
            res, t = _execute(spec, command, m, max_cells)
            timings[f"margin-sweep/r{j}"] = round(sum(t.values()), 6)
            runs.append({"margin_id": f"r{j}", **_sweep_verdicts(res)})
        unstable = sorted(k for k in _DISCRETE
                          if len({r[k] for r in runs if k in r}) > 1)
        payload["margin_sweep"] = {"runs": runs, "unstable": bool(unstable),
                                   "unstable_fields": unstable}
    return RunReport(payload, timings)
