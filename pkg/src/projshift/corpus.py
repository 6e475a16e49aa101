"""Built-in example systems shipped as spec files."""
from __future__ import annotations

from importlib import resources

from .errors import SpecError
from .system import SystemSpec, parse_system_spec

NAMES = (
    "full-shift-2",
    "golden-mean-1d",
    "golden-mean-rows-2d",
    "hard-square",
    "checkerboard",
    "two-fixed-points",
)


def corpus_text(name: str) -> bytes:
    if name not in NAMES:
        raise SpecError(f"no built-in system named {name!r}; choose from {', '.join(NAMES)}")
    return resources.files("projshift").joinpath("specs", f"{name}.json").read_bytes()


def load(name: str) -> SystemSpec:
    return parse_system_spec(corpus_text(name))
