"""System-specification files: strict JSON parsing, canonical form and converters.

A spec names an SFT (alphabet plus forbidden patterns), optionally a subgroup H
and a mixing shape D, and the experiment geometry (box windows, margin shape,
irreducibility scale). Validation is eager and every failure carries the JSON
pointer of the offending value.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .entropy import MAX_STRIP_WIDTH
from .errors import ShiftError, SpecError
from .irreducibility import MixingShape
from .lattice import FiniteSet, SubgroupBasis, folner_box
from .shiftspace import MAX_SYMBOLS, SftSpec

DEFAULT_SCALE = 3

_REQUIRED = ("name", "dim", "alphabet", "forbidden", "windows", "margin")
_OPTIONAL = ("subgroup", "mixing_shape", "scale", "strip_widths")

Vector = tuple[int, ...]


@dataclass(frozen=True)
class ForbiddenEntry:
    offsets: tuple[Vector, ...]
    symbols: tuple[str, ...]


@dataclass(frozen=True)
class SystemSpec:
    name: str
    dim: int
    alphabet: tuple[str, ...]
    forbidden: tuple[ForbiddenEntry, ...]
    windows: tuple[Vector, ...]
    margin: tuple[Vector, ...]
    subgroup: tuple[Vector, ...] | None = None
    mixing_shape: tuple[Vector, ...] | None = None
    scale: int = DEFAULT_SCALE
    strip_widths: tuple[int, ...] | None = None

    # -- converters -------------------------------------------------------

    def sft(self) -> SftSpec:
        return SftSpec.from_rules(self.dim, self.alphabet,
                                  [(e.offsets, e.symbols) for e in self.forbidden])

    def window_sets(self) -> list[FiniteSet]:
        return [folner_box(w) for w in self.windows]

    def margin_set(self) -> FiniteSet:
        return FiniteSet(self.margin)

    def subgroup_basis(self) -> SubgroupBasis:
        if self.subgroup is None:
            raise SpecError("this command needs a subgroup", "/subgroup")
        return SubgroupBasis(self.subgroup)

    def mixing(self) -> MixingShape:
        if self.mixing_shape is None:
            raise SpecError("this command needs a mixing_shape", "/mixing_shape")
        return MixingShape(FiniteSet(self.mixing_shape))

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        def vecs(vs):
            return None if vs is None else [list(v) for v in vs]

        return {
            "name": self.name,
            "dim": self.dim,
            "alphabet": list(self.alphabet),
            "forbidden": [{"offsets": vecs(e.offsets), "symbols": list(e.symbols)}
                          for e in self.forbidden],
            "windows": vecs(self.windows),
            "margin": vecs(self.margin),
            "subgroup": vecs(self.subgroup),
            "mixing_shape": vecs(self.mixing_shape),
            "scale": self.scale,
            "strip_widths": None if self.strip_widths is None else list(self.strip_widths),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# validation helpers


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _int(x, path: str, *, minimum: int | None = None) -> int:
    if not _is_int(x):
        raise SpecError(f"expected an integer, got {json.dumps(x)}", path)
    if minimum is not None and x < minimum:
        raise SpecError(f"must be >= {minimum}, got {x}", path)
    return x


def _list(x, path: str, *, nonempty: bool = False) -> list:
    if not isinstance(x, list):
        raise SpecError(f"expected a list, got {type(x).__name__}", path)
    if nonempty and not x:
        raise SpecError("must not be empty", path)
    return x


def _vector(x, dim: int, path: str, *, positive: bool = False) -> Vector:
    items = _list(x, path)
    if len(items) != dim:
        raise SpecError(f"expected a vector of length {dim}, got length {len(items)}", path)
    return tuple(_int(c, f"{path}/{i}", minimum=1 if positive else None)
                 for i, c in enumerate(items))


def _vectors(x, dim: int, path: str, *, positive: bool = False, distinct: bool = True) -> tuple[Vector, ...]:
    out = []
    seen = set()
    for i, v in enumerate(_list(x, path, nonempty=True)):
        vec = _vector(v, dim, f"{path}/{i}", positive=positive)
        if distinct and vec in seen:
            raise SpecError(f"duplicate vector {list(vec)}", f"{path}/{i}")
        seen.add(vec)
        out.append(vec)
    return tuple(out)


def _forbidden(x, dim: int, alphabet: tuple[str, ...]) -> tuple[ForbiddenEntry, ...]:
    names = set(alphabet)
    out = []
    for i, entry in enumerate(_list(x, "/forbidden")):
        path = f"/forbidden/{i}"
        if not isinstance(entry, dict):
            raise SpecError("expected an object with offsets and symbols", path)
        extra = sorted(set(entry) - {"offsets", "symbols"})
        if extra:
            raise SpecError(f"unknown field {extra[0]!r}", f"{path}/{extra[0]}")
        for key in ("offsets", "symbols"):
            if key not in entry:
                raise SpecError(f"missing field {key!r}", f"{path}/{key}")
        offsets = _vectors(entry["offsets"], dim, f"{path}/offsets")
        syms = _list(entry["symbols"], f"{path}/symbols")
        if len(syms) != len(offsets):
            raise SpecError(f"{len(offsets)} offsets but {len(syms)} symbols", f"{path}/symbols")
        for j, s in enumerate(syms):
            if not isinstance(s, str) or s not in names:
                raise SpecError(f"unknown symbol {json.dumps(s)}", f"{path}/symbols/{j}")
        out.append(ForbiddenEntry(offsets, tuple(syms)))
    return tuple(out)


def spec_from_dict(data: Any) -> SystemSpec:
    """Validate an already-decoded JSON value."""
    if not isinstance(data, dict):
        raise SpecError("top level must be a JSON object", "")
    unknown = sorted(set(data) - set(_REQUIRED) - set(_OPTIONAL))
    if unknown:
        raise SpecError(f"unknown field {unknown[0]!r}", f"/{unknown[0]}")
    for key in _REQUIRED:
        if key not in data:
            raise SpecError(f"missing required field {key!r}", f"/{key}")

    name = data["name"]
    if not isinstance(name, str) or not name:
        raise SpecError("name must be a nonempty string", "/name")
    dim = _int(data["dim"], "/dim", minimum=1)

    raw_alpha = _list(data["alphabet"], "/alphabet", nonempty=True)
    if len(raw_alpha) > MAX_SYMBOLS:
        raise SpecError(f"at most {MAX_SYMBOLS} symbols allowed", "/alphabet")
    alphabet = []
    for i, s in enumerate(raw_alpha):
        if not isinstance(s, str) or not s:
            raise SpecError("symbol names must be nonempty strings", f"/alphabet/{i}")
        if s in alphabet:
            raise SpecError(f"duplicate symbol {s!r}", f"/alphabet/{i}")
        alphabet.append(s)
    alphabet_t = tuple(alphabet)

    forbidden = _forbidden(data["forbidden"], dim, alphabet_t)
    windows = _vectors(data["windows"], dim, "/windows", positive=True)
    margin = _vectors(data["margin"], dim, "/margin")
    if (0,) * dim not in margin:
        raise SpecError("margin must contain the zero vector", "/margin")

    subgroup = None
    if data.get("subgroup") is not None:
        subgroup = tuple(_vector(r, dim, f"/subgroup/{i}")
                         for i, r in enumerate(_list(data["subgroup"], "/subgroup", nonempty=True)))
        try:
            SubgroupBasis(subgroup)
        except ShiftError as e:
            raise SpecError(str(e), "/subgroup") from None

    mixing = None
    if data.get("mixing_shape") is not None:
        mixing = _vectors(data["mixing_shape"], dim, "/mixing_shape")
        if (0,) * dim not in mixing:
            raise SpecError("mixing shape must contain the zero vector", "/mixing_shape")

    scale = DEFAULT_SCALE
    if data.get("scale") is not None:
        scale = _int(data["scale"], "/scale", minimum=1)

    widths = None
    if data.get("strip_widths") is not None:
        items = _list(data["strip_widths"], "/strip_widths", nonempty=True)
        widths = tuple(_int(w, f"/strip_widths/{i}", minimum=1) for i, w in enumerate(items))
        for i, w in enumerate(widths):
            if w > MAX_STRIP_WIDTH:
                raise SpecError(f"strip width must be <= {MAX_STRIP_WIDTH}", f"/strip_widths/{i}")

    spec = SystemSpec(name, dim, alphabet_t, forbidden, windows, margin,
                      subgroup, mixing, scale, widths)
    try:
        spec.sft()
    except ShiftError as e:
        raise SpecError(str(e), "/forbidden") from None
    return spec


def parse_system_spec(text: bytes | str) -> SystemSpec:
    """Parse UTF-8 JSON into a validated :class:`SystemSpec`."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise SpecError(f"not valid UTF-8: {e}", "") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"invalid JSON: {e}", "") from None
    return spec_from_dict(data)
