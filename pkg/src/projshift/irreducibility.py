"""Finite-scale checks of D-strong irreducibility, for X and for its product system.

For every box pair (B1 at the origin, B2 translated) with (D + B1) disjoint from
B2, every pattern on B1 must glue with every pattern on B2. Since the joint
language restricted to B1 (resp. B2) is contained in the language of B1 (resp.
B2), all pairs glue iff |L(B1 u B2)| = |L(B1)| * |L(B2)|, so a pair of boxes is
settled by three counts; patterns are only listed to extract a witness.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator

from .errors import CapacityError, InvalidShape
from .lattice import (
    FiniteSet,
    SubgroupBasis,
    TransversalSection,
    add,
    coset_decompose,
    folner_box,
    minkowski_extend,
    sub,
)
from .projection import product_language, project_count
from .shiftspace import (
    Pattern,
    SftSpec,
    count_restricted,
    enumerate_language,
    words_restricted,
)

PASS = "pass_at_scale"
COUNTEREXAMPLE = "counterexample"

CAVEAT = ("pass_at_scale is evidence, not proof: only box pairs up to the given scale are tested. "
          "Margin languages are supersets of the true ones, so spurious patterns make passing "
          "harder; a counterexample built from exact languages is a genuine refutation.")


@dataclass(frozen=True)
class MixingShape:
    points: FiniteSet

    def __post_init__(self):
        if (0,) * self.points.dim not in self.points:
            raise InvalidShape("mixing shape must contain the origin")


@dataclass(frozen=True)
class GluingWitness:
    b1: FiniteSet
    b2: FiniteSet
    pattern1: Pattern
    pattern2: Pattern


@dataclass(frozen=True)
class IrreducibilityVerdict:
    status: str
    scale: int
    pairs_checked: int
    witness: GluingWitness | None = None
    exact_witness: bool = False
    note: str = CAVEAT

    def __post_init__(self):
        if (self.witness is None) != (self.status == PASS):
            raise ValueError("witness must be present exactly for counterexamples")

    @property
    def passed(self) -> bool:
        return self.status == PASS


def box_pairs(dim: int, scale: int, D: MixingShape) -> Iterator[tuple[FiniteSet, FiniteSet]]:
    """Box pairs in canonical order: B1 sides, then B2 sides, then B2 offset (all lex)."""
    if scale < 1:
        raise ValueError(f"scale must be >= 1, got {scale}")
    sides = list(itertools.product(range(1, scale + 1), repeat=dim))
    offsets = list(itertools.product(range(-2 * scale, 2 * scale + 1), repeat=dim))
    for s1 in sides:
        b1 = folner_box(s1)
        grown = minkowski_extend(b1, D.points).members
        for s2 in sides:
            base = folner_box(s2)
            for off in offsets:
                b2 = base.translate(off)
                if grown.isdisjoint(b2.members):
                    yield b1, b2


def _normal_key(F: FiniteSet) -> FiniteSet:
    return F.normalized()[0]


def _first_missing(words1, words2, joint: set, b1, b2, union) -> GluingWitness:
    i1 = [union.index_map()[p] for p in b1]
    i2 = [union.index_map()[p] for p in b2]
    seen = {(tuple(w[i] for i in i1), tuple(w[i] for i in i2)) for w in joint}
    for p in words1:
        for q in words2:
            if (p, q) not in seen:
                return GluingWitness(b1, b2, Pattern(b1, p), Pattern(b2, q))
    raise AssertionError("counts disagree but every pair glues")


def _safe_fill_glues(sft: SftSpec, b1: FiniteSet, b2: FiniteSet) -> bool:
    """Sufficient condition: a safe symbol exists and no forbidden translate inside
    B1 u B2 touches both boxes, so filling everything else with it glues any pair."""
    if not sft.safe_symbols:
        return False
    m1, m2 = b1.members, b2.members
    both = m1 | m2
    for f in sft.forbidden:
        offs = f.support.points
        for v in both:
            pts = [add(v, s) for s in offs]
            if all(p in both for p in pts) and any(p in m1 for p in pts) and any(p in m2 for p in pts):
                return False
    return True


def _run(pairs, glue: Callable[[FiniteSet, FiniteSet], GluingWitness | None], scale: int,
         exact: Callable[[GluingWitness], bool]) -> IrreducibilityVerdict:
    checked = 0
    for b1, b2 in pairs:
        checked += 1
        w = glue(b1, b2)
        if w is not None:
            return IrreducibilityVerdict(COUNTEREXAMPLE, scale, checked, w, exact(w))
    return IrreducibilityVerdict(PASS, scale, checked)


def check_strong_irreducibility(sft: SftSpec, D: MixingShape, scale: int, margin: FiniteSet, *,
                                max_cells: int | None = None) -> IrreducibilityVerdict:
    """Gluing test for X: a pair glues iff some locally admissible pattern on the
    margin-extended bounding box of B1 u B2 restricts to both."""
    cache: dict[FiniteSet, int] = {}

    def lang_count(F):
        key = _normal_key(F)
        if key not in cache:
            cache[key] = count_restricted(sft, key, minkowski_extend(key, margin), max_cells=max_cells)
        return cache[key]

    def glue(b1, b2):
        if _safe_fill_glues(sft, b1, b2):
            return None
        union = b1.union(b2)
        ext = minkowski_extend(union.box_hull(), margin)
        try:
            joint = count_restricted(sft, union, ext, max_cells=max_cells)
        except CapacityError as e:
            raise CapacityError(f"gluing B1={b1!r}, B2={b2!r}: {e}") from None
        if joint == lang_count(b1) * lang_count(b2):
            return None
        w1 = enumerate_language(sft, b1, margin, max_cells=max_cells).words
        w2 = enumerate_language(sft, b2, margin, max_cells=max_cells).words
        jw = words_restricted(sft, union, ext, max_cells=max_cells)
        return _first_missing(w1, w2, jw, b1, b2, union)

    def exact(w):
        return (enumerate_language(sft, w.b1, margin, max_cells=max_cells).exact
                and enumerate_language(sft, w.b2, margin, max_cells=max_cells).exact)

    if D.points.dim != sft.dim:
        raise InvalidShape(f"mixing shape in Z^{D.points.dim}, system in Z^{sft.dim}")
    return _run(box_pairs(sft.dim, scale, D), glue, scale, exact)


def check_product_irreducibility(sft: SftSpec, H: SubgroupBasis, D: MixingShape, scale: int,
                                 margin: FiniteSet, *,
                                 max_cells: int | None = None) -> IrreducibilityVerdict:
    """The same gluing test with the product-system language in place of X's.

    The product language factors over cosets, so a pair glues iff for every coset
    met by both boxes the projected count of the joint piece equals the product
    of the projected counts of the two pieces.
    """
    section = TransversalSection(H)
    cache: dict[FiniteSet, int] = {}

    def piece_count(m, part):
        F_sub = FiniteSet(H.to_sub(sub(p, m)) for p in part)
        key = _normal_key(F_sub)
        if key not in cache:
            cache[key] = project_count(sft, H, key, margin, max_cells=max_cells)
        return cache[key]

    def glue(b1, b2):
        p1 = dict(coset_decompose(b1, section))
        p2 = dict(coset_decompose(b2, section))
        for m in sorted(p1.keys() & p2.keys()):
            joint = piece_count(m, p1[m].union(p2[m]))
            if joint != piece_count(m, p1[m]) * piece_count(m, p2[m]):
                break
        else:
            return None
        union = b1.union(b2)
        w1 = product_language(sft, H, b1, margin, max_cells=max_cells).words
        w2 = product_language(sft, H, b2, margin, max_cells=max_cells).words
        jw = product_language(sft, H, union, margin, max_cells=max_cells).words
        return _first_missing(w1, w2, jw, b1, b2, union)

    def exact(w):
        return (product_language(sft, H, w.b1, margin, max_cells=max_cells).exact
                and product_language(sft, H, w.b2, margin, max_cells=max_cells).exact)

    if D.points.dim != sft.dim:
        raise InvalidShape(f"mixing shape in Z^{D.points.dim}, system in Z^{sft.dim}")
    return _run(box_pairs(sft.dim, scale, D), glue, scale, exact)
