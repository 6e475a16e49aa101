"""Projection onto a subgroup H and the product system built from it.

X_H is never materialized as its own shift: it is only queried through its
languages on finite windows of H, written in sub-coordinates (H = Z^r via the
basis rows). The product system assembles one independent X_H point per coset
of H; on a finite window its language is the product of the projected languages
of the coset pieces.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .entropy import (
    EntropyBound,
    EntropyReport,
    TransferBound,
    entropy_report,
    language_strip_bound,
    log_ratio,
)
from .errors import CapacityError, DimensionError, IncompleteFamily, InternalError
from .lattice import (
    FiniteSet,
    Point,
    SubgroupBasis,
    TransversalSection,
    add,
    coset_decompose,
    minkowski_extend,
    sub,
)
from .shiftspace import (
    DEFAULT_MAX_PATTERNS,
    LanguageSet,
    Pattern,
    SftSpec,
    count_language,
    count_restricted,
    enumerate_language,
    language_is_exact,
    words_restricted,
)

DEFAULT_PROJECTED_STRIP_WIDTHS = (1, 2, 3)


@dataclass(frozen=True)
class ProjectedWindow:
    sub_points: FiniteSet
    embedding: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, basis: SubgroupBasis, sub_points: FiniteSet) -> ProjectedWindow:
        if sub_points.dim != basis.rank:
            raise DimensionError(
                f"sub-window lives in Z^{sub_points.dim}, subgroup has rank {basis.rank}")
        return cls(sub_points, basis.rows)

    def embedded(self) -> FiniteSet:
        return SubgroupBasis(self.embedding).embed_set(self.sub_points)

    def order(self) -> list[int]:
        """Position in the embedded window of each sub point (sub-window order)."""
        basis = SubgroupBasis(self.embedding)
        idx = self.embedded().index_map()
        return [idx[basis.embed(c)] for c in self.sub_points]


@dataclass(frozen=True)
class CosetFamily:
    """Patterns of X_H (in sub-coordinates) keyed by coset representative."""

    entries: Mapping[Point, Pattern] = field(hash=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", {tuple(k): v for k, v in self.entries.items()})


def _check_margin(basis: SubgroupBasis, margin: FiniteSet):
    if margin.dim != basis.dim:
        raise DimensionError(f"margin in Z^{margin.dim}, subgroup in Z^{basis.dim}")


def project_language(sft: SftSpec, H: SubgroupBasis, F_sub: FiniteSet, margin: FiniteSet, *,
                     max_cells: int | None = None) -> LanguageSet:
    """Margin language of X_H on a window of H given in sub-coordinates."""
    if H.dim != sft.dim:
        raise DimensionError(f"subgroup in Z^{H.dim}, system in Z^{sft.dim}")
    _check_margin(H, margin)
    pw = ProjectedWindow.of(H, F_sub)
    lang = enumerate_language(sft, pw.embedded(), margin, max_cells=max_cells)
    perm = pw.order()
    words = sorted(tuple(w[i] for i in perm) for w in lang.words)
    return LanguageSet(F_sub, margin, tuple(words), lang.exact)


def project_count(sft: SftSpec, H: SubgroupBasis, F_sub: FiniteSet, margin: FiniteSet, *,
                  max_cells: int | None = None) -> int:
    _check_margin(H, margin)
    emb = ProjectedWindow.of(H, F_sub).embedded()
    return count_restricted(sft, emb, minkowski_extend(emb, margin), max_cells=max_cells)


def _projected_exact(sft, H, F_sub, margin) -> bool:
    emb = ProjectedWindow.of(H, F_sub).embedded()
    return language_is_exact(sft, emb, minkowski_extend(emb, margin))


def projectional_entropy(sft: SftSpec, H: SubgroupBasis, windows_sub: Sequence[FiniteSet],
                         margin: FiniteSet, *, strip_widths: Sequence[int] | None = None,
                         max_cells: int | None = None) -> EntropyReport:
    """Upper bounds on the entropy of X_H as a Z^r shift.

    For r = 1 a de Bruijn graph is built on the projected words of the longest
    window. Its root bounds h(X_H) from above and is reported as the exact value
    when the projected languages are certified exact.
    """
    if not windows_sub:
        raise ValueError("need at least one window")
    bounds = []
    for F_sub in windows_sub:
        count = project_count(sft, H, F_sub, margin, max_cells=max_cells)
        bounds.append(EntropyBound(F_sub, margin, count, log_ratio(count, len(F_sub)),
                                   _projected_exact(sft, H, F_sub, margin)))
    lang = lambda W: project_language(sft, H, W, margin, max_cells=max_cells)  # noqa: E731
    transfer: list[TransferBound] = []
    exact = None
    if H.rank == 1:
        longest = max(max(F.extents()) for F in windows_sub)
        width = max(longest - 1, 1)
        db = language_strip_bound(lang, 1, width)
        transfer.append(db)
        certified = all(b.exact for b in bounds) and lang(FiniteSet([(i,) for i in range(width + 1)])).exact
        if certified:
            exact = db.value
    elif H.rank == 2:
        for m in (DEFAULT_PROJECTED_STRIP_WIDTHS if strip_widths is None else strip_widths):
            transfer.append(language_strip_bound(lang, 2, m))
    if sft.is_full_shift:
        exact = math.log(len(sft.alphabet))
    best = min([b.value for b in bounds] + [t.value for t in transfer])
    return EntropyReport(tuple(bounds), best, exact, tuple(transfer))


def assemble_phi(family: CosetFamily, section: TransversalSection, F: FiniteSet) -> Pattern:
    """Restriction to F of the configuration assembled from one X_H pattern per coset:
    for g = h + m with m = rep(g), the value at g is the family entry for m at h."""
    basis = section.basis
    if F.dim != basis.dim:
        raise DimensionError(f"window in Z^{F.dim}, subgroup in Z^{basis.dim}")
    lookup: dict[Point, dict] = {}
    vals = []
    for g in F:
        m = section.rep(g)
        if m not in lookup:
            entry = family.entries.get(m)
            if entry is None:
                raise IncompleteFamily(f"no entry for the coset of {g} (representative {m})")
            lookup[m] = entry.as_dict()
        c = basis.to_sub(sub(g, m))
        try:
            vals.append(lookup[m][c])
        except KeyError:
            raise IncompleteFamily(
                f"entry for representative {m} does not cover {g} (sub-coordinates {c})") from None
    return Pattern(F, tuple(vals))


def _pieces(H: SubgroupBasis, F: FiniteSet, section: TransversalSection):
    """Coset pieces of F as (sub-window, positions in F of its points)."""
    fidx = F.index_map()
    out = []
    for m, part in coset_decompose(F, section):
        try:
            F_sub = FiniteSet(H.to_sub(sub(p, m)) for p in part)
        except InternalError as e:
            raise InternalError(f"coset piece at {m} is not inside H after translation: {e}") from None
        out.append((F_sub, [fidx[add(H.embed(c), m)] for c in F_sub]))
    return out


def product_language(sft: SftSpec, H: SubgroupBasis, F: FiniteSet, margin: FiniteSet, *,
                     section: TransversalSection | None = None, max_cells: int | None = None,
                     max_patterns: int | None = None) -> LanguageSet:
    """Margin language of the product system on F: all combinations of per-piece
    projected patterns, one factor per coset met by F."""
    section = section or TransversalSection(H)
    factors = []
    exact = True
    total = 1
    for F_sub, pos in _pieces(H, F, section):
        L = project_language(sft, H, F_sub, margin, max_cells=max_cells)
        exact = exact and L.exact
        total *= len(L)
        factors.append((pos, L.words))
    limit = DEFAULT_MAX_PATTERNS if max_patterns is None else max_patterns
    if total > limit:
        raise CapacityError(f"product language on {F!r} has {total} patterns, over {limit}")
    words = []
    n = len(F)
    for combo in itertools.product(*(ws for _, ws in factors)):
        w = [0] * n
        for (pos, _), word in zip(factors, combo):
            for i, v in zip(pos, word):
                w[i] = v
        words.append(tuple(w))
    words.sort()
    return LanguageSet(F, margin, tuple(words), exact)


def product_count(sft: SftSpec, H: SubgroupBasis, F: FiniteSet, margin: FiniteSet, *,
                  section: TransversalSection | None = None, max_cells: int | None = None) -> int:
    section = section or TransversalSection(H)
    total = 1
    for F_sub, _ in _pieces(H, F, section):
        total *= project_count(sft, H, F_sub, margin, max_cells=max_cells)
    return total


@dataclass(frozen=True)
class WindowComparison:
    """X against the product system on one window.

    ``mode`` is ``"patterns"`` when both languages were listed (``violations``
    counts X patterns outside the product language) or ``"pieces"`` when they
    were too large to list. In piece mode inclusion is decided per coset piece
    and ``violations`` counts piece restrictions of X missing from the piece's
    projected language; no strict-inclusion witness is produced.
    """

    window: FiniteSet
    x_count: int
    product_count: int
    included: bool
    equal: bool
    violations: int
    witness: Pattern | None
    mode: str = "patterns"


@dataclass(frozen=True)
class ComparisonReport:
    subgroup: SubgroupBasis
    margin: FiniteSet
    windows: tuple[WindowComparison, ...]
    x_entropy: EntropyReport
    projected_entropy: EntropyReport

    @property
    def all_included(self) -> bool:
        return all(w.included for w in self.windows)

    @property
    def all_equal(self) -> bool:
        return all(w.equal for w in self.windows)

    @property
    def strict_witness(self) -> WindowComparison | None:
        return next((w for w in self.windows if w.witness is not None), None)

    @property
    def entropy_gap(self) -> float:
        """best upper bound on h(X_H) minus best upper bound on h(X) (not certified)."""
        return self.projected_entropy.best_upper - self.x_entropy.best_upper

    @property
    def certified_gap(self) -> float | None:
        """exact h(X_H) minus an upper bound on h(X): a certified lower bound on the gap."""
        if self.projected_entropy.exact_value is None:
            return None
        return self.projected_entropy.exact_value - self.x_entropy.best_upper


def sub_windows(windows: Sequence[FiniteSet], rank: int) -> list[FiniteSet]:
    """Boxes in Z^rank using the leading sides of each window (order kept, duplicates dropped)."""
    from .lattice import folner_box

    out: list[FiniteSet] = []
    for F in windows:
        sides = F.extents()
        sides = sides[:rank] + (1,) * max(0, rank - len(sides))
        box = folner_box(sides)
        if box not in out:
            out.append(box)
    return out


def _compare_pieces(sft, H, F, margin, section, max_cells) -> WindowComparison:
    E = minkowski_extend(F, margin)
    x_count = count_restricted(sft, F, E, max_cells=max_cells)
    p_count = 1
    violations = 0
    for m, part in coset_decompose(F, section):
        F_sub = FiniteSet(H.to_sub(sub(p, m)) for p in part)
        L = project_language(sft, H, F_sub, margin, max_cells=max_cells)
        p_count *= len(L)
        # sub-window order -> position within ``part``
        pidx = part.index_map()
        perm = [pidx[add(H.embed(c), m)] for c in F_sub]
        allowed = L._wordset()
        for w in words_restricted(sft, part, E, max_cells=max_cells):
            if tuple(w[i] for i in perm) not in allowed:
                violations += 1
    included = violations == 0
    return WindowComparison(F, x_count, p_count, included, included and x_count == p_count,
                            violations, None, "pieces")


def compare_window(sft: SftSpec, H: SubgroupBasis, F: FiniteSet, margin: FiniteSet, *,
                   section: TransversalSection | None = None,
                   max_cells: int | None = None,
                   max_patterns: int | None = None) -> WindowComparison:
    section = section or TransversalSection(H)
    limit = DEFAULT_MAX_PATTERNS if max_patterns is None else max_patterns
    if (product_count(sft, H, F, margin, section=section, max_cells=max_cells) > limit
            or count_language(sft, F, margin, max_cells=max_cells) > limit):
        return _compare_pieces(sft, H, F, margin, section, max_cells)
    xl = enumerate_language(sft, F, margin, max_cells=max_cells)
    pl = product_language(sft, H, F, margin, section=section, max_cells=max_cells)
    pset = pl._wordset()
    violations = sum(1 for w in xl.words if w not in pset)
    xset = xl._wordset()
    witness = next((w for w in pl.words if w not in xset), None)
    return WindowComparison(
        F, len(xl), len(pl), violations == 0, violations == 0 and len(xl) == len(pl), violations,
        None if witness is None else Pattern(F, witness))


def compare_systems(sft: SftSpec, H: SubgroupBasis, windows: Sequence[FiniteSet],
                    margin: FiniteSet, *, windows_sub: Sequence[FiniteSet] | None = None,
                    strip_widths: Sequence[int] | None = None,
                    max_cells: int | None = None) -> ComparisonReport:
    """Inclusion and equality of X and the product system on each window, plus entropies."""
    if not windows:
        raise ValueError("need at least one window")
    per_window = tuple(compare_window(sft, H, F, margin, max_cells=max_cells) for F in windows)
    x_report = entropy_report(sft, windows, margin, strip_widths=strip_widths, max_cells=max_cells)
    subs = list(windows_sub) if windows_sub is not None else sub_windows(windows, H.rank)
    proj = projectional_entropy(sft, H, subs, margin, max_cells=max_cells)
    return ComparisonReport(H, margin, per_window, x_report, proj)
