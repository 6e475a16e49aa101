"""Shifts of finite type over Z^d: patterns, local admissibility and language enumeration.

The true language of a Z^d SFT is not computable in general for d >= 2, so every
language query here takes an extension shape (the *margin*): we return the
restrictions to the window F of the locally admissible patterns on F + margin.
That set always contains the true language; ``LanguageSet.exact`` records when a
certification rule shows that it *is* the true language.

Counting and listing share one engine, a lexicographic sweep over the extended
window that keeps, per observed prefix, the set of still-relevant assignments of
the cells a later forbidden pattern can reach (a subset construction over the
hidden margin cells).
"""
from __future__ import annotations

import warnings
from collections import defaultdict
from dataclasses import dataclass
from operator import itemgetter
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    CapacityError,
    DimensionError,
    EmptySystemWarning,
    InternalError,
    InvalidPattern,
    InvalidShape,
)
from .lattice import FiniteSet, Point, add, folner_box, minkowski_extend, origin
from .linalg import perron_root

MAX_SYMBOLS = 255
DEFAULT_MAX_CELLS = 128
DEFAULT_MAX_PATTERNS = 1 << 20
DEFAULT_MAX_STATES = 1 << 20


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        syms = tuple(str(s) for s in self.symbols)
        object.__setattr__(self, "symbols", syms)
        if not 1 <= len(syms) <= MAX_SYMBOLS:
            raise InvalidPattern(f"alphabet size must be in 1..{MAX_SYMBOLS}, got {len(syms)}")
        if len(set(syms)) != len(syms):
            raise InvalidPattern(f"duplicate symbol names in {list(syms)}")

    def __len__(self):
        return len(self.symbols)

    def index(self, name: str) -> int:
        try:
            return self.symbols.index(str(name))
        except ValueError:
            raise InvalidPattern(f"symbol {name!r} not in alphabet {list(self.symbols)}") from None

    def name(self, i: int) -> str:
        return self.symbols[i]


@dataclass(frozen=True)
class Pattern:
    """A configuration on a finite support; ``values`` follows the support's lex order."""

    support: FiniteSet
    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) != len(self.support):
            raise InvalidPattern(f"{len(vals)} values for a support of {len(self.support)} points")

    @classmethod
    def from_mapping(cls, mapping: Mapping[Sequence[int], int]) -> Pattern:
        items = {tuple(p): v for p, v in mapping.items()}
        support = FiniteSet(items)
        return cls(support, tuple(items[p] for p in support))

    def as_dict(self) -> dict[Point, int]:
        return dict(zip(self.support.points, self.values))

    def value_at(self, p: Sequence[int]) -> int:
        return self.as_dict()[tuple(p)]

    def restrict(self, sub: FiniteSet) -> Pattern:
        d = self.as_dict()
        try:
            return Pattern(sub, tuple(d[p] for p in sub))
        except KeyError as e:
            raise InvalidPattern(f"point {e.args[0]} outside the pattern support") from None

    def translate(self, v: Sequence[int]) -> Pattern:
        # translation preserves lexicographic order
        return Pattern(self.support.translate(v), self.values)

    def normalized(self) -> Pattern:
        m = self.support.lexmin()
        return self.translate(tuple(-c for c in m))


class SftSpec:
    """Alphabet plus forbidden patterns, each translated so its lex-minimum is the origin."""

    def __init__(self, dim: int, alphabet: Alphabet | Sequence[str], forbidden: Iterable[Pattern] = ()):
        if dim < 1:
            raise DimensionError(f"dimension must be >= 1, got {dim}")
        self.dim = dim
        self.alphabet = alphabet if isinstance(alphabet, Alphabet) else Alphabet(tuple(alphabet))
        k = len(self.alphabet)
        norm = set()
        for f in forbidden:
            if f.support.dim != dim:
                raise DimensionError(f"forbidden pattern in Z^{f.support.dim}, system in Z^{dim}")
            if any(not 0 <= v < k for v in f.values):
                raise InvalidPattern(f"forbidden pattern uses a symbol outside 0..{k - 1}")
            norm.add(f.normalized())
        self.forbidden: tuple[Pattern, ...] = tuple(
            sorted(norm, key=lambda p: (len(p.support), p.support.points, p.values)))
        self._debruijn = None

    @classmethod
    def from_rules(cls, dim: int, symbols: Sequence[str],
                   rules: Iterable[tuple[Sequence[Sequence[int]], Sequence[str]]]) -> SftSpec:
        """Build from ``(offsets, symbol names)`` pairs."""
        alphabet = Alphabet(tuple(symbols))
        pats = []
        for offsets, names in rules:
            if len(offsets) != len(names):
                raise InvalidPattern("offsets and symbols differ in length")
            pats.append(Pattern.from_mapping(
                {tuple(o): alphabet.index(n) for o, n in zip(offsets, names)}))
        return cls(dim, alphabet, pats)

    def __eq__(self, other):
        return (isinstance(other, SftSpec) and self.dim == other.dim
                and self.alphabet == other.alphabet and self.forbidden == other.forbidden)

    def __hash__(self):
        return hash((self.dim, self.alphabet, self.forbidden))

    def __repr__(self):
        return f"SftSpec(dim={self.dim}, alphabet={list(self.alphabet.symbols)}, forbidden={len(self.forbidden)})"

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_debruijn"] = None
        return state

    @property
    def is_full_shift(self) -> bool:
        return not self.forbidden

    @property
    def window_shape(self) -> FiniteSet | None:
        if not self.forbidden:
            return None
        pts = set()
        for f in self.forbidden:
            pts |= f.support.members
        return FiniteSet(pts)

    @property
    def extents(self) -> Point:
        """Per-coordinate span of the forbidden supports (1 where nothing interacts)."""
        if not self.forbidden:
            return (1,) * self.dim
        return tuple(max(f.support.extents()[i] for f in self.forbidden) for i in range(self.dim))

    @property
    def interaction_diameter(self) -> int:
        return max(self.extents)

    @property
    def safe_symbols(self) -> tuple[int, ...]:
        """Symbols occurring in no forbidden pattern.

        Filling the complement of a locally admissible pattern with such a symbol
        never creates a forbidden occurrence, so the pattern is globally admissible.
        """
        used = set()
        for f in self.forbidden:
            used.update(f.values)
        return tuple(a for a in range(len(self.alphabet)) if a not in used)


@dataclass(frozen=True)
class LanguageSet:
    window: FiniteSet
    margin: FiniteSet
    words: tuple[tuple[int, ...], ...]
    exact: bool

    def __len__(self):
        return len(self.words)

    @property
    def count(self) -> int:
        return len(self.words)

    @property
    def patterns(self) -> tuple[Pattern, ...]:
        return tuple(Pattern(self.window, w) for w in self.words)

    def __iter__(self) -> Iterator[Pattern]:
        return iter(self.patterns)

    def __contains__(self, item):
        if isinstance(item, Pattern):
            if item.support != self.window:
                return False
            item = item.values
        return tuple(item) in self._wordset()

    def _wordset(self) -> frozenset:
        ws = self.__dict__.get("_ws")
        if ws is None:
            ws = frozenset(self.words)
            object.__setattr__(self, "_ws", ws)
        return ws


# ---------------------------------------------------------------------------
# local admissibility


def _occurrences(sft: SftSpec, index: Mapping[Point, int]):
    """All forbidden translates fitting inside the cells of ``index``.

    Yields ``(cell indices, symbols)`` sorted by cell index.
    """
    for f in sft.forbidden:
        offs = f.support.points
        for v in index:
            idx = []
            for s in offs:
                j = index.get(add(v, s))
                if j is None:
                    break
                idx.append(j)
            else:
                pairs = sorted(zip(idx, f.values))
                yield tuple(i for i, _ in pairs), tuple(a for _, a in pairs)


def locally_admissible(p: Pattern, sft: SftSpec) -> bool:
    """True iff no translate of a forbidden pattern fitting inside p's support matches p."""
    if p.support.dim != sft.dim:
        raise DimensionError(f"pattern in Z^{p.support.dim}, system in Z^{sft.dim}")
    k = len(sft.alphabet)
    if any(not 0 <= v < k for v in p.values):
        raise InvalidPattern(f"pattern uses a symbol outside 0..{k - 1}")
    vals = p.values
    for idx, syms in _occurrences(sft, p.support.index_map()):
        if all(vals[i] == a for i, a in zip(idx, syms)):
            return False
    return True


# ---------------------------------------------------------------------------
# the sweep engine


def _getter(slots: Sequence[int]):
    if len(slots) == 0:
        return lambda t: ()
    if len(slots) == 1:
        k = slots[0]
        return lambda t: (t[k],)
    return itemgetter(*slots)


class _Step:
    __slots__ = ("observed", "domain", "checks", "keep")

    def __init__(self, observed, domain, checks, keep):
        self.observed = observed
        self.domain = domain
        self.checks = checks
        self.keep = keep

    def ok(self, t, a) -> bool:
        for get, target in self.checks.get(a, ()):
            if get(t) == target:
                return False
        return True


class _Sweep:
    """Lexicographic sweep over ``cells``; symbols on ``observed`` cells are recorded,
    the rest are existentially quantified."""

    def __init__(self, sft: SftSpec, cells: FiniteSet, observed: FiniteSet | None = None,
                 domains: Mapping[Point, Sequence[int]] | None = None):
        self.cells = cells
        index = cells.index_map()
        n = len(cells)
        obs = cells.members if observed is None else observed.members
        if not obs <= cells.members:
            raise InternalError("observed cells must lie inside the swept window")
        self.hidden = len(obs) < n
        alphabet = tuple(range(len(sft.alphabet)))
        dom = [alphabet] * n
        if domains:
            for p, allowed in domains.items():
                dom[index[tuple(p)]] = tuple(allowed)
        occ = list(_occurrences(sft, index))
        need = [-1] * n
        ending: list[list] = [[] for _ in range(n)]
        for idx, syms in occ:
            last = idx[-1]
            ending[last].append((idx, syms))
            for j in idx:
                need[j] = max(need[j], last)
        steps = []
        frontier: list[int] = []
        for i, p in enumerate(cells.points):
            slot = {j: k for k, j in enumerate(frontier)}
            checks = defaultdict(list)
            banned = set()
            for idx, syms in ending[i]:
                a = syms[-1]
                others = [(slot[j], s) for j, s in zip(idx[:-1], syms[:-1])]
                if not others:
                    banned.add(a)
                    continue
                slots = tuple(k for k, _ in others)
                target = tuple(s for _, s in others)
                if len(slots) == 1:
                    checks[a].append((itemgetter(slots[0]), target[0]))
                else:
                    checks[a].append((itemgetter(*slots), target))
            d = tuple(a for a in dom[i] if a not in banned)
            ext = frontier + [i]
            new_frontier = [j for j in ext if need[j] > i]
            keep = _getter([k for k, j in enumerate(ext) if need[j] > i])
            steps.append(_Step(p in obs, d, dict(checks), keep))
            frontier = new_frontier
        self.steps = steps

    def count(self, max_states: int = DEFAULT_MAX_STATES) -> int:
        if not self.hidden:
            layer: dict = {(): 1}
            for st in self.steps:
                new: dict = defaultdict(int)
                for t, c in layer.items():
                    for a in st.domain:
                        if st.ok(t, a):
                            new[st.keep(t + (a,))] += c
                layer = new
                if len(layer) > max_states:
                    raise CapacityError(f"sweep exceeded {max_states} frontier states")
            return sum(layer.values())
        layer = {frozenset([()]): 1}
        for st in self.steps:
            new = defaultdict(int)
            for S, c in layer.items():
                if st.observed:
                    for a in st.domain:
                        S2 = frozenset(st.keep(t + (a,)) for t in S if st.ok(t, a))
                        if S2:
                            new[S2] += c
                else:
                    S2 = frozenset(st.keep(t + (a,)) for t in S for a in st.domain if st.ok(t, a))
                    if S2:
                        new[S2] += c
            layer = new
            if len(layer) > max_states:
                raise CapacityError(f"sweep exceeded {max_states} frontier states")
        return sum(layer.values())

    def words(self, max_patterns: int = DEFAULT_MAX_PATTERNS,
              max_states: int = DEFAULT_MAX_STATES) -> list[tuple[int, ...]]:
        layer: dict = {frozenset([()]): [()]}
        for st in self.steps:
            new: dict = defaultdict(list)
            total = 0
            for S, prefixes in layer.items():
                if st.observed:
                    for a in st.domain:
                        S2 = frozenset(st.keep(t + (a,)) for t in S if st.ok(t, a))
                        if S2:
                            new[S2].extend(w + (a,) for w in prefixes)
                            total += len(prefixes)
                else:
                    S2 = frozenset(st.keep(t + (a,)) for t in S for a in st.domain if st.ok(t, a))
                    if S2:
                        new[S2].extend(prefixes)
                        total += len(prefixes)
            layer = new
            if total > max_patterns:
                raise CapacityError(f"more than {max_patterns} patterns")
            if len(layer) > max_states:
                raise CapacityError(f"sweep exceeded {max_states} frontier states")
        out = [w for ws in layer.values() for w in ws]
        out.sort()
        return out



def _check_capacity(cells: FiniteSet, max_cells: int | None, what: FiniteSet):
    limit = DEFAULT_MAX_CELLS if max_cells is None else max_cells
    if len(cells) > limit:
        raise CapacityError(
            f"window {what!r} extends to {len(cells)} cells, over the limit of {limit}")


def count_restricted(sft: SftSpec, window: FiniteSet, extended: FiniteSet, *,
                     domains=None, max_cells: int | None = None) -> int:
    """Number of distinct restrictions to ``window`` of locally admissible patterns on ``extended``."""
    _check_capacity(extended, max_cells, window)
    return _Sweep(sft, extended, window, domains).count()


def words_restricted(sft: SftSpec, window: FiniteSet, extended: FiniteSet, *,
                     domains=None, max_cells: int | None = None,
                     max_patterns: int | None = None) -> list[tuple[int, ...]]:
    _check_capacity(extended, max_cells, window)
    return _Sweep(sft, extended, window, domains).words(
        DEFAULT_MAX_PATTERNS if max_patterns is None else max_patterns)


def _extension(sft: SftSpec, F: FiniteSet, margin: FiniteSet) -> FiniteSet:
    if F.dim != sft.dim or margin.dim != sft.dim:
        raise DimensionError(
            f"window in Z^{F.dim}, margin in Z^{margin.dim}, system in Z^{sft.dim}")
    if (0,) * sft.dim not in margin:
        raise InvalidShape("margin must contain the origin")
    return minkowski_extend(F, margin)


def enumerate_language(sft: SftSpec, F: FiniteSet, margin: FiniteSet, *,
                       max_cells: int | None = None,
                       max_patterns: int | None = None) -> LanguageSet:
    """Restrictions to F of the locally admissible patterns on F + margin, sorted."""
    E = _extension(sft, F, margin)
    words = words_restricted(sft, F, E, max_cells=max_cells, max_patterns=max_patterns)
    if not words:
        warnings.warn(f"no locally admissible pattern on {E!r}", EmptySystemWarning, stacklevel=2)
    return LanguageSet(F, margin, tuple(words), language_is_exact(sft, F, E))


def count_language(sft: SftSpec, F: FiniteSet, margin: FiniteSet, *,
                   max_cells: int | None = None) -> int:
    """``len(enumerate_language(...))`` without materializing the patterns."""
    E = _extension(sft, F, margin)
    return count_restricted(sft, F, E, max_cells=max_cells)


def language_is_exact(sft: SftSpec, F: FiniteSet, E: FiniteSet) -> bool:
    """Whether the margin language of F computed on E is certifiably the true language."""
    if sft.is_full_shift or sft.safe_symbols:
        return True
    if sft.dim != 1:
        return False
    lo, hi = F.points[0][0], F.points[-1][0]
    if any((x,) not in E for x in range(lo, hi + 1)):
        return False
    a, b = lo, hi
    while (a - 1,) in E:
        a -= 1
    while (b + 1,) in E:
        b += 1
    L = sft.interaction_diameter
    states, A = _de_bruijn(sft)
    essential = bool(np.all(A.sum(axis=1) > 0) and np.all(A.sum(axis=0) > 0))
    if essential and b - a + 1 >= L - 1:
        return True
    n = len(states)
    return lo - a >= n + L and b - hi >= n + L


# ---------------------------------------------------------------------------
# one-dimensional transfer matrices


def _de_bruijn(sft: SftSpec):
    if sft._debruijn is not None:
        return sft._debruijn
    if sft.dim != 1:
        raise DimensionError("de Bruijn transfer matrix needs a one-dimensional system")
    L = sft.interaction_diameter
    zero = origin(1)
    if L == 1:
        states = [()]
        allowed = sum(1 for a in range(len(sft.alphabet))
                      if locally_admissible(Pattern(zero, (a,)), sft))
        A = np.array([[allowed]], dtype=np.int64)
    else:
        states = list(words_restricted(sft, folner_box((L - 1,)), folner_box((L - 1,))))
        pos = {s: i for i, s in enumerate(states)}
        A = np.zeros((len(states), len(states)), dtype=np.int64)
        for w in words_restricted(sft, folner_box((L,)), folner_box((L,))):
            A[pos[w[:-1]], pos[w[1:]]] += 1
    sft._debruijn = (states, A)
    return sft._debruijn


def transfer_matrix_1d(sft: SftSpec) -> tuple[np.ndarray, float]:
    """Transfer matrix on locally admissible words of length L-1 and its spectral radius."""
    if sft.dim != 1:
        raise DimensionError(f"transfer_matrix_1d needs dim 1, got {sft.dim}")
    _, A = _de_bruijn(sft)
    return A.copy(), perron_root(A)


def de_bruijn_states(sft: SftSpec) -> list[tuple[int, ...]]:
    return list(_de_bruijn(sft)[0])
