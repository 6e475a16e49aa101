"""Integer lattice machinery: points, finite windows, subgroups and transversals of Z^d.

Everything here is exact integer arithmetic. Points are plain tuples of ints;
windows are :class:`FiniteSet` objects whose iteration order is always
lexicographic so that two equal sets serialize identically.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import DimensionError, InternalError, InvalidShape, InvalidSubgroup, InvalidWindow

Point = tuple[int, ...]


class ZdGroup:
    """The group Z^d written multiplicatively, so that code reading ``mul(d, b)``
    mirrors the group-product notation ``DB``. Only abelian Z^d is provided."""

    def __init__(self, dim: int):
        if dim < 1:
            raise DimensionError(f"dimension must be >= 1, got {dim}")
        self.dim = dim

    def identity(self) -> Point:
        return (0,) * self.dim

    def mul(self, a: Point, b: Point) -> Point:
        return tuple(x + y for x, y in zip(a, b))

    def inv(self, a: Point) -> Point:
        return tuple(-x for x in a)

    def __eq__(self, other):
        return isinstance(other, ZdGroup) and other.dim == self.dim

    def __hash__(self):
        return hash(("Zd", self.dim))


def add(a: Point, b: Point) -> Point:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Point, b: Point) -> Point:
    return tuple(x - y for x, y in zip(a, b))


class FiniteSet:
    """A nonempty finite subset of Z^d, stored in lexicographic order."""

    __slots__ = ("points", "dim", "_members", "_hash")

    def __init__(self, points: Iterable[Sequence[int]], dim: int | None = None):
        pts = sorted({tuple(int(c) for c in p) for p in points})
        if not pts:
            raise InvalidWindow("a finite set must be nonempty")
        dims = {len(p) for p in pts}
        if len(dims) != 1:
            raise DimensionError(f"points of mixed dimension {sorted(dims)}")
        (d,) = dims
        if dim is not None and d != dim:
            raise DimensionError(f"expected dimension {dim}, got {d}")
        if d < 1:
            raise DimensionError("dimension must be >= 1")
        self.points: tuple[Point, ...] = tuple(pts)
        self.dim = d
        self._members = frozenset(pts)
        self._hash = hash(self.points)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __contains__(self, p):
        return tuple(p) in self._members

    def __eq__(self, other):
        return isinstance(other, FiniteSet) and self.points == other.points

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if len(self.points) <= 8:
            return f"FiniteSet({list(self.points)})"
        return f"FiniteSet(<{len(self.points)} points in Z^{self.dim}>)"

    @property
    def members(self) -> frozenset:
        return self._members

    def index_map(self) -> dict[Point, int]:
        return {p: i for i, p in enumerate(self.points)}

    def issubset(self, other: FiniteSet) -> bool:
        return self._members <= other._members

    def isdisjoint(self, other: FiniteSet) -> bool:
        return self._members.isdisjoint(other._members)

    def union(self, other: FiniteSet) -> FiniteSet:
        _check_dims(self, other)
        return FiniteSet(self._members | other._members)

    def translate(self, v: Sequence[int]) -> FiniteSet:
        if len(v) != self.dim:
            raise DimensionError(f"translation of length {len(v)} for a set in Z^{self.dim}")
        return FiniteSet(add(p, v) for p in self.points)

    def lexmin(self) -> Point:
        return self.points[0]

    def normalized(self) -> tuple[FiniteSet, Point]:
        """Translate so the lexicographic minimum sits at the origin; return the shift used."""
        m = self.points[0]
        return self.translate(tuple(-c for c in m)), m

    def bounding_box(self) -> tuple[Point, Point]:
        lo = tuple(min(p[i] for p in self.points) for i in range(self.dim))
        hi = tuple(max(p[i] for p in self.points) for i in range(self.dim))
        return lo, hi

    def box_hull(self) -> FiniteSet:
        lo, hi = self.bounding_box()
        return FiniteSet(itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))))

    def extents(self) -> Point:
        lo, hi = self.bounding_box()
        return tuple(b - a + 1 for a, b in zip(lo, hi))

    def to_list(self) -> list[list[int]]:
        return [list(p) for p in self.points]


def _check_dims(a: FiniteSet, b: FiniteSet):
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")


def folner_box(side_lengths: Sequence[int]) -> FiniteSet:
    """The box prod_i [0, side_i), enumerated lexicographically."""
    sides = tuple(side_lengths)
    if not sides:
        raise InvalidWindow("a box needs at least one side")
    if any(int(s) != s or s < 1 for s in sides):
        raise InvalidWindow(f"box sides must be positive integers, got {sides}")
    return FiniteSet(itertools.product(*(range(int(s)) for s in sides)))


def centered_box(radius: int, dim: int) -> FiniteSet:
    """{-radius..radius}^dim; radius 0 gives the singleton origin."""
    if radius < 0:
        raise InvalidShape(f"radius must be >= 0, got {radius}")
    return FiniteSet(itertools.product(range(-radius, radius + 1), repeat=dim))


def origin(dim: int) -> FiniteSet:
    return FiniteSet([(0,) * dim])


def minkowski_extend(F: FiniteSet, shape: FiniteSet) -> FiniteSet:
    """{f + s : f in F, s in shape}; ``shape`` must contain the origin."""
    _check_dims(F, shape)
    group = ZdGroup(F.dim)
    if group.identity() not in shape:
        raise InvalidShape("extension shape must contain the origin")
    if len(shape) == 1:
        return F
    return FiniteSet(group.mul(s, f) for s in shape for f in F)


# ---------------------------------------------------------------------------
# integer normal forms


def _rank(rows: Sequence[Sequence[int]]) -> tuple[int, list[int]]:
    """Rank over Q and the pivot columns of a row-echelon form."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, len(m)):
            if m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return r, pivots


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
    """Row-style HNF of a full-row-rank integer matrix.

    Returns the echelon rows and their pivot columns. Pivots are positive and
    entries above each pivot are reduced into ``[0, pivot)``.
    """
    a = [list(map(int, r)) for r in rows]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots: list[int] = []
    p = 0
    for col in range(ncols):
        if p == nrows:
            break
        while True:
            nz = [i for i in range(p, nrows) if a[i][col] != 0]
            if not nz:
                break
            k = min(nz, key=lambda i: abs(a[i][col]))
            a[p], a[k] = a[k], a[p]
            clean = True
            for i in range(p + 1, nrows):
                if a[i][col]:
                    q = a[i][col] // a[p][col]
                    a[i] = [x - q * y for x, y in zip(a[i], a[p])]
                    if a[i][col]:
                        clean = False
            if clean:
                break
        if not any(a[i][col] for i in range(p, nrows)):
            continue
        if a[p][col] < 0:
            a[p] = [-x for x in a[p]]
        for i in range(p):
            q = a[i][col] // a[p][col]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[p])]
        pivots.append(col)
        p += 1
    if p != nrows:
        raise InvalidSubgroup("matrix is rank deficient")
    return a, pivots


def smith_invariants(rows: Sequence[Sequence[int]]) -> list[int]:
    """Diagonal of the Smith normal form (nonzero entries only, each dividing the next)."""
    a = [list(map(int, r)) for r in rows]
    nr = len(a)
    nc = len(a[0]) if a else 0
    diag = []
    t = 0
    while t < min(nr, nc):
        entries = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            changed = False
            piv = a[t][t]
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // piv
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        changed = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // piv
                    for row in a:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        changed = True
            if changed:
                # move the smallest remaining entry of row/column t into the pivot
                cand = [(abs(a[i][t]), i, t) for i in range(t, nr) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t, nc) if a[t][j]]
                _, i, j = min(cand)
                a[t], a[i] = a[i], a[t]
                for row in a:
                    row[t], row[j] = row[j], row[t]
                continue
            bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc)
                        if a[i][j] % piv), None)
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


class SubgroupBasis:
    """A subgroup H of Z^d given by integer generator rows (linearly independent).

    Every subgroup of the abelian group Z^d is normal, so any basis is a valid H.
    Sub-coordinates are coordinates with respect to the given rows, which fixes an
    isomorphism H = Z^r.
    """

    def __init__(self, rows: Sequence[Sequence[int]]):
        rows_t = tuple(tuple(int(x) for x in r) for r in rows)
        if not rows_t or not rows_t[0]:
            raise InvalidSubgroup("subgroup basis must be a nonempty matrix")
        d = len(rows_t[0])
        if any(len(r) != d for r in rows_t):
            raise InvalidSubgroup("ragged subgroup matrix")
        rank, pivots = _rank(rows_t)
        if rank != len(rows_t):
            raise InvalidSubgroup(f"rows have rank {rank} < {len(rows_t)}")
        self.rows = rows_t
        self.dim = d
        self.rank = rank
        self.hnf, self.hnf_pivots = hermite_normal_form(rows_t)
        snf = smith_invariants(rows_t)
        self.smith_diagonal = tuple(snf)
        self.invariants = tuple(s for s in snf if s > 1)
        self.free_rank = d - rank
        if rank == d:
            idx = 1
            for s in snf:
                idx *= s
            self.index: int | None = idx
        else:
            self.index = None
        # inverse of a nonsingular r x r column block, for sub-coordinates
        self._cols = pivots
        block = [[Fraction(r[c]) for c in pivots] for r in rows_t]
        self._inv = _invert(block)

    def __eq__(self, other):
        return isinstance(other, SubgroupBasis) and other.rows == self.rows

    def __hash__(self):
        return hash(("H", self.rows))

    def __repr__(self):
        return f"SubgroupBasis({[list(r) for r in self.rows]})"

    @property
    def index_label(self) -> int | str:
        return self.index if self.index is not None else "infinite"

    def embed(self, coeffs: Sequence[int]) -> Point:
        """Sub-coordinates (Z^r) to the lattice point sum_i c_i * row_i."""
        if len(coeffs) != self.rank:
            raise DimensionError(f"expected {self.rank} sub-coordinates, got {len(coeffs)}")
        return tuple(sum(c * r[j] for c, r in zip(coeffs, self.rows)) for j in range(self.dim))

    def to_sub(self, v: Sequence[int]) -> Point:
        """Inverse of :meth:`embed`; raises InternalError if ``v`` is not in H."""
        if len(v) != self.dim:
            raise DimensionError(f"expected a point of Z^{self.dim}")
        rhs = [Fraction(v[c]) for c in self._cols]
        # c * B = rhs  with B = block (rows x pivot cols)  =>  c = rhs * B^-1
        r = self.rank
        coeffs = [sum(rhs[k] * self._inv[k][i] for k in range(r)) for i in range(r)]
        if any(c.denominator != 1 for c in coeffs):
            raise InternalError(f"{tuple(v)} is not in the subgroup")
        out = tuple(int(c) for c in coeffs)
        if self.embed(out) != tuple(v):
            raise InternalError(f"{tuple(v)} is not in the subgroup")
        return out

    def contains(self, v: Sequence[int]) -> bool:
        try:
            self.to_sub(v)
        except InternalError:
            return False
        return True

    def embed_set(self, F_sub: FiniteSet) -> FiniteSet:
        if F_sub.dim != self.rank:
            raise DimensionError(f"sub-window lives in Z^{F_sub.dim}, subgroup has rank {self.rank}")
        return FiniteSet(self.embed(c) for c in F_sub)


def _invert(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        piv = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


class TransversalSection:
    """Canonical coset representatives: reduce a point modulo the HNF rows so each
    pivot coordinate lands in ``[0, pivot)``. Works for finite and infinite index."""

    def __init__(self, basis: SubgroupBasis):
        self.basis = basis
        self._steps = [(row, col, row[col]) for row, col in zip(basis.hnf, basis.hnf_pivots)]

    def rep(self, g: Sequence[int]) -> Point:
        if len(g) != self.basis.dim:
            raise DimensionError(f"point {tuple(g)} not in Z^{self.basis.dim}")
        v = list(g)
        for row, col, piv in self._steps:
            q = v[col] // piv
            if q:
                v = [x - q * y for x, y in zip(v, row)]
        return tuple(v)

    def translated(self, shift: Callable[[Point], Sequence[int]]) -> ShiftedSection:
        return ShiftedSection(self, shift)


class ShiftedSection(TransversalSection):
    """Another transversal: rep'(g) = rep(g) + shift(rep(g)) with each shift in H."""

    def __init__(self, base: TransversalSection, shift: Callable[[Point], Sequence[int]]):
        super().__init__(base.basis)
        self._base = base
        self._shift = shift

    def rep(self, g):
        m = self._base.rep(g)
        delta = tuple(self._shift(m))
        if not self.basis.contains(delta):
            raise InvalidSubgroup(f"shift {delta} for coset {m} is not in the subgroup")
        return add(m, delta)


def normal_form(basis: SubgroupBasis) -> tuple[tuple[int, ...], int, TransversalSection]:
    """(nontrivial Smith invariants, free rank of the quotient, canonical section)."""
    return basis.invariants, basis.free_rank, TransversalSection(basis)


def coset_decompose(F: FiniteSet, section: TransversalSection) -> list[tuple[Point, FiniteSet]]:
    """Split F into its intersections with cosets of H, sorted by representative."""
    if F.dim != section.basis.dim:
        raise DimensionError(f"window in Z^{F.dim}, subgroup in Z^{section.basis.dim}")
    groups: dict[Point, list[Point]] = {}
    for p in F:
        groups.setdefault(section.rep(p), []).append(p)
    return [(m, FiniteSet(pts)) for m, pts in sorted(groups.items())]
