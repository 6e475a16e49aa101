"""Entropy upper bounds from window counts, exact 1-D values and strip transfer matrices.

All values are in nats. Window bounds use the infimum rule: for every finite
window F, ``log|L_F(X)| / |F|`` bounds the entropy from above, and replacing the
language by a margin superset only increases the count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np
import scipy.sparse as sp

from . import _parallel
from .errors import (
    CapacityError,
    DimensionError,
    EmptySystem,
    InvalidWindow,
    UnsupportedInteraction,
)
from .lattice import FiniteSet, folner_box, minkowski_extend
from .linalg import perron_root
from .shiftspace import (
    LanguageSet,
    SftSpec,
    count_restricted,
    language_is_exact,
    transfer_matrix_1d,
    words_restricted,
)

MAX_STRIP_WIDTH = 12
MAX_STRIP_EDGES = 2_000_000


def log_ratio(count: int, size: int) -> float:
    """``ln(count) / size`` evaluated at 60 significant digits, then rounded once."""
    if count <= 0:
        return float("-inf")
    with mpmath.workdps(60):
        return float(mpmath.log(mpmath.mpf(count)) / size)


@dataclass(frozen=True)
class EntropyBound:
    window: FiniteSet
    margin: FiniteSet
    count: int
    value: float
    exact: bool
    certified_upper: bool = True


@dataclass(frozen=True)
class TransferBound:
    """Upper bound ``ln(root) / width`` from a column transfer matrix."""

    kind: str  # "strip" or "debruijn"
    width: int
    states: int
    edges: int
    spectral_radius: float
    value: float
    certified_upper: bool = True


@dataclass(frozen=True)
class EntropyReport:
    bounds: tuple[EntropyBound, ...]
    best_upper: float
    exact_value: float | None = None
    transfer_bounds: tuple[TransferBound, ...] = ()
    log_base: str = field(default="e")


def _window_bound(args):
    sft, F, margin, max_cells = args
    E = minkowski_extend(F, margin)
    try:
        count = count_restricted(sft, F, E, max_cells=max_cells)
    except CapacityError as e:
        raise CapacityError(f"window with sides {F.extents()}: {e}") from None
    return EntropyBound(F, margin, count, log_ratio(count, len(F)), language_is_exact(sft, F, E))


def entropy_bounds(sft: SftSpec, windows: Sequence[FiniteSet], margin: FiniteSet, *,
                   max_cells: int | None = None) -> EntropyReport:
    """One certified upper bound per window plus the exact value where one is available."""
    if not windows:
        raise InvalidWindow("need at least one window")
    for F in windows:
        if F.dim != sft.dim:
            raise DimensionError(f"window in Z^{F.dim}, system in Z^{sft.dim}")
    # validates the margin once, up front
    minkowski_extend(windows[0], margin)
    bounds = tuple(_parallel.ordered_map(
        _window_bound, [(sft, F, margin, max_cells) for F in windows]))
    exact = None
    if sft.is_full_shift:
        exact = math.log(len(sft.alphabet))
    elif sft.dim == 1:
        try:
            exact = entropy_exact_1d(sft)
        except EmptySystem:
            exact = float("-inf")
    return EntropyReport(bounds, min(b.value for b in bounds), exact)


def entropy_exact_1d(sft: SftSpec) -> float:
    """ln of the transfer-matrix spectral radius; exact for one-dimensional SFTs."""
    if sft.dim != 1:
        raise DimensionError(f"entropy_exact_1d needs dim 1, got {sft.dim}")
    _, rho = transfer_matrix_1d(sft)
    if rho <= 0:
        raise EmptySystem("the shift has no bi-infinite points")
    return math.log(rho)


def _graph_bound(kind: str, width: int, edges: list[tuple[int, int]], n: int) -> TransferBound:
    if edges:
        r, c = zip(*edges)
        A = sp.csr_matrix((np.ones(len(edges)), (r, c)), shape=(n, n))
    else:
        A = sp.csr_matrix((max(n, 1), max(n, 1)))
    rho = perron_root(A)
    value = math.log(rho) / width if rho > 0 else float("-inf")
    return TransferBound(kind, width, n, len(edges), rho, value)


def strip_bounds_2d(sft: SftSpec, widths: Sequence[int], *,
                    max_cells: int | None = None) -> list[tuple[int, float]]:
    """``(m, ln(lambda_m) / m)`` for nearest-neighbour Z^2 systems."""
    return [(b.width, b.value) for b in strip_transfer_bounds(sft, widths, max_cells=max_cells)]


def strip_transfer_bounds(sft: SftSpec, widths: Sequence[int], *,
                          max_cells: int | None = None) -> list[TransferBound]:
    if sft.dim != 2:
        raise DimensionError(f"strip bounds need dim 2, got {sft.dim}")
    if any(e > 2 for e in sft.extents):
        raise UnsupportedInteraction(
            f"forbidden patterns span {sft.extents}; strip bounds need spans <= 2 per axis")
    out = []
    for m in widths:
        if not 1 <= m <= MAX_STRIP_WIDTH:
            raise InvalidWindow(f"strip width must be in 1..{MAX_STRIP_WIDTH}, got {m}")
        col = folner_box((1, m))
        block = folner_box((2, m))
        second = col.translate((1, 0))
        columns = words_restricted(sft, col, col, max_cells=max_cells)
        pos = {c: i for i, c in enumerate(columns)}
        edges = []
        for i, c in enumerate(columns):
            pin = {p: (v,) for p, v in zip(col.points, c)}
            for nxt in words_restricted(sft, second, block, domains=pin, max_cells=max_cells):
                edges.append((i, pos[nxt]))
            if len(edges) > MAX_STRIP_EDGES:
                raise CapacityError(f"strip width {m} has more than {MAX_STRIP_EDGES} transitions")
        out.append(_graph_bound("strip", m, edges, len(columns)))
    return out


def language_strip_bound(lang: Callable[[FiniteSet], LanguageSet], dim: int, width: int) -> TransferBound:
    """Strip bound computed from any language oracle on ``dim`` <= 2 windows.

    Columns are the patterns on the width-``width`` column window and transitions
    are the patterns on two adjacent columns. Every pattern on an ``n x width``
    box of the shift is a walk in this graph, so ``ln(root) / width`` bounds the
    entropy from above. For ``dim == 1`` this is the de Bruijn graph on words of
    length ``width`` (divided by 1, not by the width).
    """
    if dim == 1:
        pair = lang(folner_box((width + 1,)))
        states = sorted({w[:-1] for w in pair.words} | {w[1:] for w in pair.words})
        pos = {s: i for i, s in enumerate(states)}
        edges = [(pos[w[:-1]], pos[w[1:]]) for w in pair.words]
        b = _graph_bound("debruijn", 1, edges, len(states))
        return TransferBound("debruijn", width, b.states, b.edges, b.spectral_radius, b.value)
    if dim != 2:
        raise DimensionError(f"language strip bounds support dim 1 or 2, got {dim}")
    block = lang(folner_box((2, width)))
    # lex order on (x, y): the first ``width`` values are column x = 0
    states = sorted({w[:width] for w in block.words} | {w[width:] for w in block.words})
    pos = {s: i for i, s in enumerate(states)}
    edges = [(pos[w[:width]], pos[w[width:]]) for w in block.words]
    return _graph_bound("strip", width, edges, len(states))


def default_strip_widths(windows: Sequence[FiniteSet]) -> list[int]:
    """1..max window side, clamped to 2..8."""
    side = max(max(F.extents()) for F in windows)
    return list(range(1, min(max(side, 2), 8) + 1))


def entropy_report(sft: SftSpec, windows: Sequence[FiniteSet], margin: FiniteSet, *,
                   strip_widths: Sequence[int] | None = None,
                   max_cells: int | None = None) -> EntropyReport:
    """:func:`entropy_bounds`, plus strip bounds for nearest-neighbour Z^2 systems."""
    rep = entropy_bounds(sft, windows, margin, max_cells=max_cells)
    if sft.dim != 2 or any(e > 2 for e in sft.extents):
        return rep
    widths = default_strip_widths(windows) if strip_widths is None else strip_widths
    strips = tuple(strip_transfer_bounds(sft, widths, max_cells=max_cells))
    best = min([rep.best_upper] + [s.value for s in strips])
    return EntropyReport(rep.bounds, best, rep.exact_value, strips)
