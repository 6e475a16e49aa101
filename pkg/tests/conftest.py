"""Independent oracles shared by the tests.

The brute-force language enumerator below deliberately avoids the package's
sweep engine and admissibility check: it tries every assignment of the extended
window and scans for forbidden translates directly.
"""
from __future__ import annotations

import itertools

import pytest
from hypothesis import strategies as st

from projshift import corpus
from projshift.lattice import FiniteSet, folner_box
from projshift.shiftspace import Pattern, SftSpec


def brute_admissible(config: dict, forbidden) -> bool:
    for f in forbidden:
        pts = f.support.points
        for anchor in config:
            vals = []
            for s in pts:
                q = tuple(a + b for a, b in zip(anchor, s))
                if q not in config:
                    break
                vals.append(config[q])
            else:
                if tuple(vals) == f.values:
                    return False
    return True


def brute_language(sft: SftSpec, F, margin) -> set[tuple[int, ...]]:
    """Restrictions to F of admissible assignments of F + margin, by exhaustion."""
    ext = sorted({tuple(a + b for a, b in zip(p, s)) for p in F for s in margin})
    k = len(sft.alphabet)
    out = set()
    for vals in itertools.product(range(k), repeat=len(ext)):
        cfg = dict(zip(ext, vals))
        if brute_admissible(cfg, sft.forbidden):
            out.add(tuple(cfg[p] for p in F))
    return out


def golden_mean() -> SftSpec:
    return SftSpec.from_rules(1, ["0", "1"], [([[0], [1]], ["1", "1"])])


@pytest.fixture(scope="session")
def corpus_specs():
    return {name: corpus.load(name) for name in corpus.NAMES}


# -- hypothesis strategies --------------------------------------------------


@st.composite
def small_sft(draw, dim: int = 2, max_symbols: int = 2):
    """A random SFT with one or two forbidden patterns inside a 2 x 2 (or length-2) box."""
    k = draw(st.integers(1, max_symbols))
    cell = folner_box((2,) * dim).points
    forbidden = []
    for _ in range(draw(st.integers(0, 2))):
        support = draw(st.lists(st.sampled_from(cell), min_size=1, max_size=min(3, len(cell)),
                                unique=True))
        values = draw(st.lists(st.integers(0, k - 1), min_size=len(support), max_size=len(support)))
        forbidden.append(Pattern.from_mapping(dict(zip(support, values))))
    return SftSpec(dim, [str(i) for i in range(k)], forbidden)


@st.composite
def small_box(draw, dim: int = 2, max_side: int = 2):
    return folner_box(tuple(draw(st.integers(1, max_side)) for _ in range(dim)))


def points(dim: int, lo: int = -3, hi: int = 3):
    return st.tuples(*([st.integers(lo, hi)] * dim))


@st.composite
def small_set(draw, dim: int = 2, max_size: int = 5):
    return FiniteSet(draw(st.lists(points(dim), min_size=1, max_size=max_size)))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
