import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projshift import _parallel
from projshift.entropy import entropy_bounds
from projshift.lattice import folner_box, origin
from projshift.linalg import essential_states, perron_root
from projshift.shiftspace import SftSpec


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 7).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 2), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_perron_root_matches_dense_eigenvalues(rows):
    A = np.array(rows, dtype=float)
    expected = max(abs(np.linalg.eigvals(A))) if A.size else 0.0
    assert perron_root(A) == pytest.approx(expected, rel=1e-9, abs=1e-9)


def test_perron_root_periodic_and_empty():
    assert perron_root(np.array([[0, 1], [1, 0]])) == pytest.approx(1.0, rel=1e-12)
    assert perron_root(np.array([[0, 1], [0, 0]])) == 0.0
    assert list(essential_states(np.array([[1, 1, 0], [0, 0, 0], [0, 0, 1]]))) == [0, 2]
    with pytest.raises(ValueError):
        perron_root(np.ones((2, 3)))


def test_worker_count(monkeypatch):
    monkeypatch.delenv("SHIFT_THREADS", raising=False)
    assert _parallel.worker_count() == 1
    monkeypatch.setenv("SHIFT_THREADS", "0")
    assert _parallel.worker_count() >= 1
    monkeypatch.setenv("SHIFT_THREADS", "-2")
    with pytest.raises(ValueError):
        _parallel.worker_count()


def test_pool_results_match_serial(monkeypatch):
    hs = SftSpec.from_rules(2, ["0", "1"], [([[0, 0], [1, 0]], ["1", "1"]), ([[0, 0], [0, 1]], ["1", "1"])])
    windows = [folner_box((n, n)) for n in range(1, 5)]
    monkeypatch.delenv("SHIFT_THREADS", raising=False)
    serial = entropy_bounds(hs, windows, origin(2))
    monkeypatch.setenv("SHIFT_THREADS", "2")
    pooled = entropy_bounds(hs, windows, origin(2))
    assert serial == pooled
