import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projshift.entropy import (
    entropy_bounds,
    entropy_exact_1d,
    entropy_report,
    log_ratio,
    strip_bounds_2d,
)
from projshift.errors import CapacityError, DimensionError, EmptySystem, InvalidWindow, UnsupportedInteraction
from projshift.lattice import centered_box, folner_box, origin
from projshift.shiftspace import SftSpec

from conftest import golden_mean

LN_PHI = math.log((1 + math.sqrt(5)) / 2)

HARD_SQUARE = SftSpec.from_rules(2, ["0", "1"], [
    ([[0, 0], [1, 0]], ["1", "1"]),
    ([[0, 0], [0, 1]], ["1", "1"]),
])
GM_ROWS = SftSpec.from_rules(2, ["0", "1"], [([[0, 0], [1, 0]], ["1", "1"])])


def test_full_shift_bounds_are_ln2():
    full = SftSpec(2, ["0", "1"])
    rep = entropy_bounds(full, [folner_box((n, n)) for n in range(1, 5)], origin(2))
    assert all(b.value == pytest.approx(math.log(2), abs=1e-15) for b in rep.bounds)
    assert rep.best_upper == pytest.approx(math.log(2), abs=1e-15)
    assert rep.exact_value == math.log(2)
    assert all(b.exact and b.certified_upper for b in rep.bounds)


def test_gm_rows_counts():
    rep = entropy_bounds(GM_ROWS, [folner_box((8, 1)), folner_box((16, 1))], origin(2))
    assert [b.count for b in rep.bounds] == [55, 2584]
    assert rep.bounds[0].value == pytest.approx(math.log(55) / 8, abs=1e-12)
    assert rep.bounds[1].value == pytest.approx(math.log(2584) / 16, abs=1e-12)


def test_exact_1d_values():
    assert entropy_exact_1d(golden_mean()) == pytest.approx(0.4812118250596, abs=1e-9)
    assert entropy_exact_1d(SftSpec(1, list("abcd"))) == pytest.approx(math.log(4), abs=1e-12)
    alt = SftSpec.from_rules(1, ["0", "1"], [([[0], [1]], ["0", "0"]), ([[0], [1]], ["1", "1"])])
    assert entropy_exact_1d(alt) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DimensionError):
        entropy_exact_1d(HARD_SQUARE)
    with pytest.raises(EmptySystem):
        entropy_exact_1d(SftSpec.from_rules(1, ["0"], [([[0], [1]], ["0", "0"])]))


def test_1d_bounds_dominate_exact_and_agree_at_16():
    gm = golden_mean()
    windows = [folner_box((n,)) for n in range(1, 21)]
    rep = entropy_bounds(gm, windows, centered_box(1, 1))
    assert all(b.value >= rep.exact_value - 1e-9 for b in rep.bounds)
    assert abs(rep.bounds[15].value - rep.exact_value) < 0.05
    assert rep.exact_value <= rep.best_upper + 1e-9


def test_best_upper_nonincreasing_along_box_chain():
    chain = [folner_box((n, n)) for n in range(1, 6)]
    bests = [entropy_bounds(HARD_SQUARE, chain[:k], origin(2)).best_upper for k in range(1, 6)]
    assert all(b >= a for a, b in zip(bests[1:], bests[:-1]))


@settings(max_examples=50, deadline=None)
@given(count=st.integers(1, 10 ** 40), size=st.integers(1, 500))
def test_log_ratio_reproducible(count, size):
    assert log_ratio(count, size) == pytest.approx(math.log(count) / size, rel=1e-12, abs=1e-15)


def test_strip_examples():
    vals = dict(strip_bounds_2d(HARD_SQUARE, [1, 2]))
    assert vals[1] == pytest.approx(LN_PHI, abs=1e-9)
    assert vals[2] == pytest.approx(math.log(1 + math.sqrt(2)) / 2, abs=1e-9)
    full = dict(strip_bounds_2d(SftSpec(2, ["0", "1"]), [1, 3, 5]))
    assert all(v == pytest.approx(math.log(2), abs=1e-12) for v in full.values())


def test_strip_bounds_nonincreasing_hard_square():
    vals = [v for _, v in strip_bounds_2d(HARD_SQUARE, range(1, 9))]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    # every strip bound stays above the known hard-square entropy 0.4075...
    assert vals[-1] > 0.4075


def test_strip_errors():
    wide = SftSpec.from_rules(2, ["0", "1"], [([[0, 0], [2, 0]], ["1", "1"])])
    with pytest.raises(UnsupportedInteraction):
        strip_bounds_2d(wide, [1])
    with pytest.raises(InvalidWindow):
        strip_bounds_2d(HARD_SQUARE, [13])
    with pytest.raises(DimensionError):
        strip_bounds_2d(golden_mean(), [1])


def test_report_includes_strips():
    rep = entropy_report(HARD_SQUARE, [folner_box((2, 2))], origin(2), strip_widths=[1, 2, 3])
    assert len(rep.transfer_bounds) == 3
    assert rep.best_upper == min(t.value for t in rep.transfer_bounds)


def test_capacity_error_names_window():
    with pytest.raises(CapacityError, match="window with sides"):
        entropy_bounds(HARD_SQUARE, [folner_box((20, 20))], origin(2))


def test_needs_windows():
    with pytest.raises(InvalidWindow):
        entropy_bounds(HARD_SQUARE, [], origin(2))
