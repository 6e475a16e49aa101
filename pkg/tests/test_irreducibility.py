import itertools

import pytest

from projshift.errors import InvalidShape
from projshift.irreducibility import (
    COUNTEREXAMPLE,
    PASS,
    IrreducibilityVerdict,
    MixingShape,
    box_pairs,
    check_product_irreducibility,
    check_strong_irreducibility,
)
from projshift.lattice import FiniteSet, SubgroupBasis, centered_box, minkowski_extend, origin
from projshift.shiftspace import SftSpec

from conftest import brute_language

FULL = SftSpec(2, ["0", "1"])
HARD_SQUARE = SftSpec.from_rules(2, ["0", "1"], [
    ([[0, 0], [1, 0]], ["1", "1"]),
    ([[0, 0], [0, 1]], ["1", "1"]),
])
TWO_POINTS = SftSpec.from_rules(2, ["0", "1"], [
    (off, pair) for pair in (["0", "1"], ["1", "0"]) for off in ([[0, 0], [1, 0]], [[0, 0], [0, 1]])])
D0 = MixingShape(origin(2))
D1 = MixingShape(centered_box(1, 2))


def test_mixing_shape_needs_origin():
    with pytest.raises(InvalidShape):
        MixingShape(FiniteSet([(1, 0)]))


def test_verdict_witness_invariant():
    with pytest.raises(ValueError):
        IrreducibilityVerdict(PASS, 1, 0, witness=object())
    with pytest.raises(ValueError):
        IrreducibilityVerdict(COUNTEREXAMPLE, 1, 0)


def test_box_pairs_are_separated():
    pairs = list(box_pairs(2, 2, D1))
    assert pairs
    for b1, b2 in pairs:
        assert minkowski_extend(b1, D1.points).isdisjoint(b2)
    assert pairs == list(box_pairs(2, 2, D1))


def test_full_shift_passes():
    v = check_strong_irreducibility(FULL, D0, 3, origin(2))
    assert v.passed and v.witness is None and v.pairs_checked > 0


def test_hard_square_passes():
    assert check_strong_irreducibility(HARD_SQUARE, D1, 3, origin(2)).passed


def test_hard_square_fails_without_gap():
    v = check_strong_irreducibility(HARD_SQUARE, D0, 2, origin(2))
    assert v.status == COUNTEREXAMPLE
    w = v.witness
    assert w.pattern1.values == (1,) and w.pattern2.values == (1,)


def test_two_fixed_points_counterexample():
    v = check_strong_irreducibility(TWO_POINTS, D1, 2, centered_box(1, 2))
    assert v.status == COUNTEREXAMPLE
    w = v.witness
    assert len(w.b1) == 1 and len(w.b2) == 1
    assert {w.pattern1.values, w.pattern2.values} == {(0,), (1,)}
    assert minkowski_extend(w.b1, D1.points).isdisjoint(w.b2)


def test_witness_is_a_true_failure():
    # brute force: the witness pair cannot coexist on the margin-extended hull
    v = check_strong_irreducibility(HARD_SQUARE, D0, 1, origin(2))
    w = v.witness
    union = w.b1.union(w.b2)
    joint = brute_language(HARD_SQUARE, union.box_hull(), origin(2))
    hull = union.box_hull().points
    i1 = [hull.index(p) for p in w.b1]
    i2 = [hull.index(p) for p in w.b2]
    assert not any(tuple(x[i] for i in i1) == w.pattern1.values
                   and tuple(x[i] for i in i2) == w.pattern2.values for x in joint)


SHAPES = [origin(2), FiniteSet([(0, 0), (1, 0)]), FiniteSet([(0, 0), (0, 1), (1, 0)]), centered_box(1, 2)]


@pytest.mark.parametrize("sft", [FULL, HARD_SQUARE, TWO_POINTS], ids=["full", "hard", "two"])
def test_monotone_in_D(sft):
    results = {}
    for D in SHAPES:
        results[D] = check_strong_irreducibility(sft, MixingShape(D), 2, origin(2)).passed
    for a, b in itertools.permutations(SHAPES, 2):
        if a.issubset(b) and results[a]:
            assert results[b]


def test_product_inheritance_small():
    H = SubgroupBasis([[1, 0]])
    for sft, D in ((FULL, D0), (HARD_SQUARE, D1)):
        assert check_strong_irreducibility(sft, D, 2, origin(2)).passed
        assert check_product_irreducibility(sft, H, D, 2, origin(2)).passed


def test_product_of_two_points_mixes_rows_only():
    # the product system lets different rows differ, but a row stays constant
    v = check_product_irreducibility(TWO_POINTS, SubgroupBasis([[1, 0]]), D0, 2, origin(2))
    assert v.status == COUNTEREXAMPLE
    assert v.witness.b1.points[0][1] == v.witness.b2.points[0][1]


def test_dimension_mismatch():
    with pytest.raises(InvalidShape):
        check_strong_irreducibility(FULL, MixingShape(origin(1)), 1, origin(2))
