import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projshift.errors import (
    CapacityError,
    DimensionError,
    EmptySystemWarning,
    InvalidPattern,
    InvalidShape,
)
from projshift.lattice import FiniteSet, centered_box, folner_box, origin
from projshift.shiftspace import (
    Alphabet,
    Pattern,
    SftSpec,
    count_language,
    enumerate_language,
    locally_admissible,
    transfer_matrix_1d,
)

from conftest import brute_language, golden_mean, small_box, small_sft

HARD_SQUARE = SftSpec.from_rules(2, ["0", "1"], [
    ([[0, 0], [1, 0]], ["1", "1"]),
    ([[0, 0], [0, 1]], ["1", "1"]),
])


def word(s: str) -> Pattern:
    return Pattern(folner_box((len(s),)), tuple(int(c) for c in s))


def test_alphabet_validation():
    assert Alphabet(("a", "b")).index("b") == 1
    with pytest.raises(InvalidPattern):
        Alphabet(("a", "a"))
    with pytest.raises(InvalidPattern):
        Alphabet(tuple(str(i) for i in range(256)))
    with pytest.raises(InvalidPattern):
        Alphabet(("a",)).index("z")


def test_forbidden_patterns_are_normalized():
    sft = SftSpec.from_rules(2, ["0", "1"], [([[3, 4], [4, 4]], ["1", "1"])])
    assert sft.forbidden[0].support == FiniteSet([(0, 0), (1, 0)])
    assert sft == SftSpec.from_rules(2, ["0", "1"], [([[0, 0], [1, 0]], ["1", "1"])])
    assert HARD_SQUARE.interaction_diameter == 2
    assert HARD_SQUARE.window_shape == FiniteSet([(0, 0), (1, 0), (0, 1)])


def test_locally_admissible_examples():
    assert not locally_admissible(Pattern(folner_box((2, 1)), (1, 1)), HARD_SQUARE)
    assert locally_admissible(Pattern(folner_box((3, 3)), (0,) * 9), HARD_SQUARE)
    assert locally_admissible(word("101"), golden_mean())
    with pytest.raises(InvalidPattern):
        locally_admissible(word("102"), golden_mean())
    with pytest.raises(DimensionError):
        locally_admissible(word("10"), HARD_SQUARE)


def test_language_examples():
    full = SftSpec(2, ["0", "1"])
    L = enumerate_language(full, folner_box((2, 2)), origin(2))
    assert len(L) == 16 and L.exact
    L = enumerate_language(golden_mean(), folner_box((3,)), origin(1))
    assert set(L.words) == {(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 0, 1)}
    assert len(enumerate_language(HARD_SQUARE, folner_box((2, 2)), origin(2))) == 7


def test_language_is_sorted_and_unique():
    L = enumerate_language(HARD_SQUARE, folner_box((3, 2)), centered_box(1, 2))
    assert list(L.words) == sorted(set(L.words))
    assert all(p.support == L.window for p in L.patterns)


@settings(max_examples=60, deadline=None)
@given(sft=small_sft(), F=small_box(2, 2), r=st.integers(0, 1))
def test_language_matches_brute_force(sft, F, r):
    margin = centered_box(r, 2)
    if len(F) * len(margin) > 16:
        margin = origin(2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptySystemWarning)
        L = enumerate_language(sft, F, margin)
    assert set(L.words) == brute_language(sft, F, margin)
    assert count_language(sft, F, margin) == len(L)


@settings(max_examples=40, deadline=None)
@given(sft=small_sft(dim=1, max_symbols=3), n=st.integers(1, 5), r=st.integers(0, 2))
def test_language_matches_brute_force_1d(sft, n, r):
    margin = centered_box(r, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptySystemWarning)
        L = enumerate_language(sft, folner_box((n,)), margin)
    assert set(L.words) == brute_language(sft, folner_box((n,)), margin)


@settings(max_examples=40, deadline=None)
@given(sft=small_sft(), F=small_box(2, 2))
def test_margin_monotonicity(sft, F):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptySystemWarning)
        small = set(enumerate_language(sft, F, origin(2)).words)
        big = set(enumerate_language(sft, F, centered_box(1, 2)).words)
    assert big <= small


@settings(max_examples=40, deadline=None)
@given(sft=small_sft(), F=small_box(2, 2),
       v=st.tuples(st.integers(-5, 5), st.integers(-5, 5)))
def test_shift_invariance(sft, F, v):
    m = centered_box(1, 2)
    assert count_language(sft, F, m) == count_language(sft, F.translate(v), m)


@settings(max_examples=30, deadline=None)
@given(sft=small_sft(), F=small_box(2, 2), data=st.data())
def test_sub_pattern_closure(sft, F, data):
    sub = FiniteSet(data.draw(st.lists(st.sampled_from(F.points), min_size=1, unique=True)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptySystemWarning)
        big = enumerate_language(sft, F, origin(2))
        small = enumerate_language(sft, sub, origin(2))
    for p in big:
        assert p.restrict(sub) in small


def test_full_shift_counts_ignore_margin():
    full = SftSpec(2, ["a", "b", "c"])
    for r in (0, 1, 2):
        assert count_language(full, folner_box((2, 2)), centered_box(r, 2)) == 3 ** 4


SYSTEMS_1D = {
    "golden": golden_mean(),
    "alternating": SftSpec.from_rules(1, ["0", "1"], [([[0], [1]], ["0", "0"]), ([[0], [1]], ["1", "1"])]),
    "no-101": SftSpec.from_rules(1, ["0", "1"], [([[0], [1], [2]], ["1", "0", "1"])]),
    "three": SftSpec.from_rules(1, ["a", "b", "c"], [([[0], [1]], ["a", "b"]), ([[0], [2]], ["c", "c"])]),
}


@pytest.mark.parametrize("name", SYSTEMS_1D)
def test_matrix_power_counts(name):
    sft = SYSTEMS_1D[name]
    A, _ = transfer_matrix_1d(sft)
    L = sft.interaction_diameter
    margin = FiniteSet([(i,) for i in range(-L, L + 1)])
    for n in range(max(L - 1, 1), 13):
        expected = int(np.linalg.matrix_power(A.astype(object), n - L + 1).sum())
        # locally admissible words, counted without a margin
        assert count_language(sft, folner_box((n,)), origin(1)) == expected
        lang = enumerate_language(sft, folner_box((n,)), margin)
        assert lang.exact
        assert len(lang) <= expected


def test_transfer_examples():
    A, rho = transfer_matrix_1d(golden_mean())
    assert A.tolist() == [[1, 1], [1, 0]]
    assert rho == pytest.approx(1.6180339887498949, rel=1e-12)
    _, rho3 = transfer_matrix_1d(SftSpec(1, ["a", "b", "c"]))
    assert rho3 == pytest.approx(3.0, rel=1e-12)
    _, rho_alt = transfer_matrix_1d(SYSTEMS_1D["alternating"])
    assert rho_alt == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(DimensionError):
        transfer_matrix_1d(HARD_SQUARE)


def test_alternating_counts_are_constant():
    for n in range(1, 10):
        assert count_language(SYSTEMS_1D["alternating"], folner_box((n,)), origin(1)) == 2


def test_exact_flag_rules():
    gm = golden_mean()
    assert enumerate_language(gm, folner_box((4,)), centered_box(1, 1)).exact
    # a 2-D system without safe symbols is never certified
    tf = SftSpec.from_rules(2, ["0", "1"], [([[0, 0], [1, 0]], ["0", "1"]), ([[0, 0], [1, 0]], ["1", "0"])])
    assert not enumerate_language(tf, folner_box((2, 2)), centered_box(1, 2)).exact
    # hard square has the safe symbol 0
    assert enumerate_language(HARD_SQUARE, folner_box((2, 2)), origin(2)).exact


def test_forbidding_01_leaves_staircases():
    # with "01" forbidden the admissible words are exactly 1^a 0^b
    sft = SftSpec.from_rules(1, ["0", "1"], [([[0], [1]], ["0", "1"])])
    L = enumerate_language(sft, folner_box((3,)), origin(1))
    assert set(L.words) == {(0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1)}


def test_empty_system_warns():
    sft = SftSpec.from_rules(1, ["0"], [([[0]], ["0"])])
    with pytest.warns(EmptySystemWarning):
        L = enumerate_language(sft, folner_box((2,)), origin(1))
    assert len(L) == 0


def test_capacity_and_shape_errors():
    with pytest.raises(CapacityError):
        count_language(HARD_SQUARE, folner_box((12, 12)), origin(2))
    with pytest.raises(CapacityError):
        count_language(HARD_SQUARE, folner_box((4, 4)), origin(2), max_cells=10)
    with pytest.raises(InvalidShape):
        enumerate_language(HARD_SQUARE, folner_box((2, 2)), FiniteSet([(1, 0)]))


def test_hard_square_counts_oeis():
    # independent sets of the n x n grid graph
    expected = [2, 7, 63, 1234, 55447, 5598861]
    for n, want in enumerate(expected, start=1):
        assert count_language(HARD_SQUARE, folner_box((n, n)), origin(2)) == want


def test_pattern_helpers():
    p = Pattern.from_mapping({(1, 1): 0, (0, 0): 1})
    assert p.support.points == ((0, 0), (1, 1)) and p.values == (1, 0)
    assert p.value_at((1, 1)) == 0
    assert p.translate((2, 0)).normalized() == p
    with pytest.raises(InvalidPattern):
        p.restrict(FiniteSet([(5, 5)]))
    for vals in itertools.product((0, 1), repeat=2):
        assert Pattern(folner_box((2,)), vals).as_dict()[(1,)] == vals[1]


@settings(max_examples=60, deadline=None)
@given(sft=small_sft(dim=1, max_symbols=3), n=st.integers(1, 4), r=st.integers(0, 2))
def test_exact_flag_is_sound_1d(sft, n, r):
    # A margin far beyond the number of de Bruijn states yields the true language
    # (any admissible word extendable that far extends forever by pigeonhole).
    far = centered_box(3 ** 2 + 4, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptySystemWarning)
        L = enumerate_language(sft, folner_box((n,)), centered_box(r, 1))
        truth = enumerate_language(sft, folner_box((n,)), far)
    if L.exact:
        assert L.words == truth.words
