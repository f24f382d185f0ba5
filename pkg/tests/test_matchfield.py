import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockmf.exceptions import NonUniqueMinimum
from blockmf.matchfield import (
    BracketVariable,
    Composition,
    GridMonomial,
    Perm,
    WeightData,
    blocks,
    bracket_of,
    compositions,
    coherence_failures,
    greedy_initial_term,
    initial_form_det,
    initial_term,
    is_eligible,
    lambda_eval,
    monomial_weight,
    pi_lambda,
    r_subsets,
    satisfies_interval_condition,
    satisfies_tail_condition,
    swap_by_weight,
    weight_vector,
)


def C(*parts):
    return Composition(parts)


def x(*pairs):
    return GridMonomial(tuple(pairs))


@st.composite
def composition_and_subset(draw, max_n=9):
    n = draw(st.integers(3, max_n))
    cuts = draw(st.lists(st.booleans(), min_size=n - 1, max_size=n - 1))
    parts, run = [], 1
    for c in cuts:
        if c:
            parts.append(run)
            run = 1
        else:
            run += 1
    parts.append(run)
    r = draw(st.integers(2, min(4, n - 1)))
    I = tuple(sorted(draw(st.sets(st.integers(1, n), min_size=r, max_size=r))))
    return Composition(tuple(parts)), I


class TestComposition:
    def test_fields(self):
        a = C(2, 2, 2, 3)
        assert (a.n, a.s, a.alphas) == (9, 4, (0, 2, 4, 6, 9))

    @pytest.mark.parametrize("bad", [(), (0, 3), (2, -1), (1.5,)])
    def test_rejects_bad_parts(self, bad):
        with pytest.raises(ValueError):
            Composition(bad)

    def test_parse(self):
        assert Composition.parse("2,2,2") == C(2, 2, 2)
        with pytest.raises(ValueError, match="comma-separated"):
            Composition.parse("2;2")

    @pytest.mark.parametrize("n", range(1, 10))
    def test_compositions_complete(self, n):
        comps = list(compositions(n))
        assert len(comps) == 2 ** (n - 1) == len(set(comps))
        assert all(a.n == n for a in comps)
        assert comps[0] == C(n)


@pytest.mark.parametrize(
    "a, expected",
    [
        (C(2, 2, 2, 3), [{1, 2}, {3, 4}, {5, 6}, {7, 8, 9}]),
        (C(9), [set(range(1, 10))]),
        (C(5, 4), [set(range(1, 6)), set(range(6, 10))]),
    ],
)
def test_blocks(a, expected):
    assert [set(b) for b in blocks(a)] == expected


@pytest.mark.parametrize(
    "a, w",
    [
        (C(2, 2, 2, 3), (2, 1, 4, 3, 6, 5, 9, 8, 7)),
        (C(5, 4), (5, 4, 3, 2, 1, 9, 8, 7, 6)),
        (C(3, 2, 2), (3, 2, 1, 5, 4, 7, 6)),
    ],
)
def test_weight_vector(a, w):
    wd = weight_vector(a)
    assert wd.w == w
    assert satisfies_interval_condition(wd.w)


def test_weight_data_rejects_non_permutation():
    with pytest.raises(ValueError):
        WeightData((1, 1, 2))


def test_interval_condition_detects_violation():
    # w_1 > w_3 but w is not decreasing on [1, 3]
    assert not satisfies_interval_condition((3, 1, 2))


@pytest.mark.parametrize(
    "a, I, expected",
    [
        (C(2, 2, 2, 3), (1, 3, 5), Perm.SWAP),
        (C(9), (2, 5, 8), Perm.ID),
        (C(5, 4), (2, 3, 7), Perm.ID),
    ],
)
def test_lambda_eval(a, I, expected):
    assert lambda_eval(a, I) is expected
    assert swap_by_weight(weight_vector(a), I) == (expected is Perm.SWAP)


@pytest.mark.parametrize(
    "a, I, column",
    [
        (C(2, 2, 2, 3), (1, 3, 5), (3, 1, 5)),
        (C(9), (1, 3, 5), (1, 3, 5)),
        (C(5, 4), (5, 6, 7), (6, 5, 7)),
    ],
)
def test_bracket_of(a, I, column):
    b = bracket_of(a, I)
    assert b.column == column
    assert str(b) == "[" + ";".join(map(str, column)) + "]"
    assert BracketVariable.parse(str(b)) == b


def test_bracket_rejects_bad_tail():
    with pytest.raises(ValueError):
        BracketVariable((3, 5, 4))
    with pytest.raises(ValueError):
        BracketVariable((1, 5, 4, 6))


@pytest.mark.parametrize(
    "a, I, expected",
    [
        (C(2, 2, 2, 3), (1, 3, 5), x((2, 1), (1, 3), (3, 5))),
        (C(9), (1, 3, 5), x((1, 1), (2, 3), (3, 5))),
        (C(4), (1, 2), x((1, 1), (2, 2))),
    ],
)
def test_pi_lambda(a, I, expected):
    m = pi_lambda(a, I)
    assert m == expected
    assert m.degree == len(I)
    assert m.row_sums(len(I)) == (1,) * len(I)
    assert sorted(col for _, col in m.factors) == list(I)


@pytest.mark.parametrize(
    "a, expected",
    [(C(2, 2, 2, 3), True), (C(3, 2, 2), True), (C(1, 3, 1), False), (C(7), True), (C(4, 5), True)],
)
def test_is_eligible(a, expected):
    assert is_eligible(a) is expected
    assert satisfies_tail_condition(weight_vector(a).w) is expected


@pytest.mark.parametrize(
    "a, r, I, expected",
    [
        (C(2, 2, 2, 3), 3, (1, 3, 5), x((2, 1), (1, 3), (3, 5))),
        (C(6), 3, (1, 2, 3), x((1, 1), (2, 2), (3, 3))),
        (C(5, 4), 4, (1, 6, 7, 8), x((2, 1), (1, 6), (3, 7), (4, 8))),
    ],
)
def test_initial_form_det(a, r, I, expected):
    assert initial_form_det(a, r, I) == expected


def test_initial_term_detects_ties():
    class Flat(WeightData):
        def at(self, j):
            return 1

    with pytest.raises(NonUniqueMinimum):
        initial_term(Flat((1, 2, 3, 4), 2), (1, 2))


@pytest.mark.parametrize(
    "m, expected",
    [
        (x((2, 1), (1, 3), (3, 5)), (5, 2)),
        (x((1, 1), (2, 3), (3, 5)), (5, 4)),
        (x(), (0, 0)),
    ],
)
def test_monomial_weight(m, expected):
    assert monomial_weight(m, weight_vector(C(2, 2, 2, 3), 3)) == expected


def test_monomial_weight_beta_rows():
    w = weight_vector(C(5, 4), 4)
    # x_{4,8}: beta^2 coefficient 9 + 1 - 8 = 2; x_{3,7}: beta coefficient 3; x_{2,1}: w_1 = 5
    assert monomial_weight(x((2, 1), (1, 6), (3, 7), (4, 8)), w) == (2, 3, 5)


@settings(max_examples=300, deadline=None)
@given(composition_and_subset())
def test_swap_criterion_and_round_trip(data):
    a, I = data
    swap = lambda_eval(a, I) is Perm.SWAP
    assert swap == swap_by_weight(weight_vector(a), I)
    b = bracket_of(a, I)
    assert b.subset == I
    assert b.swapped == swap


@settings(max_examples=300, deadline=None)
@given(composition_and_subset())
def test_greedy_matches_enumeration(data):
    a, I = data
    w = weight_vector(a, len(I))
    assert greedy_initial_term(w, I) == initial_term(w, I) == pi_lambda(a, I)


@settings(max_examples=200, deadline=None)
@given(composition_and_subset(), st.data())
def test_weight_is_additive(data, draw):
    a, I = data
    r = len(I)
    J = tuple(sorted(draw.draw(st.sets(st.integers(1, a.n), min_size=r, max_size=r))))
    w = weight_vector(a, r)
    m1, m2 = pi_lambda(a, I), pi_lambda(a, J)
    total = monomial_weight(m1 * m2, w)
    assert total == tuple(p + q for p, q in zip(monomial_weight(m1, w), monomial_weight(m2, w)))


@pytest.mark.parametrize("n", range(4, 8))
def test_coherence_small(n):
    for a in compositions(n):
        for r in range(2, min(4, n - 1) + 1):
            assert coherence_failures(a, r) == []


def test_tail_condition_brute_force():
    # independent oracle: eligibility by parts vs. the weight-vector condition, all n <= 9
    for n in range(1, 10):
        for a in compositions(n):
            assert satisfies_tail_condition(weight_vector(a).w) == is_eligible(a)
            assert satisfies_interval_condition(weight_vector(a).w)


def test_r_subsets_count():
    assert sum(1 for _ in r_subsets(9, 4)) == 126
    assert all(len(set(I)) == 3 for I in r_subsets(6, 3))
    assert list(itertools.islice(r_subsets(5, 2), 2)) == [(1, 2), (1, 3)]
