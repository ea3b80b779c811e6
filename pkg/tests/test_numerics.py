import heapq
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from groves import (
    ContractViolation,
    binomial,
    format_rational,
    order_statistic,
    parse_rational,
    rational,
    sort_desc,
)

F = Fraction

rationals = st.fractions(min_value=-100, max_value=100, max_denominator=64)


def test_order_statistic_counts_multiplicity():
    assert order_statistic([F(3), F(2), F(2), F(1)], 3) == 2
    assert order_statistic([F(5)], 1) == 5
    assert order_statistic([F(0), F(3), F(1), F(2)], 2) == 2


@pytest.mark.parametrize("j", [0, 5, -1])
def test_order_statistic_index_out_of_range(j):
    with pytest.raises(ContractViolation):
        order_statistic([F(3), F(2), F(2), F(1)], j)


@given(st.lists(rationals, min_size=1, max_size=12), st.data())
def test_order_statistic_matches_independent_selection(values, data):
    j = data.draw(st.integers(min_value=1, max_value=len(values)))
    assert order_statistic(values, j) == heapq.nlargest(j, values)[-1]


def test_binomial_values():
    assert binomial(5, 2) == 10
    assert all(binomial(n, 0) == 1 for n in range(8))
    assert binomial(3, 5) == 0
    assert binomial(0, 0) == 1


def test_binomial_rejects_negatives():
    with pytest.raises(ContractViolation):
        binomial(-1, 2)
    with pytest.raises(ContractViolation):
        binomial(2, -1)


@given(rationals, rationals, rationals)
def test_field_axioms_hold_exactly(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a


@given(rationals)
def test_wire_format_round_trips(x):
    text = format_rational(x)
    assert parse_rational(text) == x
    if x.denominator == 1:
        assert "/" not in text
    else:
        assert text == f"{x.numerator}/{x.denominator}"


@pytest.mark.parametrize("bad", ["1.5", "", "a", "1/0", "1/2/3", "1e3"])
def test_parse_rejects_non_rational_literals(bad):
    with pytest.raises(ContractViolation):
        parse_rational(bad)


def test_rational_coercion():
    assert rational(3) == F(3)
    assert rational("7/4") == F(7, 4)
    assert rational(F(1, 2)) == F(1, 2)
    with pytest.raises(ContractViolation):
        rational(1.5)


@given(st.lists(rationals, max_size=10))
def test_sort_desc_is_nonincreasing_permutation(values):
    ordered = sort_desc(values)
    assert sorted(ordered) == sorted(values)
    assert all(a >= b for a, b in zip(ordered, ordered[1:]))


def test_canonical_form_is_structural():
    assert F(2, 4) == F(1, 2)
    assert (F(2, 4).numerator, F(2, 4).denominator) == (1, 2)
    assert F(-1, -2) == F(1, 2) and F(1, -2).denominator == 2
