import itertools
from fractions import Fraction

import pytest

from groves import (
    ContractViolation,
    MultiUnit,
    PublicProjectEqual,
    PublicProjectGeneral,
    SingleItem,
    TypeGrid,
    order_statistic,
    outcome,
    total_vcg,
    valuation,
    vcg_payment,
)

F = Fraction


def brute_force_best(domain, n, profile, skip=None):
    """Independent welfare maximization by full enumeration of decisions."""
    if isinstance(domain, (SingleItem, MultiUnit)):
        m = 1 if isinstance(domain, SingleItem) else domain.units
        all_decisions = list(itertools.combinations(range(n), min(m, n)))
    else:
        all_decisions = [0, 1]
    agents = [i for i in range(n) if i != skip]
    return max(
        sum((valuation(domain, n, d, i, profile[i]) for i in agents), F(0))
        for d in all_decisions
    )


def brute_force_vcg(domain, n, profile, i):
    best_without = brute_force_best(domain, n, profile, skip=i)
    if isinstance(domain, (SingleItem, MultiUnit)):
        m = 1 if isinstance(domain, SingleItem) else domain.units
        chosen = tuple(sorted(sorted(range(n), key=lambda j: (-profile[j], j))[:m]))
    else:
        chosen = 1 if sum(profile) >= domain.cost else 0
    actual_without = sum(
        (valuation(domain, n, chosen, j, profile[j]) for j in range(n) if j != i), F(0)
    )
    return best_without - actual_without


class TestOutcome:
    def test_public_project_builds_when_total_covers_cost(self):
        grid = TypeGrid(3, (0, 10, 25, 30))
        assert outcome(PublicProjectEqual(30), grid, (F(25), F(10), F(0))) == 1

    def test_multi_unit_tie_goes_to_lowest_index(self):
        grid = TypeGrid(4, (0, 1, 2, 3))
        assert outcome(MultiUnit(2), grid, (F(3), F(2), F(2), F(1))) == (0, 1)

    def test_boundary_total_exactly_cost_builds(self):
        grid = TypeGrid(3, (0, 10, 30))
        assert outcome(PublicProjectEqual(30), grid, (F(10), F(10), F(10))) == 1

    def test_below_cost_cancels(self):
        grid = TypeGrid(3, (0, 10, 30))
        assert outcome(PublicProjectEqual(30), grid, (F(10), F(10), F(0))) == 0

    def test_malformed_profile_rejected(self):
        grid = TypeGrid(3, (0, 1, 2, 3))
        with pytest.raises(ContractViolation):
            outcome(SingleItem(), grid, (F(1), F(2)))
        with pytest.raises(ContractViolation):
            outcome(SingleItem(), grid, (F(1), F(2), F(7)))


class TestValuation:
    def test_equal_share_project(self):
        assert valuation(PublicProjectEqual(30), 3, 1, 0, F(25)) == 15

    def test_auction_loser_values_zero(self):
        assert valuation(MultiUnit(2), 4, (0, 1), 3, F(9)) == 0
        assert valuation(MultiUnit(2), 4, (0, 3), 3, F(9)) == 9

    def test_unequal_share_project_can_be_negative(self):
        domain = PublicProjectGeneral((10, 40, 50))
        assert valuation(domain, 3, 1, 1, F(10)) == -30
        assert valuation(domain, 3, 0, 1, F(10)) == 0


class TestVcgPayment:
    def test_multi_unit_winner_pays_next_losing_bid(self):
        grid = TypeGrid(4, (0, 1, 2, 3))
        profile = (F(3), F(2), F(2), F(1))
        assert vcg_payment(MultiUnit(2), grid, profile, 0) == 2
        assert vcg_payment(MultiUnit(2), grid, profile, 0) == brute_force_vcg(
            MultiUnit(2), 4, profile, 0
        )

    def test_pivotal_project_agent_pays_externality(self):
        grid = TypeGrid(3, (0, 10, 25, 30))
        profile = (F(25), F(10), F(0))
        assert vcg_payment(PublicProjectEqual(30), grid, profile, 0) == 10
        assert vcg_payment(PublicProjectEqual(30), grid, profile, 0) == brute_force_vcg(
            PublicProjectEqual(30), 3, profile, 0
        )

    def test_nobody_pivotal_pays_nothing(self):
        grid = TypeGrid(3, (0, 10, 30))
        profile = (F(10), F(10), F(10))
        for i in range(3):
            assert vcg_payment(PublicProjectEqual(30), grid, profile, i) == 0

    def test_agent_index_validated(self):
        grid = TypeGrid(3, (0, 1, 2, 3))
        with pytest.raises(ContractViolation):
            vcg_payment(SingleItem(), grid, (F(1), F(2), F(3)), 3)


class TestTotalVcg:
    def test_multi_unit_closed_form_example(self):
        grid = TypeGrid(4, (0, 1, 2, 3))
        assert total_vcg(MultiUnit(2), grid, (F(3), F(2), F(2), F(1))) == 4

    def test_single_item_is_second_price(self):
        grid = TypeGrid(3, (0, 1, 3, 5))
        assert total_vcg(SingleItem(), grid, (F(5), F(3), F(1))) == 3

    def test_all_equal_project_profile_is_free(self):
        grid = TypeGrid(3, (0, 10, 30))
        assert total_vcg(PublicProjectEqual(30), grid, (F(10), F(10), F(10))) == 0


DOMAIN_GRIDS = [
    (SingleItem(), TypeGrid(3, (0, 1, 2, 3))),
    (MultiUnit(2), TypeGrid(3, (0, 1, 2, 3))),
    (MultiUnit(2), TypeGrid(4, (0, 1, 2))),
    (PublicProjectEqual(30), TypeGrid(3, (0, 10, 20, 30))),
    (PublicProjectGeneral((10, 40, 50)), TypeGrid(3, (0, 10, 40, 50, 70, 100))),
]


@pytest.mark.parametrize("domain,grid", DOMAIN_GRIDS)
def test_total_equals_sum_of_payments_and_payments_are_nonnegative(domain, grid):
    for profile in grid.profiles():
        payments = [vcg_payment(domain, grid, profile, i) for i in range(grid.n)]
        assert all(p >= 0 for p in payments)
        assert total_vcg(domain, grid, profile) == sum(payments)


@pytest.mark.parametrize("domain,grid", DOMAIN_GRIDS)
def test_outcome_maximizes_welfare_with_lowest_index_ties(domain, grid):
    n = grid.n
    if isinstance(domain, (SingleItem, MultiUnit)):
        m = 1 if isinstance(domain, SingleItem) else domain.units
        all_decisions = list(itertools.combinations(range(n), min(m, n)))
    else:
        all_decisions = [0, 1]
    for profile in grid.profiles():
        chosen = outcome(domain, grid, profile)
        welfare = lambda d: sum(
            (valuation(domain, n, d, i, profile[i]) for i in range(n)), F(0)
        )
        best = max(welfare(d) for d in all_decisions)
        assert welfare(chosen) == best
        if isinstance(domain, (SingleItem, MultiUnit)):
            assert chosen == min(d for d in all_decisions if welfare(d) == best)
        else:
            # a tied project resolves to build
            assert chosen == max(d for d in all_decisions if welfare(d) == best)


@pytest.mark.parametrize(
    "n,m,values",
    [
        (2, 1, (0, 1, 2, 3)),
        (3, 1, (0, 1, 2, 3)),
        (3, 2, (0, 1, 2, 3)),
        (4, 2, (0, 1, 2, 3)),
        (4, 3, (0, 1, 2)),
        (5, 2, (0, 1, 3)),
        (5, 4, (0, 1, 3)),
        (6, 1, (0, 3)),
        (6, 3, (0, 1, 3)),
        (6, 5, (0, 3)),
    ],
)
def test_multi_unit_total_matches_closed_form(n, m, values):
    grid = TypeGrid(n, values)
    domain = MultiUnit(m)
    for profile in grid.profiles():
        assert total_vcg(domain, grid, profile) == m * order_statistic(profile, m + 1)


class TestConstructionContracts:
    def test_grid_must_strictly_increase(self):
        with pytest.raises(ContractViolation):
            TypeGrid(3, (0, 1, 1))
        with pytest.raises(ContractViolation):
            TypeGrid(3, (2, 1))
        with pytest.raises(ContractViolation):
            TypeGrid(3, ())

    def test_need_two_agents(self):
        with pytest.raises(ContractViolation):
            TypeGrid(1, (0, 1))

    def test_units_must_be_fewer_than_agents(self):
        grid = TypeGrid(3, (0, 1))
        with pytest.raises(ContractViolation):
            outcome(MultiUnit(3), grid, (F(0), F(0), F(1)))

    def test_shares_must_match_agent_count_and_sign(self):
        grid = TypeGrid(3, (0, 10))
        with pytest.raises(ContractViolation):
            outcome(PublicProjectGeneral((10, 40)), grid, (F(0), F(0), F(10)))
        with pytest.raises(ContractViolation):
            PublicProjectGeneral((10, -1, 40))

    def test_project_types_bounded_by_cost(self):
        with pytest.raises(ContractViolation):
            outcome(PublicProjectEqual(5), TypeGrid(3, (0, 10)), (F(0), F(0), F(10)))

    def test_grid_endpoints_are_bounds(self):
        grid = TypeGrid(3, ("1/2", 2, "7/2"))
        assert grid.L == F(1, 2) and grid.U == F(7, 2)
