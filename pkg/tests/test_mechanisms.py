import itertools
import random
from fractions import Fraction

import pytest

from groves import (
    AnonymousTabulated,
    ContractViolation,
    GrovesMechanism,
    LinearAnonymous,
    MultiUnit,
    PublicProjectEqual,
    SingleItem,
    Tabulated,
    TotalityError,
    TypeGrid,
    drop,
    is_budget_balanced_at,
    is_non_deficit,
    is_pay_only,
    is_strategy_proof,
    tabulate_anonymous,
    total_vcg,
    vcg_mechanism,
    vcg_payment,
    with_redistribution,
)
from conftest import bc_single, equal_share_vcg, scaled_anonymous_seed, vcg_single

F = Fraction


class TestRedistribute:
    def test_zero_rebate_everywhere_for_vcg(self, grid4):
        mech = vcg_mechanism(SingleItem(), grid4)
        for key in grid4.others_keys():
            for i in range(4):
                assert mech.redistribute(i, key) == 0

    def test_quarter_of_second_highest_other_bid(self):
        mech = bc_single(4)
        assert mech.redistribute(0, (F(3), F(1), F(0))) == F(1, 4)

    def test_linear_rule_on_third_order_statistic(self, grid4):
        red = LinearAnonymous(F(0), (F(0), F(0), F(1, 2)))
        mech = GrovesMechanism(MultiUnit(2), grid4, red)
        assert mech.redistribute(0, (F(3), F(2), F(1))) == F(1, 2)

    def test_anonymous_variants_are_permutation_independent(self, grid4):
        linear = GrovesMechanism(SingleItem(), grid4, LinearAnonymous(F(1, 3), (F(1), F(1, 2), F(0))))
        tab = bc_single(4)
        for mech in (linear, tab):
            for key in grid4.sorted_keys():
                expected = mech.redistribute(0, key)
                for perm in itertools.permutations(key):
                    for i in range(4):
                        assert mech.redistribute(i, perm) == expected

    def test_others_vector_validated(self, grid4):
        mech = bc_single(4)
        with pytest.raises(ContractViolation):
            mech.redistribute(0, (F(3), F(1)))
        with pytest.raises(ContractViolation):
            mech.redistribute(0, (F(3), F(1), F(9)))


class TestPayment:
    def test_zero_rebate_means_pure_pivotal_payment(self, grid3):
        mech = vcg_mechanism(SingleItem(), grid3)
        for prof in grid3.profiles():
            for i in range(3):
                assert mech.payment(prof, i) == vcg_payment(SingleItem(), grid3, prof, i)

    def test_winner_pays_price_minus_rebate(self):
        mech = bc_single(4)
        assert mech.payment((F(3), F(2), F(1), F(0)), 0) == F(2) - F(1, 4) == F(7, 4)

    def test_defining_identity_holds_everywhere(self, grid4):
        mech = bc_single(4)
        for prof in grid4.profiles():
            for i in range(4):
                assert mech.payment(prof, i) == vcg_payment(
                    SingleItem(), grid4, prof, i
                ) - mech.redistribute(i, drop(prof, i))


class TestTotalPaymentAndUtility:
    def test_multi_unit_vcg_total(self, grid4):
        mech = vcg_mechanism(MultiUnit(2), grid4)
        assert mech.total_payment((F(3), F(2), F(2), F(1))) == 4

    def test_classic_rebate_balances_at_tied_index(self, grid4):
        red = LinearAnonymous(F(0), (F(0), F(0), F(1, 2)))
        mech = GrovesMechanism(MultiUnit(2), grid4, red)
        assert mech.total_payment((F(3), F(2), F(1), F(1))) == 0
        assert is_budget_balanced_at(mech, (F(3), F(2), F(1), F(1)))

    def test_descending_profile_total(self):
        mech = bc_single(4)
        # second price 2, rebates (1/4, 1/4, 1/2, 1/2); cross-checked per agent
        profile = (F(3), F(2), F(1), F(0))
        per_agent = [mech.payment(profile, i) for i in range(4)]
        assert per_agent == [F(7, 4), F(-1, 4), F(-1, 2), F(-1, 2)]
        assert mech.total_payment(profile) == sum(per_agent) == F(1, 2)

    def test_losing_bidder_utility_zero_under_vcg(self, grid3):
        mech = vcg_single(3)
        assert mech.utility((F(3), F(2), F(0)), 1) == 0

    def test_winner_keeps_margin_over_price(self):
        grid = TypeGrid(2, (0, 3, 5))
        mech = vcg_mechanism(SingleItem(), grid)
        assert mech.utility((F(5), F(3)), 0) == 2

    def test_project_utility_is_value_minus_share_minus_payment(self):
        grid = TypeGrid(3, (0, 10, 25, 30))
        mech = vcg_mechanism(PublicProjectEqual(30), grid)
        assert mech.utility((F(25), F(10), F(0)), 0) == 15 - 10


class TestNonDeficit:
    def test_vcg_never_runs_deficit(self, grid4):
        assert is_non_deficit(vcg_mechanism(SingleItem(), grid4))
        assert is_non_deficit(equal_share_vcg(3))

    def test_quarter_rebate_mechanism_is_safe(self):
        assert is_non_deficit(bc_single(4)).ok

    def test_uniform_rebate_of_one_runs_deficit_with_witness(self):
        grid = TypeGrid(3, (0, 10, 20, 30))
        mech = GrovesMechanism(
            PublicProjectEqual(30), grid, tabulate_anonymous(grid, lambda key: F(1))
        )
        verdict = is_non_deficit(mech)
        assert not verdict.ok
        assert mech.total_payment(verdict.profile) < 0
        # the all-equal-share profile is also a violation
        assert mech.total_payment((F(10), F(10), F(10))) == -3

    def test_redistribution_form_equivalence(self, grid4):
        for mech in (bc_single(4), vcg_mechanism(SingleItem(), grid4)):
            rebate_bounded = all(
                sum((mech.redistribute(i, drop(p, i)) for i in range(4)), F(0))
                <= total_vcg(mech.domain, grid4, p)
                for p in grid4.profiles()
            )
            assert is_non_deficit(mech).ok == rebate_bounded

    def test_worker_count_does_not_change_verdict(self):
        grid = TypeGrid(3, (0, 10, 20, 30))
        mech = GrovesMechanism(
            PublicProjectEqual(30), grid, tabulate_anonymous(grid, lambda key: F(1))
        )
        sequential = is_non_deficit(mech, workers=1)
        threaded = is_non_deficit(mech, workers=3)
        assert sequential == threaded


class TestPayOnly:
    def test_vcg_is_pay_only(self, grid4):
        assert is_pay_only(vcg_mechanism(SingleItem(), grid4)).ok

    def test_rebates_break_pay_only(self):
        mech = bc_single(4)
        verdict = is_pay_only(mech)
        assert not verdict.ok
        assert mech.payment(verdict.profile, verdict.agent) < 0
        # a losing agent with a positive second-other-bid receives money
        assert mech.payment((F(3), F(2), F(1), F(0)), 3) == -F(1, 4)

    def test_worker_count_does_not_change_witness(self):
        mech = bc_single(4)
        assert is_pay_only(mech, workers=1) == is_pay_only(mech, workers=4)


class _OwnTypeReader:
    """A corrupted payment rule whose 'rebate' reads the agent's own report."""

    def __init__(self, base):
        self.base = base
        self.domain = base.domain
        self.grid = base.grid

    def payment(self, profile, i):
        return self.base.payment(profile, i) - profile[i]


class TestStrategyProof:
    def test_pivotal_and_rebated_mechanisms_pass(self, grid3):
        assert is_strategy_proof(vcg_single(3)).ok
        assert is_strategy_proof(bc_single(3)).ok

    def test_own_type_dependent_rebate_fails_with_witness(self):
        corrupted = _OwnTypeReader(vcg_single(3))
        verdict = is_strategy_proof(corrupted)
        assert not verdict.ok
        prof, i, dev = verdict.profile, verdict.agent, verdict.deviation
        from groves import insert, outcome, valuation

        deviated = insert(drop(prof, i), i, dev)
        truthful = valuation(
            corrupted.domain, 3, outcome(corrupted.domain, corrupted.grid, prof), i, prof[i]
        ) - corrupted.payment(prof, i)
        after = valuation(
            corrupted.domain, 3, outcome(corrupted.domain, corrupted.grid, deviated), i, prof[i]
        ) - corrupted.payment(deviated, i)
        assert after > truthful

    def test_random_own_type_independent_rebates_pass(self):
        rng = random.Random(5)
        for n, top in ((3, 3), (4, 2)):
            for _ in range(3):
                mech = scaled_anonymous_seed(bc_single(n, top), rng)
                assert is_strategy_proof(mech).ok


class TestTotalityValidation:
    def test_missing_anonymous_key_rejected(self, grid3):
        table = {key: F(0) for key in grid3.sorted_keys()}
        table.pop((F(3), F(1)))
        with pytest.raises(TotalityError):
            GrovesMechanism(SingleItem(), grid3, AnonymousTabulated(table))

    def test_extra_key_rejected(self, grid3):
        table = {key: F(0) for key in grid3.sorted_keys()}
        table[(F(9), F(9))] = F(1)
        with pytest.raises(TotalityError):
            GrovesMechanism(SingleItem(), grid3, AnonymousTabulated(table))

    def test_wrong_coefficient_count_rejected(self, grid3):
        with pytest.raises(TotalityError):
            GrovesMechanism(SingleItem(), grid3, LinearAnonymous(F(0), (F(0),)))

    def test_wrong_agent_table_count_rejected(self, grid3):
        tables = tuple({k: F(0) for k in grid3.others_keys()} for _ in range(2))
        with pytest.raises(TotalityError):
            GrovesMechanism(SingleItem(), grid3, Tabulated(tables))

    def test_anonymous_keys_are_canonicalized(self, grid3):
        table = {tuple(reversed(key)): F(1, 7) for key in grid3.sorted_keys()}
        mech = GrovesMechanism(SingleItem(), grid3, AnonymousTabulated(table))
        assert mech.redistribute(1, (F(0), F(3))) == F(1, 7)

    def test_conflicting_duplicate_keys_rejected(self):
        with pytest.raises(ContractViolation):
            AnonymousTabulated({(F(1), F(0)): F(1), (F(0), F(1)): F(2)})


def test_verdicts_are_truthy_on_success(grid4):
    verdict = is_non_deficit(vcg_mechanism(SingleItem(), grid4))
    assert verdict and verdict.ok and verdict.profile is None


def test_mechanism_equality_ignores_caches(grid4):
    a = bc_single(4)
    b = bc_single(4)
    a.total_payment((F(1), F(1), F(0), F(0)))
    assert a == b


def test_rebate_representations_compare_by_value(grid4):
    linear = with_redistribution(
        vcg_mechanism(SingleItem(), grid4), LinearAnonymous(F(0), (F(0), F(1, 4), F(0)))
    )
    from groves import rebates_equal

    assert rebates_equal(linear, bc_single(4))
