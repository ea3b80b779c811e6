"""The optimal-in-expectation linear rebate family for unit-demand auctions.

Members are indexed by an integer k between 0 and n with k - m odd.  Each
instance is anonymous, linear in the ordered other-agent bids, non-deficit
on grids containing both bounds, individually undominated there, and
exactly budget balanced in its index's signature scenario: the top bid
hitting U (k = 0), the k-th and (k+1)-th bids tying (0 < k < n), or the
bottom bid hitting L (k = n).  The k = m + 1 member pays every agent m/n
times the (m+1)-th highest other bid — the classic one-shot rebate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .domains import MultiUnit, Profile, TypeGrid
from .errors import ContractViolation
from .mechanisms import GrovesMechanism, LinearAnonymous
from .numerics import binomial, rational, sort_desc


@dataclass(frozen=True)
class OELSpec:
    """Family parameters: n agents, m units (1 <= m < n), index k (k - m odd),
    and the bid bounds L < U."""

    n: int
    m: int
    k: int
    L: Fraction
    U: Fraction

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 2):
            raise ContractViolation(f"need at least 2 agents, got n={self.n}")
        if not (isinstance(self.m, int) and 1 <= self.m < self.n):
            raise ContractViolation(f"need 1 <= m < n, got m={self.m}, n={self.n}")
        if not (isinstance(self.k, int) and 0 <= self.k <= self.n):
            raise ContractViolation(f"index k must lie in [0, {self.n}], got {self.k}")
        if (self.k - self.m) % 2 == 0:
            raise ContractViolation(
                f"index parity violated: k - m = {self.k - self.m} must be odd"
            )
        L, U = rational(self.L), rational(self.U)
        if L >= U:
            raise ContractViolation(f"bid bounds need L < U, got L={L}, U={U}")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "U", U)


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def _low_term(n: int, m: int, i: int) -> Fraction:
    # alternating coefficient used for positions i = 1..m
    return Fraction(
        _sign(m - i) * binomial(n - i - 1, n - m - 1), binomial(m - 1, i - 1)
    )


def _high_term(n: int, m: int, i: int) -> Fraction:
    # alternating coefficient used for positions i = m+1..n-1
    return Fraction(
        _sign(m - i - 1) * binomial(i - 1, m - 1), binomial(n - m - 1, n - i - 1)
    )


def oel_coefficients(spec: OELSpec) -> LinearAnonymous:
    """The exact (c0, c_1..c_{n-1}) for the given family member."""
    n, m, k = spec.n, spec.m, spec.k
    share = Fraction(m, n)
    c0 = Fraction(0)
    coeffs = [Fraction(0)] * (n - 1)

    if k == 0:
        for i in range(1, m + 1):
            coeffs[i - 1] = _low_term(n, m, i)
        c0 = spec.U * share - spec.U * sum(
            (_low_term(n, m, i) for i in range(1, m + 1)), Fraction(0)
        )
    elif 1 <= k <= m:
        for i in range(k + 1, m + 1):
            coeffs[i - 1] = _low_term(n, m, i)
        coeffs[k - 1] = share - sum(
            (_low_term(n, m, i) for i in range(k + 1, m + 1)), Fraction(0)
        )
    elif m + 1 <= k <= n - 1:
        for i in range(m + 1, k):
            coeffs[i - 1] = _high_term(n, m, i)
        coeffs[k - 1] = share - sum(
            (_high_term(n, m, i) for i in range(m + 1, k)), Fraction(0)
        )
    else:  # k == n
        for i in range(m + 1, n):
            coeffs[i - 1] = _high_term(n, m, i)
        c0 = spec.L * share - spec.L * sum(
            (_high_term(n, m, i) for i in range(m + 1, n)), Fraction(0)
        )

    return LinearAnonymous(c0, tuple(coeffs))


def oel_mechanism(spec: OELSpec, grid: TypeGrid) -> GrovesMechanism:
    """Materialize the family member on a grid whose bounds match the spec."""
    if grid.n != spec.n:
        raise ContractViolation(f"grid has n={grid.n}, spec has n={spec.n}")
    if grid.L != spec.L or grid.U != spec.U:
        raise ContractViolation(
            f"grid bounds [{grid.L}, {grid.U}] differ from spec bounds "
            f"[{spec.L}, {spec.U}]"
        )
    return GrovesMechanism(MultiUnit(spec.m), grid, oel_coefficients(spec))


def _scenario_matches(spec: OELSpec, profile: Profile) -> bool:
    ordered = sort_desc(profile)
    if spec.k == 0:
        return ordered[0] == spec.U
    if spec.k == spec.n:
        return ordered[-1] == spec.L
    return ordered[spec.k - 1] == ordered[spec.k]


def _scenario_description(spec: OELSpec) -> str:
    if spec.k == 0:
        return f"highest bid equals U={spec.U}"
    if spec.k == spec.n:
        return f"lowest bid equals L={spec.L}"
    return f"bids ranked {spec.k} and {spec.k + 1} tie"


@dataclass(frozen=True)
class BudgetScenarioReport:
    ok: bool
    scenario: str
    matching_profiles: int
    counterexample: Optional[Profile] = None
    total_at_counterexample: Optional[Fraction] = None

    def __bool__(self) -> bool:
        return self.ok


def oel_budget_scenarios(spec: OELSpec, grid: TypeGrid) -> BudgetScenarioReport:
    """Exact budget balance on every grid profile matching the index's scenario."""
    mech = oel_mechanism(spec, grid)
    scenario = _scenario_description(spec)
    matched = 0
    for prof in grid.profiles():
        if not _scenario_matches(spec, prof):
            continue
        matched += 1
        total = mech._total_payment(prof)
        if total != 0:
            return BudgetScenarioReport(False, scenario, matched, prof, total)
    return BudgetScenarioReport(True, scenario, matched)
