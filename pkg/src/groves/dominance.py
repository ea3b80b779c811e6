"""Dominance relations, slack audits, and the search-based spot checks.

Two partial orders on non-deficit mechanisms: one compares rebates
pointwise per agent (individual), the other compares total rebates per
profile (collective).  Individual domination implies collective, never
the reverse.

The feasibility slack at a key is how much one agent's rebate could still
be raised without any profile running a deficit; a mechanism is
individually undominated exactly when every slack is zero.  Scans run in
a fixed ascending order, so all reported witnesses are deterministic.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple

from .domains import (
    Profile,
    PublicProjectEqual,
    TypeGrid,
    _total_vcg,
    drop,
    insert,
    is_symmetric,
)
from .errors import ContractViolation
from .mechanisms import (
    AnonymousTabulated,
    GrovesMechanism,
    Redistribution,
    anonymous_table,
    is_non_deficit,
    vcg_mechanism,
)
from .numerics import sort_desc


@dataclass(frozen=True)
class DominanceWitness:
    """A single point where two mechanisms' rebates (or rebate totals) differ."""

    a_value: Fraction
    b_value: Fraction
    agent: Optional[int] = None
    others: Optional[tuple] = None
    profile: Optional[Profile] = None


@dataclass(frozen=True)
class DominanceVerdict:
    """Result of an exhaustive pairwise comparison.

    result is one of "dominates" (a beats b), "dominated_by" (b beats a),
    "equal", "incomparable".  strict_witness carries the strict inequality
    behind the verdict (a > b for dominates, a < b for dominated_by); an
    incomparable pair carries both: strict_witness with a > b and
    violation_witness with a < b.  All witnesses are the first found in
    ascending scan order.
    """

    relation: str
    result: str
    strict_witness: Optional[DominanceWitness] = None
    violation_witness: Optional[DominanceWitness] = None


def _require_same_universe(a: GrovesMechanism, b: GrovesMechanism) -> None:
    if a.domain != b.domain or a.grid != b.grid:
        raise ContractViolation("mechanisms live on different domains or grids")


def compare_individual(a: GrovesMechanism, b: GrovesMechanism) -> DominanceVerdict:
    """Pointwise comparison of rebates over every (agent, others) key."""
    _require_same_universe(a, b)
    a_above: Optional[DominanceWitness] = None
    b_above: Optional[DominanceWitness] = None
    for i in range(a.n):
        for key in a.grid.others_keys():
            av = a.redistribution.value(i, key)
            bv = b.redistribution.value(i, key)
            if av > bv and a_above is None:
                a_above = DominanceWitness(av, bv, agent=i, others=key)
            elif av < bv and b_above is None:
                b_above = DominanceWitness(av, bv, agent=i, others=key)
            if a_above is not None and b_above is not None:
                return DominanceVerdict("individual", "incomparable", a_above, b_above)
    if a_above is not None:
        return DominanceVerdict("individual", "dominates", a_above)
    if b_above is not None:
        return DominanceVerdict("individual", "dominated_by", b_above)
    return DominanceVerdict("individual", "equal")


def total_redistribution(mech: GrovesMechanism, profile: Iterable[Fraction]) -> Fraction:
    """Sum of all agents' rebates at a profile."""
    prof = mech.grid.validate_profile(profile)
    return mech._total_rebate(prof)


def compare_collective(a: GrovesMechanism, b: GrovesMechanism) -> DominanceVerdict:
    """Comparison of rebate totals over every profile."""
    _require_same_universe(a, b)
    a_above: Optional[DominanceWitness] = None
    b_above: Optional[DominanceWitness] = None
    for prof in a.grid.profiles():
        av = a._total_rebate(prof)
        bv = b._total_rebate(prof)
        if av > bv and a_above is None:
            a_above = DominanceWitness(av, bv, profile=prof)
        elif av < bv and b_above is None:
            b_above = DominanceWitness(av, bv, profile=prof)
        if a_above is not None and b_above is not None:
            return DominanceVerdict("collective", "incomparable", a_above, b_above)
    if a_above is not None:
        return DominanceVerdict("collective", "dominates", a_above)
    if b_above is not None:
        return DominanceVerdict("collective", "dominated_by", b_above)
    return DominanceVerdict("collective", "equal")


def feasibility_slack(mech: GrovesMechanism, i: int, others: Iterable[Fraction]) -> Fraction:
    """How much r_i(others) could still grow without creating a deficit:

    min over agent i's reports of (total VCG - other agents' rebates)
    minus r_i(others).  Nonnegative everywhere iff the mechanism is
    non-deficit; zero everywhere iff it is individually undominated.
    """
    key = mech.grid.validate_others(others)
    if not 0 <= i < mech.n:
        raise ContractViolation(f"agent index {i} out of range for n={mech.n}")
    return _slack(mech, i, key)


def _slack(mech: GrovesMechanism, i: int, key: tuple) -> Fraction:
    red = mech.redistribution
    n = mech.n
    best: Optional[Fraction] = None
    for v in mech.grid.values:
        prof = insert(key, i, v)
        candidate = _total_vcg(mech.domain, prof) - sum(
            (red.value(j, drop(prof, j)) for j in range(n) if j != i), Fraction(0)
        )
        if best is None or candidate < best:
            best = candidate
    return best - red.value(i, key)


@dataclass(frozen=True)
class UndominanceVerdict:
    ok: bool
    agent: Optional[int] = None
    others: Optional[tuple] = None
    slack: Optional[Fraction] = None

    def __bool__(self) -> bool:
        return self.ok


def is_individually_undominated(mech: GrovesMechanism) -> UndominanceVerdict:
    """True iff the feasibility slack is exactly zero at every key.

    A positive slack means some rebate can be raised (the mechanism is
    dominated); a negative slack means the mechanism runs a deficit.
    Anonymous mechanisms on symmetric domains are scanned once per sorted
    key (the slack is agent- and permutation-independent there).
    """
    if mech.is_anonymous and is_symmetric(mech.domain):
        for key in mech.grid.sorted_keys():
            s = _slack(mech, 0, key)
            if s != 0:
                return UndominanceVerdict(False, agent=0, others=key, slack=s)
        return UndominanceVerdict(True)
    for i in range(mech.n):
        for key in mech.grid.others_keys():
            s = _slack(mech, i, key)
            if s != 0:
                return UndominanceVerdict(False, agent=i, others=key, slack=s)
    return UndominanceVerdict(True)


def max_feasibility_slack(mech: GrovesMechanism) -> Fraction:
    """Largest slack over every (agent, others) key; zero iff undominated."""
    if mech.is_anonymous and is_symmetric(mech.domain):
        return max(_slack(mech, 0, key) for key in mech.grid.sorted_keys())
    return max(
        _slack(mech, i, key)
        for i in range(mech.n)
        for key in mech.grid.others_keys()
    )


@dataclass(frozen=True)
class PurnAgentReport:
    """Whether one agent can always zero out their payment by some report."""

    agent: int
    holds: bool
    witnesses: dict
    failing_key: Optional[tuple] = None


def purn_condition(mech: GrovesMechanism) -> Tuple[PurnAgentReport, ...]:
    """Per agent: does every others-vector admit a report with zero payment?

    A mechanism with this property individually dominates every other
    pay-only mechanism.  Witnesses are the first zeroing report in
    ascending grid order.
    """
    reports = []
    for i in range(mech.n):
        witnesses: Dict[tuple, Fraction] = {}
        failing = None
        for key in mech.grid.others_keys():
            found = None
            for v in mech.grid.values:
                if mech._payment(insert(key, i, v), i) == 0:
                    found = v
                    break
            if found is None:
                failing = key
                break
            witnesses[key] = found
        reports.append(
            PurnAgentReport(i, failing is None, witnesses, failing)
        )
    return tuple(reports)


@dataclass(frozen=True)
class N2CandidateVerdict:
    index: int
    non_deficit: bool
    nonpositive: bool
    equals_vcg: bool
    dominated_by_vcg: bool


@dataclass(frozen=True)
class N2AuditReport:
    vcg_undominated: bool
    candidates: Tuple[N2CandidateVerdict, ...]


def vcg_uniqueness_n2_audit(
    grid: TypeGrid, cost: Fraction, candidates: Iterable[Redistribution]
) -> N2AuditReport:
    """Audit the two-agent equal-share project, where VCG is the only
    individually undominated anonymous mechanism.

    For each anonymous candidate rebate: non-deficit forces r(x) <= 0
    everywhere (at the profile (x, x) the VCG total is zero), and any
    strictly negative value makes the candidate individually dominated
    by VCG.
    """
    if grid.n != 2:
        raise ContractViolation(f"two-agent audit requires n=2, got n={grid.n}")
    domain = PublicProjectEqual(cost)
    vcg = vcg_mechanism(domain, grid)
    reports = []
    for index, red in enumerate(candidates):
        mech = GrovesMechanism(domain, grid, red)
        values = [red.value(0, key) for key in grid.sorted_keys()]
        reports.append(
            N2CandidateVerdict(
                index=index,
                non_deficit=is_non_deficit(mech).ok,
                nonpositive=all(v <= 0 for v in values),
                equals_vcg=all(v == 0 for v in values),
                dominated_by_vcg=compare_individual(vcg, mech).result == "dominates",
            )
        )
    return N2AuditReport(
        vcg_undominated=is_individually_undominated(vcg).ok,
        candidates=tuple(reports),
    )


@dataclass(frozen=True)
class DominatorSearchReport:
    """Outcome of a seeded perturbation search for a collectively dominating
    anonymous mechanism.  found=False is non-falsification evidence, not proof."""

    found: bool
    attempts: int
    feasible: int
    seed: int
    candidate: Optional[GrovesMechanism] = None


_DELTA_DENOMINATORS = (1, 2, 3, 4, 6, 8, 12, 24)


def search_collective_dominator(
    mech: GrovesMechanism, attempts: int = 10_000, seed: int = 0
) -> DominatorSearchReport:
    """Perturb an anonymous non-deficit mechanism's rebate table at random,
    looking for a non-deficit candidate that collectively dominates it.

    Candidates add sparse rational deltas to the materialized table.  A
    candidate counts iff it stays non-deficit at every profile and its
    rebate total is everywhere >= the base's, strictly somewhere.  Any hit
    is re-verified through the public checkers before being reported.
    """
    if not mech.is_anonymous or not is_symmetric(mech.domain):
        raise ContractViolation("search requires an anonymous mechanism on a symmetric domain")
    verdict = is_non_deficit(mech)
    if not verdict:
        raise ContractViolation(f"search base runs a deficit at {verdict.profile}")

    grid = mech.grid
    keys = list(grid.sorted_keys())
    key_index = {k: idx for idx, k in enumerate(keys)}
    base = anonymous_table(mech)

    # Both conditions below are permutation invariant (anonymous rebates,
    # symmetric domain), so one profile per multiset suffices.
    profiles = [
        combo
        for combo in itertools.combinations_with_replacement(grid.values, mech.n)
    ]
    profile_keys = [
        tuple(key_index[sort_desc(drop(p, i))] for i in range(mech.n)) for p in profiles
    ]
    headroom = [
        _total_vcg(mech.domain, p) - sum((base[sort_desc(drop(p, i))] for i in range(mech.n)), Fraction(0))
        for p in profiles
    ]

    rng = random.Random(seed)
    feasible = 0
    for _ in range(attempts):
        support = rng.sample(range(len(keys)), rng.randint(1, min(4, len(keys))))
        delta = {}
        for idx in support:
            num = rng.randint(-24, 24)
            if num:
                delta[idx] = Fraction(num, rng.choice(_DELTA_DENOMINATORS))
        if not delta:
            continue

        stays_feasible = True
        weakly_above = True
        strictly_above = False
        for pk, room in zip(profile_keys, headroom):
            shift = sum((delta.get(idx, Fraction(0)) for idx in pk), Fraction(0))
            if shift > room:
                stays_feasible = False
            if shift < 0:
                weakly_above = False
            elif shift > 0:
                strictly_above = True
            if not stays_feasible and not weakly_above:
                break
        if stays_feasible:
            feasible += 1
        if stays_feasible and weakly_above and strictly_above:
            table = dict(base)
            for idx, d in delta.items():
                table[keys[idx]] = table[keys[idx]] + d
            candidate = GrovesMechanism(mech.domain, grid, AnonymousTabulated(table))
            if (
                is_non_deficit(candidate).ok
                and compare_collective(candidate, mech).result == "dominates"
            ):
                return DominatorSearchReport(True, attempts, feasible, seed, candidate)
    return DominatorSearchReport(False, attempts, feasible, seed)
