"""Constructive transformations that grow rebates without breaking non-deficit.

All of them are built on the surplus guarantee: the smallest total payment
a mechanism can be forced to by varying one agent's report.  Handing that
slack back (all of it to one agent, or 1/n of it to everyone, or
sequentially by priority, or iteratively while staying anonymous) yields
mechanisms that weakly improve every agent and, for the one-shot
priority technique and the iterative limit, leave zero slack everywhere.

Infima are minima here: grids are finite, so the minimum is always
attained.  For linear-anonymous rebates on auction domains the total
payment is piecewise linear in the varied report with breakpoints at the
other agents' values, so the grid minimum is re-verified against the
breakpoint set {L, U} + others as an internal cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Optional, Tuple

from .domains import TypeGrid, _total_vcg, drop, insert, is_auction, is_symmetric
from .errors import ContractViolation, DeficitInputError, GrovesError
from .mechanisms import (
    AnonymousTabulated,
    GrovesMechanism,
    LinearAnonymous,
    Tabulated,
    is_non_deficit,
    tabulate_anonymous,
    tabulate_per_agent,
    with_redistribution,
)
from .numerics import rational, sort_desc


def surplus_guarantee(mech: GrovesMechanism, i: int, others: Iterable[Fraction]) -> Fraction:
    """min over agent i's grid reports of the total payment, others fixed."""
    key = mech.grid.validate_others(others)
    if not 0 <= i < mech.n:
        raise ContractViolation(f"agent index {i} out of range for n={mech.n}")
    return _surplus(mech, i, key)


def _surplus(mech: GrovesMechanism, i: int, key: tuple) -> Fraction:
    result = min(mech._total_payment(insert(key, i, v)) for v in mech.grid.values)
    if isinstance(mech.redistribution, LinearAnonymous) and is_auction(mech.domain):
        breakpoints = {mech.grid.L, mech.grid.U, *key}
        over_breakpoints = min(
            mech._total_payment(insert(key, i, v)) for v in breakpoints
        )
        if over_breakpoints != result:
            raise GrovesError(
                "piecewise-linear breakpoint minimization disagrees with the "
                f"grid scan at agent {i}, others {key}"
            )
    return result


def bcgc(mech: GrovesMechanism) -> GrovesMechanism:
    """Give every agent 1/n of their surplus guarantee on top of their rebate.

    The output is always non-deficit; a non-deficit input is either a
    fixed point or individually dominated by the output.
    """
    n = mech.n
    red = mech.redistribution
    if mech.is_anonymous and is_symmetric(mech.domain):
        new = tabulate_anonymous(
            mech.grid,
            lambda key: red.value(0, key) + Fraction(_surplus(mech, 0, key), n),
        )
        return with_redistribution(mech, new)
    new = tabulate_per_agent(
        mech.grid,
        lambda i, key: red.value(i, key) + Fraction(_surplus(mech, i, key), n),
    )
    return with_redistribution(mech, new)


def bcgc_j(mech: GrovesMechanism, j: int) -> GrovesMechanism:
    """Give agent j their entire surplus guarantee; everyone else is unchanged.

    Breaks anonymity in general, so the output is always per-agent tabulated.
    """
    if not 0 <= j < mech.n:
        raise ContractViolation(f"agent index {j} out of range for n={mech.n}")
    red = mech.redistribution

    def updated(i: int, key: tuple) -> Fraction:
        base = red.value(i, key)
        return base + _surplus(mech, i, key) if i == j else base

    return with_redistribution(mech, tabulate_per_agent(mech.grid, updated))


@dataclass(frozen=True)
class PriorityOrder:
    """Agents listed from highest to lowest priority (a permutation of 0..n-1)."""

    ranking: tuple

    def __post_init__(self):
        ranking = tuple(self.ranking)
        if sorted(ranking) != list(range(len(ranking))):
            raise ContractViolation(
                f"ranking must be a permutation of 0..{len(ranking) - 1}: {ranking}"
            )
        object.__setattr__(self, "ranking", ranking)

    @property
    def n(self) -> int:
        return len(self.ranking)

    def priority_of(self, agent: int) -> int:
        """1 = highest priority."""
        return self.ranking.index(agent) + 1


def priority_improve(mech: GrovesMechanism, order: PriorityOrder) -> GrovesMechanism:
    """Maximize each agent's rebate in priority order, earlier updates locked in.

    The first update hands the full surplus guarantee to the top-priority
    agent (it coincides with `bcgc_j` for that agent); every later update
    maximizes subject to the already-updated tables.  The output weakly
    improves every rebate and leaves zero feasibility slack everywhere.
    Deficit inputs are rejected with a witness.
    """
    if order.n != mech.n:
        raise ContractViolation(f"priority order over {order.n} agents, grid has {mech.n}")
    verdict = is_non_deficit(mech)
    if not verdict:
        raise DeficitInputError(verdict.profile)

    grid, domain, n = mech.grid, mech.domain, mech.n
    red = mech.redistribution
    updated = {}

    def rebate(j: int, key: tuple) -> Fraction:
        table = updated.get(j)
        return table[key] if table is not None else red.value(j, key)

    for i in order.ranking:
        table = {}
        for key in grid.others_keys():
            best: Optional[Fraction] = None
            for v in grid.values:
                prof = insert(key, i, v)
                candidate = _total_vcg(domain, prof) - sum(
                    (rebate(j, drop(prof, j)) for j in range(n) if j != i),
                    Fraction(0),
                )
                if best is None or candidate < best:
                    best = candidate
            table[key] = best
        updated[i] = table

    return with_redistribution(mech, Tabulated(tuple(updated[i] for i in range(n))))


def _require_anonymous(mech: GrovesMechanism) -> None:
    if not mech.is_anonymous:
        raise ContractViolation("transform requires an anonymous redistribution")
    if not is_symmetric(mech.domain):
        raise ContractViolation(
            "transform requires a symmetric domain (the VCG total must be "
            "permutation independent); unequal-share projects are not"
        )


def iterate_step(mech: GrovesMechanism) -> GrovesMechanism:
    """One anonymity-preserving improvement step.

    new(x) = ((n-1)/n) * r(x) + (1/n) * min over one agent's reports of
    (total VCG - sum of the other agents' rebates).  Coincides with
    `bcgc`, preserves non-deficit, and never lowers any rebate.
    """
    _require_anonymous(mech)
    grid, domain, n = mech.grid, mech.domain, mech.n
    red = mech.redistribution

    def step_value(key: tuple) -> Fraction:
        inf_term = None
        for v in grid.values:
            prof = insert(key, 0, v)
            candidate = _total_vcg(domain, prof) - sum(
                (red.value(j, drop(prof, j)) for j in range(1, n)), Fraction(0)
            )
            if inf_term is None or candidate < inf_term:
                inf_term = candidate
        return Fraction(n - 1, n) * red.value(0, key) + Fraction(inf_term, n)

    return with_redistribution(mech, tabulate_anonymous(grid, step_value))


def anonymous_residual(mech: GrovesMechanism) -> Fraction:
    """Largest feasibility slack over all keys; zero iff nothing is left to hand back."""
    _require_anonymous(mech)
    from .dominance import max_feasibility_slack

    return max_feasibility_slack(mech)


@dataclass(frozen=True)
class IterationStep:
    index: int
    mechanism: GrovesMechanism
    residual: Fraction


@dataclass(frozen=True)
class IterationTrace:
    """Snapshots and residuals of an iterate_until run, input included as step 0."""

    steps: Tuple[IterationStep, ...]
    residual_bound: Fraction
    converged: bool

    @property
    def final_residual(self) -> Fraction:
        return self.steps[-1].residual


def iterate_until(
    mech: GrovesMechanism,
    max_steps: int,
    residual_bound: Fraction = Fraction(0),
) -> Tuple[GrovesMechanism, IterationTrace]:
    """Repeat `iterate_step` until the residual hits `residual_bound` (exact
    fixed points have residual zero) or `max_steps` is exhausted.

    Hitting the cap is reported via the trace, not an error.
    """
    _require_anonymous(mech)
    if max_steps < 0:
        raise ContractViolation(f"max_steps must be nonnegative, got {max_steps}")
    verdict = is_non_deficit(mech)
    if not verdict:
        raise DeficitInputError(verdict.profile)

    bound = rational(residual_bound)
    current = mech
    steps = []
    for k in itertools.count():
        residual = anonymous_residual(current)
        steps.append(IterationStep(k, current, residual))
        if residual <= bound or k == max_steps:
            break
        current = iterate_step(current)
    trace = IterationTrace(tuple(steps), bound, steps[-1].residual <= bound)
    return current, trace


def anonymize(mech: GrovesMechanism) -> GrovesMechanism:
    """Average the rebates over agents and permutations into one anonymous rule.

    Preserves non-deficit, and preserves collective domination over any
    anonymous mechanism.  Idempotent on anonymous inputs.
    """
    if not is_symmetric(mech.domain):
        raise ContractViolation(
            "anonymization needs a permutation-independent VCG total; "
            "unequal-share projects do not have one"
        )
    n = mech.n
    red = mech.redistribution
    denominator = n * factorial(n - 1)

    def averaged(key: tuple) -> Fraction:
        total = sum(
            (
                red.value(j, perm)
                for j in range(n)
                for perm in itertools.permutations(key)
            ),
            Fraction(0),
        )
        return Fraction(total, denominator)

    return with_redistribution(mech, tabulate_anonymous(mech.grid, averaged))


def counterexample_q(grid: TypeGrid, anchor: Iterable[Fraction]) -> AnonymousTabulated:
    """The separating perturbation: -1 on the anchor multiset, +2 elsewhere.

    For n >= 3 its totals satisfy sum_i q(others_i) >= 0 at every profile
    (at most two removals of one entry can reproduce a distinct-valued
    anchor), so subtracting q from any non-deficit anonymous rebate stays
    non-deficit while losing exactly one pointwise value — collectively
    dominated, but not individually.
    """
    if grid.n < 3:
        raise ContractViolation(f"separating construction needs n >= 3, got n={grid.n}")
    if len(grid.values) < grid.n - 1:
        raise ContractViolation(
            f"grid needs at least n-1={grid.n - 1} distinct values"
        )
    key = grid.validate_others(anchor)
    if len(set(key)) != len(key):
        raise ContractViolation(f"anchor values must be pairwise distinct: {key}")
    target = sort_desc(key)
    return tabulate_anonymous(
        grid, lambda k: Fraction(-1) if k == target else Fraction(2)
    )
