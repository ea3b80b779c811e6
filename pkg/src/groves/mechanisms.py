"""Groves mechanisms: a domain + grid + redistribution, and the §-level property checks.

Every mechanism here charges the VCG payment and then hands agent i a
rebate r_i that depends only on the other agents' reports, so strategy-
proofness is structural.  Three rebate representations are supported:

* :class:`Tabulated` — one table per agent, keyed by the agent-ordered
  others-vector (the general, non-anonymous case);
* :class:`AnonymousTabulated` — a single table keyed by the descending-
  sorted others-vector (the canonical key for permutation-independent
  rebates);
* :class:`LinearAnonymous` — c0 + sum of coefficients times the ordered
  entries of the others-vector.

Tables are validated for totality over the grid at construction time, so
a malformed mechanism fails fast rather than deep inside a scan.

The exhaustive checkers scan profiles in ascending lexicographic order
and report the first witness found, which makes their output
deterministic; `workers` > 1 partitions the scan across threads and
reduces with logical-and plus earliest-witness, giving identical results
regardless of worker count.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, Optional, Tuple, Union

from .domains import (
    Domain,
    Profile,
    TypeGrid,
    _outcome,
    _total_vcg,
    _vcg_payment,
    drop,
    insert,
    valuation,
    validate_domain_grid,
)
from .errors import ContractViolation, TotalityError
from .numerics import rational, sort_desc


def _rational_table(table, canonical_key) -> dict:
    out = {}
    for key, value in dict(table).items():
        ckey = canonical_key(tuple(rational(v) for v in key))
        val = rational(value)
        if ckey in out and out[ckey] != val:
            raise ContractViolation(f"conflicting values for key {ckey}")
        out[ckey] = val
    return out


@dataclass(frozen=True)
class LinearAnonymous:
    """r(others) = c0 + sum_j coeffs[j-1] * (j-th highest entry of others)."""

    c0: Fraction
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "c0", rational(self.c0))
        object.__setattr__(self, "coeffs", tuple(rational(c) for c in self.coeffs))

    is_anonymous = True

    def value(self, i: int, others: tuple) -> Fraction:
        return _linear_value(self, sort_desc(others))


@lru_cache(maxsize=None)
def _linear_value(red: "LinearAnonymous", key: tuple) -> Fraction:
    return red.c0 + sum((c * x for c, x in zip(red.coeffs, key)), Fraction(0))


@dataclass(frozen=True)
class AnonymousTabulated:
    """One table shared by all agents, keyed by the descending-sorted others-vector."""

    table: dict

    def __post_init__(self):
        object.__setattr__(self, "table", _rational_table(self.table, sort_desc))

    is_anonymous = True

    def value(self, i: int, others: tuple) -> Fraction:
        key = sort_desc(others)
        try:
            return self.table[key]
        except KeyError:
            raise TotalityError(f"no rebate tabulated for key {key}") from None


@dataclass(frozen=True)
class Tabulated:
    """Per-agent tables keyed by the agent-ordered others-vector."""

    tables: tuple

    def __post_init__(self):
        object.__setattr__(
            self,
            "tables",
            tuple(_rational_table(t, lambda k: k) for t in self.tables),
        )

    is_anonymous = False

    def value(self, i: int, others: tuple) -> Fraction:
        try:
            return self.tables[i][tuple(others)]
        except KeyError:
            raise TotalityError(
                f"no rebate tabulated for agent {i} at key {tuple(others)}"
            ) from None


Redistribution = Union[LinearAnonymous, AnonymousTabulated, Tabulated]


def zero_redistribution(grid: TypeGrid) -> LinearAnonymous:
    return LinearAnonymous(Fraction(0), (Fraction(0),) * (grid.n - 1))


def tabulate_anonymous(grid: TypeGrid, fn: Callable[[tuple], Fraction]) -> AnonymousTabulated:
    """Materialize an anonymous rebate by evaluating fn on every sorted key."""
    return AnonymousTabulated({key: fn(key) for key in grid.sorted_keys()})


def tabulate_per_agent(grid: TypeGrid, fn: Callable[[int, tuple], Fraction]) -> Tabulated:
    """Materialize a general rebate by evaluating fn on every (agent, others) key."""
    return Tabulated(
        tuple(
            {key: fn(i, key) for key in grid.others_keys()}
            for i in range(grid.n)
        )
    )


def _validate_totality(red: Redistribution, grid: TypeGrid) -> None:
    if isinstance(red, LinearAnonymous):
        if len(red.coeffs) != grid.n - 1:
            raise TotalityError(
                f"{len(red.coeffs)} coefficients for n-1={grid.n - 1} order statistics"
            )
    elif isinstance(red, AnonymousTabulated):
        expected = set(grid.sorted_keys())
        have = set(red.table)
        if have != expected:
            missing = sorted(expected - have)
            extra = sorted(have - expected)
            raise TotalityError(
                f"anonymous table does not match the grid "
                f"(missing {missing[:3]}{'...' if len(missing) > 3 else ''}, "
                f"extra {extra[:3]}{'...' if len(extra) > 3 else ''})"
            )
    elif isinstance(red, Tabulated):
        if len(red.tables) != grid.n:
            raise TotalityError(f"{len(red.tables)} agent tables for n={grid.n}")
        expected = set(grid.others_keys())
        for i, table in enumerate(red.tables):
            if set(table) != expected:
                raise TotalityError(f"agent {i} table does not cover the grid")
    else:
        raise ContractViolation(f"unknown redistribution {red!r}")


@dataclass(frozen=True)
class GrovesMechanism:
    """A decision problem plus a rebate rule; the unit audited and transformed."""

    domain: Domain
    grid: TypeGrid
    redistribution: Redistribution
    _total_cache: dict = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        validate_domain_grid(self.domain, self.grid)
        _validate_totality(self.redistribution, self.grid)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def is_anonymous(self) -> bool:
        return self.redistribution.is_anonymous

    def redistribute(self, i: int, others: Iterable[Fraction]) -> Fraction:
        """The rebate r_i(others); permutation independent for anonymous variants."""
        key = self.grid.validate_others(others)
        return self.redistribution.value(i, key)

    def payment(self, profile: Iterable[Fraction], i: int) -> Fraction:
        """t_i = VCG payment minus rebate; negative means agent i receives money."""
        prof = self.grid.validate_profile(profile)
        return self._payment(prof, i)

    def _payment(self, prof: Profile, i: int) -> Fraction:
        return _vcg_payment(self.domain, prof, i) - self.redistribution.value(
            i, drop(prof, i)
        )

    def total_payment(self, profile: Iterable[Fraction]) -> Fraction:
        prof = self.grid.validate_profile(profile)
        return self._total_payment(prof)

    def _total_payment(self, prof: Profile) -> Fraction:
        cached = self._total_cache.get(prof)
        if cached is None:
            cached = _total_vcg(self.domain, prof) - self._total_rebate(prof)
            self._total_cache[prof] = cached
        return cached

    def _total_rebate(self, prof: Profile) -> Fraction:
        red = self.redistribution
        return sum(
            (red.value(i, drop(prof, i)) for i in range(len(prof))), Fraction(0)
        )

    def utility(self, profile: Iterable[Fraction], i: int) -> Fraction:
        """Truthful final utility: valuation at the efficient outcome minus payment."""
        prof = self.grid.validate_profile(profile)
        decision = _outcome(self.domain, prof)
        return valuation(self.domain, self.n, decision, i, prof[i]) - self._payment(prof, i)


def vcg_mechanism(domain: Domain, grid: TypeGrid) -> GrovesMechanism:
    """The zero-rebate mechanism (pure VCG)."""
    return GrovesMechanism(domain, grid, zero_redistribution(grid))


def with_redistribution(mech: GrovesMechanism, red: Redistribution) -> GrovesMechanism:
    return GrovesMechanism(mech.domain, mech.grid, red)


def anonymous_table(mech: GrovesMechanism) -> Dict[tuple, Fraction]:
    """The rebate values of an anonymous mechanism, keyed by sorted others-vector."""
    if not mech.is_anonymous:
        raise ContractViolation("mechanism is not anonymous")
    red = mech.redistribution
    return {key: red.value(0, key) for key in mech.grid.sorted_keys()}


def rebates_equal(a: GrovesMechanism, b: GrovesMechanism) -> bool:
    """Value-level equality of two mechanisms' rebates over the shared grid."""
    if a.domain != b.domain or a.grid != b.grid:
        raise ContractViolation("mechanisms live on different domains or grids")
    return all(
        a.redistribution.value(i, key) == b.redistribution.value(i, key)
        for i in range(a.n)
        for key in a.grid.others_keys()
    )


@dataclass(frozen=True)
class CheckVerdict:
    """Outcome of an exhaustive property check, with the first witness on failure."""

    ok: bool
    profile: Optional[Profile] = None
    agent: Optional[int] = None
    deviation: Optional[Fraction] = None

    def __bool__(self) -> bool:
        return self.ok


def _chunked(seq, size):
    it = iter(seq)
    while True:
        chunk = list(itertools.islice(it, size))
        if not chunk:
            return
        yield chunk


def _first_failure(items, test, workers: int = 1):
    """First item (in iteration order) failing `test`, or None.

    With workers > 1 the scan is partitioned into chunks; each worker
    reports its chunk's first failure and the earliest chunk wins, so the
    result does not depend on the worker count.
    """
    if workers <= 1:
        for item in items:
            if not test(item):
                return item
        return None

    def scan(chunk):
        for item in chunk:
            if not test(item):
                return item
        return None

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for found in pool.map(scan, _chunked(items, 512)):
            if found is not None:
                return found
    return None


def is_non_deficit(mech: GrovesMechanism, workers: int = 1) -> CheckVerdict:
    """Exhaustively check that the total payment is >= 0 at every grid profile."""
    witness = _first_failure(
        mech.grid.profiles(), lambda p: mech._total_payment(p) >= 0, workers
    )
    if witness is None:
        return CheckVerdict(True)
    return CheckVerdict(False, profile=witness)


def is_pay_only(mech: GrovesMechanism, workers: int = 1) -> CheckVerdict:
    """Exhaustively check that every individual payment is >= 0."""
    pairs = (
        (p, i) for p in mech.grid.profiles() for i in range(mech.n)
    )
    witness = _first_failure(pairs, lambda pi: mech._payment(pi[0], pi[1]) >= 0, workers)
    if witness is None:
        return CheckVerdict(True)
    return CheckVerdict(False, profile=witness[0], agent=witness[1])


def is_strategy_proof(mech) -> CheckVerdict:
    """Exhaustively check that no agent gains by misreporting.

    True for every well-formed Groves mechanism; this is a sanity harness
    for hand-built payment rules.  `mech` only needs `.domain`, `.grid`
    and `.payment(profile, agent)`, so corrupted payment rules (e.g. a
    "rebate" that reads the agent's own report) can be audited too.
    """
    domain, grid = mech.domain, mech.grid
    n = grid.n
    for prof in grid.profiles():
        decision = _outcome(domain, prof)
        for i in range(n):
            truthful = valuation(domain, n, decision, i, prof[i]) - mech.payment(prof, i)
            for dev in grid.values:
                if dev == prof[i]:
                    continue
                deviated = insert(drop(prof, i), i, dev)
                dev_utility = valuation(
                    domain, n, _outcome(domain, deviated), i, prof[i]
                ) - mech.payment(deviated, i)
                if dev_utility > truthful:
                    return CheckVerdict(False, profile=prof, agent=i, deviation=dev)
    return CheckVerdict(True)


def is_budget_balanced_at(mech: GrovesMechanism, profile: Iterable[Fraction]) -> bool:
    """Whether payments sum to exactly zero at this profile."""
    return mech.total_payment(profile) == 0
