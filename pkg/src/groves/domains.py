"""The four decision problems: efficient outcomes, valuations, pivotal payments.

A :class:`Domain` fixes the decision set and the agents' initial utility
functions; a :class:`TypeGrid` fixes the finite set of admissible type
values shared by all agents.  All operations are pure functions of
immutable inputs, so results are cached globally and evaluation over many
profiles needs no synchronization.

Decisions are represented as

* auctions: the ascending tuple of winning agent indices (0-based), and
* public projects: the int 1 (build) or 0 (cancel).

Auction ties are broken toward the lowest agent index; a public project
whose declared total exactly covers the cost is built.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Tuple, Union

from .errors import ContractViolation
from .numerics import rational

Profile = Tuple[Fraction, ...]
Decision = Union[Tuple[int, ...], int]


@dataclass(frozen=True)
class TypeGrid:
    """A strictly increasing tuple of admissible type values for n agents.

    The grid endpoints are the type-space bounds: L = values[0],
    U = values[-1].
    """

    n: int
    values: tuple

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise ContractViolation(f"need at least 2 agents, got n={self.n}")
        vals = tuple(rational(v) for v in self.values)
        if not vals:
            raise ContractViolation("grid needs at least one value")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ContractViolation(f"grid values must be strictly increasing: {vals}")
        object.__setattr__(self, "values", vals)

    @property
    def L(self) -> Fraction:
        return self.values[0]

    @property
    def U(self) -> Fraction:
        return self.values[-1]

    def contains(self, value: Fraction) -> bool:
        return value in self.values

    def validate_profile(self, profile: Iterable[Fraction]) -> Profile:
        prof = tuple(profile)
        if len(prof) != self.n:
            raise ContractViolation(
                f"profile has {len(prof)} entries, grid has n={self.n}"
            )
        for theta in prof:
            if theta not in self.values:
                raise ContractViolation(f"type {theta} is not a grid value")
        return prof

    def validate_others(self, others: Iterable[Fraction]) -> tuple:
        key = tuple(others)
        if len(key) != self.n - 1:
            raise ContractViolation(
                f"others-vector has {len(key)} entries, expected n-1={self.n - 1}"
            )
        for theta in key:
            if theta not in self.values:
                raise ContractViolation(f"type {theta} is not a grid value")
        return key

    def profiles(self) -> Iterator[Profile]:
        """All grid profiles in ascending lexicographic order."""
        return itertools.product(self.values, repeat=self.n)

    def others_keys(self) -> Iterator[tuple]:
        """All agent-ordered (n-1)-vectors in ascending lexicographic order."""
        return itertools.product(self.values, repeat=self.n - 1)

    def sorted_keys(self) -> Iterator[tuple]:
        """All descending-sorted (n-1)-vectors (one per multiset)."""
        for combo in itertools.combinations_with_replacement(self.values, self.n - 1):
            yield tuple(reversed(combo))


def drop(profile: Profile, i: int) -> tuple:
    """The agent-ordered others-vector: `profile` with entry i removed."""
    return profile[:i] + profile[i + 1:]


def insert(others: tuple, i: int, value: Fraction) -> Profile:
    """Reinsert agent i's type into an agent-ordered others-vector."""
    return others[:i] + (value,) + others[i:]


@dataclass(frozen=True)
class SingleItem:
    """One indivisible item; the winner values it at their type."""


@dataclass(frozen=True)
class MultiUnit:
    """m indistinguishable units, unit demand, m < n."""

    units: int

    def __post_init__(self):
        if not isinstance(self.units, int) or self.units < 1:
            raise ContractViolation(f"unit count must be a positive int, got {self.units}")


@dataclass(frozen=True)
class PublicProjectEqual:
    """Build-or-cancel project of cost c, financed in equal shares c/n."""

    cost: Fraction

    def __post_init__(self):
        c = rational(self.cost)
        if c <= 0:
            raise ContractViolation(f"project cost must be positive, got {c}")
        object.__setattr__(self, "cost", c)


@dataclass(frozen=True)
class PublicProjectGeneral:
    """Build-or-cancel project where agent i finances the share shares[i]."""

    shares: tuple

    def __post_init__(self):
        sh = tuple(rational(s) for s in self.shares)
        if not sh:
            raise ContractViolation("need at least one cost share")
        if any(s <= 0 for s in sh):
            raise ContractViolation(f"cost shares must be positive: {sh}")
        object.__setattr__(self, "shares", sh)

    @property
    def cost(self) -> Fraction:
        return sum(self.shares, Fraction(0))


Domain = Union[SingleItem, MultiUnit, PublicProjectEqual, PublicProjectGeneral]


def is_auction(domain: Domain) -> bool:
    return isinstance(domain, (SingleItem, MultiUnit))


def auction_units(domain: Domain) -> int:
    if isinstance(domain, SingleItem):
        return 1
    if isinstance(domain, MultiUnit):
        return domain.units
    raise ContractViolation(f"{domain} is not an auction domain")


def is_symmetric(domain: Domain) -> bool:
    """Whether all agents share one valuation function (so the VCG total is
    permutation independent).  False only for unequal-share projects."""
    return not isinstance(domain, PublicProjectGeneral)


def validate_domain_grid(domain: Domain, grid: TypeGrid) -> None:
    if isinstance(domain, MultiUnit) and domain.units >= grid.n:
        raise ContractViolation(
            f"need fewer units than agents: m={domain.units}, n={grid.n}"
        )
    if isinstance(domain, PublicProjectGeneral) and len(domain.shares) != grid.n:
        raise ContractViolation(
            f"{len(domain.shares)} cost shares for n={grid.n} agents"
        )
    if isinstance(domain, (PublicProjectEqual, PublicProjectGeneral)):
        if grid.L < 0 or grid.U > domain.cost:
            raise ContractViolation(
                f"public project types must lie in [0, {domain.cost}]"
            )


def decisions(domain: Domain, n: int) -> Iterator[Decision]:
    """Enumerate the full decision set."""
    if is_auction(domain):
        return iter(itertools.combinations(range(n), min(auction_units(domain), n)))
    return iter((0, 1))


def valuation(domain: Domain, n: int, decision: Decision, i: int, theta_i: Fraction) -> Fraction:
    """Agent i's initial utility for `decision` when their type is theta_i."""
    if is_auction(domain):
        return theta_i if i in decision else Fraction(0)
    if isinstance(domain, PublicProjectEqual):
        return decision * (theta_i - Fraction(domain.cost, n))
    return decision * (theta_i - domain.shares[i])


def outcome(domain: Domain, grid: TypeGrid, profile: Iterable[Fraction]) -> Decision:
    """The welfare-maximizing decision at `profile` (ties per module docstring)."""
    prof = grid.validate_profile(profile)
    validate_domain_grid(domain, grid)
    return _outcome(domain, prof)


def _outcome(domain: Domain, profile: Profile) -> Decision:
    n = len(profile)
    if is_auction(domain):
        m = min(auction_units(domain), n)
        ranked = sorted(range(n), key=lambda i: (-profile[i], i))
        return tuple(sorted(ranked[:m]))
    build = sum(profile) >= domain.cost
    return 1 if build else 0


def vcg_payment(domain: Domain, grid: TypeGrid, profile: Iterable[Fraction], i: int) -> Fraction:
    """Agent i's pivotal (Clarke) payment: the externality their report imposes."""
    prof = grid.validate_profile(profile)
    validate_domain_grid(domain, grid)
    if not 0 <= i < grid.n:
        raise ContractViolation(f"agent index {i} out of range for n={grid.n}")
    return _vcg_payment(domain, prof, i)


@lru_cache(maxsize=None)
def _vcg_payment(domain: Domain, profile: Profile, i: int) -> Fraction:
    n = len(profile)

    def others_welfare(decision: Decision) -> Fraction:
        return sum(
            (valuation(domain, n, decision, j, profile[j]) for j in range(n) if j != i),
            Fraction(0),
        )

    best_without_i = max(others_welfare(d) for d in decisions(domain, n))
    return best_without_i - others_welfare(_outcome(domain, profile))


def total_vcg(domain: Domain, grid: TypeGrid, profile: Iterable[Fraction]) -> Fraction:
    """The total VCG payment collected at `profile`."""
    prof = grid.validate_profile(profile)
    validate_domain_grid(domain, grid)
    return _total_vcg(domain, prof)


@lru_cache(maxsize=None)
def _total_vcg(domain: Domain, profile: Profile) -> Fraction:
    return sum(
        (_vcg_payment(domain, profile, i) for i in range(len(profile))), Fraction(0)
    )
