"""Hard-coded instances used as regression anchors.

Three families: a four-agent pair of rebate tables whose collective and
individual orderings disagree, a five-agent piecewise rule separating the
same two orderings with a discontinuous rebate, and a three-agent
unequal-share project on which the one-shot rebate transform strictly
beats plain VCG but stops being pay-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .domains import PublicProjectGeneral, SingleItem, TypeGrid
from .errors import ContractViolation
from .mechanisms import (
    AnonymousTabulated,
    GrovesMechanism,
    LinearAnonymous,
    tabulate_anonymous,
)
from .numerics import rational

F = Fraction

# Keys are descending-sorted triples of the other agents' bids.
SEPARATION_TABLE_A = {
    (0, 0, 0): F(0),
    (1, 0, 0): F(0),
    (1, 1, 0): F(1, 4),
    (1, 1, 1): F(1, 4),
    (2, 0, 0): F(0),
    (2, 1, 0): F(1, 12),
    (2, 1, 1): F(0),
    (2, 2, 0): F(1, 2),
    (2, 2, 1): F(0),
    (2, 2, 2): F(1, 2),
    (3, 0, 0): F(0),
    (3, 1, 0): F(1, 4),
    (3, 1, 1): F(0),
    (3, 2, 0): F(2, 3),
    (3, 2, 1): F(1),
    (3, 2, 2): F(0),
    (3, 3, 0): F(2, 3),
    (3, 3, 1): F(0),
    (3, 3, 2): F(1),
    (3, 3, 3): F(0),
}

SEPARATION_TABLE_B = {
    (0, 0, 0): F(0),
    (1, 0, 0): F(0),
    (1, 1, 0): F(1, 4),
    (1, 1, 1): F(1, 4),
    (2, 0, 0): F(0),
    (2, 1, 0): F(7, 24),
    (2, 1, 1): F(1, 6),
    (2, 2, 0): F(1, 2),
    (2, 2, 1): F(1, 4),
    (2, 2, 2): F(1, 2),
    (3, 0, 0): F(0),
    (3, 1, 0): F(1, 4),
    (3, 1, 1): F(1, 4),
    (3, 2, 0): F(2, 3),
    (3, 2, 1): F(19, 24),
    (3, 2, 2): F(1, 6),
    (3, 3, 0): F(5, 6),
    (3, 3, 1): F(7, 12),
    (3, 3, 2): F(5, 6),
    (3, 3, 3): F(1, 2),
}


def four_agent_grid() -> TypeGrid:
    return TypeGrid(4, (0, 1, 2, 3))


def four_agent_separation() -> Tuple[GrovesMechanism, GrovesMechanism]:
    """The four-agent single-item pair (mechanism A, mechanism B) on bids 0..3.

    Mechanism B collectively dominates mechanism A, yet neither
    individually dominates the other, and mechanism A is individually
    undominated on this grid.
    """
    grid = four_agent_grid()
    domain = SingleItem()
    first = GrovesMechanism(domain, grid, AnonymousTabulated(SEPARATION_TABLE_A))
    second = GrovesMechanism(domain, grid, AnonymousTabulated(SEPARATION_TABLE_B))
    return first, second


def piecewise_rebate(key: tuple) -> Fraction:
    """The five-agent piecewise rule, keyed on the tie pattern among the top
    three of the four other bids (key must be descending-sorted)."""
    x1, x2, x3, x4 = key
    if x1 == x2 == x3 == x4:
        return Fraction(0)
    if x1 == x2 == x3:  # strictly above the lowest
        return Fraction(x1, 4)
    if x1 == x2:  # strictly above the third highest
        return Fraction(x1, 6)
    if x2 == x3:  # top strictly above a tied second and third
        return 3 * Fraction(x2, 16)
    return Fraction(x2, 5)  # top three all different


def five_agent_grid(top: int = 5) -> TypeGrid:
    return TypeGrid(5, tuple(range(top + 1)))


def five_agent_separation(
    grid: Optional[TypeGrid] = None,
) -> Tuple[GrovesMechanism, GrovesMechanism]:
    """The five-agent single-item pair: the piecewise rule vs the uniform
    one-fifth-of-second-highest-other-bid rebate."""
    if grid is None:
        grid = five_agent_grid()
    if grid.n != 5:
        raise ContractViolation(f"five-agent instance, got n={grid.n}")
    domain = SingleItem()
    first = GrovesMechanism(domain, grid, tabulate_anonymous(grid, piecewise_rebate))
    second = GrovesMechanism(
        domain, grid, LinearAnonymous(F(0), (F(0), F(1, 5), F(0), F(0)))
    )
    return first, second


@dataclass(frozen=True)
class UnequalSharesInstance:
    """Three-agent project, cost 100, shares (10, 40, 50), with the other two
    agents' reports pinned at (10, 70): agent 0's surplus guarantee is
    exactly 10 there, so the one-shot rebate transform strictly improves
    on VCG — and the improved mechanism is no longer pay-only."""

    domain: PublicProjectGeneral
    others: tuple
    grid: TypeGrid


def unequal_shares_instance() -> UnequalSharesInstance:
    domain = PublicProjectGeneral((10, 40, 50))
    grid = TypeGrid(3, (0, 10, 40, 50, 70, 100))
    others = (rational(10), rational(70))
    return UnequalSharesInstance(domain, others, grid)
