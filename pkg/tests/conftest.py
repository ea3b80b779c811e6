"""Shared builders for the test suite."""

import random
from fractions import Fraction

import pytest

from groves import (
    AnonymousTabulated,
    GrovesMechanism,
    MultiUnit,
    PublicProjectEqual,
    SingleItem,
    Tabulated,
    TypeGrid,
    anonymous_table,
    bcgc,
    vcg_mechanism,
    with_redistribution,
)

F = Fraction


@pytest.fixture
def grid3():
    return TypeGrid(3, (0, 1, 2, 3))


@pytest.fixture
def grid4():
    return TypeGrid(4, (0, 1, 2, 3))


def vcg_single(n: int, top: int = 3) -> GrovesMechanism:
    return vcg_mechanism(SingleItem(), TypeGrid(n, tuple(range(top + 1))))


def bc_single(n: int, top: int = 3) -> GrovesMechanism:
    return bcgc(vcg_single(n, top))


def scaled_anonymous_seed(base: GrovesMechanism, rng: random.Random) -> GrovesMechanism:
    """A random anonymous non-deficit mechanism: the base rebate shrunk by an
    independent factor in [0, 1] at every key.

    Totals can only fall below the base's, which never exceed the VCG
    total, so non-deficit is inherited.
    """
    table = {
        key: value * F(rng.randint(0, 8), 8)
        for key, value in anonymous_table(base).items()
    }
    return with_redistribution(base, AnonymousTabulated(table))


def scaled_tabulated_seed(base: GrovesMechanism, rng: random.Random) -> GrovesMechanism:
    """As above but per (agent, key), yielding a non-anonymous non-deficit seed."""
    grid = base.grid
    tables = tuple(
        {
            key: base.redistribution.value(i, key) * F(rng.randint(0, 8), 8)
            for key in grid.others_keys()
        }
        for i in range(grid.n)
    )
    return with_redistribution(base, Tabulated(tables))


def equal_share_vcg(n: int, cost=30, values=(0, 10, 20, 30)) -> GrovesMechanism:
    return vcg_mechanism(PublicProjectEqual(cost), TypeGrid(n, values))


def multi_unit_vcg(n: int, m: int, values=(0, 1, 2, 3)) -> GrovesMechanism:
    return vcg_mechanism(MultiUnit(m), TypeGrid(n, values))
