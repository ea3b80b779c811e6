"""Exact-arithmetic toolkit for non-deficit Groves mechanisms on type grids.

Build a decision problem (single-item or multi-unit auction, equal- or
unequal-share public project), pick a finite grid of admissible types,
attach a rebate rule, and then audit it (non-deficit, pay-only,
strategy-proofness, undominance, dominance comparisons) or improve it
(one-shot, single-agent, priority-ordered, or anonymity-preserving
iterative rebate growth).  Everything is computed in exact rational
arithmetic; every verdict is exhaustive over the grid and deterministic.
"""

from .domains import (
    Domain,
    MultiUnit,
    Profile,
    PublicProjectEqual,
    PublicProjectGeneral,
    SingleItem,
    TypeGrid,
    drop,
    insert,
    is_symmetric,
    outcome,
    total_vcg,
    valuation,
    vcg_payment,
)
from .dominance import (
    DominanceVerdict,
    DominanceWitness,
    DominatorSearchReport,
    N2AuditReport,
    PurnAgentReport,
    UndominanceVerdict,
    compare_collective,
    compare_individual,
    feasibility_slack,
    is_individually_undominated,
    max_feasibility_slack,
    purn_condition,
    search_collective_dominator,
    total_redistribution,
    vcg_uniqueness_n2_audit,
)
from .errors import (
    ContractViolation,
    DeficitInputError,
    GrovesError,
    SpecFileError,
    TotalityError,
)
from .mechanisms import (
    AnonymousTabulated,
    CheckVerdict,
    GrovesMechanism,
    LinearAnonymous,
    Redistribution,
    Tabulated,
    anonymous_table,
    is_budget_balanced_at,
    is_non_deficit,
    is_pay_only,
    is_strategy_proof,
    rebates_equal,
    tabulate_anonymous,
    tabulate_per_agent,
    vcg_mechanism,
    with_redistribution,
    zero_redistribution,
)
from .numerics import (
    Rational,
    binomial,
    format_rational,
    order_statistic,
    parse_rational,
    rational,
    sort_desc,
)
from .oel import (
    BudgetScenarioReport,
    OELSpec,
    oel_budget_scenarios,
    oel_coefficients,
    oel_mechanism,
)
from .transforms import (
    IterationStep,
    IterationTrace,
    PriorityOrder,
    anonymize,
    anonymous_residual,
    bcgc,
    bcgc_j,
    counterexample_q,
    iterate_step,
    iterate_until,
    priority_improve,
    surplus_guarantee,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
