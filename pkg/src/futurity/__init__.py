"""Profit analysis of two-armed Futurity slot machines.

Three independent routes to the same long-run casino profit: closed-form
expressions (formulas), an exact Markov chain solver (chain), and a seeded
Monte Carlo simulator (simulate), plus the antique Mills machine's payoff
tables (machines) and a CLI (cli) that reproduces the standard experiments.
"""

from .chain import (
    ChainSolution,
    ChainSpec,
    build_chain,
    fair_chain,
    fair_strategy_profit,
    mixture_chain,
    oracle_profit,
    single_arm_chain,
    stationary,
)
from .errors import (
    BlockCountTooSmall,
    DegenerateMode,
    DomainError,
    EmptyPattern,
    FuturityError,
    IllegalCharacter,
    InvalidDistribution,
    MissingArm,
    NotCanonical,
    PatternTooLong,
    SolverFailure,
    StrategyError,
)
from .formulas import (
    ArmProbabilities,
    ProfitReport,
    ars_profit,
    b_sequence,
    block_swap_delta,
    exact_profit,
    fair_payout,
    futurity_rate_strategy,
    futurity_refund_per_coup,
    profit_via_rates,
    q_factor,
    random_mix_profit,
    s_factor,
    single_arm_futurity_rate,
)
from .machines import (
    MultipointDistribution,
    TwoPointArm,
    empirical_two_point,
    expected_payout,
    fair_two_point,
    format_machine_file,
    load_machine_file,
    mills_modes,
    parse_machine_text,
    win_probability,
)
from .simulate import (
    Ledger,
    SimConfig,
    SimResult,
    cumulative_trajectory,
    derive_seed,
    replicate,
    replicate_mixture,
    simulate_mixture_once,
    simulate_once,
)
from .strategy import (
    BlockVector,
    Strategy,
    block_vector,
    canonical_rotation,
    mirror,
    parse_strategy,
    rotate,
    swap_last_runs,
)

__version__ = "0.1.0"

__all__ = [
    "ArmProbabilities",
    "BlockCountTooSmall",
    "BlockVector",
    "ChainSolution",
    "ChainSpec",
    "DegenerateMode",
    "DomainError",
    "EmptyPattern",
    "FuturityError",
    "IllegalCharacter",
    "InvalidDistribution",
    "Ledger",
    "MissingArm",
    "MultipointDistribution",
    "NotCanonical",
    "PatternTooLong",
    "ProfitReport",
    "SimConfig",
    "SimResult",
    "SolverFailure",
    "Strategy",
    "StrategyError",
    "TwoPointArm",
    "ars_profit",
    "b_sequence",
    "block_swap_delta",
    "block_vector",
    "build_chain",
    "canonical_rotation",
    "cumulative_trajectory",
    "derive_seed",
    "empirical_two_point",
    "exact_profit",
    "expected_payout",
    "fair_chain",
    "fair_payout",
    "fair_strategy_profit",
    "fair_two_point",
    "format_machine_file",
    "futurity_rate_strategy",
    "futurity_refund_per_coup",
    "load_machine_file",
    "mills_modes",
    "mirror",
    "mixture_chain",
    "oracle_profit",
    "parse_machine_text",
    "parse_strategy",
    "profit_via_rates",
    "q_factor",
    "random_mix_profit",
    "replicate",
    "replicate_mixture",
    "rotate",
    "s_factor",
    "simulate_mixture_once",
    "simulate_once",
    "single_arm_chain",
    "single_arm_futurity_rate",
    "stationary",
    "swap_last_runs",
    "win_probability",
]
