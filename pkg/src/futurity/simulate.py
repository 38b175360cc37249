"""Seeded Monte Carlo play of Futurity machines.

A run plays M coups from (position 1, streak 0), collecting 1 coin per coup,
paying the arm's payout on each win and refunding J coins the moment the
J-th consecutive loss lands. Everything is ledger accounted: casino profit
is stakes minus win payouts minus futurity refunds, which stays correct for
fractional payouts where counting wins would not.

Reproducibility contract: replication k of a run with master seed m uses the
PCG64 stream seeded with mix64(m + (k+1) * 0x9E3779B97F4A7C15), where mix64
is the SplitMix64 finalizer. Sub-seeds therefore depend only on (m, k), so
replications can run on any number of workers in any order and aggregate to
bit-identical results.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chain import ChainSpec
from .errors import DomainError
from .formulas import ArmProbabilities, fair_payout
from .machines import MultipointDistribution, TwoPointArm

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def derive_seed(master_seed: int, index: int) -> int:
    """Counter-based sub-seed for replication `index` (SplitMix64 finalizer)."""
    z = (master_seed + (index + 1) * _GOLDEN) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SimConfig:
    """Replicated-run parameters; defaults follow the standard protocol."""

    coups: int = 100_000
    replications: int = 10_000
    master_seed: int = 0
    record_trajectory: bool = False
    trajectory_stride: int = 1_000

    def __post_init__(self):
        if self.coups < 1:
            raise DomainError(f"coups must be >= 1, got {self.coups}")
        if self.replications < 1:
            raise DomainError(f"replications must be >= 1, got {self.replications}")
        if self.trajectory_stride < 1:
            raise DomainError(f"trajectory stride must be >= 1, got {self.trajectory_stride}")


@dataclass(frozen=True)
class Ledger:
    """Exact coin accounting of one simulated run."""

    coups_played: int
    stakes_collected: float
    win_payouts: float
    futurity_refunds: float
    futurity_events: int
    win_count: int
    j: int

    @property
    def casino_profit_total(self) -> float:
        return self.stakes_collected - self.win_payouts - self.futurity_refunds

    @property
    def mean_profit(self) -> float:
        return self.casino_profit_total / self.coups_played

    @property
    def count_formula_mean(self) -> float:
        """(M - W - J*C)/M with W the win count, for comparison only.

        Treats every win as returning exactly 1 coin, so it matches
        mean_profit only when all payouts are 1; with calibrated payouts the
        ledger number is the correct one.
        """
        return (
            self.coups_played - self.win_count - self.j * self.futurity_events
        ) / self.coups_played


@dataclass(frozen=True)
class SimResult:
    """Aggregate of a replicated run."""

    rep_means: np.ndarray
    grand_mean: float
    sample_sd: float
    standard_error: float
    count_formula_grand_mean: float
    trajectory: np.ndarray | None = None


def _sample_arm(arm, uniforms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map uniforms in [0,1) to (win mask, payout) for one arm model."""
    if isinstance(arm, TwoPointArm):
        win = uniforms < arm.p
        return win, np.where(win, arm.u, 0.0)
    if isinstance(arm, MultipointDistribution):
        rewards = np.array([reward for reward, _ in arm.entries])
        cumulative = np.cumsum([prob for _, prob in arm.entries])
        idx = np.searchsorted(cumulative, uniforms, side="right")
        np.clip(idx, 0, len(rewards) - 1, out=idx)
        payout = rewards[idx]
        return payout > 0.0, payout
    raise DomainError(f"unsupported arm model {type(arm).__name__}")


def _tile(per_position: np.ndarray, coups: int) -> np.ndarray:
    n = per_position.size
    return np.tile(per_position, -(-coups // n))[:coups]


def _play_pattern(spec: ChainSpec, coups: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Win mask and payout per coup for a periodic pattern; one uniform per coup."""
    rng = np.random.Generator(np.random.PCG64(seed))
    uniforms = rng.random(coups)
    arms = [spec.arms[label] for label in spec.sequence]
    if all(isinstance(arm, TwoPointArm) for arm in arms):
        p_per_coup = _tile(np.array([arm.p for arm in arms]), coups)
        u_per_coup = _tile(np.array([arm.u for arm in arms]), coups)
        win = uniforms < p_per_coup
        return win, np.where(win, u_per_coup, 0.0)
    labels = list(dict.fromkeys(spec.sequence))
    codes = _tile(np.array([labels.index(label) for label in spec.sequence]), coups)
    win = np.zeros(coups, dtype=bool)
    payout = np.zeros(coups)
    for code, label in enumerate(labels):
        mask = codes == code
        arm_win, arm_payout = _sample_arm(spec.arms[label], uniforms[mask])
        win[mask] = arm_win
        payout[mask] = arm_payout
    return win, payout


def _award_mask(win: np.ndarray, j: int) -> np.ndarray:
    """Coups on which the J-th consecutive loss pays the futurity award.

    The loss-run length ending at coup t is t minus the index of the latest
    win at or before t (the initial streak is 0, so a missing earlier win
    counts from -1); awards land on run lengths that are multiples of J,
    which encodes the reset of the streak counter after each award.
    """
    idx = np.arange(win.size)
    last_win = np.maximum.accumulate(np.where(win, idx, -1))
    run_len = idx - last_win
    return ~win & (run_len % j == 0)


def _ledger(win: np.ndarray, payout: np.ndarray, award: np.ndarray, j: int) -> Ledger:
    events = int(award.sum())
    return Ledger(
        coups_played=win.size,
        stakes_collected=float(win.size),
        win_payouts=float(payout.sum()),
        futurity_refunds=float(j * events),
        futurity_events=events,
        win_count=int(win.sum()),
        j=j,
    )


def simulate_once(spec: ChainSpec, coups: int, seed: int) -> Ledger:
    """Play `coups` coups of the pattern; deterministic given (spec, coups, seed)."""
    if coups < 1:
        raise DomainError(f"coups must be >= 1, got {coups}")
    win, payout = _play_pattern(spec, coups, seed)
    return _ledger(win, payout, _award_mask(win, spec.j), spec.j)


def cumulative_trajectory(spec: ChainSpec, coups: int, seed: int, stride: int) -> np.ndarray:
    """Cumulative casino profit sampled every `stride` coups.

    Returns an array of (coup index, cumulative profit) rows at coups
    stride, 2*stride, ...; with the same seed the final row agrees exactly
    with simulate_once's ledger whenever stride divides coups.
    """
    if stride < 1:
        raise DomainError(f"stride must be >= 1, got {stride}")
    win, payout = _play_pattern(spec, coups, seed)
    award = _award_mask(win, spec.j)
    per_coup = 1.0 - payout - spec.j * award
    cumulative = np.cumsum(per_coup)
    marks = np.arange(stride, coups + 1, stride)
    return np.column_stack([marks, cumulative[marks - 1]])


def simulate_mixture_once(
    gamma: float,
    probs: ArmProbabilities,
    coups: int,
    seed: int,
    j: int = 2,
) -> Ledger:
    """Play with i.i.d. arm choice: A with probability gamma, both arms fair.

    Draw order per run: one uniform per coup for the arm choice, then one
    per coup for the outcome.
    """
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [0, 1], got {gamma!r}")
    if coups < 1:
        raise DomainError(f"coups must be >= 1, got {coups}")
    rng = np.random.Generator(np.random.PCG64(seed))
    pick_a = rng.random(coups) < gamma
    uniforms = rng.random(coups)
    p_per_coup = np.where(pick_a, probs.p_a, probs.p_b)
    win = uniforms < p_per_coup
    payout = np.where(
        win, np.where(pick_a, fair_payout(probs.p_a), fair_payout(probs.p_b)), 0.0
    )
    return _ledger(win, payout, _award_mask(win, j), j)


def _aggregate(rep_means: np.ndarray, count_means: np.ndarray, trajectory) -> SimResult:
    reps = rep_means.size
    grand = float(rep_means.mean())
    sd = float(rep_means.std(ddof=1)) if reps > 1 else 0.0
    return SimResult(
        rep_means=rep_means,
        grand_mean=grand,
        sample_sd=sd,
        standard_error=sd / reps**0.5 if reps > 1 else 0.0,
        count_formula_grand_mean=float(count_means.mean()),
        trajectory=trajectory,
    )


def _run_replications(run_one, config: SimConfig, workers: int) -> SimResult:
    reps = config.replications
    rep_means = np.empty(reps)
    count_means = np.empty(reps)

    def task(k: int) -> None:
        ledger = run_one(config.coups, derive_seed(config.master_seed, k))
        rep_means[k] = ledger.mean_profit
        count_means[k] = ledger.count_formula_mean

    if workers <= 1:
        for k in range(reps):
            task(k)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(task, range(reps)))
    return _aggregate(rep_means, count_means, None)


def replicate(spec: ChainSpec, config: SimConfig, workers: int = 1) -> SimResult:
    """Replicated run of a pattern; aggregation is keyed by replication index.

    Results are identical for any worker count. With record_trajectory set,
    the result carries replication 0's cumulative-profit trajectory.
    """
    result = _run_replications(
        lambda coups, seed: simulate_once(spec, coups, seed), config, workers
    )
    if config.record_trajectory:
        trajectory = cumulative_trajectory(
            spec, config.coups, derive_seed(config.master_seed, 0), config.trajectory_stride
        )
        result = SimResult(
            rep_means=result.rep_means,
            grand_mean=result.grand_mean,
            sample_sd=result.sample_sd,
            standard_error=result.standard_error,
            count_formula_grand_mean=result.count_formula_grand_mean,
            trajectory=trajectory,
        )
    return result


def replicate_mixture(
    gamma: float,
    probs: ArmProbabilities,
    config: SimConfig,
    workers: int = 1,
    j: int = 2,
) -> SimResult:
    """Replicated i.i.d.-mixture run with fair arms."""
    return _run_replications(
        lambda coups, seed: simulate_mixture_once(gamma, probs, coups, seed, j=j),
        config,
        workers,
    )
