"""Closed-form long-run profit of the two-armed Futurity machine.

All expressions assume the standard setting: stake 1 coin per coup, futurity
threshold J = 2, and both arms individually fairness-calibrated so a single
arm played alone returns the stake exactly. Under those rules the casino's
asymptotic profit per coup for a periodic pattern factorizes as

    profit = 2 * Q * S

where Q depends only on the block structure of the pattern and S only on the
play counts (r, s) and the two win probabilities. A second, independent
expression reaches the same number through per-coup futurity-award rates.

Sign convention: all profits here are casino profit per coup, nonnegative,
and zero exactly when the two arms share one win probability.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BlockCountTooSmall, DomainError
from .strategy import BlockVector, Strategy, block_vector, canonical_rotation

#: Futurity threshold the closed forms are derived for. The chain oracle and
#: the simulator accept any J >= 2; these formulas do not.
CLOSED_FORM_J = 2


def _check_probability(name: str, p: float) -> float:
    p = float(p)
    # q == 1.0 would zero the geometric denominators, so p must stay above
    # double-precision resolution of 1 - p as well as strictly inside (0, 1).
    if not 0.0 < p < 1.0 or 1.0 - p >= 1.0:
        raise DomainError(f"{name} must lie strictly inside (0, 1), got {p!r}")
    return p


@dataclass(frozen=True)
class ArmProbabilities:
    """Win probabilities of arms A and B, both strictly inside (0, 1)."""

    p_a: float
    p_b: float

    def __post_init__(self):
        object.__setattr__(self, "p_a", _check_probability("p_a", self.p_a))
        object.__setattr__(self, "p_b", _check_probability("p_b", self.p_b))

    @property
    def q_a(self) -> float:
        return 1.0 - self.p_a

    @property
    def q_b(self) -> float:
        return 1.0 - self.p_b

    def swapped(self) -> "ArmProbabilities":
        return ArmProbabilities(self.p_b, self.p_a)


@dataclass(frozen=True)
class ProfitReport:
    """Factorized closed-form profit of one pattern at one probability pair."""

    profit: float
    q_factor: float
    s_factor: float
    h: int
    r: int
    s: int


def fair_payout(p: float) -> float:
    """Win payout that makes a single arm break even in the long run.

    With win probability p the payout is (3 - 2p)/(2 - p) coins per winning
    coup; the player's expected receipts per coup (payout plus futurity
    refunds) then equal the 1-coin stake exactly. Lies in (1, 1.5).
    """
    p = _check_probability("p", p)
    return (3.0 - 2.0 * p) / (2.0 - p)


def single_arm_futurity_rate(p: float) -> float:
    """Per-coup probability of a futurity award when one arm is played alone.

    Equals q^2/(1 + q) with q = 1 - p: the stationary chance that the current
    coup completes a pair of consecutive losses. Lies in (0, 1/2).
    """
    p = _check_probability("p", p)
    q = 1.0 - p
    return q * q / (1.0 + q)


def b_sequence(blocks: BlockVector, probs: ArmProbabilities) -> tuple[float, ...]:
    """Signed loss-run weights of a block vector, periodically extended.

    Entry i is (-q)^a_i with q the loss probability of the arm the run plays,
    so runs of odd length carry a negative sign. The 2h base entries are
    repeated once (length 4h) because the structural factor indexes windows
    that wrap past the end of one period.
    """
    base: list[float] = []
    for i, length in enumerate(blocks.a):
        q = probs.q_a if i % 2 == 0 else probs.q_b
        base.append((-q) ** length)
    return tuple(base + base)


def q_factor(blocks: BlockVector, probs: ArmProbabilities) -> float:
    """Structural profit factor of a block vector.

    Literal evaluation of

        Q = h + sum_{m=1..2h} sum_{j=1..2h-1} (-1)^j prod_{i=m..m+j-1} b_i
              + h * prod_{i=1..2h} b_i

    with running window products, O(h^2). Strictly positive for every valid
    block vector and probability pair.
    """
    h = blocks.h
    b = b_sequence(blocks, probs)
    total = float(h)
    for m in range(2 * h):
        window = 1.0
        sign = -1.0
        for j in range(2 * h - 1):
            window *= b[m + j]
            total += sign * window
            sign = -sign
    period = 1.0
    for i in range(2 * h):
        period *= b[i]
    return total + h * period


def s_factor(r: int, s: int, probs: ArmProbabilities) -> float:
    """Parametric profit factor for r A-plays and s B-plays per period.

    Zero exactly when the arms share one win probability; the denominator
    cannot vanish for probabilities strictly inside (0, 1).
    """
    if r < 1 or s < 1:
        raise DomainError(f"play counts must be >= 1, got r={r}, s={s}")
    p_a, p_b, q_a, q_b = probs.p_a, probs.p_b, probs.q_a, probs.q_b
    sign = -1.0 if (r + s) % 2 else 1.0
    numerator = (p_a - p_b) ** 2 * (1.0 + sign * q_a**r * q_b**s)
    denominator = (
        (r + s) * (2.0 - p_a) ** 2 * (2.0 - p_b) ** 2 * (1.0 - q_a ** (2 * r) * q_b ** (2 * s))
    )
    return numerator / denominator


def exact_profit(strategy: Strategy, probs: ArmProbabilities) -> ProfitReport:
    """Casino profit per coup for a periodic pattern, via the 2*Q*S form.

    The pattern is canonicalized internally, so any rotation of the same
    cycle yields an identical report.
    """
    blocks = block_vector(canonical_rotation(strategy))
    q = q_factor(blocks, probs)
    s = s_factor(blocks.r, blocks.s, probs)
    return ProfitReport(
        profit=2.0 * q * s,
        q_factor=q,
        s_factor=s,
        h=blocks.h,
        r=blocks.r,
        s=blocks.s,
    )


def ars_profit(r: int, s: int, probs: ArmProbabilities) -> float:
    """Profit of the single-block pattern A^r B^s.

    Special case 2*S*(1 - (-q_a)^r)*(1 - (-q_b)^s), equal to exact_profit of
    the same pattern.
    """
    if r < 1 or s < 1:
        raise DomainError(f"play counts must be >= 1, got r={r}, s={s}")
    return (
        2.0
        * s_factor(r, s, probs)
        * (1.0 - (-probs.q_a) ** r)
        * (1.0 - (-probs.q_b) ** s)
    )


def futurity_rate_strategy(strategy: Strategy, probs: ArmProbabilities) -> float:
    """Per-coup futurity-award rate of a periodic pattern.

    Evaluates, with p_i / q_i the win / loss probability of the arm at cyclic
    position i,

        (1/n) * sum_{k=1..n} sum_{j=1..n} p_j * prod_{i=j+1..j+2k} q_i
              / (1 - (q_a^r q_b^s)^2)

    by accumulating each j's running loss product over 2n steps, O(n^2).
    The pattern is used as given; the rate is rotation invariant.
    """
    p_seq = [probs.p_a if ch == "A" else probs.p_b for ch in strategy.symbols]
    q_seq = [1.0 - p for p in p_seq]
    n = len(p_seq)
    period_loss = 1.0
    for q in q_seq:
        period_loss *= q
    total = 0.0
    for j in range(n):
        window = 1.0
        acc = 0.0
        for step in range(1, 2 * n + 1):
            window *= q_seq[(j + step) % n]
            if step % 2 == 0:
                acc += window
        total += p_seq[j] * acc
    return total / (n * (1.0 - period_loss * period_loss))


def profit_via_rates(strategy: Strategy, probs: ArmProbabilities) -> float:
    """Casino profit per coup derived from futurity-award rates.

    With fair-calibrated arms the profit is twice the gap between the
    play-weighted single-arm award rates and the pattern's award rate:

        2 * ( (r/n) * rate_A + (s/n) * rate_B - rate_pattern )

    Agrees with exact_profit to solver precision; the two expressions share
    no code path beyond input validation.
    """
    n = strategy.n
    weighted = (
        strategy.r * single_arm_futurity_rate(probs.p_a)
        + strategy.s * single_arm_futurity_rate(probs.p_b)
    ) / n
    return 2.0 * (weighted - futurity_rate_strategy(strategy, probs))


def block_swap_delta(blocks: BlockVector, probs: ArmProbabilities) -> float:
    """Profit change from exchanging the trailing A-run and B-run.

    For a pattern with block vector (r1, s1, ..., rh, sh), h >= 2, returns
    profit(D) - profit(D') where D' ends ... B^sh A^rh instead. Evaluated as

        2*S*(1 - b_{2h-1})*(1 - b_{2h}) * (
            sum_{j=0..2h-3} (-1)^j prod_{i=1..j} b_i
          + sum_{j=1..2h-2} (-1)^j prod_{i=1..j} b_{2h-1-i} )

    with S and b taken from D's own block vector.
    """
    h = blocks.h
    if h < 2:
        raise BlockCountTooSmall("block swap delta needs at least two block pairs (h >= 2)")
    b = b_sequence(blocks, probs)
    s_val = s_factor(blocks.r, blocks.s, probs)

    forward = 1.0  # j = 0 term: empty product
    window = 1.0
    sign = -1.0
    for j in range(1, 2 * h - 2):
        window *= b[j - 1]
        forward += sign * window
        sign = -sign

    backward = 0.0
    window = 1.0
    sign = -1.0
    for j in range(1, 2 * h - 1):
        window *= b[2 * h - 2 - j]
        backward += sign * window
        sign = -sign

    return 2.0 * s_val * (1.0 - b[2 * h - 2]) * (1.0 - b[2 * h - 1]) * (forward + backward)


def futurity_refund_per_coup(loss_probability: float) -> float:
    """Expected futurity coins refunded per coup for i.i.d. losses.

    Equals 2*z^2/(1 + z) at per-coup loss probability z: the award rate
    z^2/(1 + z) times the 2-coin refund. Convex in z, which is what makes
    mixing two individually fair arms profitable for the casino.
    """
    z = float(loss_probability)
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"loss probability must lie in [0, 1], got {z!r}")
    return 2.0 * z * z / (1.0 + z)


def random_mix_profit(gamma: float, probs: ArmProbabilities) -> float:
    """Casino profit per coup when each coup picks arm A with probability gamma.

    Independent draws make the loss sequence i.i.d. with loss probability
    q_mix = gamma*q_a + (1-gamma)*q_b, so the profit is the Jensen gap of the
    convex refund function f(z) = 2z^2/(1+z):

        gamma*f(q_a) + (1-gamma)*f(q_b) - f(q_mix)

    Nonnegative; zero when gamma is 0 or 1 or the arms coincide.
    """
    gamma = float(gamma)
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [0, 1], got {gamma!r}")
    q_mix = gamma * probs.q_a + (1.0 - gamma) * probs.q_b
    return (
        gamma * futurity_refund_per_coup(probs.q_a)
        + (1.0 - gamma) * futurity_refund_per_coup(probs.q_b)
        - futurity_refund_per_coup(q_mix)
    )
