"""Deterministic beliefs along an unbroken herd and what they imply.

Because the perceived belief is a function of the action prefix alone, the
belief path under "every agent takes the high action" is deterministic:

    perceived[n+1] = perceived[n] + high_action_llr(perceived_family, .)
    true[n+1]      = true[n]      + high_action_llr(true_family, .)

Everything in this module is squeezed out of that path: growth envelopes
for the perceived odds, certified bounds on the probability that the herd
is never broken, a ratio-test style diagnostic for the expected herd break
time, and the regime classification by the condescension gap.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .beliefs import Action, Environment, action_llrs, high_action_llr
from .signals import State

# A tail certificate is only issued when the fitted break-chance exponent
# clears the divergence boundary by this much.  Right at the boundary the
# fit lands on 1 +/- noise and would otherwise emit certificates like
# exp(-1e9), which are extrapolation artifacts rather than bounds.
_CERT_EXPONENT_MARGIN = 0.05


class RegimeLabel(enum.Enum):
    ANTI_CONDESCENDING = "AntiCondescending"   # gap < 0
    BOUNDARY_ZERO = "BoundaryZero"             # gap = 0
    EFFICIENT_WINDOW = "EfficientWindow"       # 0 < gap < 1
    BOUNDARY_ONE = "BoundaryOne"               # gap = 1
    OVER_CONDESCENDING = "OverCondescending"   # gap > 1


def classify_regime(alpha: float, alpha_tilde: float) -> RegimeLabel:
    if alpha <= 0.0 or alpha_tilde <= 0.0:
        raise ValueError("tail exponents must be positive")
    gap = alpha_tilde - alpha
    if gap < 0.0:
        return RegimeLabel.ANTI_CONDESCENDING
    if gap == 0.0:
        return RegimeLabel.BOUNDARY_ZERO
    if gap < 1.0:
        return RegimeLabel.EFFICIENT_WINDOW
    if gap == 1.0:
        return RegimeLabel.BOUNDARY_ONE
    return RegimeLabel.OVER_CONDESCENDING


@dataclass(frozen=True)
class HerdPath:
    """Belief log-odds along an unbroken high herd, positions 1..length."""

    prior: float
    length: int
    true_log_odds: np.ndarray
    perceived_log_odds: np.ndarray
    perceived_complement: np.ndarray  # 1 - perceived belief, kept directly


def compute_herd_path(env: Environment, length: int) -> HerdPath:
    if length < 1:
        raise ValueError(f"length must be at least 1, got {length}")
    r = np.empty(length)
    rt = np.empty(length)
    comp = np.empty(length)
    r_val = env.prior_log_odds
    rt_val = env.prior_log_odds
    tf, pf = env.true_family, env.perceived_family
    for i in range(length):
        r[i] = r_val
        rt[i] = rt_val
        ea = math.exp(-abs(rt_val))
        t = ea / (1.0 + ea)
        comp[i] = t if rt_val >= 0.0 else 1.0 - t
        if i + 1 < length:
            r_val += high_action_llr(tf, rt_val)
            rt_val += high_action_llr(pf, rt_val)
    return HerdPath(env.prior, length, r, rt, comp)


@dataclass(frozen=True)
class EnvelopeFit:
    """Sandwich for exp(perceived log-odds) between multiples of n^(1/a).

    ``kappa`` matches the closed-form envelope z(t) = (1/a) log(kappa + c_lower^a t)
    to the path at ``n_start``, so z(n_start) equals the path value exactly.
    """

    c_lower: float
    c_upper: float
    n_start: int
    kappa: float


def fit_envelopes(path: HerdPath, tail_exponent: float, n_start: int = 50) -> EnvelopeFit:
    if path.length < 100:
        raise ValueError(f"path too short to fit envelopes: {path.length} < 100")
    if not (1 <= n_start <= path.length):
        raise ValueError(f"n_start must lie within the path, got {n_start}")
    n = np.arange(1, path.length + 1, dtype=float)
    ratio = np.exp(path.perceived_log_odds) / n ** (1.0 / tail_exponent)
    window = ratio[n_start - 1:]
    c_lower = float(np.min(window))
    c_upper = float(np.max(window))
    anchor = math.exp(tail_exponent * path.perceived_log_odds[n_start - 1])
    kappa = anchor - c_lower ** tail_exponent * n_start
    return EnvelopeFit(c_lower, c_upper, n_start, kappa)


@dataclass(frozen=True)
class HerdProbBounds:
    """Certified bracket for the never-broken-herd probability.

    ``upper`` is the truncated product of per-step continuation chances;
    ``lower`` multiplies it by exp(-tail_bound), where the tail bound comes
    from a power-law fit to the last decade of per-step break chances and
    carries a safety factor of 2.  A fitted exponent <= 1 means the break
    chances are not summable, the infinite product vanishes, and the lower
    bound is 0 with an infinite tail bound.
    """

    lower: float
    upper: float
    truncation_n: int
    tail_bound: float


def immediate_herd_prob(env: Environment, conditioning_state: State,
                        herd_action: Action, truncation_n: int) -> HerdProbBounds:
    """Probability every agent takes ``herd_action``, given the state.

    A low herd is the mirror image of a high herd from the reflected prior,
    so only the high-herd product is ever computed directly.
    """
    if herd_action is Action.LOW:
        return immediate_herd_prob(env.flipped(), conditioning_state.flipped(),
                                   Action.HIGH, truncation_n)
    if truncation_n < 1:
        raise ValueError(f"truncation_n must be at least 1, got {truncation_n}")
    path = compute_herd_path(env, truncation_n)
    rt = path.perceived_log_odds
    t = np.exp(-np.abs(rt))
    t = t / (1.0 + t)
    pos = ~np.signbit(rt)  # same -0.0 convention as the scalar updaters
    fam = env.true_family
    fh = fam._high_small(t)
    fl = fam._low_small(t)
    if conditioning_state is State.HIGH:
        break_chance = np.where(pos, fh, 1.0 - fl)
        log_continue = np.where(pos, np.log1p(-fh), np.log(fl))
    else:
        break_chance = np.where(pos, fl, 1.0 - fh)
        log_continue = np.where(pos, np.log1p(-fl), np.log(fh))

    upper = float(math.exp(np.sum(log_continue)))

    # power-law tail fit over the last decade of break chances; too few
    # points to fit means the tail stays uncertified (lower bound 0)
    start = max(truncation_n // 10, 1)
    if truncation_n - start < 10:
        return HerdProbBounds(0.0, upper, truncation_n, math.inf)
    idx = np.arange(start, truncation_n + 1, dtype=float)
    logs = np.log(break_chance[start - 1:])
    slope, intercept = np.polyfit(np.log(idx), logs, 1)
    p = -float(slope)
    if not math.isfinite(p) or p <= 1.0 + _CERT_EXPONENT_MARGIN:
        return HerdProbBounds(0.0, upper, truncation_n, math.inf)
    amp = math.exp(float(intercept))
    tail_bound = 2.0 * amp * truncation_n ** (1.0 - p) / (p - 1.0)
    lower = upper * math.exp(-tail_bound)
    return HerdProbBounds(lower, upper, truncation_n, tail_bound)


@dataclass(frozen=True)
class RaabeDiagnostic:
    """Ratio-test style reading of the herd break-time series at one n.

    ``statistic`` = n (exp(high_action_llr at step n) - 1) plays the role of
    the Raabe ratio for the series sum exp(-true log-odds); values drifting
    above 1 certify a summable series (finite expected break time), values
    pinned below 1 certify divergence.
    """

    partial_sum: float
    statistic: float
    length: int


def raabe_sum_diagnostic(env: Environment, length: int) -> RaabeDiagnostic:
    if length < 10:
        raise ValueError(f"length must be at least 10, got {length}")
    path = compute_herd_path(env, length)
    partial = float(np.sum(np.exp(-path.true_log_odds)))
    drift = high_action_llr(env.true_family, float(path.perceived_log_odds[-1]))
    return RaabeDiagnostic(partial, length * math.expm1(drift), length)


class ThresholdNotReached(RuntimeError):
    def __init__(self, threshold: float, max_length: int, worst_prior: float,
                 worst_log_odds: float):
        super().__init__(
            f"perceived log-odds did not reach {threshold} within {max_length} steps; "
            f"slowest prior {worst_prior} sits at {worst_log_odds}")
        self.threshold = threshold
        self.max_length = max_length
        self.worst_prior = worst_prior
        self.worst_log_odds = worst_log_odds


@dataclass(frozen=True)
class UniformityResult:
    n_uniform: int
    binding_prior: float


def uniformity_check(env: Environment, threshold: float, prior_grid,
                     max_length: int = 1_000_000) -> UniformityResult:
    """First herd position where every prior in the grid clears the threshold.

    Paths from higher priors dominate pointwise, so the binding prior is the
    lowest one; it is still measured, not assumed.
    """
    priors = [float(p) for p in prior_grid]
    if not priors:
        raise ValueError("prior grid is empty")
    bad = [p for p in priors if not 0.5 <= p < 1.0]
    if bad:
        raise ValueError(f"priors must lie in [1/2, 1), got {bad}")
    odds = [math.log(p) - math.log1p(-p) for p in priors]
    pf = env.perceived_family
    for n in range(1, max_length + 1):
        worst = min(range(len(odds)), key=lambda i: odds[i])
        if odds[worst] >= threshold:
            return UniformityResult(n, priors[worst])
        odds = [x + high_action_llr(pf, x) for x in odds]
    worst = min(range(len(odds)), key=lambda i: odds[i])
    raise ThresholdNotReached(threshold, max_length, priors[worst], odds[worst])
