"""Belief recursion for observers of the action sequence.

Two log-odds are carried side by side: the perceived one that the agents
themselves share (their signal model may be wrong) and the true one that an
outside observer with the correct signal model would hold.  Actions are
chosen against the perceived belief; both log-odds then absorb the action's
log likelihood ratio, each under its own family:

    low action:   log F_state_high(1 - p) - log F_state_low(1 - p)
    high action:  log (1 - F_state_high(1 - p)) - log (1 - F_state_low(1 - p))

evaluated at the perceived belief p.  All arithmetic stays in log-odds
space.  The branch on the sign of the log-odds keeps every term expressed
through the small argument t = min(p, 1 - p), which makes the update exact
under mirror reflection (negating the log-odds negates the increments,
bit for bit).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .signals import CanonicalFamily, State


class Action(enum.Enum):
    LOW = "low"
    HIGH = "high"

    def flipped(self) -> "Action":
        return Action.LOW if self is Action.HIGH else Action.HIGH

    def matches(self, state: State) -> bool:
        return (self is Action.HIGH) == (state is State.HIGH)


class BeliefUpdateError(RuntimeError):
    """A belief update left the representable range.

    Carries the perceived belief (probability of the high state) at the
    point of failure.
    """

    def __init__(self, message: str, perceived_belief: float):
        super().__init__(f"{message} (perceived belief {perceived_belief!r})")
        self.perceived_belief = perceived_belief


class OverturningViolation(RuntimeError):
    """An updated perceived belief landed on the wrong side of 1/2."""


@dataclass(frozen=True)
class Environment:
    """True signal family, the family agents believe in, and the prior."""

    true_family: CanonicalFamily
    perceived_family: CanonicalFamily
    prior: float
    prior_log_odds: float = None  # derived from prior unless given explicitly

    def __post_init__(self) -> None:
        if not (0.0 < self.prior < 1.0):
            raise ValueError(f"prior must lie strictly inside (0, 1), got {self.prior}")
        if self.prior_log_odds is None:
            lo = math.log(self.prior) - math.log1p(-self.prior)
            object.__setattr__(self, "prior_log_odds", lo)

    @property
    def condescension(self) -> float:
        """Perceived minus true tail exponent."""
        return self.perceived_family.alpha - self.true_family.alpha

    def flipped(self) -> "Environment":
        """Mirror environment: prior reflected exactly in log-odds space."""
        return Environment(self.true_family, self.perceived_family,
                           1.0 - self.prior, -self.prior_log_odds)


@dataclass(frozen=True)
class BeliefState:
    true_log_odds: float
    perceived_log_odds: float

    @classmethod
    def initial(cls, env: Environment) -> "BeliefState":
        return cls(env.prior_log_odds, env.prior_log_odds)


@dataclass(frozen=True)
class PosteriorPair:
    true_posterior: float
    perceived_posterior: float
    degenerate: bool  # private posterior was exactly 0 or 1


def _small_complement(log_odds: float) -> float:
    """t = min(p, 1-p) for belief p with the given log-odds; exact in |log_odds|."""
    ea = math.exp(-abs(log_odds))
    return ea / (1.0 + ea)


def action_llrs(family: CanonicalFamily, log_odds: float) -> tuple:
    """Log likelihood ratios (high state over low) for both actions.

    Returns ``(low_llr, high_llr)`` at the decision threshold implied by the
    given perceived log-odds.  ``high_llr`` is positive and ``low_llr``
    negative for any interior belief.
    """
    t = _small_complement(log_odds)
    if t <= 0.0:
        raise BeliefUpdateError("belief left the representable range",
                                1.0 if log_odds > 0 else 0.0)
    a = family.alpha
    log_t = math.log(t)
    pa = t ** a
    fh = family.c_high * pa * t
    fl = family.two_pow_alpha * pa * (1.0 - family.alpha_frac * t)
    log_fh = family.log_c_high + (a + 1.0) * log_t
    log_fl = family.alpha_log2 + a * log_t + math.log1p(-family.alpha_frac * t)
    log_sh = math.log1p(-fh)  # log(1 - F_high(t))
    log_sl = math.log1p(-fl)
    # branch on the sign bit so that negating the log-odds (including -0.0,
    # the mirror image of an even prior) swaps and negates the pair bit for
    # bit; mirror-symmetry tests assert this without tolerance
    if math.copysign(1.0, log_odds) > 0.0:
        return (log_fh - log_fl, log_sh - log_sl)
    # threshold above 1/2: tail values swap roles through the symmetry
    return (log_sl - log_sh, log_fl - log_fh)


def low_action_llr(family: CanonicalFamily, log_odds: float) -> float:
    return action_llrs(family, log_odds)[0]


def high_action_llr(family: CanonicalFamily, log_odds: float) -> float:
    """Information content of a high action; this is the drift of a high herd."""
    return action_llrs(family, log_odds)[1]


def choose_action(belief: BeliefState, private_posterior: float) -> Action:
    """Threshold rule on the perceived posterior; indifference goes high."""
    q = private_posterior
    if not (0.0 <= q <= 1.0):
        raise ValueError(f"private posterior must lie in [0, 1], got {q}")
    if q == 0.0:
        return Action.LOW
    if q == 1.0:
        return Action.HIGH
    logit_q = math.log(q) - math.log1p(-q)
    return Action.HIGH if logit_q + belief.perceived_log_odds >= 0.0 else Action.LOW


def _logistic(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def posterior_pair(belief: BeliefState, private_posterior: float) -> PosteriorPair:
    """Combine the shared log-odds with a private posterior, both ways."""
    q = private_posterior
    if not (0.0 <= q <= 1.0):
        raise ValueError(f"private posterior must lie in [0, 1], got {q}")
    if q == 0.0 or q == 1.0:
        return PosteriorPair(q, q, degenerate=True)
    logit_q = math.log(q) - math.log1p(-q)
    return PosteriorPair(_logistic(belief.true_log_odds + logit_q),
                         _logistic(belief.perceived_log_odds + logit_q),
                         degenerate=False)


def perceived_belief(belief: BeliefState) -> float:
    return _logistic(belief.perceived_log_odds)


def update_after_action(env: Environment, belief: BeliefState,
                        action: Action) -> BeliefState:
    """Absorb one observed action into both log-odds."""
    idx = 1 if action is Action.HIGH else 0
    inc_true = action_llrs(env.true_family, belief.perceived_log_odds)[idx]
    inc_perc = action_llrs(env.perceived_family, belief.perceived_log_odds)[idx]
    new = BeliefState(belief.true_log_odds + inc_true,
                      belief.perceived_log_odds + inc_perc)
    if not (math.isfinite(new.true_log_odds) and math.isfinite(new.perceived_log_odds)):
        raise BeliefUpdateError("non-finite log-odds after update",
                                perceived_belief(belief))
    return new


def assert_overturning(belief: BeliefState, action: Action) -> None:
    """Updated perceived belief must side with the action just absorbed."""
    if (belief.perceived_log_odds >= 0.0) != (action is Action.HIGH):
        raise OverturningViolation(
            f"perceived log-odds {belief.perceived_log_odds} after {action}")
