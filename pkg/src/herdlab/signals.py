"""Signal families: distributions of the private posterior under each state.

A family fixes the law of the private posterior q = P(state high | signal)
conditional on the realized binary state.  With equal prior weight on the
states, the mixture CDF F determines both conditionals through

    F_high(q) = 2 (q F(q) - int_0^q F(x) dx)
    F_low(q)  = 2 ((1 - q) F(q) + int_0^q F(x) dx)

equivalent to the density ratio dF_high/dF_low = q / (1 - q).

The canonical family is the symmetric power law

    F(q) = 2^(a-1) q^a                     for q <= 1/2,
    F(q) = 1 - 2^(a-1) (1-q)^a             for q >  1/2,

whose conditionals have closed forms on the lower half

    F_high(q) = (a/(a+1)) 2^a q^(a+1)
    F_low(q)  = 2^a q^a (1 - a q/(a+1))

and extend by F_high(q) = 1 - F_low(1-q), F_low(q) = 1 - F_high(1-q).
The tail exponent a > 0 sets how fast signal quality concentrates near the
revealing posteriors 0 and 1.  Everything evaluated near those endpoints is
computed from the small argument t = min(q, 1-q) so no precision is lost to
cancellation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

_BISECT_MAX_ITER = 200


class State(enum.Enum):
    """Realized binary state of the world."""

    LOW = "low"
    HIGH = "high"

    def flipped(self) -> "State":
        return State.LOW if self is State.HIGH else State.HIGH


class FamilyKind(enum.Enum):
    CANONICAL = "canonical"


@dataclass(frozen=True)
class CanonicalFamily:
    """Symmetric power-law signal family with tail exponent ``alpha``.

    Precomputed constants (set in ``__post_init__``) drive every evaluator:
    ``alpha_frac`` = a/(a+1), ``c_high`` = a 2^a/(a+1) so that on [0, 1/2]
    F_high(t) = c_high t^(a+1) and F_low(t) = 2^a t^a (1 - alpha_frac t).
    """

    alpha: float
    kind: FamilyKind = field(default=FamilyKind.CANONICAL, repr=False)

    # derived constants, filled in __post_init__
    alpha_frac: float = field(init=False, repr=False)
    c_high: float = field(init=False, repr=False)
    two_pow_alpha: float = field(init=False, repr=False)
    log_c_high: float = field(init=False, repr=False)
    alpha_log2: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not (isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha)):
            raise ValueError("alpha must be a finite number")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.alpha >= 1024:
            raise ValueError(f"alpha too large for float evaluation: {self.alpha}")
        a = float(self.alpha)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "alpha_frac", a / (a + 1.0))
        object.__setattr__(self, "two_pow_alpha", 2.0 ** a)
        object.__setattr__(self, "c_high", a / (a + 1.0) * 2.0 ** a)
        object.__setattr__(self, "log_c_high", math.log(a / (a + 1.0)) + a * math.log(2.0))
        object.__setattr__(self, "alpha_log2", a * math.log(2.0))

    # -- closed forms on the lower half, argument t in [0, 1/2] ------------

    def _high_small(self, t):
        return self.c_high * t ** self.alpha * t

    def _low_small(self, t):
        return self.two_pow_alpha * t ** self.alpha * (1.0 - self.alpha_frac * t)

    # -- public evaluators, scalar or ndarray ------------------------------

    def marginal_cdf(self, q):
        """Mixture CDF F(q) of the private posterior."""
        q = np.asarray(q, dtype=float)
        lower = q <= 0.5
        t = np.where(lower, q, 1.0 - q)
        half = 0.5 * self.two_pow_alpha * t ** self.alpha
        out = np.where(lower, half, 1.0 - half)
        return out if out.ndim else float(out)

    def conditional_cdf(self, state: State, q):
        """CDF of the private posterior given the state."""
        q = np.asarray(q, dtype=float)
        lower = q <= 0.5
        t = np.where(lower, q, 1.0 - q)
        fh = self._high_small(t)
        fl = self._low_small(t)
        if state is State.HIGH:
            out = np.where(lower, fh, 1.0 - fl)
        else:
            out = np.where(lower, fl, 1.0 - fh)
        return out if out.ndim else float(out)

    def conditional_sf(self, state: State, q):
        """1 - conditional CDF, computed from the small argument directly."""
        q = np.asarray(q, dtype=float)
        lower = q <= 0.5
        t = np.where(lower, q, 1.0 - q)
        fh = self._high_small(t)
        fl = self._low_small(t)
        if state is State.HIGH:
            out = np.where(lower, 1.0 - fh, fl)
        else:
            out = np.where(lower, 1.0 - fl, fh)
        return out if out.ndim else float(out)

    def quantile(self, state: State, u):
        """Inverse conditional CDF by bracketed bisection on [0, 1].

        Runs until the bracket is unsplittable in float64 (at most
        ``_BISECT_MAX_ITER`` halvings), which puts |CDF(q) - u| well below
        the 1e-13 contract for every u in [0, 1].
        """
        arr = np.asarray(u, dtype=float)
        if np.any((arr < 0.0) | (arr > 1.0)) or not np.all(np.isfinite(arr)):
            raise ValueError("u must lie in [0, 1]")
        lo = np.zeros_like(arr)
        hi = np.ones_like(arr)
        for _ in range(_BISECT_MAX_ITER):
            mid = 0.5 * (lo + hi)
            stuck = (mid == lo) | (mid == hi)
            if np.all(stuck):
                break
            f = np.asarray(self.conditional_cdf(state, mid))
            below = (f < arr) & ~stuck
            lo = np.where(below, mid, lo)
            hi = np.where(~below & ~stuck, mid, hi)
        q = 0.5 * (lo + hi)
        q = np.where(arr == 0.0, 0.0, q)
        q = np.where(arr == 1.0, 1.0, q)
        return q if q.ndim else float(q)

    def draw(self, state: State, rng: np.random.Generator, size=None):
        """Sample private posteriors given the state from a caller-owned stream."""
        return self.quantile(state, rng.random() if size is None else rng.random(size))


@dataclass(frozen=True)
class FamilyCheck:
    """Grid verification report for a signal family.

    Violation fields are maxima over the grid and should sit at float
    rounding level; exponent fields are pointwise ratios log CDF / log q
    at small probe arguments, which recover the tail exponent up to the
    prefactor term log(const)/log(q).
    """

    grid_points: int
    max_mixture_residual: float        # |F_low + F_high - 2 F|
    max_symmetry_residual: float       # |F_low(q) + F_high(1-q) - 1|
    max_fosd_excess: float             # max(F_high - F_low), dominance wants <= 0
    max_high_bound_excess: float       # max(F_high - 2 q F)
    max_low_band_excess: float         # max(|F_low - 2 F| - 3 q F)
    mixture_exponent_at: dict
    high_exponent_at: dict


def verify_family(family: CanonicalFamily, grid_points: int = 10001,
                  probes=(1e-3, 1e-6)) -> FamilyCheck:
    """Exercise the distribution identities on a uniform grid.

    Returns measured violation maxima rather than asserting, so callers
    choose their own tolerances.
    """
    q = np.linspace(0.0, 1.0, grid_points)
    f = np.asarray(family.marginal_cdf(q))
    fh = np.asarray(family.conditional_cdf(State.HIGH, q))
    fl = np.asarray(family.conditional_cdf(State.LOW, q))
    fh_rev = np.asarray(family.conditional_cdf(State.HIGH, 1.0 - q))

    mixture = np.max(np.abs(fl + fh - 2.0 * f))
    symmetry = np.max(np.abs(fl + fh_rev - 1.0))
    fosd = np.max(fh - fl)
    high_bound = np.max(fh - 2.0 * q * f)
    low_band = np.max(np.abs(fl - 2.0 * f) - 3.0 * q * f)

    mix_exp = {}
    high_exp = {}
    for p in probes:
        mix_exp[p] = math.log(family.marginal_cdf(p)) / math.log(p)
        high_exp[p] = math.log(family.conditional_cdf(State.HIGH, p)) / math.log(p)

    return FamilyCheck(
        grid_points=grid_points,
        max_mixture_residual=float(mixture),
        max_symmetry_residual=float(symmetry),
        max_fosd_excess=float(fosd),
        max_high_bound_excess=float(high_bound),
        max_low_band_excess=float(low_band),
        mixture_exponent_at=mix_exp,
        high_exponent_at=high_exp,
    )
