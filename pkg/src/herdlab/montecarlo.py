"""Monte Carlo trials of the observed-action process.

Each trial owns a counter-based random stream keyed by a fixed hash of
(master seed, trial index), so any trial can be reproduced in isolation and
batch results cannot depend on chunking or worker count.  Within a batch,
trials advance in lockstep over numpy arrays; every operation is
elementwise per trial, so the arithmetic is byte-for-byte the arithmetic of
the single-trial path.

The action decision never inverts the signal CDF: an agent with uniform
draw u takes the high action exactly when u >= F_state(1 - perceived
belief), which is the same event as "private posterior at least the
threshold" pushed through the monotone quantile map.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._stats import mean_ci, wilson_ci
from .beliefs import Environment, OverturningViolation
from .signals import State

_CHUNK_BYTES = 128 * 1024 * 1024  # uniform-draw buffer budget per chunk

WRONG_HERD_WINDOW_FRACTION = 0.9  # default detector threshold; 1.0 is the strict variant


class StateDraw(enum.Enum):
    FIXED_HIGH = "fixed_high"
    FIXED_LOW = "fixed_low"
    FROM_PRIOR = "from_prior"


@dataclass(frozen=True)
class TrialConfig:
    env: Environment
    horizon: int
    seed: int
    state_draw: StateDraw = StateDraw.FIXED_HIGH

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError(f"horizon must be at least 1, got {self.horizon}")


@dataclass(frozen=True)
class TrialResult:
    index: int
    seed: int
    realized_state: State
    wrong_count: int
    tau: Optional[int]                 # first agent matching the state; None if never
    first_wrong_index: Optional[int]
    last_wrong_index: Optional[int]
    last_switch_index: Optional[int]   # later index of the last adjacent disagreement
    bad_run_count: int
    bad_run_lengths: tuple
    final_one_minus_pi_tilde: float
    herded_correct: bool               # no wrong action over the final 10% of steps
    wrong_herd_proxy: bool             # threshold 0.9 detector
    wrong_herd_proxy_strict: bool      # threshold 1.0 detector


@dataclass(frozen=True)
class BatchSummary:
    n_trials: int
    horizon: int
    frac_state_high: float
    mean_wrong: float
    mean_wrong_ci: tuple
    mean_tau: Optional[float]          # over trials that reached a matching action
    mean_tau_ci: tuple
    frac_tau_not_reached: float
    frac_tau_not_reached_ci: tuple
    frac_wrong_herd: float
    frac_wrong_herd_ci: tuple
    frac_wrong_herd_strict: float
    frac_wrong_herd_strict_ci: tuple
    frac_switch_second_half: float
    frac_switch_second_half_ci: tuple
    mean_bad_runs: float
    mean_bad_runs_ci: tuple

    def as_dict(self) -> dict:
        return {
            "n_trials": self.n_trials,
            "horizon": self.horizon,
            "frac_state_high": self.frac_state_high,
            "mean_wrong": self.mean_wrong,
            "mean_wrong_ci": list(self.mean_wrong_ci),
            "mean_tau": self.mean_tau,
            "mean_tau_ci": list(self.mean_tau_ci),
            "frac_tau_not_reached": self.frac_tau_not_reached,
            "frac_tau_not_reached_ci": list(self.frac_tau_not_reached_ci),
            "frac_wrong_herd": self.frac_wrong_herd,
            "frac_wrong_herd_ci": list(self.frac_wrong_herd_ci),
            "frac_wrong_herd_strict": self.frac_wrong_herd_strict,
            "frac_wrong_herd_strict_ci": list(self.frac_wrong_herd_strict_ci),
            "frac_switch_second_half": self.frac_switch_second_half,
            "frac_switch_second_half_ci": list(self.frac_switch_second_half_ci),
            "mean_bad_runs": self.mean_bad_runs,
            "mean_bad_runs_ci": list(self.mean_bad_runs_ci),
        }


@dataclass(frozen=True)
class BatchRun:
    summary: BatchSummary
    trials: tuple
    actions_high: Optional[np.ndarray] = None  # (n_trials, horizon) when collected


def derive_trial_seed(master_seed: int, index: int) -> int:
    """Fixed hash of (master seed, trial index); stable across processes."""
    return int(np.random.SeedSequence((master_seed, index)).generate_state(1, np.uint64)[0])


def _trial_stream(seed: int) -> np.random.Generator:
    key = np.random.SeedSequence((seed,)).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _simulate_chunk(env: Environment, horizon: int, indices, seeds,
                    state_draw: StateDraw, check_every_step: bool,
                    keep_actions: bool):
    m = len(seeds)
    u = np.empty((m, horizon))
    state_high = np.empty(m, dtype=bool)
    for i, seed in enumerate(seeds):
        g = _trial_stream(seed)
        if state_draw is StateDraw.FROM_PRIOR:
            state_high[i] = g.random() < env.prior  # consumes the stream's first draw
        u[i] = g.random(horizon)
    if state_draw is StateDraw.FIXED_HIGH:
        state_high[:] = True
    elif state_draw is StateDraw.FIXED_LOW:
        state_high[:] = False

    tf, pf = env.true_family, env.perceived_family
    a_t, c_t, k_t, w_t = tf.alpha, tf.c_high, tf.alpha_frac, tf.two_pow_alpha
    lc_t, l2_t = tf.log_c_high, tf.alpha_log2
    a_p, c_p, k_p, w_p = pf.alpha, pf.c_high, pf.alpha_frac, pf.two_pow_alpha
    lc_p, l2_p = pf.log_c_high, pf.alpha_log2

    r = np.full(m, env.prior_log_odds)
    rt = np.full(m, env.prior_log_odds)
    high = np.empty((m, horizon), dtype=bool)

    for n in range(horizon):
        ea = np.exp(-np.abs(rt))
        t = ea / (1.0 + ea)
        pos = ~np.signbit(rt)  # same -0.0 convention as the scalar updaters
        log_t = np.log(t)
        pa_t = t ** a_t
        fh_t = c_t * pa_t * t
        fl_t = w_t * pa_t * (1.0 - k_t * t)
        lfh_t = lc_t + (a_t + 1.0) * log_t
        lfl_t = l2_t + a_t * log_t + np.log1p(-k_t * t)
        sh_t = np.log1p(-fh_t)
        sl_t = np.log1p(-fl_t)
        inc_low_t = np.where(pos, lfh_t - lfl_t, sl_t - sh_t)
        inc_high_t = np.where(pos, sh_t - sl_t, lfl_t - lfh_t)

        pa_p = t ** a_p
        fh_p = c_p * pa_p * t
        fl_p = w_p * pa_p * (1.0 - k_p * t)
        lfh_p = lc_p + (a_p + 1.0) * log_t
        lfl_p = l2_p + a_p * log_t + np.log1p(-k_p * t)
        sh_p = np.log1p(-fh_p)
        sl_p = np.log1p(-fl_p)
        inc_low_p = np.where(pos, lfh_p - lfl_p, sl_p - sh_p)
        inc_high_p = np.where(pos, sh_p - sl_p, lfl_p - lfh_p)

        p_low_given_high = np.where(pos, fh_t, 1.0 - fl_t)
        p_low_given_low = np.where(pos, fl_t, 1.0 - fh_t)
        threshold = np.where(state_high, p_low_given_high, p_low_given_low)
        hi = u[:, n] >= threshold
        high[:, n] = hi

        r = r + np.where(hi, inc_high_t, inc_low_t)
        rt = rt + np.where(hi, inc_high_p, inc_low_p)
        if check_every_step or n % 100 == 0:
            if not np.all((rt >= 0.0) == hi):
                bad = int(np.argmax((rt >= 0.0) != hi))
                raise OverturningViolation(
                    f"trial {indices[bad]} step {n + 1}: perceived log-odds {rt[bad]}")
        if not np.all(np.isfinite(rt)) or not np.all(np.isfinite(r)):
            raise FloatingPointError(f"non-finite log-odds at step {n + 1}")

    ea = np.exp(-np.abs(rt))
    t = ea / (1.0 + ea)
    final_comp = np.where(rt >= 0.0, t, 1.0 - t)

    wrong = high != state_high[:, None]
    results = []
    tail_start = int(WRONG_HERD_WINDOW_FRACTION * horizon)
    for i in range(m):
        w = wrong[i]
        n_wrong = int(w.sum())
        correct = ~w
        tau = int(np.argmax(correct)) + 1 if correct.any() else None
        if n_wrong:
            first_wrong = int(np.argmax(w)) + 1
            last_wrong = horizon - int(np.argmax(w[::-1]))
            x = w.astype(np.int8)
            d = np.diff(x)
            starts = np.flatnonzero(d == 1) + 1
            if x[0]:
                starts = np.concatenate(([0], starts))
            ends = np.flatnonzero(d == -1) + 1
            if x[-1]:
                ends = np.concatenate((ends, [horizon]))
            lengths = tuple(int(v) for v in ends - starts)
        else:
            first_wrong = None
            last_wrong = None
            lengths = ()
        hrow = high[i]
        sw = hrow[1:] != hrow[:-1]
        last_switch = horizon - int(np.argmax(sw[::-1])) if sw.any() else None
        window = horizon - first_wrong if first_wrong is not None else 0
        is_full_tail = last_wrong == horizon if last_wrong is not None else False
        results.append(TrialResult(
            index=int(indices[i]),
            seed=int(seeds[i]),
            realized_state=State.HIGH if state_high[i] else State.LOW,
            wrong_count=n_wrong,
            tau=tau,
            first_wrong_index=first_wrong,
            last_wrong_index=last_wrong,
            last_switch_index=last_switch,
            bad_run_count=len(lengths),
            bad_run_lengths=lengths,
            final_one_minus_pi_tilde=float(final_comp[i]),
            herded_correct=not bool(w[tail_start:].any()),
            wrong_herd_proxy=is_full_tail and n_wrong >= 0.9 * window,
            wrong_herd_proxy_strict=is_full_tail and n_wrong >= 1.0 * window,
        ))
    return results, (high if keep_actions else None)


def run_trial(config: TrialConfig, index: int = 0,
              check_every_step: bool = True) -> TrialResult:
    """Simulate one trial; fully determined by (seed, config)."""
    results, _ = _simulate_chunk(config.env, config.horizon, [index], [config.seed],
                                 config.state_draw, check_every_step, False)
    return results[0]


def summarize(trials, horizon: int) -> BatchSummary:
    """Pure fold of per-trial results, taken in trial-index order."""
    trials = sorted(trials, key=lambda t: t.index)
    n = len(trials)
    half = horizon / 2.0
    n_high = sum(t.realized_state is State.HIGH for t in trials)
    wrongs = [t.wrong_count for t in trials]
    taus = [t.tau for t in trials if t.tau is not None]
    n_no_tau = n - len(taus)
    n_herd = sum(t.wrong_herd_proxy for t in trials)
    n_herd_strict = sum(t.wrong_herd_proxy_strict for t in trials)
    n_switch_late = sum(t.last_switch_index is not None and t.last_switch_index > half
                        for t in trials)
    runs = [t.bad_run_count for t in trials]

    mean_wrong, ci_wrong = mean_ci(wrongs)
    mean_tau, ci_tau = mean_ci(taus)
    frac_no_tau, ci_no_tau = wilson_ci(n_no_tau, n)
    frac_herd, ci_herd = wilson_ci(n_herd, n)
    frac_herd_s, ci_herd_s = wilson_ci(n_herd_strict, n)
    frac_switch, ci_switch = wilson_ci(n_switch_late, n)
    mean_runs, ci_runs = mean_ci(runs)
    return BatchSummary(
        n_trials=n, horizon=horizon,
        frac_state_high=n_high / n if n else None,
        mean_wrong=mean_wrong, mean_wrong_ci=ci_wrong,
        mean_tau=mean_tau, mean_tau_ci=ci_tau,
        frac_tau_not_reached=frac_no_tau, frac_tau_not_reached_ci=ci_no_tau,
        frac_wrong_herd=frac_herd, frac_wrong_herd_ci=ci_herd,
        frac_wrong_herd_strict=frac_herd_s, frac_wrong_herd_strict_ci=ci_herd_s,
        frac_switch_second_half=frac_switch, frac_switch_second_half_ci=ci_switch,
        mean_bad_runs=mean_runs, mean_bad_runs_ci=ci_runs,
    )


def run_batch(env: Environment, horizon: int, n_trials: int, master_seed: int,
              state_draw: StateDraw = StateDraw.FIXED_HIGH, workers: int = 1,
              check_every_step: bool = False, keep_actions: bool = False) -> BatchRun:
    """Run trials 0..n_trials-1; identical output for any worker count.

    Chunk geometry depends only on the horizon, trial seeds depend only on
    (master_seed, index), and every kernel operation is elementwise, so the
    executor layout cannot leak into results.
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be at least 1, got {n_trials}")
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    chunk = max(1, min(n_trials, _CHUNK_BYTES // (8 * horizon)))
    spans = [(lo, min(lo + chunk, n_trials)) for lo in range(0, n_trials, chunk)]
    seeds = [derive_trial_seed(master_seed, i) for i in range(n_trials)]

    def job(span):
        lo, hi = span
        return _simulate_chunk(env, horizon, list(range(lo, hi)), seeds[lo:hi],
                               state_draw, check_every_step, keep_actions)

    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, spans))
    else:
        parts = [job(s) for s in spans]

    trials = tuple(t for part, _ in parts for t in part)
    actions = np.concatenate([a for _, a in parts], axis=0) if keep_actions else None
    return BatchRun(summarize(trials, horizon), trials, actions)


@dataclass(frozen=True)
class TauScalingRow:
    prior: float
    n_trials: int
    mean_tau: Optional[float]
    mean_tau_ci: tuple
    frac_not_reached: float
    prior_odds_against: float          # (1 - prior) / prior
    ratio_to_odds: Optional[float]     # mean_tau / prior_odds_against


def tau_scaling_experiment(true_family, perceived_family, priors, horizon: int,
                           n_trials: int, master_seed: int, workers: int = 1):
    """Mean first-matching-action time against the prior odds, per prior."""
    bad = [p for p in priors if not 0.0 < p <= 0.5]
    if bad:
        raise ValueError(f"priors must lie in (0, 1/2], got {bad}")
    rows = []
    for prior in priors:
        env = Environment(true_family, perceived_family, prior)
        run = run_batch(env, horizon, n_trials, master_seed,
                        StateDraw.FIXED_HIGH, workers)
        s = run.summary
        odds = (1.0 - prior) / prior
        ratio = s.mean_tau / odds if s.mean_tau is not None else None
        rows.append(TauScalingRow(prior, n_trials, s.mean_tau, s.mean_tau_ci,
                                  s.frac_tau_not_reached, odds, ratio))
    return rows
