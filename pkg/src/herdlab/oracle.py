"""Exact action-tree enumeration for short horizons.

The perceived belief is a deterministic function of the action prefix, so
the law of the first k actions given the state is a product tree over the
2^k prefixes.  Enumerating it gives exact values that everything stochastic
in this package is tested against.

Step probabilities and belief increments are expressed through the small
argument t = min(p, 1-p) of the perceived belief, never by nested
complements, so a mirrored environment (reflected prior, flipped state,
flipped actions) reproduces the same floats exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ._stats import KahanSum
from .beliefs import Action, Environment, action_llrs
from .signals import CanonicalFamily, State

MAX_DEPTH = 25


def _step_probs(family: CanonicalFamily, state: State, log_odds: float) -> tuple:
    """(P(low action), P(high action)) given the state, at a perceived log-odds."""
    ea = math.exp(-abs(log_odds))
    t = ea / (1.0 + ea)
    fh = family._high_small(t)
    fl = family._low_small(t)
    # sign-bit branch: mirrored walks (negated log-odds, flipped state) pick
    # up byte-identical probabilities, so symmetry tests can assert equality
    if math.copysign(1.0, log_odds) > 0.0:
        return (fh, 1.0 - fh) if state is State.HIGH else (fl, 1.0 - fl)
    return (1.0 - fl, fl) if state is State.HIGH else (1.0 - fh, fh)


def prefix_probability(env: Environment, state: State,
                       prefix: Sequence[Action]) -> float:
    """Probability the first agents take exactly this action sequence."""
    if len(prefix) > MAX_DEPTH:
        raise ValueError(f"prefix longer than the enumeration cap {MAX_DEPTH}")
    rt = env.prior_log_odds
    prob = 1.0
    for act in prefix:
        p_low, p_high = _step_probs(env.true_family, state, rt)
        prob *= p_high if act is Action.HIGH else p_low
        rt += action_llrs(env.perceived_family, rt)[1 if act is Action.HIGH else 0]
    return prob


@dataclass(frozen=True)
class TreeSummary:
    depth: int
    state: State
    total_prob: float
    expected_wrong_actions: float
    prob_all_correct: float
    prob_first_correct_by: tuple  # CDF of the first matching action over 1..depth


def enumerate_tree(env: Environment, state: State, depth: int) -> TreeSummary:
    """Walk all 2^depth prefixes, accumulating in fixed (low-first) order."""
    if not (1 <= depth <= MAX_DEPTH):
        raise ValueError(f"depth must lie in [1, {MAX_DEPTH}], got {depth}")
    total = KahanSum()
    wrong_mass = KahanSum()
    all_correct = KahanSum()
    first_correct_pmf = [KahanSum() for _ in range(depth)]
    tf, pf = env.true_family, env.perceived_family
    wrong_is_high = state is State.LOW

    def walk(level: int, rt: float, prob: float, wrong: int, first_correct: int) -> None:
        if level == depth:
            total.add(prob)
            wrong_mass.add(prob * wrong)
            if wrong == 0:
                all_correct.add(prob)
            if first_correct:
                first_correct_pmf[first_correct - 1].add(prob)
            return
        p_low, p_high = _step_probs(tf, state, rt)
        llr_low, llr_high = action_llrs(pf, rt)
        n = level + 1
        low_correct = first_correct or (n if wrong_is_high else 0)
        high_correct = first_correct or (0 if wrong_is_high else n)
        walk(level + 1, rt + llr_low, prob * p_low,
             wrong + (0 if wrong_is_high else 1), low_correct)
        walk(level + 1, rt + llr_high, prob * p_high,
             wrong + (1 if wrong_is_high else 0), high_correct)

    walk(0, env.prior_log_odds, 1.0, 0, 0)
    cdf = []
    acc = KahanSum()
    for pmf in first_correct_pmf:
        acc.add(pmf.total)
        cdf.append(acc.total)
    return TreeSummary(depth, state, total.total, wrong_mass.total,
                       all_correct.total, tuple(cdf))


def leaf_probabilities(env: Environment, state: State, depth: int):
    """All (prefix, probability) pairs; intended for small depths only."""
    if not (1 <= depth <= 16):
        raise ValueError(f"leaf listing supports depth in [1, 16], got {depth}")
    out = []

    def walk(level: int, rt: float, prob: float, prefix: tuple) -> None:
        if level == depth:
            out.append((prefix, prob))
            return
        p_low, p_high = _step_probs(env.true_family, state, rt)
        llr_low, llr_high = action_llrs(env.perceived_family, rt)
        walk(level + 1, rt + llr_low, prob * p_low, prefix + (Action.LOW,))
        walk(level + 1, rt + llr_high, prob * p_high, prefix + (Action.HIGH,))

    walk(0, env.prior_log_odds, 1.0, ())
    return out
