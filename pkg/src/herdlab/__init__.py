"""Numerical laboratory for sequential social learning with condescension.

Agents observe predecessors' binary actions and a private signal, but
model everyone else's signal quality with a wrong tail exponent.  The
package computes exact short-horizon action distributions, deterministic
herd belief paths with certified herd-probability bounds, and Monte Carlo
batches, organized so each layer can be checked against the one below.
"""

from .beliefs import (Action, BeliefState, BeliefUpdateError, Environment,
                      OverturningViolation, PosteriorPair, action_llrs,
                      assert_overturning, choose_action, high_action_llr, low_action_llr,
                      posterior_pair, update_after_action)
from .herdpath import (EnvelopeFit, HerdPath, HerdProbBounds, RaabeDiagnostic,
                       RegimeLabel, ThresholdNotReached, UniformityResult,
                       classify_regime, compute_herd_path, fit_envelopes,
                       immediate_herd_prob, raabe_sum_diagnostic,
                       uniformity_check)
from .montecarlo import (BatchRun, BatchSummary, StateDraw, TrialConfig,
                         TrialResult, derive_trial_seed, run_batch, run_trial,
                         summarize, tau_scaling_experiment)
from .oracle import (MAX_DEPTH, TreeSummary, enumerate_tree,
                     leaf_probabilities, prefix_probability)
from .signals import CanonicalFamily, FamilyCheck, FamilyKind, State, verify_family

__all__ = [
    "Action", "BatchRun", "BatchSummary", "BeliefState", "BeliefUpdateError",
    "CanonicalFamily", "EnvelopeFit", "Environment", "FamilyCheck", "FamilyKind",
    "HerdPath", "HerdProbBounds", "MAX_DEPTH", "OverturningViolation",
    "PosteriorPair", "RaabeDiagnostic", "RegimeLabel", "State", "StateDraw",
    "ThresholdNotReached", "TreeSummary", "TrialConfig", "TrialResult",
    "UniformityResult", "action_llrs", "assert_overturning", "choose_action",
    "classify_regime",
    "compute_herd_path", "derive_trial_seed", "enumerate_tree", "fit_envelopes",
    "high_action_llr", "immediate_herd_prob", "leaf_probabilities",
    "low_action_llr", "posterior_pair", "prefix_probability",
    "raabe_sum_diagnostic", "run_batch", "run_trial", "summarize",
    "tau_scaling_experiment", "uniformity_check", "update_after_action",
    "verify_family",
]
