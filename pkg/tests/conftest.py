import pytest

from herdlab import CanonicalFamily, Environment, State
from herdlab.beliefs import low_action_llr
from herdlab.oracle import _step_probs


def make_env(alpha, alpha_tilde, prior=0.5):
    return Environment(CanonicalFamily(alpha), CanonicalFamily(alpha_tilde), prior)


def exact_mean_tau(env, cap=5_000_000, tol=1e-15):
    """E[first matching action | state High] by direct summation.

    P(tau > n) is the probability that the first n actions are all Low,
    which is a product along the deterministic all-Low belief path.  This
    walks a different recursion than both the simulator and the high-herd
    product code, so it serves as an independent reference.
    """
    rt = env.prior_log_odds
    survival = 1.0
    total = 0.0
    for _ in range(cap):
        total += survival
        p_low, _ = _step_probs(env.true_family, State.HIGH, rt)
        survival *= p_low
        if survival < tol:
            return total
        rt += low_action_llr(env.perceived_family, rt)
    raise RuntimeError(f"survival still {survival:.3e} after {cap} steps")


@pytest.fixture
def window_env():
    # gap 0.5: the best-behaved misspecified case, used all over
    return make_env(2.0, 2.5)
