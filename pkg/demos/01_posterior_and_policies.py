"""Gaussian beliefs and the three Thompson-sampling selectors on a toy instance.

Run with ``python demos/01_posterior_and_policies.py``.
"""

# %%
from __future__ import annotations

import numpy as np

from clusterbandit import (
    BanditInstance,
    PosteriorState,
    RandomStream,
    make_policy,
    posterior_sample,
    posterior_update,
    run_episode,
)

# %% [markdown]
# Each arm keeps a running mean and a pull count. The belief about its true
# mean is N(mean, 1/(N+1)), so it narrows as rewards arrive.

# %%
state = PosteriorState()
rng = np.random.default_rng(0)
for x in rng.normal(0.4, 1.0, size=50):
    state = posterior_update(state, float(x))
print(f"after {state.pull_count} pulls: mean={state.empirical_mean:.3f} sd={state.stddev:.3f}")

stream = RandomStream(0)
draws = np.array([posterior_sample(state, stream) for _ in range(2000)])
print(f"2000 posterior draws: mean={draws.mean():.3f} sd={draws.std():.3f}")

# %% [markdown]
# Two clusters of two arms. TSG ignores the grouping; TSCG first samples a
# cluster from the pooled belief, then an arm inside it; UTSCG samples only
# around the cluster's current leader.

# %%
toy = BanditInstance.from_cluster_means([[0.9, 0.8], [0.3, 0.2]], name="toy")
for pid in ("tsg", "tscg", "utscg", "ucb1", "tlp"):
    traj = run_episode(toy, pid, 2000, seed=1)
    share = np.bincount(traj.chosen, minlength=toy.n_arms) / traj.horizon
    print(f"{pid:<6} regret={traj.cumulative_pseudo_regret[-1]:7.2f}  "
          f"play share={np.round(share, 3).tolist()}")

# %% [markdown]
# Policies can also be driven by hand; ``select`` consumes standard normals
# from the stream in a fixed order, so the same seed gives the same choice.

# %%
pol = make_policy("tscg", toy.partition)
a = pol.select(1, RandomStream(42))
pol.reset()
b = pol.select(1, RandomStream(42))
print("repeatable first choice:", a == b, a)
