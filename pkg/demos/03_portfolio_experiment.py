"""Monte Carlo comparison on the 20-asset portfolio preset.

The defaults are small so the script finishes quickly; pass a horizon and a
replication count to reproduce the full-size run, e.g.
``python demos/03_portfolio_experiment.py 30000 100``.
"""

# %%
from __future__ import annotations

import sys

from clusterbandit import build_portfolio_instance, compute_gaps, run_experiment

horizon = int(sys.argv[1]) if len(sys.argv) > 1 else 3000
reps = int(sys.argv[2]) if len(sys.argv) > 2 else 8

# %%
inst = build_portfolio_instance()
gaps = compute_gaps(inst)
print("cluster means:", [[round(m, 3) for m in c] for c in inst.cluster_means()])
print("smallest nonzero arm gap:", min(g for g in gaps.per_arm_gap if g > 0))

# %%
report = run_experiment(inst, ["tsg", "tscg", "utscg", "ucb1", "tlp"], horizon, reps,
                        seed=7, stride=max(1, horizon // 10))
print(f"{'policy':<6} {'regret':>9} {'stderr':>8} {'opt.rate':>9}")
for pid in report.curves:
    m, se, rate = report.final(pid)
    print(f"{pid:<6} {m:9.2f} {se:8.2f} {rate:9.3f}")

# %% [markdown]
# The CSV has one row per (policy, checkpoint). Plotting ``mean_regret``
# against ``checkpoint_t`` gives the regret curves and ``optimal_rate`` the
# optimal-action curves.

# %%
print("\n".join(report.to_csv().splitlines()[:6]))
