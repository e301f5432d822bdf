"""mmWave beam selection: path loss, received-power means and regret bounds."""

# %%
from __future__ import annotations

import sys

from clusterbandit import (
    BanditInstance,
    BoundNotApplicable,
    MmWaveScenario,
    build_mmwave_instance,
    compute_gaps,
    neighbors,
    path_loss_db,
    run_experiment,
    theorem1_bound,
    theorem2_bound,
    theorem3_bound,
    validate_unimodality,
)

# %%
for f in (24.25, 43.5, 60.0):
    print(f"path loss at {f:5.2f} GHz, 10 m: {path_loss_db(f, 0.01):.4f} dB")

inst = build_mmwave_instance()
for f, c in zip(MmWaveScenario().frequencies, inst.cluster_means()):
    print(f"{f:5.2f} GHz beams (mW):", [round(m, 4) for m in c])
print("unimodal:", validate_unimodality(inst))
print("main lobe on the edge beam:",
      validate_unimodality(build_mmwave_instance(MmWaveScenario(main_lobe_position=0))))

# %% [markdown]
# Regret-bound leading terms. Bounds whose assumptions fail raise
# ``BoundNotApplicable`` with the reason.

# %%
def show_bounds(instance: BanditInstance, horizon: int) -> None:
    gaps = compute_gaps(instance)
    nb = neighbors(instance.partition, gaps.optimal_arm)
    for name, fn in (("tsg", lambda: theorem1_bound(gaps, horizon)),
                     ("tscg", lambda: theorem2_bound(gaps, horizon)),
                     ("utscg", lambda: theorem3_bound(gaps, nb, horizon))):
        try:
            print(f"  {name:<6} {fn():12.2f}")
        except BoundNotApplicable as exc:
            print(f"  {name:<6} n/a ({exc})")


print("mmWave, T=20000:")
show_bounds(inst, 20000)
synthetic = BanditInstance.from_cluster_means([[0.9, 0.8], [0.3, 0.2]])
print("synthetic, T=10000:")
show_bounds(synthetic, 10000)

# %%
horizon = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
reps = int(sys.argv[2]) if len(sys.argv) > 2 else 6
report = run_experiment(inst, ["tsg", "tscg", "utscg", "ucb1", "tlp"], horizon, reps, seed=7)
for pid in report.curves:
    m, se, rate = report.final(pid)
    print(f"{pid:<6} regret {m:8.2f} +/- {se:6.2f}  optimal rate {rate:.3f}")
