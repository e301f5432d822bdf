"""Building instances, saving them to JSON and checking structural assumptions."""

# %%
from __future__ import annotations

import tempfile
from pathlib import Path

from clusterbandit import (
    BanditInstance,
    compute_gaps,
    load_instance,
    neighbors,
    save_instance,
    validate_strong_dominance,
    validate_unimodality,
    validate_unique_optimum,
)

# %%
inst = BanditInstance.from_cluster_means(
    [[0.2, 0.5, 0.9, 0.4], [0.3, 0.35], [0.1, 0.25, 0.15]], name="three-groups")
print(inst.name, "arms:", inst.n_arms, "clusters:", inst.partition.n_clusters)
print("optimal arm:", inst.optimal_arm, "best mean:", inst.best_mean)

# %% [markdown]
# Gap summary: per-arm gaps, per-cluster gaps to the best arm, the gap to the
# worst arm of the optimal cluster and the cluster widths.

# %%
gaps = compute_gaps(inst)
print("arm gaps:", [round(g, 3) for g in gaps.per_arm_gap])
print("cluster gaps:", [None if g is None else round(g, 3) for g in gaps.per_cluster_gap])
print("prime gaps:", [None if g is None else round(g, 3) for g in gaps.per_cluster_prime_gap])
print("widths:", [round(w, 3) for w in gaps.per_cluster_width], "D_max:", round(gaps.d_max, 3))

# %%
print("unique optimum:", validate_unique_optimum(inst))
print("strong dominance:", validate_strong_dominance(inst, gaps))
print("unimodal clusters:", validate_unimodality(inst))
print("neighbours of the optimal arm:", sorted(neighbors(inst.partition, inst.optimal_arm)))

# %% [markdown]
# Instances round-trip through JSON exactly.

# %%
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "inst.json"
    save_instance(inst, path)
    print(path.read_text())
    again = load_instance(path)
    print("round trip identical:", again.means.tolist() == inst.means.tolist())
