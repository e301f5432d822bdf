"""Online arm-selection policies for clustered Gaussian bandits.

All policies share one interface::

    arm = policy.select(t, rng)   # t = 1, 2, ... is the round number
    policy.observe(arm, reward)
    policy.reset()

Thompson-sampling policies keep the belief N(mean, 1/(count+1)) per arm (and,
for the clustered variants, per cluster) and draw from ``rng`` in a fixed
order:

========  ==========================================  =====================
policy    variates consumed per ``select``            order
========  ==========================================  =====================
tsg       n                                           arm index
tscg      K + |C(t)|                                  clusters, then arms
                                                      of C(t) in cluster
                                                      order
utscg     K + |{leader} + neighbors(leader)|          clusters, then the
                                                      candidates in cluster
                                                      order
ucb1      0
tlp       0
========  ==========================================  =====================

Ties are broken toward the lowest index (first cluster, first position).
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .core import ClusterPartition, PosteriorState, neighbors
from .rng import RandomStream


class Policy:
    """Base class; subclasses implement ``select``."""

    name = "policy"
    clustered = False

    def __init__(self, partition: ClusterPartition) -> None:
        self.partition = partition
        self.n_arms = partition.n_arms
        self.reset()

    def reset(self) -> None:
        self.means = np.zeros(self.n_arms)
        self.counts = np.zeros(self.n_arms, dtype=np.int64)
        self._scale = np.ones(self.n_arms)

    def select(self, t: int, rng: RandomStream) -> int:
        raise NotImplementedError

    def observe(self, arm: int, reward: float) -> None:
        n = int(self.counts[arm])
        self.means[arm] = (self.means[arm] * n + reward) / (n + 1)
        self.counts[arm] = n + 1
        self._scale[arm] = 1.0 / math.sqrt(n + 2)

    def arm_state(self, arm: int) -> PosteriorState:
        return PosteriorState(float(self.means[arm]), int(self.counts[arm]))

    def set_arm_state(self, arm: int, state: PosteriorState) -> None:
        self.means[arm] = state.empirical_mean
        self.counts[arm] = state.pull_count
        self._scale[arm] = state.stddev


class _ClusteredPolicy(Policy):
    clustered = True

    def __init__(self, partition: ClusterPartition) -> None:
        self._members = [np.array(c, dtype=np.int64) for c in partition.clusters]
        self._cluster_of = np.array([partition.cluster_of(i) for i in range(partition.n_arms)])
        super().__init__(partition)

    def reset(self) -> None:
        super().reset()
        k = self.partition.n_clusters
        self.cluster_means = np.zeros(k)
        self.cluster_counts = np.zeros(k, dtype=np.int64)
        self._cluster_scale = np.ones(k)
        self.last_cluster: int | None = None

    def observe(self, arm: int, reward: float) -> None:
        super().observe(arm, reward)
        c = int(self._cluster_of[arm])
        n = int(self.cluster_counts[c])
        self.cluster_means[c] = (self.cluster_means[c] * n + reward) / (n + 1)
        self.cluster_counts[c] = n + 1
        self._cluster_scale[c] = 1.0 / math.sqrt(n + 2)

    def cluster_state(self, cluster: int) -> PosteriorState:
        return PosteriorState(float(self.cluster_means[cluster]), int(self.cluster_counts[cluster]))

    def set_cluster_state(self, cluster: int, state: PosteriorState) -> None:
        self.cluster_means[cluster] = state.empirical_mean
        self.cluster_counts[cluster] = state.pull_count
        self._cluster_scale[cluster] = state.stddev

    def _sample_cluster(self, rng: RandomStream) -> int:
        z = rng.normals(len(self._members))
        c = int(np.argmax(self.cluster_means + z * self._cluster_scale))
        self.last_cluster = c
        return c

    def _sample_among(self, arms: np.ndarray, rng: RandomStream) -> int:
        z = rng.normals(len(arms))
        eta = self.means[arms] + z * self._scale[arms]
        return int(arms[int(np.argmax(eta))])


class TSG(Policy):
    """Thompson sampling with a Gaussian prior over all arms."""

    name = "tsg"

    def select(self, t: int, rng: RandomStream) -> int:
        z = rng.normals(self.n_arms)
        return int(np.argmax(self.means + z * self._scale))


class TSCG(_ClusteredPolicy):
    """Two-level Thompson sampling: sample a cluster, then an arm inside it."""

    name = "tscg"

    def select(self, t: int, rng: RandomStream) -> int:
        c = self._sample_cluster(rng)
        return self._sample_among(self._members[c], rng)


class UTSCG(_ClusteredPolicy):
    """Two-level Thompson sampling restricted to the leader's neighborhood.

    The leader is the empirically best arm of the sampled cluster, computed
    over every member including unplayed ones (empirical mean 0).
    """

    name = "utscg"

    def reset(self) -> None:
        super().reset()
        self.last_leader: int | None = None
        self.last_candidates: np.ndarray | None = None

    def select(self, t: int, rng: RandomStream) -> int:
        c = self._sample_cluster(rng)
        members = self._members[c]
        p = int(np.argmax(self.means[members]))
        cand = members[max(p - 1, 0):p + 2]
        self.last_leader = int(members[p])
        self.last_candidates = cand
        return self._sample_among(cand, rng)

    def candidates(self, cluster: int) -> set[int]:
        """``{leader} | neighbors(leader)`` for ``cluster`` under the current means."""
        members = self._members[cluster]
        leader = int(members[int(np.argmax(self.means[members]))])
        return {leader} | neighbors(self.partition, leader)


def ucb1_index(means: np.ndarray, counts: np.ndarray, t: int) -> int:
    """UCB1 choice: first unplayed arm, else argmax of mean + sqrt(2 ln t / N)."""
    if t < 1:
        raise ValueError(f"round must be >= 1, got {t}")
    unplayed = np.flatnonzero(counts == 0)
    if unplayed.size:
        return int(unplayed[0])
    return int(np.argmax(means + np.sqrt(2.0 * math.log(t) / counts)))


class UCB1(Policy):
    name = "ucb1"

    def select(self, t: int, rng: RandomStream | None = None) -> int:
        return ucb1_index(self.means, self.counts, t)


class TLP(_ClusteredPolicy):
    """Two-level UCB1: UCB1 over cluster aggregates, then UCB1 inside.

    The inner level uses the chosen cluster's own round count ``N_C + 1`` in
    its logarithm, so a single cluster reduces to plain UCB1.
    """

    name = "tlp"

    def select(self, t: int, rng: RandomStream | None = None) -> int:
        c = ucb1_index(self.cluster_means, self.cluster_counts, t)
        self.last_cluster = c
        members = self._members[c]
        inner_t = int(self.cluster_counts[c]) + 1
        return int(members[ucb1_index(self.means[members], self.counts[members], inner_t)])


POLICIES: dict[str, Callable[[ClusterPartition], Policy]] = {
    "tsg": TSG,
    "tscg": TSCG,
    "utscg": UTSCG,
    "ucb1": UCB1,
    "tlp": TLP,
}


def make_policy(policy_id: str, partition: ClusterPartition) -> Policy:
    try:
        cls = POLICIES[policy_id]
    except KeyError:
        raise ValueError(f"unknown policy {policy_id!r}; choose from {sorted(POLICIES)}") from None
    return cls(partition)
