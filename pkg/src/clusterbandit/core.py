"""Problem instances, Gaussian posterior arithmetic, validators and gaps.

Arms are indexed ``0..n-1``. A :class:`ClusterPartition` lists the clusters in
declaration order, and each cluster lists its arms in within-cluster order.
That order is the unimodal axis, so it also defines neighbor adjacency.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .rng import RandomStream


class InstanceError(ValueError):
    """A malformed or inconsistent bandit instance."""


# ---------------------------------------------------------------------------
# Data model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArmSpec:
    mean: float
    stddev: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.mean):
            raise InstanceError(f"arm mean must be finite, got {self.mean!r}")
        if not (math.isfinite(self.stddev) and self.stddev >= 0):
            raise InstanceError(f"arm stddev must be finite and >= 0, got {self.stddev!r}")


@dataclass(frozen=True)
class ClusterPartition:
    """Ordered clusters of arm indices forming a partition of ``0..n-1``."""

    clusters: tuple[tuple[int, ...], ...]
    _cluster_of: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _position: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __init__(self, clusters: Sequence[Sequence[int]]) -> None:
        cl = tuple(tuple(int(i) for i in c) for c in clusters)
        if not cl:
            raise InstanceError("partition needs at least one cluster")
        if any(len(c) == 0 for c in cl):
            raise InstanceError("clusters must be non-empty")
        flat = [i for c in cl for i in c]
        if sorted(flat) != list(range(len(flat))):
            raise InstanceError(
                f"clusters must partition 0..{len(flat) - 1}; got {list(cl)}")
        cluster_of = [0] * len(flat)
        position = [0] * len(flat)
        for k, c in enumerate(cl):
            for p, i in enumerate(c):
                cluster_of[i] = k
                position[i] = p
        object.__setattr__(self, "clusters", cl)
        object.__setattr__(self, "_cluster_of", tuple(cluster_of))
        object.__setattr__(self, "_position", tuple(position))

    @classmethod
    def single(cls, n: int) -> "ClusterPartition":
        return cls([list(range(n))])

    @property
    def n_arms(self) -> int:
        return len(self._cluster_of)

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    def cluster_of(self, arm: int) -> int:
        self._check(arm)
        return self._cluster_of[arm]

    def position(self, arm: int) -> int:
        """Position of ``arm`` inside its cluster's ordering."""
        self._check(arm)
        return self._position[arm]

    def _check(self, arm: int) -> None:
        if not (0 <= arm < len(self._cluster_of)):
            raise IndexError(f"arm {arm} not in partition of {len(self._cluster_of)} arms")


@dataclass(frozen=True)
class BanditInstance:
    arms: tuple[ArmSpec, ...]
    partition: ClusterPartition
    name: str = ""

    def __init__(self, arms: Sequence[ArmSpec], partition: ClusterPartition | Sequence[Sequence[int]],
                 name: str = "") -> None:
        arms = tuple(arms)
        if not isinstance(partition, ClusterPartition):
            partition = ClusterPartition(partition)
        if partition.n_arms != len(arms):
            raise InstanceError(
                f"partition covers {partition.n_arms} arms but instance has {len(arms)}")
        object.__setattr__(self, "arms", arms)
        object.__setattr__(self, "partition", partition)
        object.__setattr__(self, "name", name)

    @classmethod
    def from_means(cls, means: Sequence[float], clusters: Sequence[Sequence[int]] | None = None,
                   stddev: float = 1.0, name: str = "") -> "BanditInstance":
        arms = [ArmSpec(float(m), stddev) for m in means]
        if clusters is None:
            clusters = [list(range(len(arms)))]
        return cls(arms, clusters, name=name)

    @classmethod
    def from_cluster_means(cls, cluster_means: Sequence[Sequence[float]], stddev: float = 1.0,
                           name: str = "") -> "BanditInstance":
        """Build from nested means; arms are numbered cluster by cluster."""
        means, clusters, k = [], [], 0
        for c in cluster_means:
            clusters.append(list(range(k, k + len(c))))
            means.extend(c)
            k += len(c)
        return cls.from_means(means, clusters, stddev=stddev, name=name)

    @property
    def n_arms(self) -> int:
        return len(self.arms)

    @property
    def means(self) -> np.ndarray:
        return np.array([a.mean for a in self.arms], dtype=float)

    @property
    def stddevs(self) -> np.ndarray:
        return np.array([a.stddev for a in self.arms], dtype=float)

    @property
    def best_mean(self) -> float:
        return max(a.mean for a in self.arms)

    @property
    def optimal_arm(self) -> int:
        """Lowest index attaining the maximal mean."""
        return int(np.argmax(self.means))

    def cluster_means(self) -> list[list[float]]:
        return [[self.arms[i].mean for i in c] for c in self.partition.clusters]

    def to_dict(self) -> dict:
        d: dict = {}
        if self.name:
            d["name"] = self.name
        d["arms"] = [{"mean": a.mean, "stddev": a.stddev} for a in self.arms]
        d["clusters"] = [list(c) for c in self.partition.clusters]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BanditInstance":
        try:
            arms = [ArmSpec(float(a["mean"]), float(a.get("stddev", 1.0))) for a in d["arms"]]
            clusters = d.get("clusters")
            if clusters is None:
                clusters = [list(range(len(arms)))]
            return cls(arms, clusters, name=str(d.get("name", "")))
        except (KeyError, TypeError, AttributeError) as exc:
            raise InstanceError(f"malformed instance document: {exc!r}") from exc


def load_instance(path: str | Path) -> BanditInstance:
    """Read an instance file (JSON document with ``arms`` and ``clusters``)."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise InstanceError(f"{path}: top level must be an object")
    return BanditInstance.from_dict(doc)


def dump_instance(instance: BanditInstance) -> str:
    return json.dumps(instance.to_dict(), indent=2) + "\n"


def save_instance(instance: BanditInstance, path: str | Path) -> None:
    Path(path).write_text(dump_instance(instance), encoding="utf-8")


# ---------------------------------------------------------------------------
# Gaussian posterior
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PosteriorState:
    """Empirical mean and pull count; the belief is N(mean, 1/(count+1))."""

    empirical_mean: float = 0.0
    pull_count: int = 0

    @property
    def stddev(self) -> float:
        return 1.0 / math.sqrt(self.pull_count + 1)


def posterior_update(state: PosteriorState, reward: float) -> PosteriorState:
    if not math.isfinite(reward):
        raise ValueError(f"reward must be finite, got {reward!r}")
    n = state.pull_count
    return PosteriorState((state.empirical_mean * n + reward) / (n + 1), n + 1)


def posterior_sample(state: PosteriorState, rng: RandomStream) -> float:
    """One draw from N(mean, 1/(count+1)); consumes one variate."""
    return state.empirical_mean + rng.normal() * state.stddev


# ---------------------------------------------------------------------------
# Gap quantities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GapSummary:
    """Gap quantities of an instance.

    Cluster-indexed lists hold ``None`` at the optimal cluster for the
    quantities only defined against it (prime gap and distance).
    """

    per_arm_gap: tuple[float, ...]
    per_cluster_gap: tuple[float, ...]
    per_cluster_prime_gap: tuple[float | None, ...]
    per_cluster_distance: tuple[float | None, ...]
    per_cluster_width: tuple[float, ...]
    d_max: float
    optimal_cluster: int
    optimal_arm: int
    optimal_cluster_arms: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "optimal_arm": self.optimal_arm,
            "optimal_cluster": self.optimal_cluster,
            "d_max": self.d_max,
            "per_arm_gap": list(self.per_arm_gap),
            "per_cluster_gap": list(self.per_cluster_gap),
            "per_cluster_prime_gap": list(self.per_cluster_prime_gap),
            "per_cluster_distance": list(self.per_cluster_distance),
            "per_cluster_width": list(self.per_cluster_width),
        }


def validate_unique_optimum(instance: BanditInstance) -> bool:
    best = instance.best_mean
    return sum(1 for a in instance.arms if a.mean == best) == 1


def compute_gaps(instance: BanditInstance) -> GapSummary:
    if not validate_unique_optimum(instance):
        raise InstanceError("optimal arm is not unique; the optimal cluster is ambiguous")
    mu = [a.mean for a in instance.arms]
    star = instance.optimal_arm
    mu_star = mu[star]
    part = instance.partition
    c_star = part.cluster_of(star)

    hi = [max(mu[i] for i in c) for c in part.clusters]
    lo = [min(mu[i] for i in c) for c in part.clusters]
    arm_gap = tuple(mu_star - m for m in mu)
    prime, dist = [], []
    for k, c in enumerate(part.clusters):
        if k == c_star:
            prime.append(None)
            dist.append(None)
            continue
        prime.append(lo[c_star] - hi[k])
        dist.append(min(mu[i] - mu[j] for i in part.clusters[c_star] for j in c))
    return GapSummary(
        per_arm_gap=arm_gap,
        per_cluster_gap=tuple(mu_star - x for x in lo),
        per_cluster_prime_gap=tuple(prime),
        per_cluster_distance=tuple(dist),
        per_cluster_width=tuple(h - l for h, l in zip(hi, lo)),
        d_max=max(g * g for g in arm_gap),
        optimal_cluster=c_star,
        optimal_arm=star,
        optimal_cluster_arms=part.clusters[c_star],
    )


# ---------------------------------------------------------------------------
# Structural validators
# ---------------------------------------------------------------------------


def validate_strong_dominance(instance: BanditInstance, gaps: GapSummary | None = None) -> bool:
    """Every arm of the optimal cluster beats every arm of every other cluster."""
    if gaps is None:
        gaps = compute_gaps(instance)
    return all(d > 0 for d in gaps.per_cluster_distance if d is not None)


def is_unimodal(values: Sequence[float]) -> bool:
    """Strictly rising to a single peak, then strictly falling.

    Monotone sequences and singletons qualify; any two equal adjacent values
    (a plateau) disqualify.
    """
    falling = False
    for a, b in zip(values, values[1:]):
        if a == b:
            return False
        if b < a:
            falling = True
        elif falling:
            return False
    return True


def validate_unimodality(instance: BanditInstance) -> list[bool]:
    return [is_unimodal(c) for c in instance.cluster_means()]


def neighbors(partition: ClusterPartition, arm: int) -> set[int]:
    """Arms adjacent to ``arm`` in its cluster's ordering."""
    c = partition.clusters[partition.cluster_of(arm)]
    p = partition.position(arm)
    return {c[q] for q in (p - 1, p + 1) if 0 <= q < len(c)}
