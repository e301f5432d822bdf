"""Episode loop, Monte Carlo replication, metrics and regret-bound values.

Seeding
-------
An episode run with integer ``seed`` uses two independent streams:
``child_seed(seed, "policy")`` feeds the policy's posterior draws and
``child_seed(seed, "env")`` feeds reward noise. In an experiment, replication
``r`` of policy ``p`` runs with ``seed = child_seed(master_seed, p, r)``.
Every report is therefore a pure function of (instance, policies, horizon,
replications, master seed, checkpoints), whatever the worker count.

Regret is pseudo-regret: the running sum of ``mu_star - mu_chosen``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import BanditInstance, GapSummary, InstanceError, compute_gaps, neighbors
from .environments import GaussianEnvironment
from .policies import POLICIES, Policy, make_policy
from .rng import RandomStream, child_seed

CSV_COLUMNS = ("policy", "checkpoint_t", "mean_regret", "stderr_regret", "optimal_rate")
DEFAULT_STRIDE = 100


@dataclass
class Trajectory:
    chosen: np.ndarray
    rewards: np.ndarray
    cumulative_pseudo_regret: np.ndarray

    @property
    def horizon(self) -> int:
        return len(self.chosen)


def run_episode(
    instance: BanditInstance,
    policy: str | Policy,
    horizon: int,
    seed: int = 0,
    *,
    policy_rng: RandomStream | None = None,
    env_rng: RandomStream | None = None,
    on_step: Callable[[int, Policy, int, float], None] | None = None,
) -> Trajectory:
    """Play ``horizon`` rounds of ``policy`` against ``instance``.

    ``on_step(t, policy, arm, reward)`` is called after each observe.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    pol = make_policy(policy, instance.partition) if isinstance(policy, str) else policy
    prng = policy_rng or RandomStream(child_seed(seed, "policy"))
    env = GaussianEnvironment(instance, env_rng or RandomStream(child_seed(seed, "env")))

    chosen = np.empty(horizon, dtype=np.int64)
    rewards = np.empty(horizon)
    select, observe, draw = pol.select, pol.observe, env.draw_reward
    for t in range(1, horizon + 1):
        arm = select(t, prng)
        x = draw(arm)
        observe(arm, x)
        chosen[t - 1] = arm
        rewards[t - 1] = x
        if on_step is not None:
            on_step(t, pol, arm, x)

    gaps = instance.best_mean - instance.means
    return Trajectory(chosen, rewards, np.cumsum(gaps[chosen]))


def optimal_rate(trajectory: Trajectory, instance: BanditInstance, t: int | None = None) -> float:
    """Fraction of the first ``t`` rounds that played the optimal arm."""
    t = trajectory.horizon if t is None else t
    if not (1 <= t <= trajectory.horizon):
        raise ValueError(f"t must be in 1..{trajectory.horizon}, got {t}")
    return float(np.count_nonzero(trajectory.chosen[:t] == instance.optimal_arm)) / t


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


def make_checkpoints(horizon: int, stride: int = DEFAULT_STRIDE) -> list[int]:
    if stride < 1:
        raise ValueError("stride must be >= 1")
    pts = list(range(stride, horizon + 1, stride))
    if not pts or pts[-1] != horizon:
        pts.append(horizon)
    return pts


@dataclass
class PolicyCurves:
    mean_regret: np.ndarray
    stderr_regret: np.ndarray
    optimal_rate: np.ndarray
    final_regrets: np.ndarray = field(repr=False)


@dataclass
class ExperimentReport:
    instance_name: str
    horizon: int
    replications: int
    seed: int
    checkpoints: list[int]
    curves: dict[str, PolicyCurves]
    bound_values: dict[str, dict] = field(default_factory=dict)

    def final(self, policy: str) -> tuple[float, float, float]:
        """(mean regret, stderr, optimal rate) at the last checkpoint."""
        c = self.curves[policy]
        return float(c.mean_regret[-1]), float(c.stderr_regret[-1]), float(c.optimal_rate[-1])

    def at(self, policy: str, t: int) -> tuple[float, float, float]:
        k = self.checkpoints.index(t)
        c = self.curves[policy]
        return float(c.mean_regret[k]), float(c.stderr_regret[k]), float(c.optimal_rate[k])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for pid, c in self.curves.items():
            for k, t in enumerate(self.checkpoints):
                w.writerow([pid, t, repr(float(c.mean_regret[k])),
                            repr(float(c.stderr_regret[k])), repr(float(c.optimal_rate[k]))])
        return buf.getvalue()

    def to_json(self, config: dict | None = None) -> str:
        doc = {
            "config": config or {},
            "instance": self.instance_name,
            "horizon": self.horizon,
            "replications": self.replications,
            "seed": self.seed,
            "checkpoints": self.checkpoints,
            "policies": {
                pid: {
                    "mean_regret": c.mean_regret.tolist(),
                    "stderr_regret": c.stderr_regret.tolist(),
                    "optimal_rate": c.optimal_rate.tolist(),
                }
                for pid, c in self.curves.items()
            },
            "bound_values": self.bound_values,
        }
        return json.dumps(doc, indent=2) + "\n"


def _replicate(args: tuple) -> tuple[np.ndarray, np.ndarray]:
    instance, pid, horizon, seed, cps = args
    traj = run_episode(instance, pid, horizon, seed)
    idx = np.asarray(cps) - 1
    hits = np.cumsum(traj.chosen == instance.optimal_arm)
    return traj.cumulative_pseudo_regret[idx], hits[idx] / np.asarray(cps, dtype=float)


def run_experiment(
    instance: BanditInstance,
    policies: Sequence[str],
    horizon: int,
    replications: int,
    seed: int = 0,
    stride: int = DEFAULT_STRIDE,
    checkpoints: Iterable[int] | None = None,
    workers: int | None = 1,
) -> ExperimentReport:
    """Replicate episodes per policy and aggregate regret/optimal-rate curves.

    ``workers`` > 1 farms replications out to processes (``None`` means one
    per CPU). Results are reduced in replication order, so the report does not
    depend on the worker count.
    """
    if replications < 1:
        raise ValueError("replications must be >= 1")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    for pid in policies:
        if pid not in POLICIES:
            raise ValueError(f"unknown policy {pid!r}")
    if checkpoints is None:
        cps = make_checkpoints(horizon, stride)
    else:
        cps = sorted(set(int(t) for t in checkpoints))
        if not cps or cps[0] < 1 or cps[-1] > horizon:
            raise ValueError("checkpoints must lie in 1..horizon")

    tasks = [(instance, pid, horizon, child_seed(seed, pid, r), cps)
             for pid in policies for r in range(replications)]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replicate, tasks, chunksize=1))
    else:
        results = [_replicate(a) for a in tasks]

    curves = {}
    for p, pid in enumerate(policies):
        chunk = results[p * replications:(p + 1) * replications]
        reg = np.vstack([r[0] for r in chunk])
        rate = np.vstack([r[1] for r in chunk])
        se = reg.std(axis=0, ddof=1) / math.sqrt(replications) if replications > 1 \
            else np.zeros(len(cps))
        curves[pid] = PolicyCurves(reg.mean(axis=0), se, rate.mean(axis=0), reg[:, -1].copy())

    return ExperimentReport(
        instance_name=instance.name,
        horizon=horizon,
        replications=replications,
        seed=seed,
        checkpoints=cps,
        curves=curves,
        bound_values=policy_bounds(instance, policies, horizon),
    )


def pooled_stderr(report: ExperimentReport, a: str, b: str) -> float:
    sa, sb = report.final(a)[1], report.final(b)[1]
    return math.hypot(sa, sb)


# ---------------------------------------------------------------------------
# Regret bounds (leading terms, natural log)
# ---------------------------------------------------------------------------


class BoundNotApplicable(ValueError):
    """The bound's preconditions do not hold for this instance/horizon."""


def _log_term(gaps: GapSummary, horizon: int) -> float:
    x = gaps.d_max * horizon
    if x <= 1:
        raise BoundNotApplicable(f"D_max*T = {x:.4g} <= 1; log term not positive")
    return math.log(x)


def _cluster_sum(gaps: GapSummary, lg: float) -> float:
    total = 0.0
    for k, prime in enumerate(gaps.per_cluster_prime_gap):
        if k == gaps.optimal_cluster:
            continue
        if prime is None or prime <= 0:
            raise BoundNotApplicable(f"cluster {k} violates strong dominance (prime gap {prime})")
        total += 18.0 * lg * gaps.per_cluster_gap[k] / prime ** 2
    return total


def theorem1_bound(gaps: GapSummary, horizon: int) -> float:
    """Sum over suboptimal arms of 18 ln(D_max T) / gap."""
    lg = _log_term(gaps, horizon)
    return sum(18.0 * lg / g for i, g in enumerate(gaps.per_arm_gap) if i != gaps.optimal_arm)


def theorem2_bound(gaps: GapSummary, horizon: int) -> float:
    """Cluster term plus the per-arm term over the optimal cluster."""
    lg = _log_term(gaps, horizon)
    inner = sum(18.0 * lg / gaps.per_arm_gap[i]
                for i in gaps.optimal_cluster_arms if i != gaps.optimal_arm)
    return _cluster_sum(gaps, lg) + inner


def theorem3_constant(gaps: GapSummary) -> float:
    """The additive constant F, summed over every suboptimal arm."""
    c = 2.0 * math.sqrt(2.0 * math.pi)
    total = 0.0
    for i, g in enumerate(gaps.per_arm_gap):
        if i == gaps.optimal_arm:
            continue
        total += 12.0 / g + (16.0 * math.log(2.0 * g) + 4.0) / (g * math.sqrt(2.0 * math.pi)) + c
    return total


def theorem3_bound(gaps: GapSummary, optimal_neighbors: Iterable[int], horizon: int) -> float:
    """Cluster term, per-arm term over the optimal arm's neighbors, plus F."""
    lg = _log_term(gaps, horizon)
    near = sum(18.0 * lg / gaps.per_arm_gap[i] for i in optimal_neighbors)
    return _cluster_sum(gaps, lg) + near + theorem3_constant(gaps)


THEOREM_OF = {"tsg": 1, "tscg": 2, "utscg": 3}


def all_bounds(instance: BanditInstance, horizon: int) -> dict[int, float | str]:
    """Theorem number -> bound value, or the reason it does not apply."""
    try:
        gaps = compute_gaps(instance)
    except InstanceError as exc:
        return {k: str(exc) for k in (1, 2, 3)}
    out: dict[int, float | str] = {}
    nbrs = neighbors(instance.partition, gaps.optimal_arm)
    for k, fn in ((1, lambda: theorem1_bound(gaps, horizon)),
                  (2, lambda: theorem2_bound(gaps, horizon)),
                  (3, lambda: theorem3_bound(gaps, nbrs, horizon))):
        try:
            out[k] = fn()
        except BoundNotApplicable as exc:
            out[k] = str(exc)
    return out


def policy_bounds(instance: BanditInstance, policies: Sequence[str], horizon: int) -> dict[str, dict]:
    table = all_bounds(instance, horizon)
    out = {}
    for pid in policies:
        k = THEOREM_OF.get(pid)
        if k is None:
            continue
        v = table[k]
        out[pid] = ({"theorem": k, "value": v} if isinstance(v, float)
                    else {"theorem": k, "value": None, "reason": v})
    return out
