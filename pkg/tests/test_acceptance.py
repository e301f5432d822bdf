"""Acceptance criteria: Table 2 and portfolio fidelity, regret orderings,
optimal-rate milestone, bound sanity and the fast oracle/invariant suites.

The statistical criteria use R=100 replications with master seed 7 and run
replications in parallel across all CPUs. Expect several minutes on one core.
"""

import math

import numpy as np
import pytest

from clusterbandit import (
    POLICIES,
    BanditInstance,
    PosteriorState,
    UTSCG,
    build_mmwave_instance,
    build_portfolio_instance,
    compute_gaps,
    is_unimodal,
    neighbors,
    posterior_update,
    run_episode,
    run_experiment,
    theorem1_bound,
    theorem2_bound,
    theorem3_bound,
    validate_strong_dominance,
    validate_unimodality,
    validate_unique_optimum,
)
from clusterbandit.simulation import make_checkpoints, pooled_stderr

pytestmark = pytest.mark.acceptance

SEED = 7
REPS = 100
ALL = ["tsg", "tscg", "utscg", "ucb1", "tlp"]
LOG_GROWTH_POINTS = (4096, 8192, 16384)


@pytest.fixture(scope="module")
def portfolio_report():
    cps = sorted(set(make_checkpoints(30000, 100)) | set(LOG_GROWTH_POINTS))
    return run_experiment(build_portfolio_instance(), ALL, 30000, REPS, seed=SEED,
                          checkpoints=cps, workers=None)


@pytest.fixture(scope="module")
def mmwave_report():
    return run_experiment(build_mmwave_instance(), ALL, 20000, REPS, seed=SEED, workers=None)


SYNTH = BanditInstance.from_cluster_means([[0.9, 0.8], [0.3, 0.2]], name="synthetic")


@pytest.fixture(scope="module")
def synthetic_report():
    return run_experiment(SYNTH, ["tsg", "tscg", "utscg"], 10_000, REPS, seed=SEED, workers=None)


def _beats(report, a, b):
    """a's final mean regret below b's by more than 2 pooled standard errors."""
    ma, mb = report.final(a)[0], report.final(b)[0]
    se = pooled_stderr(report, a, b)
    return mb - ma > 2 * se, f"{a}={ma:.1f} {b}={mb:.1f} 2se={2 * se:.1f}"


# 1 -------------------------------------------------------------------------

def test_c1_table2_reproduction(record_criterion):
    table2 = [0.6103, 0.0610, 0.1897, 0.0190, 0.0997, 0.0100]
    inst = build_mmwave_instance()
    got = []
    for c in inst.cluster_means():
        got += [max(c), min(c)]
    errs = [abs(a - b) for a, b in zip(got, table2)]
    ok = max(errs) <= 5e-4 and sorted(set(round(m, 10) for m in inst.means)) == sorted(
        round(m, 10) for m in got)
    record_criterion("C1 Table 2 reproduction", ok, f"max |err| = {max(errs):.2e} (tol 5e-4)")
    assert ok


# 2 -------------------------------------------------------------------------

def test_c2_portfolio_fidelity(record_criterion):
    table = [0.060, 0.063, 0.070, 0.067, 0.065, 0.036, 0.042, 0.044, 0.040, 0.038,
             -0.02, 0.00, 0.02, 0.04, 0.06, -0.028, -0.026, -0.022, -0.024, -0.030]
    inst = build_portfolio_instance()
    means_ok = inst.means.tolist() == table
    unique = validate_unique_optimum(inst)
    dominance = validate_strong_dominance(inst)
    uni = validate_unimodality(inst)
    ok = means_ok and unique and not dominance and uni == [True] * 4
    record_criterion("C2 portfolio fidelity", ok,
                     f"means exact={means_ok} unique={unique} strong_dominance={dominance} "
                     f"unimodal={uni}")
    assert ok


# 3 -------------------------------------------------------------------------

def test_c3_portfolio_regret_ordering(portfolio_report, record_criterion):
    r = portfolio_report
    u, ts = r.final("utscg")[0], r.final("tscg")[0]
    checks = [(u <= ts, f"utscg={u:.1f}<=tscg={ts:.1f}")]
    for other in ("tsg", "ucb1", "tlp"):
        checks.append(_beats(r, "tscg", other))
    ok = all(c for c, _ in checks)
    record_criterion("C3 portfolio regret ordering", ok, "; ".join(d for _, d in checks))
    assert ok


# 4 -------------------------------------------------------------------------

def test_c4a_portfolio_optimal_rate_baselines(portfolio_report, record_criterion):
    rates = {p: portfolio_report.final(p)[2] for p in ("ucb1", "tlp", "tsg")}
    ok = all(v <= 0.40 for v in rates.values())
    record_criterion("C4a portfolio optimal rate, baselines <= 0.40", ok,
                     " ".join(f"{p}={v:.3f}" for p, v in rates.items()))
    assert ok


def test_c4b_portfolio_optimal_rate_proposed(portfolio_report, record_criterion):
    rates = {p: portfolio_report.final(p)[2] for p in ("tscg", "utscg")}
    ok = all(v >= 0.85 for v in rates.values())
    record_criterion("C4b portfolio optimal rate, tscg/utscg >= 0.85", ok,
                     " ".join(f"{p}={v:.3f}" for p, v in rates.items()))
    assert ok


# 5 -------------------------------------------------------------------------

def test_c5_mmwave_regret_ordering(mmwave_report, record_criterion):
    r = mmwave_report
    checks = [_beats(r, ours, base) for ours in ("tscg", "utscg") for base in ("tsg", "ucb1", "tlp")]
    diff = abs(r.final("tscg")[0] - r.final("utscg")[0])
    se = pooled_stderr(r, "tscg", "utscg")
    checks.append((diff <= 2 * se, f"|tscg-utscg|={diff:.1f}<=2se={2 * se:.1f}"))
    ok = all(c for c, _ in checks)
    record_criterion("C5 mmwave regret ordering", ok,
                     "; ".join(("" if c else "FAILED ") + d for c, d in checks))
    assert ok


# 6 -------------------------------------------------------------------------

def test_c6_bound_sanity(synthetic_report, record_criterion):
    gaps = compute_gaps(SYNTH)
    assert validate_strong_dominance(SYNTH, gaps)
    T = 10_000
    bounds = {
        "tsg": theorem1_bound(gaps, T),
        "tscg": theorem2_bound(gaps, T),
        "utscg": theorem3_bound(gaps, neighbors(SYNTH.partition, gaps.optimal_arm), T),
    }
    emp = {p: synthetic_report.final(p)[0] for p in bounds}
    ok = all(emp[p] <= bounds[p] for p in bounds)
    record_criterion("C6 bound sanity", ok,
                     " ".join(f"{p}={emp[p]:.1f}<={bounds[p]:.1f}" for p in bounds))
    assert ok


# 7 -------------------------------------------------------------------------

def test_c7_oracle_and_invariant_suites(record_criterion):
    rng = np.random.default_rng(SEED)
    failures = []

    # posterior batch-average equivalence
    for _ in range(200):
        xs = rng.normal(0, 3, size=int(rng.integers(1, 500)))
        s = PosteriorState()
        for x in xs:
            s = posterior_update(s, float(x))
        batch = math.fsum(xs) / len(xs)
        if s.pull_count != len(xs) or abs(s.empirical_mean - batch) > 1e-12 * max(1.0, abs(batch)):
            failures.append("posterior")
            break

    # counter conservation and UTSCG membership on every step of randomized runs
    for trial in range(6):
        sizes = rng.integers(1, 6, size=int(rng.integers(1, 5)))
        inst = BanditInstance.from_cluster_means(
            [rng.normal(0, 0.5, size=int(k)).tolist() for k in sizes])
        part = inst.partition
        for pid in POLICIES:
            def check(t, pol, arm, x):
                if int(pol.counts.sum()) != t:
                    raise AssertionError("sum N_i != t")
                if pol.clustered:
                    if int(pol.cluster_counts.sum()) != t:
                        raise AssertionError("sum N_C != t")
                    for k, c in enumerate(part.clusters):
                        if pol.cluster_counts[k] != pol.counts[list(c)].sum():
                            raise AssertionError("N_C != sum N_i")
                if isinstance(pol, UTSCG):
                    cand = {pol.last_leader} | neighbors(part, pol.last_leader)
                    if arm not in cand or set(pol.last_candidates.tolist()) != cand:
                        raise AssertionError("utscg candidate membership")
            try:
                run_episode(inst, pid, 800, seed=trial, on_step=check)
            except AssertionError as exc:
                failures.append(f"{pid}: {exc}")

    # byte-identical CSV across serial and parallel execution
    kw = dict(policies=ALL, horizon=1000, replications=4, seed=SEED, stride=100)
    serial = run_experiment(build_portfolio_instance(), workers=1, **kw).to_csv()
    parallel = run_experiment(build_portfolio_instance(), workers=4, **kw).to_csv()
    if serial.encode() != parallel.encode():
        failures.append("serial/parallel csv differ")

    # unimodality validator vs brute-force strict-local-maximum oracle
    for _ in range(1000):
        v = rng.integers(0, 4, size=int(rng.integers(1, 9))).tolist()
        plateau = any(a == b for a, b in zip(v, v[1:]))
        peaks = sum(1 for i in range(len(v))
                    if all(v[i] > v[j] for j in (i - 1, i + 1) if 0 <= j < len(v)))
        if is_unimodal(v) != (not plateau and peaks == 1):
            failures.append(f"unimodality {v}")
            break

    ok = not failures
    record_criterion("C7 oracle/invariant suites", ok, "all hold" if ok else "; ".join(failures))
    assert ok


# supplementary property checks on the shared runs ----------------------------

def test_log_growth_concavity_tsg_portfolio(portfolio_report):
    r = portfolio_report
    (a, _, _), (b, _, _), (c, se_c, _) = (r.at("tsg", t) for t in LOG_GROWTH_POINTS)
    assert c - b <= (b - a) + 2 * se_c


def test_optimal_rate_and_regret_consistent(portfolio_report):
    gaps = compute_gaps(build_portfolio_instance()).per_arm_gap
    d_min = min(g for g in gaps if g > 0)
    r = portfolio_report
    for pid in ALL:
        c = r.curves[pid]
        t = np.array(r.checkpoints)
        assert np.all(c.mean_regret >= d_min * t * (1 - c.optimal_rate) - 1e-6)
