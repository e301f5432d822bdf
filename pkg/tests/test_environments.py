import itertools

import numpy as np
import pytest

from clusterbandit import (
    ArmSpec,
    BanditInstance,
    GaussianEnvironment,
    MmWaveScenario,
    RandomStream,
    build_mmwave_instance,
    build_portfolio_instance,
    compute_gaps,
    path_loss_db,
    rss_mean_mw,
    validate_unimodality,
    validate_unique_optimum,
)
from clusterbandit.core import InstanceError

TABLE2 = {24.25: (0.6103, 0.0610), 43.5: (0.1897, 0.0190), 60.0: (0.0997, 0.0100)}


def test_draw_reward_degenerate():
    env = GaussianEnvironment(BanditInstance([ArmSpec(0.3, 0.0)], [[0]]), RandomStream(1))
    assert all(env.draw_reward(0) == 0.3 for _ in range(10))


def test_draw_reward_clt_band():
    env = GaussianEnvironment(BanditInstance([ArmSpec(0.070, 1.0)], [[0]]), RandomStream(4))
    xs = np.array([env.draw_reward(0) for _ in range(1_000_000)])
    assert abs(xs.mean() - 0.070) <= 0.004


def test_draw_reward_same_seed_same_stream():
    inst = build_portfolio_instance()
    e1 = GaussianEnvironment(inst, RandomStream(77))
    e2 = GaussianEnvironment(inst, RandomStream(77))
    arms = [i % 20 for i in range(500)]
    assert [e1.draw_reward(a) for a in arms] == [e2.draw_reward(a) for a in arms]


def test_draw_reward_bad_arm():
    env = GaussianEnvironment(build_portfolio_instance(), RandomStream(0))
    with pytest.raises(IndexError):
        env.draw_reward(20)


@pytest.mark.parametrize("f, d, expected", [
    (1.0, 1.0, 92.45),
    # 20*log10(24.25) = 27.6942, so 27.6942 - 40 + 92.45
    (24.25, 0.01, 80.1442),
    (43.5, 0.01, 85.2198),
])
def test_path_loss(f, d, expected):
    assert path_loss_db(f, d) == pytest.approx(expected, abs=1e-3)


@pytest.mark.parametrize("f, d", [(0, 1), (1, 0), (-2, 1)])
def test_path_loss_rejects_non_positive(f, d):
    with pytest.raises(ValueError):
        path_loss_db(f, d)


@pytest.mark.parametrize("gain, f, expected", [
    (18, 24.25, 0.6103), (8, 24.25, 0.0610), (18, 60.0, 0.0997),
])
def test_rss_table2(gain, f, expected):
    assert rss_mean_mw(60, gain, path_loss_db(f, 0.01)) == pytest.approx(expected, abs=5e-4)


def test_mmwave_default_layout():
    inst = build_mmwave_instance()
    assert inst.n_arms == 9
    assert [len(c) for c in inst.partition.clusters] == [3, 3, 3]
    for f, c in zip((24.25, 43.5, 60.0), inst.cluster_means()):
        main, side = TABLE2[f]
        assert sorted(c, reverse=True) == pytest.approx([main, side, side], abs=5e-4)
        assert c[1] == max(c)  # main lobe in the middle by default
    assert validate_unique_optimum(inst)
    assert inst.optimal_arm == 1


def test_mmwave_means_recompute_exactly():
    s = MmWaveScenario()
    inst = build_mmwave_instance(s)
    for f, cluster in zip(s.frequencies, inst.partition.clusters):
        pl = path_loss_db(f, s.distance)
        for pos, i in enumerate(cluster):
            gain = s.main_gain if pos == s.main_position else s.side_gain
            assert inst.arms[i].mean == rss_mean_mw(s.tx_power, gain, pl)
            assert inst.arms[i].stddev == s.noise_stddev


def test_mmwave_single_beam():
    inst = build_mmwave_instance(MmWaveScenario(frequencies=(28.0,), beams_per_frequency=1))
    assert inst.n_arms == 1
    assert inst.arms[0].mean == rss_mean_mw(60, 18, path_loss_db(28.0, 0.01))


def test_mmwave_unimodality_depends_on_main_lobe_position():
    # side, MAIN, side rises then falls; MAIN at an edge leaves two equal side lobes adjacent
    assert validate_unimodality(build_mmwave_instance()) == [True] * 3
    edge = build_mmwave_instance(MmWaveScenario(main_lobe_position=0))
    assert validate_unimodality(edge) == [False] * 3


@pytest.mark.parametrize("bad", [
    MmWaveScenario(distance=0), MmWaveScenario(frequencies=(0.0,)),
    MmWaveScenario(beams_per_frequency=0), MmWaveScenario(main_lobe_position=3),
])
def test_mmwave_invalid_scenario(bad):
    with pytest.raises(InstanceError):
        build_mmwave_instance(bad)


def test_mmwave_cluster_gaps_invariant_under_main_lobe_placement():
    def cluster_multisets(pos):
        g = compute_gaps(build_mmwave_instance(MmWaveScenario(beams_per_frequency=4,
                                                               main_lobe_position=pos)))
        return (sorted(g.per_cluster_gap), sorted(x for x in g.per_cluster_prime_gap if x is not None),
                sorted(x for x in g.per_cluster_distance if x is not None), sorted(g.per_cluster_width),
                sorted(g.per_arm_gap))
    ref = cluster_multisets(0)
    for pos in range(1, 4):
        assert cluster_multisets(pos) == ref


def test_permuting_arms_within_clusters_keeps_cluster_gaps():
    base = build_portfolio_instance()
    g0 = compute_gaps(base)
    for perm in itertools.islice(itertools.permutations(range(5)), 0, 120, 17):
        clusters = [[c[p] for p in perm] for c in base.partition.clusters]
        g = compute_gaps(BanditInstance(base.arms, clusters))
        assert g.per_cluster_gap == g0.per_cluster_gap
        assert g.per_cluster_prime_gap == g0.per_cluster_prime_gap
        assert g.per_cluster_width == g0.per_cluster_width


PORTFOLIO_TABLE = [0.060, 0.063, 0.070, 0.067, 0.065, 0.036, 0.042, 0.044, 0.040, 0.038,
                   -0.02, 0.00, 0.02, 0.04, 0.06, -0.028, -0.026, -0.022, -0.024, -0.030]


def test_portfolio_matches_table():
    inst = build_portfolio_instance()
    assert inst.n_arms == 20
    assert [len(c) for c in inst.partition.clusters] == [5, 5, 5, 5]
    assert inst.means.tolist() == PORTFOLIO_TABLE
    assert all(a.stddev == 1.0 for a in inst.arms)
    assert inst.optimal_arm == 2 and inst.means[2] == 0.070
    assert validate_unique_optimum(inst)
    assert validate_unimodality(inst) == [True] * 4
