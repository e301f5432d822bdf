"""Reward generators and the two experiment instances.

``mmwave``
    One cluster per carrier frequency, one arm per beam. A beam's mean reward
    is its received signal power in milliwatts under free-space path loss:

        PL [dB]   = 20 log10(f / GHz) + 20 log10(d / km) + 92.45
        RSS [mW]  = 10 ** ((P_tx [dBm] + G [dB] - PL [dB]) / 10)

    Each cluster has exactly one main-lobe beam (gain ``main_gain``) and the
    rest are side lobes (``side_gain``). Rewards add N(0, noise_stddev^2)
    noise. The receiver noise floor (-57 dBm) is recorded on the scenario but
    does not shift the means.

``portfolio``
    A fixed 20-asset, 4-market table of expected returns with unit
    volatility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import ArmSpec, BanditInstance, InstanceError
from .rng import RandomStream


class GaussianEnvironment:
    """Draws X_i ~ N(mean_i, stddev_i^2); one variate per reward."""

    def __init__(self, instance: BanditInstance, rng: RandomStream) -> None:
        self.instance = instance
        self.rng = rng
        self._mu = [a.mean for a in instance.arms]
        self._sd = [a.stddev for a in instance.arms]

    def draw_reward(self, arm: int) -> float:
        if not (0 <= arm < len(self._mu)):
            raise IndexError(f"arm {arm} out of range for {len(self._mu)} arms")
        return self._mu[arm] + self._sd[arm] * self.rng.normal()


def path_loss_db(frequency_ghz: float, distance_km: float) -> float:
    if frequency_ghz <= 0 or distance_km <= 0:
        raise ValueError("frequency and distance must be positive")
    return 20.0 * math.log10(frequency_ghz) + 20.0 * math.log10(distance_km) + 92.45


def rss_mean_mw(tx_power_dbm: float, gain_db: float, path_loss: float) -> float:
    return 10.0 ** ((tx_power_dbm + gain_db - path_loss) / 10.0)


@dataclass(frozen=True)
class MmWaveScenario:
    tx_power: float = 60.0            # dBm
    main_gain: float = 18.0           # dB
    side_gain: float = 8.0            # dB
    distance: float = 0.01            # km
    frequencies: tuple[float, ...] = (24.25, 43.5, 60.0)  # GHz
    beams_per_frequency: int = 3
    noise_stddev: float = 1.0
    main_lobe_position: int | None = None  # None: middle beam
    noise_floor_dbm: float = field(default=-57.0, compare=False)

    def validate(self) -> None:
        if self.distance <= 0:
            raise InstanceError("distance must be positive")
        if not self.frequencies or any(f <= 0 for f in self.frequencies):
            raise InstanceError("frequencies must be positive and non-empty")
        if self.beams_per_frequency < 1:
            raise InstanceError("beams_per_frequency must be >= 1")
        if self.noise_stddev < 0:
            raise InstanceError("noise_stddev must be >= 0")
        pos = self.main_position
        if not (0 <= pos < self.beams_per_frequency):
            raise InstanceError(f"main_lobe_position {pos} outside 0..{self.beams_per_frequency - 1}")

    @property
    def main_position(self) -> int:
        if self.main_lobe_position is None:
            return self.beams_per_frequency // 2
        return self.main_lobe_position


def build_mmwave_instance(scenario: MmWaveScenario | None = None) -> BanditInstance:
    s = scenario or MmWaveScenario()
    s.validate()
    arms: list[ArmSpec] = []
    clusters: list[list[int]] = []
    for f in s.frequencies:
        pl = path_loss_db(f, s.distance)
        main = rss_mean_mw(s.tx_power, s.main_gain, pl)
        side = rss_mean_mw(s.tx_power, s.side_gain, pl)
        start = len(arms)
        for b in range(s.beams_per_frequency):
            arms.append(ArmSpec(main if b == s.main_position else side, s.noise_stddev))
        clusters.append(list(range(start, len(arms))))
    return BanditInstance(arms, clusters, name="mmwave")


PORTFOLIO_MEANS: tuple[tuple[float, ...], ...] = (
    (0.060, 0.063, 0.070, 0.067, 0.065),
    (0.036, 0.042, 0.044, 0.040, 0.038),
    (-0.020, 0.000, 0.020, 0.040, 0.060),
    (-0.028, -0.026, -0.022, -0.024, -0.030),
)


def build_portfolio_instance() -> BanditInstance:
    return BanditInstance.from_cluster_means(PORTFOLIO_MEANS, stddev=1.0, name="portfolio")


PRESETS = {
    "mmwave": build_mmwave_instance,
    "portfolio": build_portfolio_instance,
}


def preset_instance(name: str) -> BanditInstance:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
