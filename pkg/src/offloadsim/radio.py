"""Radio layer: channel gains, proportional-fair RB allocation, link capacity.

Downlink only, single cell. Neighbour-cell interference is collapsed into a
fixed aggregate power (0 W by default), so the SINR per resource block is

    sinr = p_rb * gain / (I_intercell + b_rb * N0)

and the per-user link capacity is the Shannon rate summed over assigned RBs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_RB_COUNT = 50
DEFAULT_TOTAL_TX_POWER_DBM = 40.0  # split evenly over the RBs


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass
class RadioConfig:
    rb_count: int = DEFAULT_RB_COUNT
    rb_bandwidth_hz: float = 180e3
    # per-RB transmit power; default = 40 dBm total shared evenly by 50 RBs
    bs_tx_power_dbm_per_rb: float = (
        DEFAULT_TOTAL_TX_POWER_DBM - 10.0 * math.log10(DEFAULT_RB_COUNT)
    )
    noise_density_dbm_hz: float = -174.0
    intercell_interference_w: float = 0.0  # 0 => single cell
    pathloss_ref_db: float = 128.1         # urban macro reference loss at 1 km
    pathloss_exp_coeff: float = 37.6       # dB per decade of distance (km)
    shadowing_sigma_db: float = 8.0
    pf_window_slots: int = 100             # EWMA window T of the PF average rate
    pf_min_rate_bps: float = 1.0           # floor for the PF metric denominator

    def __post_init__(self) -> None:
        if self.rb_count < 1:
            raise ValueError("rb_count must be >= 1")
        if self.rb_bandwidth_hz <= 0:
            raise ValueError("rb_bandwidth_hz must be > 0")
        if self.shadowing_sigma_db < 0:
            raise ValueError("shadowing_sigma_db must be >= 0")
        if self.intercell_interference_w < 0:
            raise ValueError("intercell_interference_w must be >= 0")
        if self.pf_window_slots < 1:
            raise ValueError("pf_window_slots must be >= 1")
        if self.pf_min_rate_bps <= 0:
            raise ValueError("pf_min_rate_bps must be > 0")

    @classmethod
    def from_total_power(cls, total_power_dbm: float, rb_count: int = DEFAULT_RB_COUNT,
                         **kwargs) -> "RadioConfig":
        """Build a config whose per-RB power splits ``total_power_dbm`` evenly."""
        per_rb = total_power_dbm - 10.0 * math.log10(rb_count)
        return cls(rb_count=rb_count, bs_tx_power_dbm_per_rb=per_rb, **kwargs)

    @property
    def rb_tx_power_w(self) -> float:
        return dbm_to_watts(self.bs_tx_power_dbm_per_rb)

    @property
    def noise_power_w_per_rb(self) -> float:
        return dbm_to_watts(self.noise_density_dbm_hz) * self.rb_bandwidth_hz


@dataclass
class UserChannel:
    user_id: int
    distance_m: float
    gain_per_rb: np.ndarray            # linear power gain, one entry per RB
    avg_rate_ewma: float = 0.0         # PF fairness state, bits/s

    def __post_init__(self) -> None:
        self.gain_per_rb = np.asarray(self.gain_per_rb, dtype=float)
        if np.any(self.gain_per_rb <= 0):
            raise ValueError("gain_per_rb entries must be > 0")
        if self.avg_rate_ewma < 0:
            raise ValueError("avg_rate_ewma must be >= 0")


@dataclass
class RbAllocation:
    """RB index -> user_id; a dict key appears once, so no RB is double-assigned."""

    assignment: dict[int, int] = field(default_factory=dict)

    def rbs_of(self, user_id: int) -> list[int]:
        return [q for q, uid in self.assignment.items() if uid == user_id]


def compute_gain(distance_m: float, cfg: RadioConfig, rng: np.random.Generator) -> float:
    """Linear channel gain from log-distance path loss plus lognormal shadowing.

    loss_db = ref + coeff * log10(d_km) + Normal(0, sigma); gain = 10^(-loss_db/10).
    """
    if distance_m <= 0:
        raise ValueError(f"distance_m must be > 0, got {distance_m}")
    shadow_db = rng.normal(0.0, cfg.shadowing_sigma_db)
    loss_db = (cfg.pathloss_ref_db
               + cfg.pathloss_exp_coeff * math.log10(distance_m / 1000.0)
               + shadow_db)
    return 10.0 ** (-loss_db / 10.0)


def per_rb_sinr(gain: float, cfg: RadioConfig) -> float:
    return cfg.rb_tx_power_w * gain / (cfg.intercell_interference_w + cfg.noise_power_w_per_rb)


def instantaneous_rates(users: list[UserChannel], cfg: RadioConfig) -> np.ndarray:
    """Per-user per-RB Shannon rates, shape (n_users, rb_count), bits/s."""
    gains = np.stack([u.gain_per_rb for u in users])
    sinr = cfg.rb_tx_power_w * gains / (cfg.intercell_interference_w + cfg.noise_power_w_per_rb)
    return cfg.rb_bandwidth_hz * np.log2(1.0 + sinr)


def allocate_proportional_fair(users: list[UserChannel], cfg: RadioConfig) -> RbAllocation:
    """One proportional-fair allocation round over all RBs.

    Each RB goes to the user maximising rate / max(throughput_estimate, floor).
    The throughput estimate blends the round-start EWMA with the rate already
    granted this round, (1-1/T)*ewma + (1/T)*granted, so a user that keeps
    winning sees its metric fall and the RBs spread out; ties go to the lowest
    user_id. After the round each user's EWMA becomes
    (1-1/T)*old + (1/T)*achieved_rate, i.e. exactly the blended value.

    Mutates ``avg_rate_ewma`` on the given users.
    """
    if not users:
        raise ValueError("allocate_proportional_fair requires at least one user")
    order = sorted(range(len(users)), key=lambda i: users[i].user_id)
    ordered = [users[i] for i in order]

    rates = instantaneous_rates(ordered, cfg)
    start_ewma = np.array([u.avg_rate_ewma for u in ordered])
    keep = 1.0 - 1.0 / cfg.pf_window_slots
    take = 1.0 / cfg.pf_window_slots

    granted = np.zeros(len(ordered))
    assignment: dict[int, int] = {}
    for q in range(cfg.rb_count):
        estimate = keep * start_ewma + take * granted
        metric = rates[:, q] / np.maximum(estimate, cfg.pf_min_rate_bps)
        winner = int(np.argmax(metric))  # argmax takes the first maximum: lowest user_id
        assignment[q] = ordered[winner].user_id
        granted[winner] += rates[winner, q]

    for user, achieved in zip(ordered, granted):
        user.avg_rate_ewma = keep * user.avg_rate_ewma + take * achieved
    return RbAllocation(assignment=assignment)


def link_capacity(user: UserChannel, alloc: RbAllocation, cfg: RadioConfig) -> float:
    """Shannon capacity summed over the user's assigned RBs, bits/s.

    A user holding no RBs has capacity 0.
    """
    total = 0.0
    for q, uid in alloc.assignment.items():
        if uid != user.user_id:
            continue
        sinr = per_rb_sinr(float(user.gain_per_rb[q]), cfg)
        total += cfg.rb_bandwidth_hz * math.log2(1.0 + sinr)
    return total
