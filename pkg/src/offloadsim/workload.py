"""User population and task stream generation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .delay import QUALITY_PREFERRED, REGULAR, TaskRequest
from .radio import RadioConfig, UserChannel, compute_gain


@dataclass
class WorkloadConfig:
    n_users: int = 20
    requests_per_user: int = 50
    mean_tokens: float = 1000.0
    token_sd: float = 300.0
    token_min: int = 50
    token_max: int = 2000
    quality_task_fraction: float = 0.3
    cell_radius_m: float = 500.0
    min_distance_m: float = 35.0
    quality_req_regular: float = 60.0
    quality_req_preferred: float = 85.0

    def __post_init__(self) -> None:
        if self.n_users < 1:
            raise ValueError("n_users must be >= 1")
        if self.requests_per_user < 1:
            raise ValueError("requests_per_user must be >= 1")
        if not 0 <= self.quality_task_fraction <= 1:
            raise ValueError("quality_task_fraction must be in [0, 1]")
        if self.token_min < 1:
            raise ValueError("token_min must be >= 1")
        if self.token_min > self.token_max:
            raise ValueError("token_min must be <= token_max")
        if self.cell_radius_m < self.min_distance_m:
            raise ValueError("cell_radius_m must be >= min_distance_m")


def generate_users(cfg: WorkloadConfig, radio_cfg: RadioConfig,
                   rng: np.random.Generator) -> list[UserChannel]:
    """Drop users uniformly over the serving area and draw their channel gains.

    Positions are uniform over the annulus between min_distance_m and
    cell_radius_m (inverse-CDF sampling on the radius); each user gets an
    independent shadowing draw per RB.
    """
    users = []
    r_min_sq = cfg.min_distance_m ** 2
    r_max_sq = cfg.cell_radius_m ** 2
    for k in range(cfg.n_users):
        distance = math.sqrt(r_min_sq + rng.random() * (r_max_sq - r_min_sq))
        gains = np.array([compute_gain(distance, radio_cfg, rng)
                          for _ in range(radio_cfg.rb_count)])
        users.append(UserChannel(user_id=k, distance_m=distance, gain_per_rb=gains))
    return users


def generate_tasks(cfg: WorkloadConfig, rng: np.random.Generator,
                   n_tasks: "int | None" = None) -> list[TaskRequest]:
    """Round-robin task stream: request i of every user before request i+1.

    Output sizes are Normal(mean_tokens, token_sd) clipped to
    [token_min, token_max] and rounded to integers; the quality requirement
    follows the task type. n_tasks overrides the requests_per_user * n_users
    total, so callers that need one task per decision step can size the
    stream to the episode length.
    """
    if n_tasks is None:
        n_tasks = cfg.requests_per_user * cfg.n_users
    if n_tasks < 0:
        raise ValueError("n_tasks must be >= 0")
    tasks = []
    rounds = math.ceil(n_tasks / cfg.n_users)
    for i in range(rounds):
        for k in range(cfg.n_users):
            if len(tasks) == n_tasks:
                break
            quality = rng.random() < cfg.quality_task_fraction
            raw = rng.normal(cfg.mean_tokens, cfg.token_sd)
            n_tokens = int(round(min(max(raw, cfg.token_min), cfg.token_max)))
            tasks.append(TaskRequest(
                user_id=k,
                task_id=f"u{k}-t{i}",
                task_type=QUALITY_PREFERRED if quality else REGULAR,
                n_tokens=n_tokens,
                quality_req=cfg.quality_req_preferred if quality else cfg.quality_req_regular,
            ))
    return tasks
