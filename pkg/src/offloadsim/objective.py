"""Reward and objective evaluation for offloading decisions.

The per-task reward is target_delay - total_delay, minus a flat penalty when
the serving model's quality index falls short of the task's requirement. The
episode objective is the plain sum of per-task delays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .delay import DECISIONS, OFFLOAD, LlmProfile, TaskRequest


@dataclass
class RewardConfig:
    target_delay_s: float = 30.0
    # Must exceed the worst-case edge/cloud delay gap so that a decision
    # satisfying the quality requirement always out-scores one that violates
    # it (with the default profiles and token_max=2000 the gap tops out near
    # 36.1 s).
    penalty: float = 40.0

    def __post_init__(self) -> None:
        if self.penalty < 0:
            raise ValueError("penalty must be >= 0")


@dataclass(frozen=True)
class StepOutcome:
    task_id: str
    decision: str
    delay_s: float
    quality_ok: bool
    reward: float


def quality_ok(task: TaskRequest, decision: str, edge: LlmProfile,
               cloud: LlmProfile) -> bool:
    """True iff the serving model's quality index meets the task requirement."""
    if decision not in DECISIONS:
        raise ValueError(f"decision must be one of {DECISIONS}, got {decision!r}")
    profile = cloud if decision == OFFLOAD else edge
    return task.quality_req <= profile.quality_index


def step_reward(task: TaskRequest, decision: str, delay_s: float, edge: LlmProfile,
                cloud: LlmProfile, cfg: RewardConfig) -> StepOutcome:
    if delay_s < 0:
        raise ValueError("delay_s must be >= 0")
    ok = quality_ok(task, decision, edge, cloud)
    reward = cfg.target_delay_s - delay_s - (0.0 if ok else cfg.penalty)
    return StepOutcome(task_id=task.task_id, decision=decision, delay_s=delay_s,
                       quality_ok=ok, reward=reward)


def episode_objective(outcomes: Iterable[StepOutcome]) -> float:
    """Total delay over all outcomes (order-independent exact sum)."""
    return math.fsum(o.delay_s for o in outcomes)
