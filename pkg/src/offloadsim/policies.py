"""Offloading policies: the ICL agent, its ablations, and baselines.

Every policy exposes the same two-call protocol. decide() picks "local" or
"offload" for the current task; observe() feeds back the realized outcome so
learning policies can update. The runner drives one decide/observe pair per
task.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .delay import (DECISIONS, LOCAL, OFFLOAD, DelayConfig, LlmProfile,
                    TaskRequest, total_task_delay)
from .errors import ConfigError
from .icl import (BAD, GOOD, Condition, DecisionOracle, EpsilonSchedule,
                  Experience, ExperiencePool, MetaPrompt, build_meta_prompt,
                  epsilon_greedy, load_prompt_template)
from .icl import decide as query_oracle
from .objective import RewardConfig, StepOutcome, step_reward

PRIORITIZED = "prioritized"
LATEST = "latest"
REPLAY_MODES = (PRIORITIZED, LATEST)

POLICY_NAMES = ("icl", "icl_latest", "icl_no_exploration", "q_learning",
                "bruteforce", "always_local", "always_offload", "uniform_random")


@dataclass(frozen=True)
class DecisionContext:
    """What a policy gets to see when deciding on one task."""

    condition: Condition
    task: TaskRequest
    capacity_bps: float


class Policy:
    name = "base"

    def decide(self, ctx: DecisionContext, rng) -> tuple[str, bool]:
        """Return (decision, explored) for the task in ctx."""
        raise NotImplementedError

    def observe(self, ctx: DecisionContext, decision: str,
                outcome: StepOutcome) -> None:
        """Feed back the realized outcome of the chosen decision."""


class IclPolicy(Policy):
    """Language-model agent with replay memory and epsilon-greedy exploration.

    replay="prioritized" keeps the best-reward experience per condition;
    replay="latest" keeps a chronological window of the most recent steps
    instead, with each entry evaluated by whether it met the quality
    requirement.
    """

    name = "icl"

    def __init__(self, oracle: DecisionOracle, epsilon: EpsilonSchedule,
                 total_steps: int, replay: str = PRIORITIZED, window: int = 10,
                 template: Optional[str] = None, decide_retries: int = 2) -> None:
        if replay not in REPLAY_MODES:
            raise ValueError(f"replay must be one of {REPLAY_MODES}")
        if total_steps <= 0:
            raise ValueError("total_steps must be > 0")
        if window <= 0:
            raise ValueError("window must be > 0")
        self.oracle = oracle
        self.epsilon = epsilon
        self.total_steps = total_steps
        self.replay = replay
        self.template = load_prompt_template() if template is None else template
        self.decide_retries = decide_retries
        self.pool = ExperiencePool()
        self.recent: deque[Experience] = deque(maxlen=window)
        self.steps_seen = 0

    def prompt_for(self, condition: Condition) -> MetaPrompt:
        if self.replay == PRIORITIZED:
            return build_meta_prompt(self.template, self.pool.entries(), condition)
        return build_meta_prompt(self.template, list(self.recent), condition,
                                 sort=False)

    def decide(self, ctx: DecisionContext, rng) -> tuple[str, bool]:
        prompt = self.prompt_for(ctx.condition)
        oracle_decision = query_oracle(self.oracle, prompt, self.decide_retries)
        eps = self.epsilon.value(self.steps_seen, self.total_steps)
        return epsilon_greedy(rng, eps, oracle_decision)

    def observe(self, ctx: DecisionContext, decision: str,
                outcome: StepOutcome) -> None:
        if self.replay == PRIORITIZED:
            self.pool.update(ctx.condition, decision, outcome.reward)
        else:
            evaluation = GOOD if outcome.quality_ok else BAD
            self.recent.append(Experience(ctx.condition, decision,
                                          float(outcome.reward), evaluation))
        self.steps_seen += 1


class QLearningPolicy(Policy):
    """Tabular value learner over the same conditions the ICL agent sees.

    One-step problem, so no bootstrapping: v += lr * (reward - v).
    """

    name = "q_learning"

    def __init__(self, epsilon: EpsilonSchedule, total_steps: int,
                 learning_rate: float = 0.1) -> None:
        if total_steps <= 0:
            raise ValueError("total_steps must be > 0")
        if not 0.0 < learning_rate <= 1.0:
            raise ValueError("learning_rate must be in (0, 1]")
        self.epsilon = epsilon
        self.total_steps = total_steps
        self.learning_rate = learning_rate
        self.values: dict[tuple[Condition, str], float] = {}
        self.steps_seen = 0

    def value(self, condition: Condition, decision: str) -> float:
        return self.values.get((condition, decision), 0.0)

    def decide(self, ctx: DecisionContext, rng) -> tuple[str, bool]:
        greedy = LOCAL
        if self.value(ctx.condition, OFFLOAD) > self.value(ctx.condition, LOCAL):
            greedy = OFFLOAD
        eps = self.epsilon.value(self.steps_seen, self.total_steps)
        return epsilon_greedy(rng, eps, greedy)

    def observe(self, ctx: DecisionContext, decision: str,
                outcome: StepOutcome) -> None:
        key = (ctx.condition, decision)
        v = self.values.get(key, 0.0)
        self.values[key] = v + self.learning_rate * (float(outcome.reward) - v)
        self.steps_seen += 1


def bruteforce_decision(task: TaskRequest, edge: LlmProfile, cloud: LlmProfile,
                        capacity_bps: float, delay_cfg: DelayConfig,
                        reward_cfg: RewardConfig) -> str:
    """Reward-maximizing decision by evaluating both options; ties go local."""
    best_decision = LOCAL
    best_reward = float("-inf")
    for decision in DECISIONS:
        delay = total_task_delay(task, edge, cloud, decision, capacity_bps,
                                 delay_cfg)
        outcome = step_reward(task, decision, delay, edge, cloud, reward_cfg)
        if outcome.reward > best_reward:
            best_reward = outcome.reward
            best_decision = decision
    return best_decision


class BruteForcePolicy(Policy):
    """Oracle upper bound: evaluates both decisions with full knowledge."""

    name = "bruteforce"

    def __init__(self, edge: LlmProfile, cloud: LlmProfile,
                 delay_cfg: DelayConfig, reward_cfg: RewardConfig) -> None:
        self.edge = edge
        self.cloud = cloud
        self.delay_cfg = delay_cfg
        self.reward_cfg = reward_cfg

    def decide(self, ctx: DecisionContext, rng) -> tuple[str, bool]:
        decision = bruteforce_decision(ctx.task, self.edge, self.cloud,
                                       ctx.capacity_bps, self.delay_cfg,
                                       self.reward_cfg)
        return decision, False


class StaticPolicy(Policy):
    """Fixed or uniformly random decisions, no learning.

    The random mode's draws are the policy itself, not exploration, so the
    explored flag stays False.
    """

    def __init__(self, mode: str) -> None:
        if mode not in ("always_local", "always_offload", "uniform_random"):
            raise ValueError(f"unknown static mode {mode!r}")
        self.mode = mode
        self.name = mode

    def decide(self, ctx: DecisionContext, rng) -> tuple[str, bool]:
        if self.mode == "always_local":
            return LOCAL, False
        if self.mode == "always_offload":
            return OFFLOAD, False
        return DECISIONS[int(rng.integers(2))], False


def build_policy(name: str, *, oracle: Optional[DecisionOracle] = None,
                 epsilon: Optional[EpsilonSchedule] = None,
                 total_steps: Optional[int] = None, latest_window: int = 10,
                 template: Optional[str] = None, decide_retries: int = 2,
                 edge: Optional[LlmProfile] = None,
                 cloud: Optional[LlmProfile] = None,
                 delay_cfg: Optional[DelayConfig] = None,
                 reward_cfg: Optional[RewardConfig] = None) -> Policy:
    """Construct a policy by its registry name."""
    if name not in POLICY_NAMES:
        raise ConfigError(f"unknown policy {name!r}; expected one of {POLICY_NAMES}")
    if name in ("icl", "icl_latest", "icl_no_exploration"):
        if oracle is None or total_steps is None:
            raise ValueError(f"policy {name!r} requires oracle and total_steps")
        if name == "icl_no_exploration":
            schedule = EpsilonSchedule(start=0.0, floor=0.0)
        else:
            schedule = epsilon if epsilon is not None else EpsilonSchedule()
        replay = LATEST if name == "icl_latest" else PRIORITIZED
        policy = IclPolicy(oracle, schedule, total_steps, replay=replay,
                           window=latest_window, template=template,
                           decide_retries=decide_retries)
        policy.name = name
        return policy
    if name == "q_learning":
        if total_steps is None:
            raise ValueError("policy 'q_learning' requires total_steps")
        schedule = epsilon if epsilon is not None else EpsilonSchedule()
        return QLearningPolicy(schedule, total_steps)
    if name == "bruteforce":
        if None in (edge, cloud, delay_cfg, reward_cfg):
            raise ValueError("policy 'bruteforce' requires edge, cloud, "
                             "delay_cfg and reward_cfg")
        return BruteForcePolicy(edge, cloud, delay_cfg, reward_cfg)
    return StaticPolicy(name)
