"""Experiment orchestration: episodes, replications, sweeps, persistence.

An episode serves one task per step, round-robin over users. Each step
recomputes the proportional-fair allocation, asks the policy for a decision,
realizes delay and reward, and feeds the outcome back to the policy. With the
mock oracle the whole run is a pure function of (config, seed).
"""

from __future__ import annotations

import dataclasses
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np
import yaml

from .delay import (CLOUD, EDGE, QUALITY_PREFERRED, DelayConfig, LlmProfile,
                    load_profiles, total_task_delay)
from .errors import ConfigError, OffloadSimError
from .icl import (DEFAULT_BIN_WIDTH, EpsilonSchedule, MockOracle, condition_of,
                  load_prompt_template)
from .llm_client import OracleEndpointConfig, RemoteOracle
from .objective import RewardConfig, step_reward
from .policies import (POLICY_NAMES, DecisionContext, Policy, build_policy)
from .radio import RadioConfig, allocate_proportional_fair, link_capacity
from .workload import WorkloadConfig, generate_tasks, generate_users

MOCK = "mock"
REMOTE = "remote"
ORACLE_KINDS = (MOCK, REMOTE)

SWEEP_AXES = ("prompt_token_mean", "quality_task_fraction", "profile_pair")

CSV_HEADER = ("step,task_type,token_bin,decision,explored,delay_s,reward,"
              "quality_ok,cum_reward,success_rate")

SWEEP_CSV_HEADER = ("axis,value,replication,seed,mean_delay_s,mean_reward,"
                    "success_rate")


@dataclass
class AgentConfig:
    """Knobs of the learning policies (ignored by the static baselines)."""

    bin_width: int = DEFAULT_BIN_WIDTH
    epsilon_start: float = 0.3
    epsilon_decay: float = 0.99
    epsilon_floor: float = 0.01
    epsilon_warmup_fraction: float = 0.75
    latest_window: int = 10
    oracle_retries: int = 2
    prompt_template_path: Optional[str] = None

    def __post_init__(self) -> None:
        if self.bin_width < 1:
            raise ValueError("bin_width must be >= 1")
        if self.latest_window < 1:
            raise ValueError("latest_window must be >= 1")
        if self.oracle_retries < 0:
            raise ValueError("oracle_retries must be >= 0")
        self.schedule()  # validates the epsilon fields

    def schedule(self) -> EpsilonSchedule:
        return EpsilonSchedule(start=self.epsilon_start, decay=self.epsilon_decay,
                               floor=self.epsilon_floor,
                               warmup_fraction=self.epsilon_warmup_fraction)


_SECTION_TYPES = {
    "radio": RadioConfig,
    "workload": WorkloadConfig,
    "delay": DelayConfig,
    "reward": RewardConfig,
    "agent": AgentConfig,
    "endpoint": OracleEndpointConfig,
}


@dataclass
class ExperimentConfig:
    label: str = "default"
    policy: str = "icl"
    oracle: str = MOCK
    steps: int = 2000
    replications: int = 5
    seed: int = 7
    edge_model: str = "llama3-8b"
    cloud_model: str = "gpt-4o"
    profiles_path: Optional[str] = None
    timing_interpretation: str = "tpot"
    radio: RadioConfig = field(default_factory=RadioConfig)
    workload: WorkloadConfig = field(default_factory=WorkloadConfig)
    delay: DelayConfig = field(default_factory=DelayConfig)
    reward: RewardConfig = field(default_factory=RewardConfig)
    agent: AgentConfig = field(default_factory=AgentConfig)
    endpoint: Optional[OracleEndpointConfig] = None

    def validate(self) -> None:
        # labels become file names; YAML also turns bare on/off/yes/no into
        # booleans, which we want to reject loudly rather than str() later
        if not isinstance(self.label, str) or not self.label:
            raise ConfigError("label must be a non-empty string")
        if self.steps < 1:
            raise ConfigError("steps must be >= 1")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if self.policy not in POLICY_NAMES:
            raise ConfigError(
                f"unknown policy {self.policy!r}; expected one of {POLICY_NAMES}")
        if self.oracle not in ORACLE_KINDS:
            raise ConfigError(
                f"unknown oracle {self.oracle!r}; expected one of {ORACLE_KINDS}")
        if self.oracle == REMOTE and self.endpoint is None:
            raise ConfigError("oracle 'remote' requires an endpoint section")
        try:
            profiles = load_profiles(self.profiles_path, self.timing_interpretation)
        except OSError as exc:
            raise ConfigError(f"cannot read profile library: {exc}") from exc
        for role, name, placement in (("edge_model", self.edge_model, EDGE),
                                      ("cloud_model", self.cloud_model, CLOUD)):
            if name not in profiles:
                raise ConfigError(f"{role} {name!r} is not in the profile library")
            if profiles[name].placement != placement:
                raise ConfigError(
                    f"{role} {name!r} has placement "
                    f"{profiles[name].placement!r}, expected {placement!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        for key, value in data.items():
            if key in _SECTION_TYPES and value is not None:
                kwargs[key] = _build_section(_SECTION_TYPES[key], value, key)
            else:
                kwargs[key] = value
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc

    @classmethod
    def from_file(cls, path: "str | Path") -> "ExperimentConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config file {path} is not valid YAML: {exc}") from exc
        return cls.from_dict(data if data is not None else {})

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _build_section(cls, data, context: str):
    if not isinstance(data, dict):
        raise ConfigError(f"config section {context!r} must be a mapping")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown {context} keys: {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {context} section: {exc}") from exc


@dataclass(frozen=True)
class StepRecord:
    step: int
    task_type: str
    token_bin: int
    decision: str
    explored: bool
    delay_s: float
    reward: float
    quality_ok: bool
    cum_reward: float
    success_rate: float


@dataclass
class EpisodeMetrics:
    records: list[StepRecord]
    seed: int
    label: str = ""

    def summary(self) -> dict:
        n = len(self.records)
        if n == 0:
            return {"steps": 0, "seed": self.seed, "label": self.label,
                    "total_delay_s": 0.0, "mean_delay_s": 0.0, "mean_reward": 0.0,
                    "cum_reward": 0.0, "success_rate": 1.0, "explored_steps": 0,
                    "first_window_mean_reward": 0.0,
                    "final_window_mean_reward": 0.0}
        rewards = [r.reward for r in self.records]
        total_delay = math.fsum(r.delay_s for r in self.records)
        window = max(1, n // 10)
        return {
            "steps": n,
            "seed": self.seed,
            "label": self.label,
            "total_delay_s": total_delay,
            "mean_delay_s": total_delay / n,
            "mean_reward": math.fsum(rewards) / n,
            "cum_reward": self.records[-1].cum_reward,
            "success_rate": self.records[-1].success_rate,
            "explored_steps": sum(1 for r in self.records if r.explored),
            "first_window_mean_reward": math.fsum(rewards[:window]) / window,
            "final_window_mean_reward": math.fsum(rewards[-window:]) / window,
        }


def make_oracle(cfg: ExperimentConfig):
    if cfg.oracle == MOCK:
        return MockOracle()
    return RemoteOracle(cfg.endpoint)


def build_policy_for(cfg: ExperimentConfig, edge: LlmProfile,
                     cloud: LlmProfile) -> Policy:
    agent = cfg.agent
    template = None
    if agent.prompt_template_path is not None:
        template = load_prompt_template(agent.prompt_template_path)
    oracle = make_oracle(cfg) if cfg.policy.startswith("icl") else None
    return build_policy(
        cfg.policy,
        oracle=oracle,
        epsilon=agent.schedule(),
        total_steps=cfg.steps,
        latest_window=agent.latest_window,
        template=template,
        decide_retries=agent.oracle_retries,
        edge=edge,
        cloud=cloud,
        delay_cfg=cfg.delay,
        reward_cfg=cfg.reward,
    )


def run_episode(cfg: ExperimentConfig, seed: Optional[int] = None,
                policy: Optional[Policy] = None) -> EpisodeMetrics:
    """Run one episode of cfg.steps decision steps.

    seed overrides cfg.seed; policy overrides the configured one (used by
    replications and tests that pre-build a policy).
    """
    cfg.validate()
    if seed is None:
        seed = cfg.seed
    rng = np.random.default_rng(seed)
    profiles = load_profiles(cfg.profiles_path, cfg.timing_interpretation)
    edge = profiles[cfg.edge_model]
    cloud = profiles[cfg.cloud_model]
    users = generate_users(cfg.workload, cfg.radio, rng)
    by_id = {u.user_id: u for u in users}
    tasks = generate_tasks(cfg.workload, rng, n_tasks=cfg.steps)
    if policy is None:
        policy = build_policy_for(cfg, edge, cloud)

    records: list[StepRecord] = []
    cum_reward = 0.0
    quality_total = 0
    quality_met = 0
    for step, task in enumerate(tasks):
        try:
            alloc = allocate_proportional_fair(users, cfg.radio)
            capacity = link_capacity(by_id[task.user_id], alloc, cfg.radio)
            condition = condition_of(task, cfg.agent.bin_width)
            ctx = DecisionContext(condition=condition, task=task,
                                  capacity_bps=capacity)
            decision, explored = policy.decide(ctx, rng)
            delay = total_task_delay(task, edge, cloud, decision, capacity,
                                     cfg.delay)
            outcome = step_reward(task, decision, delay, edge, cloud, cfg.reward)
            policy.observe(ctx, decision, outcome)
        except OffloadSimError as exc:
            raise type(exc)(f"step {step} (task {task.task_id}): {exc}") from exc
        cum_reward += outcome.reward
        if task.task_type == QUALITY_PREFERRED:
            quality_total += 1
            if outcome.quality_ok:
                quality_met += 1
        # 1.0 before any quality-preferred task has been served
        success = quality_met / quality_total if quality_total else 1.0
        records.append(StepRecord(
            step=step, task_type=task.task_type, token_bin=condition.token_bin,
            decision=decision, explored=explored, delay_s=delay,
            reward=outcome.reward, quality_ok=outcome.quality_ok,
            cum_reward=cum_reward, success_rate=success))
    return EpisodeMetrics(records=records, seed=seed, label=cfg.label)


def replication_seeds(seed: int, n: int) -> list[int]:
    """Independent per-replication seeds derived from the experiment seed."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [int(child.generate_state(1)[0]) for child in children]


def run_replications(cfg: ExperimentConfig,
                     parallel: bool = True) -> list[EpisodeMetrics]:
    cfg.validate()
    seeds = replication_seeds(cfg.seed, cfg.replications)
    if parallel and cfg.replications > 1:
        with ThreadPoolExecutor(max_workers=min(cfg.replications, 8)) as pool:
            return list(pool.map(lambda s: run_episode(cfg, seed=s), seeds))
    return [run_episode(cfg, seed=s) for s in seeds]


def _apply_axis(cfg: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    try:
        if axis == "prompt_token_mean":
            workload = dataclasses.replace(cfg.workload, mean_tokens=float(value))
            return dataclasses.replace(cfg, workload=workload)
        if axis == "quality_task_fraction":
            workload = dataclasses.replace(cfg.workload,
                                           quality_task_fraction=float(value))
            return dataclasses.replace(cfg, workload=workload)
    except ValueError as exc:
        raise ConfigError(f"bad sweep value {value!r} for axis {axis}: {exc}") from exc
    edge, sep, cloud = str(value).partition("+")
    if not (sep and edge and cloud):
        raise ConfigError(
            f"profile_pair values must look like 'edge+cloud', got {value!r}")
    return dataclasses.replace(cfg, edge_model=edge, cloud_model=cloud)


def run_sweep(cfg: ExperimentConfig, axis: str, values: Iterable,
              parallel: bool = True) -> list[dict]:
    """One aggregate row per (axis value, replication)."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    values = list(values)
    if not values:
        raise ConfigError("sweep values must be non-empty")
    rows = []
    for value in values:
        point = _apply_axis(cfg, axis, value)
        point.validate()
        for rep, metrics in enumerate(run_replications(point, parallel=parallel)):
            agg = metrics.summary()
            rows.append({
                "axis": axis,
                "value": value,
                "replication": rep,
                "seed": metrics.seed,
                "mean_delay_s": agg["mean_delay_s"],
                "mean_reward": agg["mean_reward"],
                "success_rate": agg["success_rate"],
            })
    return rows


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _fmt_bool(b: bool) -> str:
    return "true" if b else "false"


def write_metrics(metrics: EpisodeMetrics, csv_path: "str | Path",
                  cfg: ExperimentConfig) -> Path:
    """Write the per-step CSV plus a sibling .json summary (config echo)."""
    csv_path = Path(csv_path)
    try:
        with csv_path.open("w", encoding="utf-8", newline="") as fh:
            fh.write(CSV_HEADER + "\n")
            for r in metrics.records:
                fh.write(",".join((
                    str(r.step), r.task_type, str(r.token_bin), r.decision,
                    _fmt_bool(r.explored), _fmt(r.delay_s), _fmt(r.reward),
                    _fmt_bool(r.quality_ok), _fmt(r.cum_reward),
                    _fmt(r.success_rate))) + "\n")
        summary_path = csv_path.with_suffix(".json")
        payload = {"config": cfg.to_dict(), "seed": metrics.seed,
                   "aggregates": metrics.summary()}
        summary_path.write_text(json.dumps(payload, indent=2) + "\n",
                                encoding="utf-8")
    except OSError as exc:
        raise OffloadSimError(f"cannot write metrics to {csv_path}: {exc}") from exc
    return csv_path


def write_sweep(rows: list[dict], csv_path: "str | Path") -> Path:
    csv_path = Path(csv_path)
    try:
        with csv_path.open("w", encoding="utf-8", newline="") as fh:
            fh.write(SWEEP_CSV_HEADER + "\n")
            for row in rows:
                fh.write(",".join((
                    row["axis"], str(row["value"]), str(row["replication"]),
                    str(row["seed"]), _fmt(row["mean_delay_s"]),
                    _fmt(row["mean_reward"]), _fmt(row["success_rate"]))) + "\n")
    except OSError as exc:
        raise OffloadSimError(f"cannot write sweep table to {csv_path}: {exc}") from exc
    return csv_path
