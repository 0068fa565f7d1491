"""Simulator of LLM task offloading between edge and cloud over a 6G cell."""

from .delay import (CLOUD, DECISIONS, EDGE, LOCAL, OFFLOAD, QUALITY_PREFERRED,
                    REGULAR, TASK_TYPES, DelayConfig, LlmProfile, TaskRequest,
                    generation_time, load_profiles, total_task_delay,
                    transmission_delay)
from .errors import (ConfigError, OffloadSimError, OracleProtocolError,
                     OracleTransportError, UnservableLinkError)
from .icl import (Condition, EpsilonSchedule, Experience, ExperiencePool,
                  MetaPrompt, MockOracle, bin_tokens, build_meta_prompt,
                  condition_of, load_prompt_template)
from .llm_client import (OracleEndpointConfig, RemoteOracle, ReplayOracle,
                         TranscriptWriter)
from .objective import RewardConfig, StepOutcome, episode_objective, step_reward
from .policies import (POLICY_NAMES, BruteForcePolicy, DecisionContext,
                       IclPolicy, Policy, QLearningPolicy, StaticPolicy,
                       bruteforce_decision, build_policy)
from .radio import (RadioConfig, RbAllocation, UserChannel,
                    allocate_proportional_fair, compute_gain, instantaneous_rates,
                    link_capacity)
from .runner import (AgentConfig, EpisodeMetrics, ExperimentConfig, StepRecord,
                     run_episode, run_replications, run_sweep, write_metrics,
                     write_sweep)
from .workload import WorkloadConfig, generate_tasks, generate_users

__version__ = "0.1.0"

__all__ = [
    "AgentConfig", "BruteForcePolicy", "CLOUD", "Condition", "ConfigError",
    "DECISIONS", "DecisionContext", "DelayConfig", "EDGE", "EpisodeMetrics",
    "EpsilonSchedule", "Experience", "ExperiencePool", "ExperimentConfig",
    "IclPolicy", "LOCAL", "LlmProfile", "MetaPrompt", "MockOracle", "OFFLOAD",
    "OffloadSimError", "OracleEndpointConfig", "OracleProtocolError",
    "OracleTransportError", "POLICY_NAMES", "Policy", "QLearningPolicy",
    "QUALITY_PREFERRED", "RadioConfig", "RbAllocation", "REGULAR",
    "RemoteOracle", "ReplayOracle", "RewardConfig", "StaticPolicy",
    "StepOutcome", "StepRecord", "TASK_TYPES", "TaskRequest",
    "TranscriptWriter", "UnservableLinkError", "UserChannel", "WorkloadConfig",
    "allocate_proportional_fair", "bin_tokens", "bruteforce_decision",
    "build_meta_prompt", "build_policy", "compute_gain", "condition_of",
    "episode_objective", "generate_tasks", "generate_users", "generation_time",
    "instantaneous_rates", "link_capacity", "load_profiles",
    "load_prompt_template", "run_episode", "run_replications", "run_sweep",
    "step_reward", "total_task_delay", "transmission_delay", "write_metrics",
    "write_sweep",
]
