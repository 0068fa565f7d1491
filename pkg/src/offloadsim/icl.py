"""In-context learning machinery for the offloading agent.

Tasks are grouped into conditions (task type plus output-token bin). Past
decisions are stored per condition, rendered as natural-language example lines
into a meta prompt, and a language-model oracle answers "local" or "offload"
for the queried condition. A deterministic mock oracle that parses the prompt
back is provided for offline runs and tests.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Protocol

from .delay import DECISIONS, TaskRequest
from .errors import OracleProtocolError

DEFAULT_BIN_WIDTH = 200

GOOD = "good"
BAD = "bad"
EVALUATIONS = (GOOD, BAD)


def bin_tokens(n_tokens: int, bin_width: int = DEFAULT_BIN_WIDTH) -> int:
    """Map a token count to its bin index (floor division)."""
    if bin_width <= 0:
        raise ValueError("bin_width must be > 0")
    if n_tokens < 0:
        raise ValueError("n_tokens must be >= 0")
    return int(n_tokens) // int(bin_width)


@dataclass(frozen=True, order=True)
class Condition:
    """Replay key: task type and output-token bin."""

    task_type: str
    token_bin: int

    def __post_init__(self) -> None:
        if not self.task_type:
            raise ValueError("task_type must be non-empty")
        if self.token_bin < 0:
            raise ValueError("token_bin must be >= 0")


def condition_of(task: TaskRequest, bin_width: int = DEFAULT_BIN_WIDTH) -> Condition:
    return Condition(task.task_type, bin_tokens(task.n_tokens, bin_width))


@dataclass(frozen=True)
class Experience:
    condition: Condition
    decision: str
    reward: float
    evaluation: str

    def __post_init__(self) -> None:
        if self.decision not in DECISIONS:
            raise ValueError(f"decision must be one of {DECISIONS}")
        if self.evaluation not in EVALUATIONS:
            raise ValueError(f"evaluation must be one of {EVALUATIONS}")


class ExperiencePool:
    """Replay memory keeping the best-reward experience per condition.

    update() returns the evaluation assigned to the observed step: "good" when
    it is inserted (new condition, strictly higher reward, or a tie with the
    stored best) and "bad" when it scores below the stored best. Ties keep the
    incumbent entry, so stored decisions only change on strict improvement.
    """

    def __init__(self) -> None:
        self._best: dict[Condition, Experience] = {}

    def __len__(self) -> int:
        return len(self._best)

    def __contains__(self, condition: Condition) -> bool:
        return condition in self._best

    def best(self, condition: Condition) -> Optional[Experience]:
        return self._best.get(condition)

    def update(self, condition: Condition, decision: str, reward: float) -> str:
        if decision not in DECISIONS:
            raise ValueError(f"decision must be one of {DECISIONS}")
        reward = float(reward)
        incumbent = self._best.get(condition)
        if incumbent is None or reward > incumbent.reward:
            self._best[condition] = Experience(condition, decision, reward, GOOD)
            return GOOD
        if reward < incumbent.reward:
            return BAD
        return GOOD

    def entries(self) -> list[Experience]:
        """Stored experiences sorted by (task_type, token_bin)."""
        return sorted(self._best.values(), key=lambda e: e.condition)


# --- prompt rendering / parsing ---------------------------------------------

_EXAMPLE_RE = re.compile(
    r"^Keywords: \(Task types: (?P<task_type>[A-Za-z0-9_]+), "
    r"Estimated output token size: bin (?P<token_bin>\d+)\), "
    r"Decision: (?P<decision>local|offload), "
    r"Reward: (?P<reward>[-+]?[0-9.]+(?:[eE][-+]?\d+)?), "
    r"Evaluation: (?P<evaluation>Good|Bad) decision\.$"
)

_QUERY_RE = re.compile(
    r"^Keywords: \(Task types: (?P<task_type>[A-Za-z0-9_]+), "
    r"Estimated output token size: bin (?P<token_bin>\d+)\), Decision: \?$"
)


def render_example(exp: Experience) -> str:
    return (
        f"Keywords: (Task types: {exp.condition.task_type}, "
        f"Estimated output token size: bin {exp.condition.token_bin}), "
        f"Decision: {exp.decision}, Reward: {exp.reward!r}, "
        f"Evaluation: {exp.evaluation.capitalize()} decision."
    )


def parse_example(line: str) -> Optional[Experience]:
    """Inverse of render_example; None when the line is not an example."""
    m = _EXAMPLE_RE.match(line.strip())
    if m is None:
        return None
    condition = Condition(m.group("task_type"), int(m.group("token_bin")))
    return Experience(condition, m.group("decision"), float(m.group("reward")),
                      m.group("evaluation").lower())


def render_query(condition: Condition) -> str:
    return (
        f"Keywords: (Task types: {condition.task_type}, "
        f"Estimated output token size: bin {condition.token_bin}), Decision: ?"
    )


def parse_query(line: str) -> Optional[Condition]:
    m = _QUERY_RE.match(line.strip())
    if m is None:
        return None
    return Condition(m.group("task_type"), int(m.group("token_bin")))


@dataclass(frozen=True)
class MetaPrompt:
    description: str
    example_lines: tuple[str, ...]
    query_line: str
    query: Condition

    @property
    def text(self) -> str:
        parts = [self.description]
        if self.example_lines:
            parts.append("Examples:\n" + "\n".join(self.example_lines))
        parts.append("New condition:\n" + self.query_line)
        return "\n\n".join(parts)


def build_meta_prompt(description: str, examples: Iterable[Experience],
                      query: Condition, *, sort: bool = True) -> MetaPrompt:
    """Assemble the meta prompt. sort=False keeps the given example order."""
    items = list(examples)
    if sort:
        items.sort(key=lambda e: e.condition)
    return MetaPrompt(
        description=description,
        example_lines=tuple(render_example(e) for e in items),
        query_line=render_query(query),
        query=query,
    )


def load_prompt_template(path: "str | Path | None" = None) -> str:
    """Task description text; the packaged default when no path is given."""
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = (
            resources.files("offloadsim.data")
            .joinpath("prompt_template.txt")
            .read_text(encoding="utf-8")
        )
    return text.rstrip("\n")


# --- oracle interface --------------------------------------------------------


class DecisionOracle(Protocol):
    def answer(self, prompt: MetaPrompt) -> str: ...


def normalize_decision(reply: str) -> Optional[str]:
    """Strip quoting and punctuation; None if no clean decision remains."""
    text = reply.strip().strip(".\"'`").strip().lower()
    return text if text in DECISIONS else None


def decide(oracle: DecisionOracle, prompt: MetaPrompt, max_retries: int = 2) -> str:
    """Query the oracle, retrying unparsable replies up to max_retries times."""
    if max_retries < 0:
        raise ValueError("max_retries must be >= 0")
    last_error: Optional[Exception] = None
    for _ in range(max_retries + 1):
        try:
            reply = oracle.answer(prompt)
        except OracleProtocolError as exc:
            last_error = exc
            continue
        decision = normalize_decision(reply)
        if decision is not None:
            return decision
        last_error = OracleProtocolError(f"unusable oracle reply: {reply!r}")
    raise OracleProtocolError(
        f"no usable decision after {max_retries + 1} attempts"
    ) from last_error


def epsilon_greedy(rng, epsilon: float, oracle_decision: str) -> tuple[str, bool]:
    """Replace the oracle decision with a uniform random one w.p. epsilon.

    Draws nothing from rng when epsilon <= 0, so a zero-exploration run
    consumes the same random stream as one with no agent randomness at all.
    """
    if oracle_decision not in DECISIONS:
        raise ValueError(f"decision must be one of {DECISIONS}")
    if epsilon > 0 and rng.random() < epsilon:
        return DECISIONS[int(rng.integers(2))], True
    return oracle_decision, False


@dataclass
class EpsilonSchedule:
    """Constant exploration rate for most of the run, then geometric decay.

    The rate stays at `start` through the warmup fraction of the episode and
    then decays by `decay` per step down to `floor`. This keeps enough
    exploration pressure to displace early unlucky entries from the replay
    memory while leaving the closing stretch nearly greedy.
    """

    start: float = 0.3
    decay: float = 0.99
    floor: float = 0.01
    warmup_fraction: float = 0.75

    def __post_init__(self) -> None:
        if not 0.0 <= self.start <= 1.0:
            raise ValueError("start must be in [0, 1]")
        if not 0.0 < self.decay <= 1.0:
            raise ValueError("decay must be in (0, 1]")
        if not 0.0 <= self.floor <= 1.0:
            raise ValueError("floor must be in [0, 1]")
        if not 0.0 <= self.warmup_fraction <= 1.0:
            raise ValueError("warmup_fraction must be in [0, 1]")

    def value(self, step: int, total_steps: int) -> float:
        if total_steps <= 0:
            raise ValueError("total_steps must be > 0")
        if step < 0:
            raise ValueError("step must be >= 0")
        warm = int(self.warmup_fraction * total_steps)
        if step < warm:
            return self.start
        return max(self.floor, self.start * self.decay ** (step - warm))


# --- offline oracle ----------------------------------------------------------


def mock_decision(entries: Iterable[Experience], query: Condition) -> str:
    """Decision rule of the offline oracle.

    Exact condition match wins (the last occurrence when a condition repeats).
    Otherwise the nearest bin of the same task type is used, preferring the
    smaller bin on distance ties. With no same-type example the answer is
    "local".
    """
    by_key: dict[Condition, str] = {}
    for exp in entries:
        by_key[exp.condition] = exp.decision
    if query in by_key:
        return by_key[query]
    same_type = [k for k in by_key if k.task_type == query.task_type]
    if same_type:
        nearest = min(same_type,
                      key=lambda k: (abs(k.token_bin - query.token_bin), k.token_bin))
        return by_key[nearest]
    return DECISIONS[0]


@dataclass
class MockOracle:
    """Deterministic stand-in for a remote language model.

    Works purely from the rendered prompt text, so it exercises the same
    render/parse path a real model would see.
    """

    def answer(self, prompt: MetaPrompt) -> str:
        entries = [e for e in (parse_example(line)
                               for line in prompt.text.splitlines()) if e]
        query = parse_query(prompt.query_line)
        if query is None:
            raise OracleProtocolError(f"malformed query line: {prompt.query_line!r}")
        return mock_decision(entries, query)
