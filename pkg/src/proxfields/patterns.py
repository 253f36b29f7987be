"""Threshold-driven interaction-pattern state machines.

Three machines consume Potential Interest samples and emit discrete events:

* greeting: sleep/active with hysteresis (wake at t1, sleep below t2 < t1)
* turn-taking: playing/paused around a single threshold, playing by default
* revealing: information level = number of ascending thresholds reached

All transitions are gated by a dwell time: the triggering condition must hold
continuously for `dwell` seconds before the transition commits. Thresholds are
inclusive upward (pi >= t triggers) and strict downward (pi < t releases).
"""

from __future__ import annotations

import enum
from bisect import bisect_right
from dataclasses import dataclass, replace
from typing import Optional, Union

DEFAULT_DWELL = 0.3
# Slack for the elapsed-dwell comparison: tick times are multiples of 1/rate,
# which doubles are inexact for, so t - pending_since can land a hair under the
# nominal dwell (e.g. 18.75 - 18.45 < 0.3). Without slack the commit slips one
# whole tick and event timing stops being tick-rate stable.
DWELL_SLACK = 1e-9


class PatternKind(enum.Enum):
    GREETING = "greeting"
    TURN_TAKING = "turn_taking"
    REVEALING = "revealing"


class EventKind(enum.Enum):
    WAKE_UP = "wake_up"
    SLEEP = "sleep"
    PAUSE = "pause"
    RESUME = "resume"
    LEVEL_CHANGED = "level_changed"


@dataclass(frozen=True, slots=True)
class PatternEvent:
    kind: EventKind
    t: float
    from_level: Optional[int] = None
    to_level: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind is EventKind.LEVEL_CHANGED:
            if self.from_level is None or self.to_level is None:
                raise ValueError("level_changed requires from_level and to_level")
            if self.from_level == self.to_level:
                raise ValueError("level_changed requires from_level != to_level")

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind.value, "t": self.t}
        if self.kind is EventKind.LEVEL_CHANGED:
            out["from"] = self.from_level
            out["to"] = self.to_level
        return out


@dataclass(frozen=True, slots=True)
class GreetingConfig:
    t1: float
    t2: float
    dwell: float = DEFAULT_DWELL

    def __post_init__(self) -> None:
        if not 0.0 <= self.t2 <= self.t1 <= 1.0:
            raise ValueError(f"need 0 <= t2 <= t1 <= 1, got t1={self.t1}, t2={self.t2}")
        if self.dwell < 0:
            raise ValueError(f"dwell must be >= 0, got {self.dwell}")


@dataclass(frozen=True, slots=True)
class TurnTakingConfig:
    t1: float
    dwell: float = DEFAULT_DWELL

    def __post_init__(self) -> None:
        if not 0.0 <= self.t1 <= 1.0:
            raise ValueError(f"t1 must be in [0, 1], got {self.t1}")
        if self.dwell < 0:
            raise ValueError(f"dwell must be >= 0, got {self.dwell}")


@dataclass(frozen=True, slots=True)
class RevealingConfig:
    thresholds: tuple[float, ...]
    dwell: float = DEFAULT_DWELL

    def __post_init__(self) -> None:
        thresholds = tuple(self.thresholds)
        object.__setattr__(self, "thresholds", thresholds)
        if not thresholds:
            raise ValueError("revealing needs at least one threshold")
        for value in thresholds:
            if not 0.0 < value <= 1.0:
                raise ValueError(f"thresholds must be in (0, 1], got {value}")
        if any(a >= b for a, b in zip(thresholds, thresholds[1:])):
            raise ValueError(f"thresholds must be strictly ascending, got {thresholds}")
        if self.dwell < 0:
            raise ValueError(f"dwell must be >= 0, got {self.dwell}")


PatternConfig = Union[GreetingConfig, TurnTakingConfig, RevealingConfig]


class GreetingPhase(enum.Enum):
    SLEEP = "sleep"
    ACTIVE = "active"


class TurnTakingPhase(enum.Enum):
    PLAYING = "playing"
    PAUSED = "paused"


@dataclass(frozen=True, slots=True)
class _TimedState:
    """Shared bookkeeping: pending candidate, when it first held, last step time."""

    pending_since: Optional[float] = None
    last_t: Optional[float] = None


@dataclass(frozen=True, slots=True)
class GreetingState(_TimedState):
    phase: GreetingPhase = GreetingPhase.SLEEP
    pending: Optional[GreetingPhase] = None

    def label(self) -> str:
        return self.phase.value


@dataclass(frozen=True, slots=True)
class TurnTakingState(_TimedState):
    phase: TurnTakingPhase = TurnTakingPhase.PLAYING
    pending: Optional[TurnTakingPhase] = None

    def label(self) -> str:
        return self.phase.value


@dataclass(frozen=True, slots=True)
class RevealingState(_TimedState):
    level: int = 0
    pending: Optional[int] = None

    def label(self) -> str:
        return f"level:{self.level}"


PatternState = Union[GreetingState, TurnTakingState, RevealingState]


def _check_monotonic(state: PatternState, t: float) -> None:
    if state.last_t is not None and t < state.last_t:
        raise ValueError(f"time must be non-decreasing: got {t} after {state.last_t}")


def _resolve(current, target, pending, pending_since, t: float, dwell: float):
    """Debounced transition: returns (committed flag, new current, pending, since)."""
    if target == current:
        return False, current, None, None
    if pending != target:
        pending, pending_since = target, t
    if t - pending_since >= dwell - DWELL_SLACK:
        return True, target, None, None
    return False, current, pending, pending_since


def greeting_step(
    state: GreetingState, pi: float, t: float, cfg: GreetingConfig
) -> tuple[GreetingState, list[PatternEvent]]:
    """Wake at pi >= t1, sleep below t2; the [t2, t1) band holds the current phase."""
    _check_monotonic(state, t)
    if state.phase is GreetingPhase.SLEEP:
        target = GreetingPhase.ACTIVE if pi >= cfg.t1 else GreetingPhase.SLEEP
    else:
        target = GreetingPhase.SLEEP if pi < cfg.t2 else GreetingPhase.ACTIVE
    committed, phase, pending, since = _resolve(
        state.phase, target, state.pending, state.pending_since, t, cfg.dwell
    )
    events: list[PatternEvent] = []
    if committed:
        kind = EventKind.WAKE_UP if phase is GreetingPhase.ACTIVE else EventKind.SLEEP
        events.append(PatternEvent(kind, t))
    return replace(state, phase=phase, pending=pending, pending_since=since, last_t=t), events


def turntaking_step(
    state: TurnTakingState, pi: float, t: float, cfg: TurnTakingConfig
) -> tuple[TurnTakingState, list[PatternEvent]]:
    """Pause when pi drops below t1, resume once pi >= t1 again."""
    _check_monotonic(state, t)
    target = TurnTakingPhase.PLAYING if pi >= cfg.t1 else TurnTakingPhase.PAUSED
    committed, phase, pending, since = _resolve(
        state.phase, target, state.pending, state.pending_since, t, cfg.dwell
    )
    events: list[PatternEvent] = []
    if committed:
        kind = EventKind.RESUME if phase is TurnTakingPhase.PLAYING else EventKind.PAUSE
        events.append(PatternEvent(kind, t))
    return replace(state, phase=phase, pending=pending, pending_since=since, last_t=t), events


def revealing_step(
    state: RevealingState, pi: float, t: float, cfg: RevealingConfig
) -> tuple[RevealingState, list[PatternEvent]]:
    """Target level is the count of thresholds at or below pi; level 0 shows nothing."""
    _check_monotonic(state, t)
    target = bisect_right(cfg.thresholds, pi)
    committed, level, pending, since = _resolve(
        state.level, target, state.pending, state.pending_since, t, cfg.dwell
    )
    events: list[PatternEvent] = []
    if committed:
        events.append(
            PatternEvent(EventKind.LEVEL_CHANGED, t, from_level=state.level, to_level=level)
        )
    return replace(state, level=level, pending=pending, pending_since=since, last_t=t), events


def reset(kind: PatternKind, cfg: PatternConfig) -> PatternState:
    """Initial state: greeting sleeps, turn-taking plays, revealing shows nothing."""
    if kind is PatternKind.GREETING:
        if not isinstance(cfg, GreetingConfig):
            raise TypeError(f"greeting needs GreetingConfig, got {type(cfg).__name__}")
        return GreetingState()
    if kind is PatternKind.TURN_TAKING:
        if not isinstance(cfg, TurnTakingConfig):
            raise TypeError(f"turn_taking needs TurnTakingConfig, got {type(cfg).__name__}")
        return TurnTakingState()
    if kind is PatternKind.REVEALING:
        if not isinstance(cfg, RevealingConfig):
            raise TypeError(f"revealing needs RevealingConfig, got {type(cfg).__name__}")
        return RevealingState()
    raise ValueError(f"unknown pattern kind {kind!r}")


def step(
    state: PatternState, pi: float, t: float, cfg: PatternConfig
) -> tuple[PatternState, list[PatternEvent]]:
    """Dispatch to the machine matching the state type."""
    if isinstance(state, GreetingState):
        return greeting_step(state, pi, t, cfg)
    if isinstance(state, TurnTakingState):
        return turntaking_step(state, pi, t, cfg)
    if isinstance(state, RevealingState):
        return revealing_step(state, pi, t, cfg)
    raise TypeError(f"unknown pattern state {type(state).__name__}")
