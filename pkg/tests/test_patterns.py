"""Unit tests for the three threshold state machines and their debounce gate."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from proxfields.patterns import (
    EventKind,
    GreetingConfig,
    GreetingState,
    PatternEvent,
    PatternKind,
    RevealingConfig,
    RevealingState,
    TurnTakingConfig,
    TurnTakingState,
    greeting_step,
    reset,
    revealing_step,
    step,
    turntaking_step,
)

DT = 0.05


def feed(machine_step, state, cfg, samples, t0=0.0):
    """Run a pi sequence through one machine, collecting every event."""
    events = []
    t = t0
    for pi in samples:
        state, emitted = machine_step(state, pi, t, cfg)
        events.extend(emitted)
        t += DT
    return state, events


class TestConfigValidation:
    def test_greeting_needs_ordered_thresholds(self):
        with pytest.raises(ValueError, match="t2 <= t1"):
            GreetingConfig(t1=0.6, t2=0.9)

    def test_greeting_accepts_equal_thresholds(self):
        cfg = GreetingConfig(t1=0.5, t2=0.5)
        assert cfg.dwell == 0.3

    def test_turntaking_threshold_range(self):
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            TurnTakingConfig(t1=1.5)

    def test_revealing_thresholds_strictly_ascending(self):
        with pytest.raises(ValueError, match="strictly ascending"):
            RevealingConfig(thresholds=(0.2, 0.2))
        with pytest.raises(ValueError, match="strictly ascending"):
            RevealingConfig(thresholds=(0.3, 0.1))

    def test_revealing_needs_a_threshold(self):
        with pytest.raises(ValueError, match="at least one"):
            RevealingConfig(thresholds=())

    def test_negative_dwell_rejected(self):
        with pytest.raises(ValueError, match="dwell"):
            TurnTakingConfig(t1=0.5, dwell=-0.1)

    def test_level_changed_event_needs_distinct_levels(self):
        with pytest.raises(ValueError):
            PatternEvent(EventKind.LEVEL_CHANGED, 0.0, from_level=1, to_level=1)
        with pytest.raises(ValueError):
            PatternEvent(EventKind.LEVEL_CHANGED, 0.0)


class TestGreeting:
    CFG = GreetingConfig(t1=0.6, t2=0.4, dwell=0.3)

    def test_wakes_after_dwell_above_t1(self):
        _, events = feed(greeting_step, GreetingState(), self.CFG, [0.7] * 10)
        assert [e.kind for e in events] == [EventKind.WAKE_UP]
        # condition first held at t=0; 0.3 s elapsed at the 7th tick
        assert events[0].t == pytest.approx(6 * DT)

    def test_short_spike_is_suppressed(self):
        samples = [0.7] * 5 + [0.0] * 10  # 0.2 s above t1, under the 0.3 s dwell
        _, events = feed(greeting_step, GreetingState(), self.CFG, samples)
        assert events == []

    def test_band_holds_sleeping_state(self):
        samples = [0.45, 0.55, 0.5, 0.59, 0.41] * 4
        state, events = feed(greeting_step, GreetingState(), self.CFG, samples)
        assert events == []
        assert state.label() == "sleep"

    def test_band_holds_active_state(self):
        state, events = feed(greeting_step, GreetingState(), self.CFG, [1.0] * 10)
        assert [e.kind for e in events] == [EventKind.WAKE_UP]
        state, later = feed(
            greeting_step, state, self.CFG, [0.45, 0.55, 0.5, 0.59] * 5, t0=1.0
        )
        assert later == []
        assert state.label() == "active"

    def test_full_wake_sleep_cycle(self):
        samples = [0.8] * 10 + [0.1] * 10
        _, events = feed(greeting_step, GreetingState(), self.CFG, samples)
        assert [e.kind for e in events] == [EventKind.WAKE_UP, EventKind.SLEEP]

    def test_zero_dwell_commits_immediately(self):
        cfg = GreetingConfig(t1=0.6, t2=0.4, dwell=0.0)
        _, events = feed(greeting_step, GreetingState(), cfg, [0.9])
        assert [e.kind for e in events] == [EventKind.WAKE_UP]
        assert events[0].t == 0.0


class TestTurnTaking:
    CFG = TurnTakingConfig(t1=0.6, dwell=0.3)

    def test_starts_playing(self):
        assert reset(PatternKind.TURN_TAKING, self.CFG).label() == "playing"

    def test_pause_then_resume(self):
        samples = [0.2] * 10 + [0.9] * 10
        _, events = feed(turntaking_step, TurnTakingState(), self.CFG, samples)
        assert [e.kind for e in events] == [EventKind.PAUSE, EventKind.RESUME]

    def test_threshold_is_inclusive_upward(self):
        # pi == t1 counts as engaged, so no pause fires
        _, events = feed(turntaking_step, TurnTakingState(), self.CFG, [0.6] * 20)
        assert events == []

    def test_dwell_restarts_when_condition_flaps(self):
        # drops below t1 never last the full dwell
        samples = ([0.2] * 5 + [0.9] * 2) * 6
        _, events = feed(turntaking_step, TurnTakingState(), self.CFG, samples)
        assert events == []

    def test_alternation_over_random_input(self):
        rng = random.Random(1234)
        samples = [rng.random() for _ in range(400)]
        _, events = feed(turntaking_step, TurnTakingState(), self.CFG, samples)
        kinds = [e.kind for e in events]
        assert kinds, "long random runs should produce transitions"
        assert kinds[0] == EventKind.PAUSE
        for a, b in zip(kinds, kinds[1:]):
            assert {a, b} == {EventKind.PAUSE, EventKind.RESUME}


class TestRevealing:
    CFG = RevealingConfig(thresholds=(0.04, 0.08), dwell=0.3)

    def test_starts_at_level_zero(self):
        assert reset(PatternKind.REVEALING, self.CFG).label() == "level:0"

    def test_ascends_one_level_at_a_time(self):
        samples = [0.05] * 10 + [0.2] * 10
        _, events = feed(revealing_step, RevealingState(), self.CFG, samples)
        assert [(e.from_level, e.to_level) for e in events] == [(0, 1), (1, 2)]

    def test_jump_telescopes_into_single_event(self):
        """A pi leap across both thresholds reports one 0 -> 2 change."""
        _, events = feed(revealing_step, RevealingState(), self.CFG, [0.5] * 10)
        assert [(e.from_level, e.to_level) for e in events] == [(0, 2)]
        assert events[0].kind is EventKind.LEVEL_CHANGED

    def test_descends_with_dwell(self):
        samples = [0.5] * 10 + [0.0] * 10
        _, events = feed(revealing_step, RevealingState(), self.CFG, samples)
        assert [(e.from_level, e.to_level) for e in events] == [(0, 2), (2, 0)]

    def test_target_level_monotone_in_pi(self):
        cfg = RevealingConfig(thresholds=(0.1, 0.3, 0.7), dwell=0.0)
        levels = []
        for pi in (0.0, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0):
            state, _ = revealing_step(RevealingState(), pi, 0.0, cfg)
            levels.append(state.level)
        assert levels == sorted(levels)
        assert levels[0] == 0 and levels[-1] == 3

    def test_event_dict_uses_from_to_keys(self):
        _, events = feed(
            revealing_step, RevealingState(), RevealingConfig((0.1,), dwell=0.0), [0.5]
        )
        assert events[0].to_dict() == {
            "kind": "level_changed",
            "t": 0.0,
            "from": 0,
            "to": 1,
        }


class TestStepDispatchAndReset:
    def test_reset_pairs_kind_with_config(self):
        assert isinstance(reset(PatternKind.GREETING, GreetingConfig(0.6, 0.4)), GreetingState)
        assert isinstance(reset(PatternKind.TURN_TAKING, TurnTakingConfig(0.5)), TurnTakingState)
        assert isinstance(reset(PatternKind.REVEALING, RevealingConfig((0.1,))), RevealingState)

    def test_reset_rejects_mismatched_config(self):
        with pytest.raises(TypeError):
            reset(PatternKind.GREETING, TurnTakingConfig(0.5))

    def test_step_routes_by_state_type(self):
        cfg = TurnTakingConfig(t1=0.5, dwell=0.0)
        state, events = step(TurnTakingState(), 0.1, 0.0, cfg)
        assert state.label() == "paused"
        assert [e.kind for e in events] == [EventKind.PAUSE]

    def test_time_must_not_go_backwards(self):
        cfg = GreetingConfig(0.6, 0.4)
        state, _ = greeting_step(GreetingState(), 0.0, 1.0, cfg)
        with pytest.raises(ValueError, match="non-decreasing"):
            greeting_step(state, 0.0, 0.5, cfg)

    def test_equal_timestamps_allowed(self):
        cfg = GreetingConfig(0.6, 0.4)
        state, _ = greeting_step(GreetingState(), 0.0, 1.0, cfg)
        greeting_step(state, 0.0, 1.0, cfg)  # must not raise


@settings(max_examples=300, deadline=None)
@given(
    samples=st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=1, max_size=60),
    t1=st.floats(0.05, 0.95, allow_nan=False),
    dwell=st.sampled_from([0.0, 0.1, 0.3]),
)
def test_turntaking_events_alternate_for_any_input(samples, t1, dwell):
    cfg = TurnTakingConfig(t1=t1, dwell=dwell)
    state, events = feed(turntaking_step, TurnTakingState(), cfg, samples)
    kinds = [e.kind for e in events]
    if kinds:
        assert kinds[0] == EventKind.PAUSE
    assert all(a != b for a, b in zip(kinds, kinds[1:]))
    # final phase agrees with the last committed event
    if kinds:
        expected = "paused" if kinds[-1] == EventKind.PAUSE else "playing"
        assert state.label() == expected


@settings(max_examples=300, deadline=None)
@given(
    samples=st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=1, max_size=60),
    dwell=st.sampled_from([0.0, 0.1, 0.3]),
)
def test_revealing_event_chain_is_consistent(samples, dwell):
    cfg = RevealingConfig(thresholds=(0.2, 0.5, 0.8), dwell=dwell)
    state, events = feed(revealing_step, RevealingState(), cfg, samples)
    level = 0
    for event in events:
        assert event.from_level == level
        assert event.to_level != level
        assert 0 <= event.to_level <= 3
        level = event.to_level
    assert state.level == level


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(0.4, 0.6, exclude_max=True, allow_nan=False), min_size=1, max_size=60))
def test_greeting_band_never_emits(samples):
    # every sample sits inside [t2, t1): no machine state may fire
    cfg = GreetingConfig(t1=0.6, t2=0.4, dwell=0.1)
    _, events = feed(greeting_step, GreetingState(), cfg, samples)
    assert events == []
