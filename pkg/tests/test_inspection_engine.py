"""Inspection engine tests: ladder construction, transition semantics,
event-sourcing determinism, and cumulative-count invariants."""

import numpy as np
import pytest

from dhtplan import (DomainError, InspectionState, LadderError, Outcome,
                     StateError, build_ladder, observe, replay, run_stream)
from dhtplan.inspection_engine import ACCEPTED, CONTINUE, REJECTED


@pytest.fixture(scope="module")
def step3_ladder():
    # Bin pair from zero, then the unit-step normal method
    return build_ladder([0.0, 0.03, 0.06])


@pytest.fixture(scope="module")
def newton_ladder():
    return build_ladder([0.02, 0.05, 0.10], method="Norm_N")


class TestBuildLadder:
    def test_step3_reference(self, step3_ladder):
        lad = step3_ladder
        assert lad.methods == ("Bin", "Norm_I")
        assert lad.run_limits == (4, 5)
        n0, c0 = lad.plans[0].n, lad.plans[0].c
        assert abs(n0 - 250) <= 0.25 * 250
        assert abs(c0 - 4) <= 2
        assert lad.plans[0].t_h == pytest.approx(0.0143, abs=0.004)
        assert (lad.plans[1].n, lad.plans[1].c) == (495, 21)
        assert lad.plans[1].t_h == pytest.approx(0.0424, abs=0.004)

    def test_newton_reference(self, newton_ladder):
        lad = newton_ladder
        assert [(p.n, p.c) for p in lad.plans] == [(383, 13), (289, 21)]
        assert lad.run_limits == (5, 6)

    def test_single_level_rejected(self):
        with pytest.raises(LadderError):
            build_ladder([0.03])

    def test_levels_must_increase(self):
        with pytest.raises(LadderError):
            build_ladder([0.03, 0.03, 0.06])

    def test_levels_below_half(self):
        with pytest.raises(LadderError):
            build_ladder([0.3, 0.5])

    def test_no_convergence_names_pair(self):
        with pytest.raises(LadderError, match=r"0\.2.*0\.4"):
            build_ladder([0.2, 0.4], epsilon=1e-6)


class TestObserve:
    def test_accept_at_level_zero(self, step3_ladder):
        n0, c0 = step3_ladder.plans[0].n, step3_ladder.plans[0].c
        outcomes = [0] * 100 + [1] * (c0 - 1) + [0] * (n0 - 100 - (c0 - 1))
        state = run_stream(step3_ladder, outcomes)
        assert state.status == ACCEPTED
        assert state.accepted_level == 0
        assert state.accepted_t_h == step3_ladder.plans[0].t_h
        assert state.trials == n0
        assert state.failures == c0 - 1

    def test_escalation_keeps_counts(self, step3_ladder):
        c0 = step3_ladder.plans[0].c
        outcomes = [0, 1] * c0  # c0-th failure arrives at trial 2*c0
        state = run_stream(step3_ladder, outcomes)
        assert state.status == CONTINUE
        assert state.level_index == 1
        assert state.trials == 2 * c0
        assert state.failures == c0
        kinds = [e.transition for e in state.events]
        assert "escalate_failures" in kinds

    def test_escalated_level_accepts_cumulatively(self, step3_ladder):
        c0 = step3_ladder.plans[0].c
        n1, c1 = step3_ladder.plans[1].n, step3_ladder.plans[1].c
        lead = [0, 1] * c0
        state = run_stream(step3_ladder, lead + [0] * (n1 - len(lead)))
        assert state.status == ACCEPTED
        assert state.accepted_level == 1
        assert state.trials == n1            # cumulative target
        assert state.failures == c0 <= c1 - 1

    def test_run_limit_escalates_before_failure_count(self, newton_ladder):
        # 6 consecutive failures exceed r=5 at level 0 while failures < c=13
        state = run_stream(newton_ladder, [0, 1, 0] * 3 + [1] * 6)
        assert state.level_index == 1
        assert state.status == CONTINUE
        assert state.failures == 9
        assert any(e.transition == "escalate_run" for e in state.events)

    def test_run_limit_cascades_to_rejection(self, newton_ladder):
        # 8 straight failures: run 6 > 5 escalates, then run 7 > 6 rejects
        state = run_stream(newton_ladder, [1] * 8)
        assert state.status == REJECTED

    def test_accept_on_entry_when_cumulative_n_already_met(self, newton_ladder):
        # spread 13 failures so the 13th lands past level 1's n=289 with a
        # short run; the cascade accepts at level 1 immediately
        block = [0] * 26 + [1]
        state = run_stream(newton_ladder, block * 13)
        assert state.status == ACCEPTED
        assert state.accepted_level == 1
        assert state.trials == 13 * 27
        assert state.trials > newton_ladder.plans[1].n

    def test_observe_after_terminal(self, step3_ladder):
        state = run_stream(step3_ladder, [0] * step3_ladder.plans[0].n)
        with pytest.raises(StateError):
            observe(state, step3_ladder, 0)

    def test_outcome_validation(self, step3_ladder):
        with pytest.raises(DomainError):
            Outcome(2)
        with pytest.raises(DomainError):
            observe(InspectionState(), step3_ladder, 7)


class TestRunStream:
    def test_empty_stream_inconclusive(self, step3_ladder):
        state = run_stream(step3_ladder, [])
        assert state.status == CONTINUE
        assert state.trials == 0

    def test_stops_at_decision_and_ignores_rest(self, step3_ladder):
        n0 = step3_ladder.plans[0].n
        state = run_stream(step3_ladder, [0] * (n0 + 500))
        assert state.status == ACCEPTED
        assert state.trials == n0

    def test_accepts_outcome_objects(self, step3_ladder):
        n0 = step3_ladder.plans[0].n
        state = run_stream(step3_ladder, (Outcome(0) for _ in range(n0)))
        assert state.status == ACCEPTED


class TestEventSourcing:
    @pytest.mark.parametrize("p_true", [0.01, 0.05, 0.12])
    def test_replay_reproduces_state(self, newton_ladder, p_true):
        rng = np.random.Generator(np.random.Philox(key=99))
        for _ in range(40):
            stream = (rng.random(400) < p_true).astype(int).tolist()
            state = run_stream(newton_ladder, stream)
            again = replay(newton_ladder, state.events)
            assert again == state

    def test_cumulative_monotonicity_and_terminal_exclusivity(self, newton_ladder):
        rng = np.random.Generator(np.random.Philox(key=1234))
        for _ in range(60):
            stream = (rng.random(400) < 0.08).astype(int)
            state = InspectionState()
            prev_trials = prev_failures = 0
            terminal_seen = False
            for tok in stream:
                if state.terminal:
                    terminal_seen = True
                    break
                state, _ = observe(state, newton_ladder, int(tok))
                assert state.trials >= prev_trials
                assert state.failures >= prev_failures
                assert state.failures <= state.trials
                assert state.run <= state.failures
                prev_trials, prev_failures = state.trials, state.failures
            if state.status == ACCEPTED:
                plan = newton_ladder.plans[state.accepted_level]
                assert state.failures <= plan.c - 1
                assert state.trials >= plan.n
            assert not (terminal_seen and not state.terminal)

    def test_sfl_escalations_record_run_breach(self, newton_ladder):
        rng = np.random.Generator(np.random.Philox(key=5))
        seen = 0
        for _ in range(200):
            stream = (rng.random(400) < 0.2).astype(int)
            state = run_stream(newton_ladder, stream.tolist())
            for e in state.events:
                if e.transition == "escalate_run":
                    level_at = e.level
                    assert e.run > newton_ladder.run_limits[level_at]
                    seen += 1
        assert seen > 0
