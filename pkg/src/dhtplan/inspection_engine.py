"""Sequential multi-level lot inspection.

A ladder of increasing failure-rate levels is tested pairwise; the stream
of Bernoulli outcomes is consumed one at a time against the current level's
plan.  Trial and failure counts are cumulative across levels (escalating
never discards inspection work), and each plan's n is read as a cumulative
total from the start of inspection.

Transitions, checked in order after each outcome:
  a) failures >= c             -> escalate (acceptance is already impossible)
  b) run > r                   -> escalate (successive-failures limit breached)
  c) trials >= n, failures < c -> accept at this level

Escalation past the last level rejects the whole ladder.  On entry to a new
level the same checks cascade immediately with the carried counts, which
matters when a later plan's cumulative n is already met; a cascade emits
one event per step, all sharing the trial index that triggered it.
"""

from dataclasses import dataclass, field, replace

from .errors import DomainError, LadderError, NoConvergenceError, StateError
from .plan_solvers import TestSpec, solve
from .run_limits import DEFAULT_EX, SflQuery, sfl_r

SUCCESS = 0
FAILURE = 1


@dataclass(frozen=True)
class Outcome:
    """A single Bernoulli observation; value is 0 (success) or 1 (failure)."""

    value: int
    source: str | None = None

    def __post_init__(self):
        if self.value not in (SUCCESS, FAILURE):
            raise DomainError("outcome value must be 0 or 1")


@dataclass(frozen=True)
class LevelLadder:
    levels: tuple
    plans: tuple
    run_limits: tuple
    ex: float
    methods: tuple

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise LadderError("ladder levels must be strictly increasing")
        for (lo, hi), plan in zip(zip(self.levels, self.levels[1:]), self.plans):
            if not (lo < plan.t_h < hi):
                raise LadderError(
                    "plan threshold %g escapes its level pair (%g, %g)"
                    % (plan.t_h, lo, hi))
        if any(b < a for a, b in zip(self.run_limits, self.run_limits[1:])):
            raise LadderError("run limits must be non-decreasing")


@dataclass(frozen=True)
class Event:
    trial: int
    outcome: int
    level: int
    failures: int
    run: int
    transition: str  # continue | escalate_failures | escalate_run | accept | reject


# status values
CONTINUE = "continue"
ACCEPTED = "accepted"
REJECTED = "rejected_beyond_last"


@dataclass(frozen=True)
class InspectionState:
    level_index: int = 0
    trials: int = 0
    failures: int = 0
    run: int = 0
    status: str = CONTINUE
    accepted_level: int | None = None
    accepted_t_h: float | None = None
    events: tuple = field(default_factory=tuple)

    @property
    def terminal(self):
        return self.status != CONTINUE


def build_ladder(levels, alpha_tail=0.05, beta_tail=0.05, method="Norm_I",
                 ex=DEFAULT_EX, epsilon=None, first_method=None,
                 paper_compat_z=True):
    """Compute one plan per adjacent level pair plus each level's run limit.

    ``method`` applies to every pair; ``first_method`` overrides the first
    pair (commonly Bin when the ladder starts at zero, which the normal
    methods cannot size).  Construction fails fast, naming the offending
    pair, if any plan does not converge.
    """
    levels = tuple(float(p) for p in levels)
    if len(levels) < 2:
        raise LadderError("a ladder needs at least two levels")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise LadderError("ladder levels must be strictly increasing")
    if levels[-1] >= 0.5:
        raise LadderError("ladder levels must stay below 0.5")
    if first_method is None:
        first_method = "Bin" if levels[0] == 0.0 else method
    plans = []
    methods = []
    for i, (lo, hi) in enumerate(zip(levels, levels[1:])):
        m = first_method if i == 0 else method
        spec = TestSpec(p0=lo, p1=hi, alpha_tail=alpha_tail, beta_tail=beta_tail,
                        epsilon=epsilon, paper_compat_z=paper_compat_z)
        try:
            plans.append(solve(spec, m))
        except NoConvergenceError as exc:
            raise LadderError(
                "no converging %s plan for level pair (%g, %g): %s" % (m, lo, hi, exc)
            ) from exc
        methods.append(m)
    limits = tuple(sfl_r(SflQuery(p=hi, ex=ex))[1] for hi in levels[1:])
    return LevelLadder(levels=levels, plans=tuple(plans), run_limits=limits,
                       ex=ex, methods=tuple(methods))


def _resolve(state, ladder, trial, value):
    """Apply the transition checks, cascading escalations across levels."""
    events = list(state.events)
    escalated = False
    while True:
        level = state.level_index
        plan = ladder.plans[level]
        limit = ladder.run_limits[level]
        if state.failures >= plan.c or state.run > limit:
            kind = ("escalate_failures" if state.failures >= plan.c
                    else "escalate_run")
            if level + 1 >= len(ladder.plans):
                events.append(Event(trial, value, level, state.failures,
                                    state.run, "reject"))
                return (replace(state, status=REJECTED, events=tuple(events)),
                        events[-1])
            events.append(Event(trial, value, level, state.failures,
                                state.run, kind))
            state = replace(state, level_index=level + 1)
            escalated = True
            continue
        if state.trials >= plan.n:
            events.append(Event(trial, value, level, state.failures,
                                state.run, "accept"))
            return (replace(state, status=ACCEPTED, accepted_level=level,
                            accepted_t_h=plan.t_h, events=tuple(events)),
                    events[-1])
        if not escalated:
            events.append(Event(trial, value, level, state.failures,
                                state.run, "continue"))
        return replace(state, events=tuple(events)), events[-1]


def observe(state, ladder, outcome):
    """Consume one outcome; returns (new state, event for this trial)."""
    if state.terminal:
        raise StateError("cannot observe after terminal status %r" % (state.status,))
    value = outcome.value if isinstance(outcome, Outcome) else int(outcome)
    if value not in (SUCCESS, FAILURE):
        raise DomainError("outcome value must be 0 or 1")
    trial = state.trials + 1
    if value == FAILURE:
        state = replace(state, trials=trial, failures=state.failures + 1,
                        run=state.run + 1)
    else:
        state = replace(state, trials=trial, run=0)
    return _resolve(state, ladder, trial, value)


def run_stream(ladder, outcomes, state=None):
    """Left-fold of observe; stops at the first terminal status.

    A stream that ends while the status is still ``continue`` yields an
    inconclusive state (the partial counts are preserved).
    """
    if state is None:
        state = InspectionState()
    for outcome in outcomes:
        state, _ = observe(state, ladder, outcome)
        if state.terminal:
            break
    return state


def replay(ladder, events):
    """Re-drive the engine from an event log; returns the final state.

    Cascaded events share a trial index, so the log is deduplicated to one
    outcome per trial before folding.
    """
    seen = -1
    seq = []
    for e in events:
        if e.trial != seen:
            seen = e.trial
            seq.append(e.outcome)
    return run_stream(ladder, seq)
