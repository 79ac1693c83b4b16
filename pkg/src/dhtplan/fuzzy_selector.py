"""Mamdani fuzzy selector recommending a plan-computation method.

Four inputs (step, t_h, t_exec, prec_abs), one output, eight rules.
Conjunction is min, negation is 1 - degree, implication clips the
consequent, aggregation is max, and defuzzification takes the centroid of
the aggregate on a 1001-point grid over [0, 1].  The resulting score maps
to a method label through fixed output bands:

    (0.10, 0.15] Bin | (0.15, 0.32] Poiss | (0.32, 0.71] Norm_I | (0.71, 1.0] Norm_N

Membership breakpoints are configurable; the shipped defaults are a
documented reconstruction chosen to reproduce the intended band behavior,
not ground truth.
"""

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoRecommendationError

GRID_POINTS = 1001

#: Universe of each input variable (values are clamped on ingestion).
UNIVERSES = {
    "step": (0.0, 0.2),
    "t_h": (0.0, 0.5),
    "t_exec": (0.0, 12.0),
    "prec_abs": (0.0, 1e-3),
}

DEFAULT_MEMBERSHIPS = {
    "step": {
        "I_zero": (0.0, 0.0, 0.005, 0.02),
        "Low": (0.005, 0.02, 0.05, 0.08),
        "High": (0.05, 0.10, 0.2, 0.2),
    },
    "t_h": {
        "L": (0.0, 0.0, 0.05, 0.15),
        "H": (0.10, 0.25, 0.5, 0.5),
    },
    "t_exec": {
        "L_tex": (0.0, 0.0, 0.5, 2.0),
        "M_tex": (0.5, 2.0, 4.0, 6.0),
        "H_tex": (4.0, 8.0, 12.0, 12.0),
    },
    "prec_abs": {
        "Low": (0.0, 0.0, 1e-5, 1e-4),
        "High": (5e-5, 3e-4, 1e-3, 1e-3),
    },
}

DEFAULT_OUTPUTS = {
    "Bin": (0.10, 0.12, 0.13, 0.15),
    "Poiss": (0.15, 0.20, 0.27, 0.32),
    "Norm_I": (0.32, 0.45, 0.60, 0.71),
    "Norm_N": (0.71, 0.85, 1.0, 1.0),
}

# (antecedents, consequent); antecedent = (variable, label, negated)
DEFAULT_RULES = (
    ((("step", "I_zero", False), ("t_exec", "M_tex", False)), "Bin"),
    ((("step", "I_zero", False), ("t_exec", "H_tex", False)), "Poiss"),
    ((("step", "Low", False), ("t_h", "L", False), ("t_exec", "M_tex", False)), "Norm_N"),
    ((("step", "Low", False), ("t_h", "L", False), ("t_exec", "L_tex", False)), "Norm_I"),
    ((("step", "High", False), ("t_h", "H", False), ("t_exec", "L_tex", False)), "Norm_N"),
    ((("step", "High", False), ("t_h", "H", False), ("t_exec", "M_tex", False)), "Bin"),
    ((("step", "High", False), ("t_h", "H", False), ("t_exec", "H_tex", False)), "Poiss"),
    ((("step", "I_zero", True), ("prec_abs", "Low", False)), "Norm_N"),
)

OUTPUT_BANDS = (
    (0.10, 0.15, "Bin"),
    (0.15, 0.32, "Poiss"),
    (0.32, 0.71, "Norm_I"),
    (0.71, 1.0, "Norm_N"),
)


@dataclass(frozen=True)
class MembershipFunction:
    """Trapezoid on [a, d] with plateau [b, c]."""

    label: str
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not (self.a <= self.b <= self.c <= self.d):
            raise DomainError("trapezoid breakpoints must be ordered: %r" % (self,))


def membership_degree(value, mf):
    """Piecewise-linear trapezoid evaluation; 0 outside [a, d], 1 on [b, c]."""
    if value < mf.a or value > mf.d:
        return 0.0
    if mf.b <= value <= mf.c:
        return 1.0
    if value < mf.b:
        return (value - mf.a) / (mf.b - mf.a)
    return (mf.d - value) / (mf.d - mf.c)


@dataclass(frozen=True)
class SelectorInput:
    """One query to the selector; fields outside their universe are clamped."""

    step: float
    t_h: float
    t_exec: float
    prec_abs: float

    def clamped(self):
        vals = {}
        for name in UNIVERSES:
            lo, hi = UNIVERSES[name]
            v = getattr(self, name)
            if v < lo or v > hi:
                warnings.warn("%s=%g outside universe [%g, %g]; clamped"
                              % (name, v, lo, hi), stacklevel=3)
                v = min(max(v, lo), hi)
            vals[name] = v
        return SelectorInput(**vals)


class FuzzyRuleBase:
    """Immutable rule base: input/output membership functions plus 8 rules."""

    def __init__(self, memberships=DEFAULT_MEMBERSHIPS, outputs=DEFAULT_OUTPUTS,
                 rules=DEFAULT_RULES, grid=GRID_POINTS):
        if len(rules) != 8:
            raise DomainError("rule base must hold exactly 8 rules, got %d" % len(rules))
        self._mfs = {
            var: {lab: MembershipFunction(lab, *pts) for lab, pts in labs.items()}
            for var, labs in memberships.items()
        }
        self._rules = tuple((tuple((v, l, bool(neg)) for v, l, neg in ants), out)
                            for ants, out in rules)
        self._grid = np.linspace(0.0, 1.0, grid)
        self._out_mfs = {}
        for label, pts in outputs.items():
            mf = MembershipFunction(label, *pts)
            self._out_mfs[label] = np.array(
                [membership_degree(x, mf) for x in self._grid])
        for ants, out in self._rules:
            if out not in self._out_mfs:
                raise DomainError("rule consequent %r has no output set" % (out,))
            for var, lab, _ in ants:
                if var not in self._mfs or lab not in self._mfs[var]:
                    raise DomainError("rule references unknown set %s.%s" % (var, lab))
        self._memberships_src = memberships
        self._outputs_src = outputs

    def input_degree(self, var, label, value):
        return membership_degree(value, self._mfs[var][label])

    def rule_strengths(self, inp):
        vals = {"step": inp.step, "t_h": inp.t_h,
                "t_exec": inp.t_exec, "prec_abs": inp.prec_abs}
        strengths = []
        for ants, _ in self._rules:
            s = 1.0
            for var, lab, neg in ants:
                mu = self.input_degree(var, lab, vals[var])
                if neg:
                    mu = 1.0 - mu
                s = min(s, mu)
            strengths.append(s)
        return strengths

    def aggregate(self, strengths):
        agg = np.zeros_like(self._grid)
        for s, (_, out) in zip(strengths, self._rules):
            if s > 0.0:
                np.maximum(agg, np.minimum(s, self._out_mfs[out]), out=agg)
        return agg

    def centroid(self, agg):
        # trapezoid weights on the uniform grid; the spacing cancels
        w = np.ones_like(agg)
        w[0] = w[-1] = 0.5
        mass = float(np.sum(w * agg))
        if mass == 0.0:
            raise NoRecommendationError("all rule strengths are zero")
        return float(np.sum(w * agg * self._grid) / mass)

    def to_config(self):
        return {"memberships": {v: {l: list(p) for l, p in labs.items()}
                                for v, labs in self._memberships_src.items()},
                "outputs": {l: list(p) for l, p in self._outputs_src.items()},
                "rules": [{"if": [[v, l, neg] for v, l, neg in ants], "then": out}
                          for ants, out in self._rules]}

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_config(), fh, indent=2)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            cfg = json.load(fh)
        memberships = {v: {l: tuple(p) for l, p in labs.items()}
                       for v, labs in cfg["memberships"].items()}
        outputs = {l: tuple(p) for l, p in cfg["outputs"].items()}
        rules = tuple((tuple((v, l, bool(neg)) for v, l, neg in r["if"]), r["then"])
                      for r in cfg["rules"])
        return cls(memberships=memberships, outputs=outputs, rules=rules)


def classify(score, base=None):
    """Map a defuzzified score to a method label; <= 0.1 is no recommendation."""
    if not (0.0 <= score <= 1.0):
        raise DomainError("score must lie in [0, 1]")
    for lo, hi, label in OUTPUT_BANDS:
        if lo < score <= hi:
            return label
    raise NoRecommendationError("score %g falls below every output band" % (score,))


def infer(inp, base=None):
    """Run the Mamdani pipeline.

    Returns (score, label, rule_firings) where rule_firings is a list of
    (1-based rule index, strength).
    """
    if base is None:
        base = FuzzyRuleBase()
    inp = inp.clamped()
    strengths = base.rule_strengths(inp)
    agg = base.aggregate(strengths)
    score = base.centroid(agg)
    label = classify(score)
    return score, label, [(i + 1, s) for i, s in enumerate(strengths)]


def response_surface(base, axis1, axis2, fixed, grid=51):
    """Score matrix over a grid of two inputs with the others held fixed."""
    if grid < 2:
        raise DomainError("grid must be >= 2")
    for ax in (axis1, axis2):
        if ax not in UNIVERSES:
            raise DomainError("unknown input axis %r" % (ax,))
    if axis1 == axis2:
        raise DomainError("surface axes must differ")
    lo1, hi1 = UNIVERSES[axis1]
    lo2, hi2 = UNIVERSES[axis2]
    xs = np.linspace(lo1, hi1, grid)
    ys = np.linspace(lo2, hi2, grid)
    out = np.empty((grid, grid))
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            q = {"step": fixed.step, "t_h": fixed.t_h,
                 "t_exec": fixed.t_exec, "prec_abs": fixed.prec_abs}
            q[axis1] = float(x)
            q[axis2] = float(y)
            strengths = base.rule_strengths(SelectorInput(**q).clamped())
            agg = base.aggregate(strengths)
            try:
                out[i, j] = base.centroid(agg)
            except NoRecommendationError:
                out[i, j] = float("nan")
    return xs, ys, out
