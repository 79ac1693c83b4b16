"""The four plan-computation algorithms and the closed-form normal oracle.

Each solver maps a TestSpec (the rate pair plus tolerances) to a
SamplingPlan (trials n, acceptance number c, threshold t_h).  The accept
rule throughout the package is: accept when failures <= c - 1 at n trials,
reject when failures reach c.

Method notes
------------
``bin`` / ``poiss``
    Scan n upward.  At each n the producer distribution contributes the
    first count beyond its upper (1 - alpha/2) limit and the consumer
    distribution the first count beyond its lower (beta/2) limit; the scan
    stops when the two meet.  Each one-sided significance mass is half the
    spec tail, mirroring the two-sided limits the discrete procedures are
    built from.  With p0 = 0 the producer side is degenerate, so the
    threshold is placed midway between zero and the consumer median and n
    is the smallest size whose acceptance number keeps the realized
    consumer risk within the full beta tail (no producer risk to split
    against).

``norm_n``
    Generalized Newton-Raphson on the two-equation system equating the
    producer upper and consumer lower normal limits; unknowns are the
    threshold x1 and the real-valued trial count x2.

``norm_i``
    Unit-step search on n evaluating the same two limits directly.
"""

import math
from dataclasses import dataclass, field, replace

from . import _backend
from .errors import DegenerateSpecError, DomainError, NoConvergenceError, SolverError
from .stat_kernels import TailMass, z_value

#: Default convergence tolerances per method.
EPS_BIN = 0.0019
EPS_POISS = 0.001
EPS_NORM_I = 1e-4

#: Newton stopping controls.
NEWTON_MAXIT = 10000
NEWTON_STEP_TOL = 1e-9
NEWTON_RESIDUAL_TOL = 1e-8

_DEFAULT_EPS = {"Bin": EPS_BIN, "Poiss": EPS_POISS, "Norm_I": EPS_NORM_I}

METHODS = ("Bin", "Poiss", "Norm_N", "Norm_I")


def _round_half_up(x):
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class TestSpec:
    """One double-hypothesis-test instance: rates, tails, tolerances."""

    __test__ = False  # not a pytest class despite the name

    p0: float
    p1: float
    alpha_tail: float = 0.05
    beta_tail: float = 0.05
    epsilon: float | None = None
    max_n: int = 200_000
    paper_compat_z: bool = True

    def __post_init__(self):
        if not (0.0 <= self.p0 < 0.5) or not (0.0 < self.p1 < 0.5):
            raise DomainError("rates must satisfy 0 <= p0 < 0.5 and 0 < p1 < 0.5")
        if self.p0 >= self.p1:
            raise DegenerateSpecError(
                "p0 must be strictly below p1, got p0=%g p1=%g" % (self.p0, self.p1))
        TailMass(self.alpha_tail)
        TailMass(self.beta_tail)
        if self.epsilon is not None and self.epsilon <= 0.0:
            raise DomainError("epsilon must be positive")
        if self.max_n < 2:
            raise DomainError("max_n must be >= 2")

    def eps_for(self, method):
        if self.epsilon is not None:
            return self.epsilon
        return _DEFAULT_EPS[method]

    def z_pair(self):
        """(z for the producer tail, z for the consumer tail)."""
        return (z_value(self.alpha_tail, self.paper_compat_z),
                z_value(self.beta_tail, self.paper_compat_z))


@dataclass(frozen=True)
class Applicability:
    """Rule-of-thumb validity flags evaluated on the final plan."""

    np0_gt5: bool
    nq0_gt5: bool
    p_lt_0_1: bool

    @property
    def meaningless_for_normal(self):
        return not self.np0_gt5


@dataclass(frozen=True)
class SamplingPlan:
    """Solver output: test n units, reject on the c-th failure."""

    n: int
    c: int
    t_h: float
    np0: float
    method: str
    iterations: int
    converged: bool
    applicability: Applicability
    n_real: float | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError("unknown method %r" % (self.method,))


@dataclass
class NewtonState:
    """Iterate of the two-unknown Newton solve."""

    threshold: float
    sample_size: float
    residual_norm: float = field(default=math.inf)
    step_norm: float = field(default=math.inf)

    def __post_init__(self):
        if self.sample_size <= 0.0:
            raise DomainError("Newton sample-size iterate must stay positive")


def _applicability(n, p0, p1):
    return Applicability(np0_gt5=n * p0 > 5.0,
                         nq0_gt5=n * (1.0 - p0) > 5.0,
                         p_lt_0_1=p1 < 0.1)


def applicability_report(plan, spec):
    """Re-evaluate the validity flags of a plan against its spec."""
    flags = _applicability(plan.n, spec.p0, spec.p1)
    return flags


def closed_form_norm(spec):
    """Exact real-valued solution of the two-limit normal system.

    Eliminating the threshold gives
        sqrt(n) = (z0 s0 + z1 s1) / (p1 - p0),   s_i = sqrt(p_i (1 - p_i))
        t_h     = p0 + z0 s0 / sqrt(n)
    and serves as the independent oracle for both normal solvers.
    """
    z0, z1 = spec.z_pair()
    s0 = math.sqrt(spec.p0 * (1.0 - spec.p0))
    s1 = math.sqrt(spec.p1 * (1.0 - spec.p1))
    rn = (z0 * s0 + z1 * s1) / (spec.p1 - spec.p0)
    if rn <= 0.0:
        raise SolverError("normal system has no positive solution")
    n_real = rn * rn
    t_h = spec.p0 + z0 * s0 / rn
    return n_real, t_h


def solve_norm_newton(spec, init=None):
    """Newton-Raphson on the paired normal limits (method Norm_N).

    Stops on any of: maxit iterations, step norm < 1e-9, residual norm
    < 1e-8.  c is the smallest integer above x1*x2.  Non-convergence and
    np0 <= 5 are flagged on the plan, never silent.
    """
    z0, z1 = spec.z_pair()
    s0 = math.sqrt(spec.p0 * (1.0 - spec.p0))
    s1 = math.sqrt(spec.p1 * (1.0 - spec.p1))
    if init is None:
        n_real, _ = closed_form_norm(spec)
        state = NewtonState(threshold=(spec.p0 + spec.p1) / 2.0,
                            sample_size=math.ceil(n_real))
    else:
        state = replace(init)

    x1, x2 = state.threshold, state.sample_size
    converged = False
    iterations = 0
    for iterations in range(1, NEWTON_MAXIT + 1):
        rx2 = math.sqrt(x2)
        f1 = x1 - spec.p0 - z0 * s0 / rx2
        f2 = x1 - spec.p1 + z1 * s1 / rx2
        resid = math.hypot(f1, f2)
        if resid < NEWTON_RESIDUAL_TOL:
            converged = True
            break
        # J = [[1, j12], [1, j22]] with the x2-derivatives of the limits
        x2_32 = x2 * rx2
        j12 = z0 * s0 / (2.0 * x2_32)
        j22 = -z1 * s1 / (2.0 * x2_32)
        det = j22 - j12
        if det == 0.0 or not math.isfinite(det):
            raise SolverError("singular Jacobian at x2=%g" % (x2,))
        dx1 = (-f1 * j22 + f2 * j12) / det
        dx2 = (f1 - f2) / det
        x1 += dx1
        x2 += dx2
        if x2 <= 0.0:
            raise SolverError("Newton iterate left the positive domain")
        if math.hypot(dx1, dx2) < NEWTON_STEP_TOL:
            converged = True
            break

    n = _round_half_up(x2)
    c = math.ceil(x1 * x2)
    return SamplingPlan(n=n, c=c, t_h=x1, np0=n * spec.p0, method="Norm_N",
                        iterations=iterations, converged=converged,
                        applicability=_applicability(n, spec.p0, spec.p1),
                        n_real=x2)


def solve_norm_iterative(spec):
    """Unit-step normal method (Norm_I).

    Raises NoConvergenceError when no integer n brings the two limits
    within epsilon; the error carries the best gap achieved.  The gap is
    strictly decreasing in n, so the scan exits as soon as it passes
    -epsilon instead of running to max_n.
    """
    z0, z1 = spec.z_pair()
    eps = spec.eps_for("Norm_I")
    status, n, upper, lower, best = _backend.norm_iter_scan(
        spec.p0, spec.p1, z0, z1, eps, spec.max_n)
    if status != 0:
        reason = ("gap fell below -epsilon at n=%d; no larger n can satisfy "
                  "the tolerance" % n) if status == 1 else "max_n reached"
        raise NoConvergenceError(
            "norm_i did not converge for (%g, %g) at eps=%g: %s"
            % (spec.p0, spec.p1, eps, reason),
            best_gap=best, iterations=n)
    t_h = (upper + lower) / 2.0
    c = _round_half_up(n * t_h)
    return SamplingPlan(n=n, c=c, t_h=t_h, np0=n * spec.p0, method="Norm_I",
                        iterations=n, converged=True,
                        applicability=_applicability(n, spec.p0, spec.p1))


def _solve_discrete(spec, method):
    use_poisson = method == "Poiss"
    eps = spec.eps_for(method)
    if spec.p0 == 0.0:
        ok, n, m, c = _backend.zero_scan(use_poisson, spec.p1,
                                         spec.beta_tail, spec.max_n)
        if not ok:
            raise NoConvergenceError(
                "%s scan reached max_n=%d for (0, %g)" % (method, spec.max_n, spec.p1),
                iterations=n)
        t_h = m / (2.0 * n)
    else:
        ok, n, first_beyond_upper, first_beyond_lower = _backend.discrete_scan(
            use_poisson, spec.p0, spec.p1, spec.alpha_tail / 2.0,
            spec.beta_tail / 2.0, eps, spec.max_n)
        if not ok:
            raise NoConvergenceError(
                "%s scan reached max_n=%d for (%g, %g) at eps=%g"
                % (method, spec.max_n, spec.p0, spec.p1, eps),
                iterations=n)
        t_h = (first_beyond_upper + first_beyond_lower) / (2.0 * n)
        c = _round_half_up((first_beyond_upper + first_beyond_lower) / 2.0)
    return SamplingPlan(n=n, c=c, t_h=t_h, np0=n * spec.p0, method=method,
                        iterations=n, converged=True,
                        applicability=_applicability(n, spec.p0, spec.p1))


def solve_bin(spec):
    """Exact-binomial plan search (method Bin)."""
    return _solve_discrete(spec, "Bin")


def solve_poiss(spec):
    """Poisson-approximation plan search (method Poiss).

    Intended for p < 0.1; outside that regime the plan is still returned
    with its p_lt_0_1 flag cleared (a warning, not an error).
    """
    return _solve_discrete(spec, "Poiss")


_SOLVERS = {
    "Bin": solve_bin,
    "Poiss": solve_poiss,
    "Norm_N": solve_norm_newton,
    "Norm_I": solve_norm_iterative,
}


def solve(spec, method):
    """Dispatch to one of the four methods by label."""
    try:
        fn = _SOLVERS[method]
    except KeyError:
        raise DomainError("unknown method %r; expected one of %s"
                          % (method, ", ".join(METHODS))) from None
    return fn(spec)
