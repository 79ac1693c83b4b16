"""Exact and Monte Carlo validation of sampling plans.

The exact side evaluates binomial tails directly; the Monte Carlo side
simulates whole lots of Bernoulli outcomes from a counter-based generator
(Philox), so per-rep draws occupy fixed positions in the key stream and the
result is bit-identical however the work is chunked.
"""

import math
import statistics
import time
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .plan_solvers import solve
from .stat_kernels import binom_cdf

#: z for the reported 99% confidence half-width.
_Z99 = 2.5758293035489004

#: rows of uniforms drawn per chunk (bounds peak memory, never the result)
_CHUNK_DRAWS = 4_000_000


@dataclass(frozen=True)
class OcCurve:
    n: int
    c: int
    points: tuple  # ((p, accept_prob), ...)


@dataclass(frozen=True)
class ErrorEstimate:
    alpha_hat: float
    beta_hat: float
    mc_alpha: tuple | None = None  # (rate, half_width)
    mc_beta: tuple | None = None
    seed: int | None = None


def accept_probability(n, c, p):
    """P(accept) = P(X <= c - 1) for X ~ Binomial(n, p)."""
    return binom_cdf(c - 1, n, p)


def oc_curve(plan, grid):
    """Operating-characteristic curve of a converged plan on a rate grid."""
    if not plan.converged:
        raise DomainError("OC curve requires a converged plan")
    pts = tuple((float(p), accept_probability(plan.n, plan.c, float(p)))
                for p in grid)
    return OcCurve(n=plan.n, c=plan.c, points=pts)


def realized_errors(plan, p0, p1, mc=None):
    """Exact producer/consumer risks of a plan; optional MC cross-check.

    alpha_hat = P(reject | p0) and beta_hat = P(accept | p1) under the
    accept rule X <= c - 1.  Pass mc=(reps, seed) to attach Monte Carlo
    estimates.
    """
    a = 1.0 - accept_probability(plan.n, plan.c, p0)
    b = accept_probability(plan.n, plan.c, p1)
    mc_a = mc_b = None
    seed = None
    if mc is not None:
        reps, seed = mc
        rate0, hw0 = monte_carlo_accept(plan, p0, reps, seed)
        rate1, hw1 = monte_carlo_accept(plan, p1, reps, seed)
        mc_a = (1.0 - rate0, hw0)
        mc_b = (rate1, hw1)
    return ErrorEstimate(alpha_hat=a, beta_hat=b, mc_alpha=mc_a, mc_beta=mc_b,
                         seed=seed)


def _wilson_half_width(k, reps):
    """Half-width of the 99% Wilson interval; stays positive at rate 0 or 1."""
    z2 = _Z99 * _Z99
    phat = k / reps
    denom = 1.0 + z2 / reps
    half = (_Z99 / denom) * math.sqrt(phat * (1.0 - phat) / reps
                                      + z2 / (4.0 * reps * reps))
    return half


def monte_carlo_accept(plan, p_true, reps, seed):
    """Simulate reps lots of n Bernoulli(p_true) outcomes.

    Returns (acceptance rate, 99% CI half-width).  Rep i consumes draws
    [i*n, (i+1)*n) of the Philox stream keyed by the seed, so the output
    does not depend on chunking and repeats exactly for the same seed.
    """
    if reps < 100:
        raise DomainError("reps must be >= 100 for a usable estimate")
    if not (0.0 <= p_true <= 1.0):
        raise DomainError("p_true must be in [0, 1]")
    n, c = plan.n, plan.c
    gen = np.random.Generator(np.random.Philox(key=seed))
    rows_per_chunk = max(1, _CHUNK_DRAWS // n)
    accepted = 0
    done = 0
    while done < reps:
        rows = min(rows_per_chunk, reps - done)
        u = gen.random((rows, n))
        fails = np.count_nonzero(u < p_true, axis=1)
        accepted += int(np.count_nonzero(fails <= c - 1))
        done += rows
    rate = accepted / reps
    return rate, _wilson_half_width(accepted, reps)


def benchmark_solver(method, spec, repeats=5):
    """Median wall-clock time plus the solver's own iteration count.

    Absolute timings are host-specific; only iteration counts and relative
    ordering are meaningful.
    """
    if repeats < 1:
        raise DomainError("repeats must be >= 1")
    times = []
    plan = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        plan = solve(spec, method)
        times.append(time.perf_counter() - t0)
    spread = (max(times) - min(times)) if len(times) > 1 else 0.0
    return {
        "method": method,
        "median_s": statistics.median(times),
        "spread_s": spread,
        "iterations": plan.iterations,
        "n": plan.n,
        "converged": plan.converged,
    }
