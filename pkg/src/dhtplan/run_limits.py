"""Successive Failures Limit from renewal theory.

A run of r consecutive failures recurs on average every
    E[X] = (1 - p^r) / ((1 - p) p^r)
Bernoulli occurrences (success-runs renewal formula).  Inverting for r at a
given horizon E[X] gives the fixed-point map

    r = log((1 - p^r) / (E[X] (1 - p))) / log(p)

which contracts near the root; more than r consecutive failures rejects the
current inspection level.

Note: p here is the defect probability and the run counts consecutive
defects; the worked values (p=0.02, E[X]=1e6 -> r=4) only hold under that
reading.
"""

import math
from dataclasses import dataclass

from .errors import DomainError

#: Default recurrence horizon, in Bernoulli occurrences.
DEFAULT_EX = 1e6

_FP_TOL = 1e-9
_FP_MAXIT = 200


@dataclass(frozen=True)
class SflQuery:
    p: float
    ex: float = DEFAULT_EX

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise DomainError("defect probability must be in (0, 1)")
        if self.ex < 1.0:
            raise DomainError("recurrence horizon must be >= 1")


def sfl_r(query, ex=None):
    """Run-length limit for a defect rate.

    Accepts an SflQuery or a bare probability (with ex supplied separately).
    Returns (r_raw, r) where r = ceil(r_raw); a run strictly longer than r
    rejects the level.
    """
    if not isinstance(query, SflQuery):
        query = SflQuery(float(query), DEFAULT_EX if ex is None else float(ex))
    p, horizon = query.p, query.ex
    if horizon * (1.0 - p) <= 1.0:
        raise DomainError(
            "no run-length fixed point: need ex*(1-p) > 1, got %g" % (horizon * (1.0 - p),))
    r = 1.0
    for _ in range(_FP_MAXIT):
        nxt = math.log((1.0 - p ** r) / (horizon * (1.0 - p))) / math.log(p)
        if not math.isfinite(nxt) or nxt <= 0.0:
            raise DomainError("run-length fixed point left the domain (ex too small)")
        if abs(nxt - r) < _FP_TOL:
            return _snap(nxt), math.ceil(_snap(nxt))
        r = nxt
    return _snap(r), math.ceil(_snap(r))


def _snap(r, tol=1e-8):
    # integer fixed points are approached from above; without snapping,
    # ceil would overshoot them by one
    nearest = round(r)
    return float(nearest) if abs(r - nearest) < tol else r


def mean_recurrence(p, r):
    """Mean number of Bernoulli occurrences between completions of an r-run."""
    if not (0.0 < p < 1.0):
        raise DomainError("defect probability must be in (0, 1)")
    if r < 1:
        raise DomainError("run length must be >= 1")
    pr = p ** r
    return (1.0 - pr) / ((1.0 - p) * pr)
