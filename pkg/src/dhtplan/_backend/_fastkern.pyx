# cython: language_level=3
"""Compiled twin of ``pure.py``.

Same operations in the same order as the pure-Python kernels, so both
backends produce bit-identical results.  Do not enable -ffast-math or
reorder the arithmetic.
"""

from libc.math cimport sqrt, log, exp, log1p, pow as cpow, INFINITY, sin, M_PI


cdef double _L0 = 0.99999999999980993
cdef double[8] _LREST = [
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
]


cdef double _lgamma(double x):
    cdef double a, t
    cdef int i
    if x < 0.5:
        return log(M_PI / sin(M_PI * x)) - _lgamma(1.0 - x)
    x -= 1.0
    a = _L0
    t = x + 7.5
    for i in range(1, 9):
        a += _LREST[i - 1] / (x + i)
    return 0.9189385332046727 + (x + 0.5) * log(t) - t + log(a)


def lgamma(double x):
    return _lgamma(x)


cdef double _binom_cdf(long c, long n, double p):
    cdef double q, t0, total, comp, term, ratio, y, s
    cdef double lp, lq, lgn, lsum, lt, tmp
    cdef long k
    if c < 0:
        return 0.0
    if c >= n:
        return 1.0
    if p <= 0.0:
        return 1.0
    if p >= 1.0:
        return 0.0
    q = 1.0 - p
    t0 = cpow(q, <double> n)
    if t0 > 0.0:
        total = t0
        comp = 0.0
        term = t0
        ratio = p / q
        for k in range(c):
            term = term * ((n - k) / (k + 1.0)) * ratio
            y = term - comp
            s = total + y
            comp = (s - total) - y
            total = s
        if total > 1.0:
            total = 1.0
        return total
    lp = log(p)
    lq = log(q)
    lgn = _lgamma(n + 1.0)
    lsum = -INFINITY
    for k in range(c + 1):
        lt = lgn - _lgamma(k + 1.0) - _lgamma(n - k + 1.0) + k * lp + (n - k) * lq
        if lt > lsum:
            tmp = lsum
            lsum = lt
            lt = tmp
        if lt != -INFINITY:
            lsum += log1p(exp(lt - lsum))
    total = exp(lsum)
    if total > 1.0:
        total = 1.0
    return total


def binom_cdf(c, n, double p):
    return _binom_cdf(c, n, p)


cdef double _poisson_cdf(long c, double lam):
    cdef double term, total, comp, y, s, llam, lsum, lt, tmp
    cdef long k
    if c < 0:
        return 0.0
    if lam <= 0.0:
        return 1.0
    if lam <= 700.0:
        term = exp(-lam)
        total = term
        comp = 0.0
        for k in range(c):
            term = term * (lam / (k + 1.0))
            y = term - comp
            s = total + y
            comp = (s - total) - y
            total = s
        if total > 1.0:
            total = 1.0
        return total
    llam = log(lam)
    lsum = -INFINITY
    for k in range(c + 1):
        lt = -lam + k * llam - _lgamma(k + 1.0)
        if lt > lsum:
            tmp = lsum
            lsum = lt
            lt = tmp
        if lt != -INFINITY:
            lsum += log1p(exp(lt - lsum))
    total = exp(lsum)
    if total > 1.0:
        total = 1.0
    return total


def poisson_cdf(c, double lam):
    return _poisson_cdf(c, lam)


cdef long _binom_quantile_ge(long n, double p, double target):
    cdef long k = 0
    while k < n and _binom_cdf(k, n, p) < target:
        k += 1
    return k


def binom_quantile_ge(n, double p, double target):
    return _binom_quantile_ge(n, p, target)


cdef long _binom_quantile_le(long n, double p, double tail):
    cdef long k = 0
    if _binom_cdf(0, n, p) > tail:
        return -1
    while k < n and _binom_cdf(k + 1, n, p) <= tail:
        k += 1
    return k


def binom_quantile_le(n, double p, double tail):
    return _binom_quantile_le(n, p, tail)


cdef long _poisson_quantile_ge(double lam, double target, long cap) except? -2:
    cdef long k = 0
    while k <= cap:
        if _poisson_cdf(k, lam) >= target:
            return k
        k += 1
    raise RuntimeError("poisson quantile scan exceeded cap %d at lambda=%g" % (cap, lam))


def poisson_quantile_ge(double lam, double target, cap):
    return _poisson_quantile_ge(lam, target, cap)


cdef long _poisson_quantile_le(double lam, double tail, long cap):
    cdef long k = 0
    if _poisson_cdf(0, lam) > tail:
        return -1
    while k <= cap and _poisson_cdf(k + 1, lam) <= tail:
        k += 1
    return k


def poisson_quantile_le(double lam, double tail, cap):
    return _poisson_quantile_le(lam, tail, cap)


cdef long _poisson_cap(double lam):
    return <long> (lam + 20.0 * sqrt(lam) + 50.0)


def discrete_scan(use_poisson, double p0, double p1, double a_half,
                  double b_half, double eps, max_n):
    cdef bint pois = bool(use_poisson)
    cdef long nmax = max_n
    cdef long n, lq, L1, l1, cap0, cap1
    cdef double lam0, lam1, diff
    for n in range(1, nmax + 1):
        if pois:
            lam1 = n * p1
            cap1 = _poisson_cap(lam1)
            lq = _poisson_quantile_le(lam1, b_half, cap1)
            if lq < 0:
                continue
            lam0 = n * p0
            cap0 = _poisson_cap(lam0)
            L1 = _poisson_quantile_ge(lam0, 1.0 - a_half, cap0) + 1
        else:
            lq = _binom_quantile_le(n, p1, b_half)
            if lq < 0:
                continue
            L1 = _binom_quantile_ge(n, p0, 1.0 - a_half) + 1
        l1 = lq + 1
        diff = L1 - l1
        if L1 <= l1 or (diff if diff >= 0 else -diff) <= eps * n:
            return True, n, L1, l1
    return False, nmax, 0, 0


def zero_scan(use_poisson, double p1, double b_tail, max_n):
    cdef bint pois = bool(use_poisson)
    cdef long nmax = max_n
    cdef long n, m, c, cap
    cdef double lam, risk
    for n in range(1, nmax + 1):
        if pois:
            lam = n * p1
            cap = _poisson_cap(lam)
            m = _poisson_quantile_ge(lam, 0.5, cap)
            c = <long> ((m / 2.0 + 0.5) // 1.0)
            risk = _poisson_cdf(c - 1, lam)
        else:
            m = _binom_quantile_ge(n, p1, 0.5)
            c = <long> ((m / 2.0 + 0.5) // 1.0)
            risk = _binom_cdf(c - 1, n, p1)
        if c >= 1 and risk <= b_tail:
            return True, n, m, c
    return False, nmax, 0, 0


def norm_iter_scan(double p0, double p1, double z0, double z1, double eps, max_n):
    cdef long nmax = max_n
    cdef double s0 = sqrt(p0 * (1.0 - p0))
    cdef double s1 = sqrt(p1 * (1.0 - p1))
    cdef double best = INFINITY
    cdef double rn, upper, lower, gap, a
    cdef long n
    for n in range(1, nmax + 1):
        rn = sqrt(<double> n)
        upper = p0 + z0 * s0 / rn
        lower = p1 - z1 * s1 / rn
        gap = upper - lower
        a = gap if gap >= 0.0 else -gap
        if a < best:
            best = a
        if a < eps:
            return 0, n, upper, lower, best
        if gap < -eps:
            return 1, n, upper, lower, best
    return 2, nmax, 0.0, 0.0, best
