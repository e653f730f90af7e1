"""Gauss hypergeometric function on the real axis, with its helpers.

``hyp2f1`` sums the power series directly for small arguments and applies
the Pfaff transformation ``t -> t/(t-1)`` for larger negative ones, so the
series always runs at a geometric rate. ``hyp2f1_quadrature`` evaluates the
Euler integral representation with adaptive Gauss-Kronrod quadrature and is
kept as an independent cross-check of the series path.
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError, NoConvergenceError

MAX_TERMS = 100_000
SERIES_RTOL = 1e-16
SERIES_ATOL = 1e-300
# Below this argument the direct series is used; above, the Pfaff transform.
PFAFF_SWITCH = -0.5

_EPS = 2.220446049250313e-16


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


@dataclass(frozen=True)
class Hyp2F1Params:
    a: float
    b: float
    c: float
    t: float

    def __post_init__(self):
        if _is_nonpositive_integer(self.c):
            raise DomainError(f"c={self.c} is a non-positive integer")
        if not self.t < 1:
            raise DomainError(f"argument t={self.t} must be < 1")
        if not all(math.isfinite(v) for v in (self.a, self.b, self.c, self.t)):
            raise DomainError("hypergeometric parameters must be finite")


class Method(str, enum.Enum):
    DIRECT_SERIES = "direct-series"
    PFAFF_SERIES = "pfaff-series"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class Hyp2F1Eval:
    value: float
    method: Method
    terms_used: int
    estimated_error: float


def pochhammer(x: float, n: int) -> float:
    """Rising factorial ``x (x+1) ... (x+n-1)``; ``(x)_0 = 1``."""
    if n < 0:
        raise DomainError(f"pochhammer order must be non-negative, got {n}")
    result = 1.0
    for i in range(n):
        result *= x + i
    return result


def gamma_fn(x: float) -> float:
    """Gamma function for positive real arguments."""
    if not x > 0:
        raise DomainError(f"gamma_fn is defined here only for x > 0, got {x}")
    return math.gamma(x)


def _series(a: float, b: float, c: float, z: float, max_terms: int):
    """Sum the hypergeometric series at ``z``.

    Returns ``(value, terms_used, estimated_error)``.
    """
    total = 1.0
    term = 1.0
    largest = 1.0
    n = 0
    ratio = 0.0
    while True:
        if n >= max_terms:
            raise NoConvergenceError(
                f"2F1({a}, {b}; {c}; z={z}) series did not converge "
                f"within {max_terms} terms"
            )
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        term *= ratio
        n += 1
        if abs(term) < max(SERIES_RTOL * abs(total), SERIES_ATOL):
            break
        total += term
        if abs(total) > largest:
            largest = abs(total)
    # Tail of a series whose term ratio tends to |z| from below.
    r = min(max(abs(z), abs(ratio)), 1.0 - 1e-12)
    tail = abs(term) / (1.0 - r)
    rounding = n * _EPS * largest
    return total, n, tail + rounding


def _predicted_terms(z: float) -> float:
    if z == 0:
        return 1.0
    if abs(z) >= 1:
        return math.inf
    return math.log(1e-17) / math.log(abs(z))


def hyp2f1(p: Hyp2F1Params, max_terms: int = MAX_TERMS) -> Hyp2F1Eval:
    """Evaluate 2F1(a, b; c; t) for real ``t < 1``.

    The method field records which route produced the value. When the Pfaff
    series would need more than ``max_terms`` terms (arguments of order
    -1e3 and beyond) the integral representation is used instead, which
    requires ``c > a > 0``.

    Raises:
        NoConvergenceError: if the series misses its tolerance within the
            term budget and no fallback applies.
    """
    a, b, c, t = p.a, p.b, p.c, p.t
    if t == 0:
        return Hyp2F1Eval(1.0, Method.DIRECT_SERIES, 1, 0.0)
    if t >= PFAFF_SWITCH:
        value, n, err = _series(a, b, c, t, max_terms)
        return Hyp2F1Eval(value, Method.DIRECT_SERIES, n, err)

    z = t / (t - 1.0)
    if _predicted_terms(z) > max_terms and c > a > 0:
        value, err = _euler_integral(a, b, c, t)
        return Hyp2F1Eval(value, Method.QUADRATURE, 0, err)
    scale = (1.0 - t) ** (-b)
    value, n, err = _series(b, c - a, c, z, max_terms)
    return Hyp2F1Eval(scale * value, Method.PFAFF_SERIES, n, scale * err)


def hyp2f1_value(a: float, b: float, c: float, t: float) -> float:
    return hyp2f1(Hyp2F1Params(a, b, c, t)).value


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (non-negative half).
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


def _gk15(f: Callable[[float], float], lo: float, hi: float):
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fc = f(center)
    kronrod = fc * _WGK[7]
    gauss = fc * _WG[3]
    for j in range(7):
        dx = half * _XGK[j]
        fsum = f(center - dx) + f(center + dx)
        kronrod += _WGK[j] * fsum
        if j % 2 == 1:
            gauss += _WG[j // 2] * fsum
    return kronrod * half, abs((kronrod - gauss) * half)


def adaptive_gk(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    epsabs: float = 1e-15,
    epsrel: float = 1e-13,
    limit: int = 4000,
):
    """Globally adaptive Gauss-Kronrod quadrature of ``f`` over ``[lo, hi]``.

    The interval with the largest error estimate is bisected until the summed
    estimate falls below ``max(epsabs, epsrel * |result|)``. Returns
    ``(result, error_estimate)``.
    """
    value, err = _gk15(f, lo, hi)
    heap = [(-err, lo, hi, value)]
    total, total_err = value, err
    while total_err > max(epsabs, epsrel * abs(total)):
        if len(heap) >= limit:
            raise NoConvergenceError(
                f"adaptive quadrature exceeded {limit} subintervals "
                f"(error estimate {total_err:.3g})"
            )
        neg_err, a, b, v = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        if not a < mid < b:
            # Interval at floating-point resolution; accept what we have.
            heapq.heappush(heap, (0.0, a, b, v))
            break
        v1, e1 = _gk15(f, a, mid)
        v2, e2 = _gk15(f, mid, b)
        heapq.heappush(heap, (-e1, a, mid, v1))
        heapq.heappush(heap, (-e2, mid, b, v2))
        # Re-sum rather than update incrementally to avoid drift.
        total = math.fsum(item[3] for item in heap)
        total_err = math.fsum(-item[0] for item in heap)
    return total, total_err


def _euler_integral(a: float, b: float, c: float, t: float):
    """Normalised Euler integral, with both endpoint singularities removed.

    On ``[0, 1/2]`` substitute ``s = u**(1/a)`` (``s = u**2`` for a = 1/2),
    on ``[1/2, 1]`` substitute ``1 - s = w**(1/(c-a))``; each absorbs the
    corresponding power-law factor of the integrand.
    """
    d = c - a

    def left(u: float) -> float:
        s = u ** (1.0 / a)
        return (1.0 - s) ** (d - 1.0) * (1.0 - t * s) ** (-b) / a

    def right(w: float) -> float:
        s = 1.0 - w ** (1.0 / d)
        return s ** (a - 1.0) * (1.0 - t * s) ** (-b) / d

    v1, e1 = adaptive_gk(left, 0.0, 0.5**a)
    v2, e2 = adaptive_gk(right, 0.0, 0.5**d)
    norm = gamma_fn(c) / (gamma_fn(d) * gamma_fn(a))
    return norm * (v1 + v2), norm * (e1 + e2)


def hyp2f1_quadrature(p: Hyp2F1Params) -> float:
    """2F1 via the Euler integral; requires ``c > a > 0``."""
    if not p.a > 0:
        raise DomainError(f"quadrature representation needs a > 0, got a={p.a}")
    if not p.c > p.a:
        raise DomainError(f"quadrature representation needs c > a, got c={p.c}, a={p.a}")
    return _euler_integral(p.a, p.b, p.c, p.t)[0]
