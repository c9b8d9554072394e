"""Numeric concave duality for functions of one real variable.

Everything here treats the target g as a black-box evaluator that is assumed
concave; the routines detect gross violations of concavity and raise
IntegrityError rather than returning garbage.  The conjugate convention is

    g*(alpha) = inf_q (q * alpha - g(q)),

which is finite exactly for alpha between the asymptotic slopes of g.
Outside that interval the conjugate is the tagged NEG_INF value below, never
a float sentinel: semantically it marks an empty level set.
"""

import math
from dataclasses import dataclass
from typing import Callable

from .exceptions import DomainError, IntegrityError


class NegativeInfinity:
    """Tagged minus-infinity marker (empty level set)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NEG_INF"

    def __reduce__(self):
        return (NegativeInfinity, ())


NEG_INF = NegativeInfinity()


def is_neg_inf(x) -> bool:
    return x is NEG_INF


_DEFAULT_STEP = 1e-5
_BOUNDARY_PROBES = (10.0, 20.0, 40.0, 80.0, 160.0, 320.0, 640.0)
_BOUNDARY_STABLE = 1e-7


@dataclass(frozen=True)
class ConcaveFunction:
    """A concave evaluator with an optional domain and known slope limits.

    slope_limits is (slope at +inf, slope at -inf); for a concave function
    the first is the smaller.  When omitted it is estimated from probe
    chords where needed.
    """

    fn: Callable[[float], float]
    domain: tuple = (-math.inf, math.inf)
    slope_limits: tuple | None = None

    def __call__(self, q: float) -> float:
        lo, hi = self.domain
        if not (lo <= q <= hi):
            raise DomainError(f"q = {q} outside domain [{lo}, {hi}]")
        return float(self.fn(q))

    @property
    def bounded(self) -> bool:
        lo, hi = self.domain
        return math.isfinite(lo) and math.isfinite(hi)


@dataclass(frozen=True)
class SubdifferentialInterval:
    """Outer estimate [lower, upper] of [d+g(q), d-g(q)]."""

    q: float
    lower: float
    upper: float


def subdifferential(g: ConcaveFunction, q: float, h: float = _DEFAULT_STEP):
    """One-sided difference quotients bracketing the subdifferential at q.

    For concave g the forward quotient underestimates the right derivative
    and the backward quotient overestimates the left one, so the returned
    interval contains the true subdifferential.  A half-step evaluation
    must produce a nested interval; if not, the evaluator is not concave.
    """
    if h <= 0.0:
        raise DomainError("step h must be positive")
    lo, hi = g.domain
    if not (lo < q - h and q + h < hi):
        raise DomainError("q is too close to the domain boundary for step h")
    gq = g(q)

    def quotients(step):
        fwd = (g(q + step) - gq) / step
        bwd = (gq - g(q - step)) / step
        return fwd, bwd

    lower, upper = quotients(h)
    lower2, upper2 = quotients(h / 2.0)
    slack = 1e-7 * max(1.0, abs(lower), abs(upper))
    if lower2 < lower - slack or upper2 > upper + slack:
        raise IntegrityError("halved-step interval not nested: g not concave")
    if lower > upper + slack:
        raise IntegrityError("forward quotient exceeds backward: g not concave")
    return SubdifferentialInterval(q=q, lower=lower, upper=upper)


def asymptotic_slopes(g: ConcaveFunction, probes=(10.0, 20.0, 40.0, 80.0)):
    """Estimate (slope at +inf, slope at -inf) from chord slopes.

    Chords (g(q2)-g(q1))/(q2-q1) converge to the asymptotic slope much
    faster than g(q)/q; the last two chords must agree to 1e-6 or the
    probes are declared divergent.
    """
    probes = tuple(float(p) for p in probes)
    if len(probes) < 3:
        raise DomainError("need at least three probe points")

    def chase(signed):
        xs = [signed * p for p in probes]
        chords = [
            (g(x2) - g(x1)) / (x2 - x1) for x1, x2 in zip(xs, xs[1:])
        ]
        if abs(chords[-1] - chords[-2]) > 1e-6 * max(1.0, abs(chords[-1])):
            raise DomainError("asymptotic slope probes did not stabilize")
        return chords[-1]

    return chase(1.0), chase(-1.0)


def _slope(g, q, h):
    return (g(q + h) - g(q - h)) / (2.0 * h)


def _bisect_on_slope(g, alpha, qlo, qhi, h):
    # slope is nonincreasing in q for concave g; keep slope(qlo) >= alpha >= slope(qhi)
    for _ in range(200):
        if qhi - qlo < 1e-11 * max(1.0, abs(qlo), abs(qhi)):
            break
        mid = 0.5 * (qlo + qhi)
        if _slope(g, mid, h) > alpha:
            qlo = mid
        else:
            qhi = mid
    q = 0.5 * (qlo + qhi)
    return q * alpha - g(q)


def _boundary_limit(g, alpha, sign):
    """lim q*alpha - g(q) as q -> sign*inf, by doubling probes.

    Accepted once successive values differ by less than 1e-7; the exact
    intercept from restricted similarity equations is preferred when the
    caller has it (the spectrum module does), this is the generic fallback.
    """
    lo, hi = g.domain
    values = []
    for p in _BOUNDARY_PROBES:
        q = sign * p
        if not (lo <= q <= hi):
            break
        values.append(q * alpha - g(q))
        if len(values) >= 2 and abs(values[-1] - values[-2]) < _BOUNDARY_STABLE:
            return values[-1]
    if len(values) >= 2 and abs(values[-1] - values[-2]) < 1e-5:
        return values[-1]
    raise IntegrityError("boundary conjugate value did not stabilize")


def concave_conjugate(g: ConcaveFunction, alpha: float, h: float = _DEFAULT_STEP):
    """Numeric g*(alpha) = inf_q (q*alpha - g(q)).

    Interior alpha: locate q* with alpha in the subdifferential by bisection
    on the (monotone) slope map and evaluate there.  alpha equal to an
    asymptotic slope: evaluate along doubling probes until stable.  Outside
    the slope range: NEG_INF.
    """
    if g.bounded:
        return _conjugate_on_bounded(g, alpha, h)

    limits = g.slope_limits
    if limits is None:
        limits = asymptotic_slopes(g)
    a_plus, a_minus = float(limits[0]), float(limits[1])
    if a_plus > a_minus:
        raise IntegrityError("slope limits out of order: g not concave")

    tol_lo = 1e-9 * max(1.0, abs(a_plus))
    tol_hi = 1e-9 * max(1.0, abs(a_minus))
    if math.isfinite(a_plus) and math.isfinite(a_minus) and a_minus - a_plus <= max(tol_lo, tol_hi):
        # Degenerate slope range: g is affine, conjugate is finite at one point.
        if abs(alpha - a_plus) <= max(tol_lo, tol_hi):
            return -g(0.0)
        return NEG_INF
    if math.isfinite(a_plus) and alpha < a_plus - tol_lo:
        return NEG_INF
    if math.isfinite(a_minus) and alpha > a_minus + tol_hi:
        return NEG_INF
    if math.isfinite(a_plus) and abs(alpha - a_plus) <= tol_lo:
        return _boundary_limit(g, alpha, +1.0)
    if math.isfinite(a_minus) and abs(alpha - a_minus) <= tol_hi:
        return _boundary_limit(g, alpha, -1.0)

    # Interior: expand a bracket on the slope map.
    qlo, qhi = -1.0, 1.0
    for _ in range(80):
        if _slope(g, qlo, h) > alpha:
            break
        qlo *= 2.0
    else:
        raise IntegrityError("slope bracket expansion failed on the left")
    for _ in range(80):
        if _slope(g, qhi, h) < alpha:
            break
        qhi *= 2.0
    else:
        raise IntegrityError("slope bracket expansion failed on the right")
    if _slope(g, qlo, h) < _slope(g, qhi, h) - 1e-6:
        raise IntegrityError("slope map increasing: g not concave")
    return _bisect_on_slope(g, alpha, qlo, qhi, h)


def _conjugate_on_bounded(g, alpha, h):
    """Minimize q*alpha - g(q) over a bounded domain."""
    lo, hi = g.domain
    width = hi - lo
    if width <= 0.0:
        raise DomainError("empty domain")
    inset = max(1e-12, 1e-9 * width)
    qlo, qhi = lo + inset, hi - inset
    step = min(h, 0.25 * (qhi - qlo))
    if step <= 0.0:
        q = 0.5 * (lo + hi)
        return q * alpha - g(q)
    slope_lo = _slope(g, qlo + step, step)
    slope_hi = _slope(g, qhi - step, step)
    if slope_lo < alpha:
        # objective increasing on the whole domain: infimum at the left edge
        return qlo * alpha - g(qlo)
    if slope_hi > alpha:
        return qhi * alpha - g(qhi)
    return _bisect_on_slope(g, alpha, qlo + step, qhi - step, step)
