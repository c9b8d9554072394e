"""Dimension spectrum f(alpha) of a weighted IFS.

f is the concave conjugate of tau: for alpha strictly between the extreme
per-letter dimensions kappa_min and kappa_max it equals q*alpha - tau(q) at
the unique q with tau'(q) = alpha; at the endpoints it equals the restricted
similarity dimensions s_min/s_max taken directly from the asymptote data
(exact, never a numeric limit); outside it is the tagged NEG_INF.

The parametric curve (alpha(q), f) is computed two ways per sample, as
q*alpha(q) - tau(q) and as H(z(q))/chi(z(q)); the two must agree to 1e-9 or
the sweep aborts with IntegrityError.
"""

from dataclasses import dataclass

import numpy as np

from .duality import NEG_INF
from .exceptions import IntegrityError, ValidationError
from .ifs import IFSModel
from .lq import (
    AsymptoteData,
    CompositionGrid,
    Q_CAP_DEFAULT,
    asymptotes,
    similarity_dimension,
    tau,
)

_ENDPOINT_REL_TOL = 1e-9
_ALPHA_BISECT_TOL = 1e-12


def dim_measure(model: IFSModel) -> float:
    """H(p)/chi(p): the almost-sure local dimension of the measure."""
    model.require_positive_probs()
    p = model.p
    return float(np.sum(p * np.log(p)) / (p @ model.log_ratios))


def dim_attractor(model: IFSModel) -> float:
    """Dimension of the attractor, as -tau(0).

    Cross-checked against the independent similarity-dimension root of
    sum r_i^s = 1; disagreement beyond 1e-10 aborts.
    """
    value = -tau(model, 0.0).tau
    s = similarity_dimension(model.ratios)
    if abs(value - s) > 1e-10:
        raise IntegrityError(
            f"-tau(0) = {value!r} disagrees with similarity dimension {s!r}"
        )
    return value


def _endpoint_tol(value: float) -> float:
    return _ENDPOINT_REL_TOL * max(1.0, abs(value))


def f_alpha(model: IFSModel, alpha: float, *, q_cap: float = Q_CAP_DEFAULT,
            asym: AsymptoteData | None = None):
    """Spectrum value at alpha, or NEG_INF outside [kappa_min, kappa_max]."""
    model.require_positive_probs()
    if asym is None:
        asym = asymptotes(model)
    kmin, kmax = asym.kappa_min, asym.kappa_max

    if kmax - kmin <= _endpoint_tol(kmax):
        # Degenerate spectrum: a single point at the common kappa.
        if abs(alpha - kmin) <= _endpoint_tol(kmin):
            return dim_attractor(model)
        return NEG_INF
    if alpha < kmin - _endpoint_tol(kmin) or alpha > kmax + _endpoint_tol(kmax):
        return NEG_INF
    if abs(alpha - kmin) <= _endpoint_tol(kmin):
        return asym.s_min
    if abs(alpha - kmax) <= _endpoint_tol(kmax):
        return asym.s_max

    # Interior: tau' is strictly decreasing, bisect tau'(q) = alpha.
    qlo, qhi = -q_cap, q_cap
    sol_lo = tau(model, qlo, q_cap=q_cap)
    sol_hi = tau(model, qhi, q_cap=q_cap)
    if alpha >= sol_lo.alpha:
        # Unreachable sliver between tau'(-q_cap) and kappa_max.
        return asym.s_max
    if alpha <= sol_hi.alpha:
        return asym.s_min
    q = 0.0
    for _ in range(200):
        q = 0.5 * (qlo + qhi)
        sol = tau(model, q, q_cap=q_cap)
        if abs(sol.alpha - alpha) <= _ALPHA_BISECT_TOL:
            break
        if sol.alpha > alpha:
            qlo = q
        else:
            qhi = q
        if qhi - qlo < 1e-13 * max(1.0, abs(qlo), abs(qhi)):
            break
    sol = tau(model, q, q_cap=q_cap)
    return q * alpha - sol.tau


@dataclass(frozen=True)
class CurveSample:
    q: float
    alpha: float
    f: float


@dataclass(frozen=True)
class SpectrumCurve:
    """Parametric spectrum samples with endpoint and dimension metadata."""

    samples: tuple
    endpoints: tuple  # ((kappa_min, s_min), (kappa_max, s_max))
    dim_measure: float
    dim_attractor: float


def spectrum_curve(model: IFSModel, q_grid, *, q_cap: float = Q_CAP_DEFAULT) -> SpectrumCurve:
    """Sweep the q grid and return the parametric (q, alpha, f) samples.

    Each f is computed both as q*alpha - tau(q) and as H(z)/chi(z); the two
    must agree to 1e-9 (duality identity along the optimizer path).
    """
    qs = np.asarray(list(q_grid), dtype=float)
    if qs.size == 0:
        raise ValidationError("q grid is empty")
    if np.any(np.diff(qs) <= 0.0):
        raise ValidationError("q grid must be strictly increasing")
    model.require_positive_probs()
    asym = asymptotes(model)

    samples = []
    for q in qs:
        sol = tau(model, float(q), q_cap=q_cap)
        f_dual = float(q) * sol.alpha - sol.tau
        ent = float(-(sol.z * np.where(sol.z > 0.0, np.log(sol.z), 0.0)).sum())
        chi = float(-(sol.z @ model.log_ratios))
        f_param = ent / chi
        if abs(f_dual - f_param) > 1e-9:
            raise IntegrityError(
                f"duality identity violated at q = {q}: "
                f"{f_dual!r} vs {f_param!r}"
            )
        samples.append(CurveSample(q=float(q), alpha=sol.alpha, f=f_dual))

    return SpectrumCurve(
        samples=tuple(samples),
        endpoints=((asym.kappa_min, asym.s_min), (asym.kappa_max, asym.s_max)),
        dim_measure=dim_measure(model),
        dim_attractor=dim_attractor(model),
    )


def constrained_variational_grid(model: IFSModel, alpha: float, n: int, eps: float):
    """Brute-force spectrum value on the composition grid.

    Maximizes H(w)/chi(w) over compositions w = k/n whose constraint value
    H(w,p)/chi(w) lies within eps of alpha; NEG_INF when no composition
    qualifies.  Converges to f_alpha as n grows and eps shrinks.
    """
    result = CompositionGrid(model, n).constrained_maximum(alpha, eps)
    if result is None:
        return NEG_INF
    return result[0]
