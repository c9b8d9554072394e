"""Analytic moment-scaling exponent tau(q) of a weighted IFS.

tau(q) is the unique root in t of

    psi(q, t) = sum_i p_i^q * r_i^(-t) = 1.

Since every r_i lies in (0, 1), t -> psi(q, t) is strictly increasing, from 0
at t -> -inf to +inf at t -> +inf, so the root always exists and is unique.
The solver brackets it from t0 = q * sum_i p_i * (log p_i / log r_i), expands
the bracket geometrically, bisects log(psi) to width 1e-14 and finishes with
one Newton step (log(psi) is increasing and convex in t, so the step is safe).

The same value is the minimum over probability vectors w of

    (q * H(w, p) - H(w)) / chi(w),

attained uniquely at z(q)_i = p_i^q * r_i^(-tau(q)).  variational_tau_grid
minimizes the objective over all integer compositions w = k/n instead and is
the brute-force cross-check for the solver.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .exceptions import (
    DomainError,
    IntegrityError,
    RangeCapError,
    ResourceLimitError,
    ValidationError,
)
from .ifs import IFSModel, as_weights, entropy, cross_entropy, lyapunov

# Beyond this |q| the powers p_i^q are not reliably representable in doubles;
# callers should switch to the asymptote data.
Q_CAP_DEFAULT = 1e3

_BISECT_WIDTH = 1e-14
_KAPPA_REL_TOL = 1e-9
_COMPOSITION_GUARD = 100_000_000


def psi(model: IFSModel, q: float, t: float) -> float:
    """sum_i p_i^q r_i^(-t), evaluated in log space."""
    model.require_positive_probs()
    return float(math.exp(_log_psi(model.log_probs, model.log_ratios, q, t)))


def _log_psi(logp, logr, q, t):
    return float(logsumexp(q * logp - t * logr))


@dataclass(frozen=True)
class LqSolution:
    """One solve of the implicit equation: exponent, optimizer and slope."""

    q: float
    tau: float
    z: np.ndarray
    alpha: float


def tau(model: IFSModel, q: float, *, q_cap: float = Q_CAP_DEFAULT) -> LqSolution:
    """Solve psi(q, t) = 1 and return the full solution record.

    Raises RangeCapError for |q| > q_cap; at such q the asymptote lines
    q*kappa_min - s_min / q*kappa_max - s_max should be used instead.
    """
    model.require_positive_probs()
    if abs(q) > q_cap:
        raise RangeCapError(f"|q| = {abs(q)} exceeds cap {q_cap}")
    logp = model.log_probs
    logr = model.log_ratios
    # Plain-math inner loop: the solver sits inside other bisections
    # (spectrum, conjugates), so per-call overhead matters.
    lp = tuple(float(v) for v in logp)
    lr = tuple(float(v) for v in logr)

    def log_psi(t):
        vals = [q * a - t * b for a, b in zip(lp, lr)]
        top = max(vals)
        return top + math.log(sum(math.exp(v - top) for v in vals))

    t0 = q * float(model.p @ (logp / logr))
    width = 1.0
    lo, hi = t0 - width, t0 + width
    # log(psi) is increasing in t; expand until it straddles zero.
    for _ in range(200):
        if log_psi(lo) < 0.0 < log_psi(hi):
            break
        width *= 2.0
        lo, hi = t0 - width, t0 + width
    else:  # pragma: no cover - unreachable for valid models
        raise IntegrityError("failed to bracket the tau root")

    while hi - lo > _BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            break  # bracket is at machine resolution for this magnitude
        if log_psi(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)

    # One Newton step on F(t) = log psi(q, t); F'(t) = chi of the softmax.
    exponents = q * logp - t * logr
    m = logsumexp(exponents)
    weights = np.exp(exponents - m)
    fprime = float(-weights @ logr)
    t -= float(m) / fprime

    z = np.exp(q * logp - t * logr)
    # H(z, p)/chi(z) = (-z@logp)/(-z@logr); the negations cancel.
    alpha = float((z @ logp) / (z @ logr))
    return LqSolution(q=float(q), tau=float(t), z=z, alpha=alpha)


def tau_value(model: IFSModel, q: float, **kw) -> float:
    return tau(model, q, **kw).tau


def tau_prime(model: IFSModel, q: float, **kw) -> float:
    """tau'(q) = H(z(q), p) / chi(z(q)); decreasing in q unless all kappas tie."""
    return tau(model, q, **kw).alpha


# ----------------------------------------------------------------------
# Asymptotes.

@dataclass(frozen=True)
class AsymptoteData:
    """Slopes and intercepts of the affine asymptotes of tau.

    tau(q) ~ q*kappa_min - s_min as q -> +inf and q*kappa_max - s_max as
    q -> -inf, where s_min/s_max solve the similarity equation restricted
    to the letters attaining the extreme kappa.
    """

    kappa_min: float
    kappa_max: float
    s_min: float
    s_max: float
    z_plus_inf: np.ndarray
    z_minus_inf: np.ndarray


def similarity_dimension(ratios) -> float:
    """Root s of sum_i r_i^s = 1 for ratios in (0, 1).

    Solved with Brent's method; this path is independent of the tau solver
    and doubles as its cross-check (s = -tau(0) for the full alphabet).
    """
    r = np.asarray(ratios, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise ValidationError("similarity_dimension needs a 1-D ratio vector")
    if np.any(r <= 0.0) or np.any(r >= 1.0):
        raise ValidationError("ratios must lie strictly inside (0, 1)")
    if r.size == 1:
        return 0.0  # single ratio: r^s = 1 forces s = 0 exactly

    def g(s):
        return float(np.sum(r**s) - 1.0)

    hi = 1.0
    while g(hi) > 0.0:
        hi *= 2.0
    return float(brentq(g, 0.0, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200))


def asymptotes(model: IFSModel) -> AsymptoteData:
    """Classify extreme kappas (relative tolerance 1e-9) and solve both
    restricted similarity equations."""
    kappas = model.kappas
    kmin = float(kappas.min())
    kmax = float(kappas.max())
    tol_min = _KAPPA_REL_TOL * max(1.0, abs(kmin))
    tol_max = _KAPPA_REL_TOL * max(1.0, abs(kmax))
    min_class = kappas <= kmin + tol_min
    max_class = kappas >= kmax - tol_max

    s_min = similarity_dimension(model.ratios[min_class])
    s_max = similarity_dimension(model.ratios[max_class])

    z_plus = np.zeros(model.alphabet_size)
    z_plus[min_class] = model.ratios[min_class] ** s_min
    z_minus = np.zeros(model.alphabet_size)
    z_minus[max_class] = model.ratios[max_class] ** s_max
    return AsymptoteData(
        kappa_min=kmin,
        kappa_max=kmax,
        s_min=s_min,
        s_max=s_max,
        z_plus_inf=z_plus,
        z_minus_inf=z_minus,
    )


# ----------------------------------------------------------------------
# Variational formulation and the composition-grid oracle.

def variational_objective(model: IFSModel, q: float, w) -> float:
    """(q*H(w, p) - H(w)) / chi(w).

    w may have zero entries: the 0*log 0 terms vanish and chi(w) only sees
    the positive support.  Always >= tau(q), with equality exactly at z(q).
    """
    model.require_positive_probs()
    wv = as_weights(w)
    return (q * cross_entropy(wv, model.probs) - entropy(wv)) / lyapunov(wv, model)


def composition_count(n: int, m: int) -> int:
    return math.comb(n + m - 1, m - 1)


def compositions(n: int, m: int) -> np.ndarray:
    """All integer m-part compositions of n, lexicographic, shape (C, m)."""
    if m < 1 or n < 0:
        raise ValidationError("compositions: need m >= 1 and n >= 0")
    if composition_count(n, m) > _COMPOSITION_GUARD:
        raise ResourceLimitError(
            f"{composition_count(n, m)} compositions exceed the "
            f"{_COMPOSITION_GUARD} guard"
        )
    return _compositions_unchecked(n, m)


def _compositions_unchecked(n, m):
    if m == 1:
        return np.array([[n]], dtype=np.int64)
    if m == 2:
        k = np.arange(n + 1, dtype=np.int64)
        return np.stack([k, n - k], axis=1)
    blocks = []
    for k in range(n + 1):
        rest = _compositions_unchecked(n - k, m - 1)
        first = np.full((rest.shape[0], 1), k, dtype=np.int64)
        blocks.append(np.hstack([first, rest]))
    return np.vstack(blocks)


class CompositionGrid:
    """Rational grid w = k/n on the simplex with precomputed functionals.

    Precomputing H(w, p), H(w) and chi(w) once makes sweeping many q cheap:
    the objective is (q*Hwp - Hw)/chi per row.  Rows are in lexicographic
    order of the counts, so ties in a minimum resolve to the smallest
    composition (np.argmin picks the first occurrence).
    """

    def __init__(self, model: IFSModel, n: int):
        model.require_positive_probs()
        if n < 1:
            raise ValidationError("grid denominator must be >= 1")
        self.model = model
        self.n = int(n)
        self.counts = compositions(n, model.alphabet_size)
        w = self.counts / float(n)
        self.weights = w
        logp = model.log_probs
        logr = model.log_ratios
        self.cross = -(w @ logp)
        with np.errstate(divide="ignore", invalid="ignore"):
            wlw = np.where(w > 0.0, w * np.log(np.where(w > 0.0, w, 1.0)), 0.0)
        self.ent = -np.sum(wlw, axis=1)
        self.chi = -(w @ logr)

    def objective(self, q: float) -> np.ndarray:
        return (q * self.cross - self.ent) / self.chi

    def tau_minimum(self, q: float):
        vals = self.objective(q)
        idx = int(np.argmin(vals))
        return float(vals[idx]), self.weights[idx]

    def constrained_maximum(self, alpha: float, eps: float):
        """Max of H(w)/chi(w) over rows with |H(w,p)/chi(w) - alpha| <= eps.

        Returns (value, w) or None when no composition is feasible.
        """
        if eps <= 0.0:
            raise ValidationError("feasibility band eps must be positive")
        u = self.cross / self.chi
        feasible = np.abs(u - alpha) <= eps
        if not np.any(feasible):
            return None
        vals = np.where(feasible, self.ent / self.chi, -np.inf)
        idx = int(np.argmax(vals))
        return float(vals[idx]), self.weights[idx]


@dataclass(frozen=True)
class GridMinimum:
    value: float
    w: np.ndarray


def variational_tau_grid(model: IFSModel, q: float, n: int) -> GridMinimum:
    """Exact minimum of the variational objective over compositions k/n.

    Always >= tau(q); the gap vanishes as n grows (the optimizer z(q) is
    interior and the objective is smooth, so the gap is O(1/n^2) once the
    grid straddles it).
    """
    value, w = CompositionGrid(model, n).tau_minimum(q)
    return GridMinimum(value=value, w=w)
