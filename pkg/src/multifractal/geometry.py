"""1-D geometric realization: separation certificate and exact ball measures.

The maps are x -> r_i*x + t_i.  The hull is the smallest invariant interval
[a, b], whose endpoints are the extreme map fixed points t_i/(1 - r_i).  All
spectra are functions of (r, p) alone; this module exists to validate them
against actual geometry: exact measures of balls, sampled local dimensions,
and the coarse counting estimator.

ball_measure descends the cylinder tree.  A cylinder interval disjoint from
the ball contributes nothing, one contained in it contributes its full word
probability, and a straddling one recurses.  Straddling cylinders shorter
than eta times the ball radius are abandoned and contribute a [0, p_word]
bracket, so the returned value carries a certified error at most half the
abandoned mass.  Queries centered at a sampled point should pass the word,
not the float: the descent then recomputes the center inside each nested
cylinder from the remaining letters, which keeps full precision at scales
far below the resolution of a double (e.g. 3^-100).
"""

import math
from dataclasses import dataclass

import numpy as np

from .duality import NEG_INF
from .exceptions import (
    DomainError,
    IntegrityError,
    SSCViolationError,
    ValidationError,
)
from .ifs import IFSModel
from .types_oracle import Section, enumerate_section, format_word

_DEFAULT_ETA = 1e-6


@dataclass(frozen=True)
class Geometric1D:
    """Model with translations plus its minimal invariant interval."""

    model: IFSModel
    hull: tuple

    @classmethod
    def from_model(cls, model: IFSModel) -> "Geometric1D":
        if model.translations is None:
            raise ValidationError("geometric realization needs translations")
        fixed = model.translations / (1.0 - model.ratios)
        a, b = float(fixed.min()), float(fixed.max())
        if b <= a:
            raise ValidationError("hull is degenerate: all fixed points equal")
        span = b - a
        images_lo = model.ratios * a + model.translations
        images_hi = model.ratios * b + model.translations
        if np.any(images_lo < a - 1e-9 * span) or np.any(images_hi > b + 1e-9 * span):
            raise IntegrityError("map image escapes the hull")
        return cls(model=model, hull=(a, b))

    @property
    def span(self) -> float:
        return self.hull[1] - self.hull[0]


def certify_ssc(geom: Geometric1D):
    """Verify the first-level hull images are pairwise separated.

    Returns (True, delta0) with delta0 the minimal gap; touching or
    overlapping images raise SSCViolationError naming the offending pair.
    """
    model = geom.model
    a, b = geom.hull
    lo = model.ratios * a + model.translations
    hi = model.ratios * b + model.translations
    order = np.argsort(lo, kind="stable")
    delta0 = math.inf
    for left, right in zip(order[:-1], order[1:]):
        gap = float(lo[right] - hi[left])
        if gap <= 0.0:
            raise SSCViolationError(
                f"hull images of letters {int(left)} and {int(right)} "
                f"{'overlap' if gap < 0 else 'touch'}",
                pair=(int(left), int(right)),
            )
        delta0 = min(delta0, gap)
    return True, delta0


def project(geom: Geometric1D, word):
    """Interval S_word(hull); its length is r_word * (b - a)."""
    letters = tuple(word)
    if not letters:
        raise DomainError("project needs a nonempty word")
    scale, shift = _compose(geom.model, letters)
    a, b = geom.hull
    return (scale * a + shift, scale * b + shift)


def _compose(model, letters, stop_scale=0.0):
    """Affine composition of the maps along a word, left to right."""
    scale, shift = 1.0, 0.0
    ratios = model.ratios
    trans = model.translations
    for letter in letters:
        shift += scale * trans[letter]
        scale *= ratios[letter]
        if scale <= stop_scale:
            break
    return scale, shift


def sample_point(geom: Geometric1D, sampler, depth: int, seed):
    """Draw one i.i.d. word under the sampler vector and return (x, word).

    The sampler need not equal the model probabilities; x is the midpoint
    of the depth-n cylinder.  A fresh generator is built from the seed, so
    equal seeds reproduce the word exactly.
    """
    if depth < 1:
        raise ValidationError("sampling depth must be >= 1")
    weights = np.asarray(sampler, dtype=float)
    m = geom.model.alphabet_size
    if weights.size != m:
        raise ValidationError("sampler length mismatch")
    rng = np.random.default_rng(seed)
    letters = tuple(int(i) for i in rng.choice(m, size=depth, p=weights))
    x = _point_from(geom, letters, 0)
    return x, letters


def sample_points(geom: Geometric1D, sampler, depth: int, count: int, seed):
    """Independent points, one generator per task seeded from (seed, index)."""
    return [
        sample_point(geom, sampler, depth, (seed, index))
        for index in range(count)
    ]


def _point_from(geom, letters, start):
    """Coordinate of the coded point, from the suffix letters[start:].

    Composition stops once the cylinder scale is below double resolution;
    the midpoint of the remaining cylinder stands in for the tail.
    """
    a, b = geom.hull
    scale, shift = _compose(geom.model, letters[start:], stop_scale=1e-18)
    return shift + scale * 0.5 * (a + b)


# ----------------------------------------------------------------------
# Exact ball measures.

def ball_measure(geom: Geometric1D, point, r: float, *, eta: float = _DEFAULT_ETA) -> float:
    """mu(B(point, r)): midpoint of the certified bracket."""
    lo, hi = ball_measure_bracket(geom, point, r, eta=eta)
    return 0.5 * (lo + hi)


def ball_measure_bracket(geom: Geometric1D, point, r: float, *, eta: float = _DEFAULT_ETA):
    """Lower and upper bounds on mu(B(point, r)).

    The gap is the total mass of straddling cylinders abandoned below the
    eta*r length cutoff; it is zero whenever the descent resolves exactly.
    point is either a float or a word (sequence of letters).
    """
    if r <= 0.0:
        raise DomainError("ball radius must be positive")
    if eta <= 0.0:
        raise DomainError("truncation parameter eta must be positive")
    min_len = eta * r
    if isinstance(point, (int, float, np.floating)):
        x = float(point)
        return _interval_bracket(geom, x - r, x + r, 1.0, 0.0, 1.0, min_len)
    letters = tuple(point)
    if not letters:
        raise DomainError("word-centered query needs a nonempty word")
    return _ball_word(geom, letters, 0, r, min_len)


def _interval_bracket(geom, lo, hi, scale, shift, frame_len, min_len):
    """Bracket the mass fraction of [lo, hi] under the node map (scale, shift).

    Coordinates are the enclosing frame's; frame_len converts node lengths
    to absolute units for the truncation cutoff.
    """
    a, b = geom.hull
    ca = scale * a + shift
    cb = scale * b + shift
    if cb < lo or hi < ca:
        return 0.0, 0.0
    if lo <= ca and cb <= hi:
        return 1.0, 1.0
    if scale * frame_len * (b - a) < min_len:
        return 0.0, 1.0
    model = geom.model
    vlo = vhi = 0.0
    for i in range(model.alphabet_size):
        p = model.p[i]
        clo, chi = _interval_bracket(
            geom, lo, hi,
            scale * model.ratios[i],
            scale * model.translations[i] + shift,
            frame_len, min_len,
        )
        vlo += p * clo
        vhi += p * chi
    return vlo, vhi


def _ball_word(geom, letters, k, rho, min_len):
    """Bracket the mass fraction of a ball of local radius rho around the
    point coded by letters[k:], inside the current cylinder's frame."""
    a, b = geom.hull
    x = _point_from(geom, letters, k)
    lo, hi = x - rho, x + rho
    if lo <= a and b <= hi:
        return 1.0, 1.0
    model = geom.model
    vlo = vhi = 0.0
    chain = letters[k] if k < len(letters) else None
    for i in range(model.alphabet_size):
        ri = model.ratios[i]
        ti = model.translations[i]
        ca = ri * a + ti
        cb = ri * b + ti
        if cb < lo or hi < ca:
            continue
        p = model.p[i]
        if lo <= ca and cb <= hi:
            vlo += p
            vhi += p
            continue
        if i == chain:
            clo, chi = _ball_word(geom, letters, k + 1, rho / ri, min_len / ri)
        elif ri * (b - a) < min_len:
            clo, chi = 0.0, 1.0
        else:
            # Child-local coordinates; lengths there are ri times shorter,
            # so the frame factor ri keeps the cutoff in current units.
            clo, chi = _interval_bracket(
                geom, (lo - ti) / ri, (hi - ti) / ri, 1.0, 0.0, ri, min_len,
            )
        vlo += p * clo
        vhi += p * chi
    return vlo, vhi


def local_dimension_estimate(geom: Geometric1D, point, scales, *, eta: float = _DEFAULT_ETA):
    """Per-scale quotients log mu(B(point, r)) / log r, no extrapolation.

    A vanishing ball measure is reported as math.inf for that scale.
    """
    scales = [float(s) for s in scales]
    if any(s <= 0.0 for s in scales):
        raise ValidationError("scales must be positive")
    if any(s2 >= s1 for s1, s2 in zip(scales, scales[1:])):
        raise ValidationError("scales must be strictly decreasing")
    out = []
    for s in scales:
        m_val = ball_measure(geom, point, s, eta=eta)
        if m_val <= 0.0:
            out.append((s, math.inf))
        elif m_val >= 1.0:
            out.append((s, 0.0))
        else:
            out.append((s, math.log(m_val) / math.log(s)))
    return out


# ----------------------------------------------------------------------
# Symbolic ball bracket constants.

def ball_bracket_constants(geom: Geometric1D):
    """(delta0, refine_depth, c) for the two-sided symbolic ball bracket.

    Derivation.  The first-level hull images are separated by at least the
    certified gap delta0, and the separation structure rescales: inside any
    cylinder u the images S_ui(hull) are separated by r_u * delta0.  A ball
    of radius rho = delta0 * r_w / 2 centered anywhere in S_w(K) therefore
    cannot reach K outside S_w(K) (the nearest other piece is at distance
    at least r_parent(w) * delta0 > 2 * rho), giving mu(B) <= p_w.  For the
    lower bound, in the cylinder's own coordinates the ball has radius
    delta0 / (2 * span) >= r_max^N for N = ceil(log(delta0 / (2 * span)) /
    log(r_max)), so the depth-N sub-cylinder containing the center fits
    inside the ball and mu(B) >= c * p_w with c = p_min^N.
    """
    _, delta0 = certify_ssc(geom)
    span = geom.span
    r_max = float(geom.model.ratios.max())
    rel = delta0 / (2.0 * span)
    depth = max(1, math.ceil(math.log(rel) / math.log(r_max)))
    c = float(geom.model.p.min()) ** depth
    return delta0, depth, c


def certified_radius(geom: Geometric1D, r_word: float, delta0: float | None = None) -> float:
    """Radius delta0 * r_word / 2 at which the [c*p_w, p_w] bracket holds."""
    if delta0 is None:
        _, delta0 = certify_ssc(geom)
    return 0.5 * delta0 * r_word


# ----------------------------------------------------------------------
# Coarse counting estimator (purely symbolic; works on any model).

@dataclass(frozen=True)
class CoarseCount:
    """Census of section words whose measure scales like r^alpha."""

    r: float
    alpha: float
    eps: float
    count: int
    estimate: object  # float, or NEG_INF when the census is empty


def coarse_spectrum(model: IFSModel, r: float, alpha: float, eps: float, *,
                    section: Section | None = None) -> CoarseCount:
    """Count words in the section at scale r with r^(alpha+eps) <= p_word
    <= r^(alpha-eps); the estimate is log N / log(1/r)."""
    if eps <= 0.0:
        raise ValidationError("eps must be positive")
    if section is None:
        section = enumerate_section(model, r)
    log_r = math.log(r)
    log_p = np.log(section.p_words)
    mask = ((alpha + eps) * log_r <= log_p) & (log_p <= (alpha - eps) * log_r)
    n = int(np.count_nonzero(mask))
    estimate = NEG_INF if n == 0 else math.log(n) / math.log(1.0 / r)
    return CoarseCount(r=float(r), alpha=float(alpha), eps=float(eps),
                       count=n, estimate=estimate)


# ----------------------------------------------------------------------
# Text dumps (locale-independent shortest round-trip floats).

def dump_sampled_points(path, points):
    """One line per point: word string, tab, coordinate."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for x, word in points:
            fh.write(f"{format_word(word)}\t{float(x)!r}\n")


def dump_coarse_counts(path, counts):
    """TSV rows: r, alpha, eps, N, estimate."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("r\talpha\teps\tN\testimate\n")
        for c in counts:
            est = "-inf" if c.estimate is NEG_INF else repr(float(c.estimate))
            fh.write(f"{c.r!r}\t{c.alpha!r}\t{c.eps!r}\t{c.count}\t{est}\n")
