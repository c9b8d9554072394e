"""Weighted self-similar iterated function systems.

A model is a pair (r, p): contraction ratios r_i in (0, 1) and a probability
vector p, optionally with 1-D translations realizing the maps x -> r_i*x + t_i.
Everything downstream (spectra, oracles, geometry) is computed from this pair.
All entropies are in nats.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    DomainError,
    InfiniteCrossEntropyError,
    ValidationError,
)

# Absolute tolerance for "entries sum to 1".  Inputs are never silently
# renormalized; use normalize() when you mean it.
SUM_TOL = 1e-12


def _as_float_vector(values, name):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError(f"{name} must be a nonempty 1-D array")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class ProbabilityVector:
    """Vector with nonnegative entries summing to 1 (within SUM_TOL)."""

    values: np.ndarray

    def __post_init__(self):
        arr = _as_float_vector(self.values, "probability vector")
        if np.any(arr < 0.0):
            raise ValidationError("probability vector has a negative entry")
        s = float(arr.sum())
        if abs(s - 1.0) > SUM_TOL:
            raise ValidationError(
                f"probability vector sums to {s!r}, not 1 within {SUM_TOL}"
            )
        object.__setattr__(self, "values", arr)

    @property
    def strictly_positive(self) -> bool:
        return float(self.values.min()) > 0.0

    @classmethod
    def uniform(cls, m: int) -> "ProbabilityVector":
        return cls(np.full(m, 1.0 / m))

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return self.values.astype(dtype)
        return self.values


def normalize(weights) -> ProbabilityVector:
    """Explicitly rescale nonnegative weights to sum to 1."""
    arr = _as_float_vector(weights, "weights")
    if np.any(arr < 0.0):
        raise ValidationError("weights must be nonnegative")
    s = float(arr.sum())
    if s <= 0.0:
        raise ValidationError("weights sum to zero")
    return ProbabilityVector(arr / s)


def as_weights(w) -> np.ndarray:
    """Coerce a ProbabilityVector or array-like to a validated ndarray."""
    if isinstance(w, ProbabilityVector):
        return w.values
    return ProbabilityVector(np.asarray(w, dtype=float)).values


@dataclass(frozen=True)
class IFSModel:
    """Contraction ratios plus weights, optionally with 1-D translations."""

    ratios: np.ndarray
    probs: ProbabilityVector
    translations: np.ndarray | None = field(default=None)

    def __post_init__(self):
        r = _as_float_vector(self.ratios, "ratios")
        if r.size < 2:
            raise ValidationError("alphabet size must be at least 2")
        if np.any(r <= 0.0) or np.any(r >= 1.0):
            raise ValidationError("ratios must lie strictly inside (0, 1)")
        p = self.probs
        if not isinstance(p, ProbabilityVector):
            p = ProbabilityVector(np.asarray(p, dtype=float))
        if len(p) != r.size:
            raise ValidationError("ratios and probs have different lengths")
        t = self.translations
        if t is not None:
            t = _as_float_vector(t, "translations")
            if t.size != r.size:
                raise ValidationError("translations length mismatch")
        object.__setattr__(self, "ratios", r)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "translations", t)

    @property
    def alphabet_size(self) -> int:
        return self.ratios.size

    @property
    def p(self) -> np.ndarray:
        return self.probs.values

    @property
    def log_ratios(self) -> np.ndarray:
        return np.log(self.ratios)

    @property
    def log_probs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.p)

    @property
    def kappas(self) -> np.ndarray:
        """Per-letter dimension log p_i / log r_i (requires positive probs)."""
        if not self.probs.strictly_positive:
            raise DomainError("kappas need strictly positive probabilities")
        return np.log(self.p) / np.log(self.ratios)

    def require_positive_probs(self):
        if not self.probs.strictly_positive:
            raise DomainError(
                "operation requires strictly positive probabilities; "
                "restrict to the positive-support sub-alphabet first"
            )

    def permuted(self, perm) -> "IFSModel":
        """Relabel the alphabet by a permutation (for symmetry checks)."""
        perm = np.asarray(perm, dtype=int)
        t = None if self.translations is None else self.translations[perm]
        return IFSModel(self.ratios[perm], ProbabilityVector(self.p[perm]), t)

    def to_dict(self) -> dict:
        out = {"ratios": self.ratios.tolist(), "probs": self.p.tolist()}
        if self.translations is not None:
            out["translations"] = self.translations.tolist()
        return out


_MODEL_KEYS = {"ratios", "probs", "translations"}


def model_from_dict(doc: dict) -> IFSModel:
    """Build a model from the JSON document schema. Unknown keys rejected."""
    if not isinstance(doc, dict):
        raise ValidationError("model document must be a JSON object")
    unknown = set(doc) - _MODEL_KEYS
    if unknown:
        raise ValidationError(f"unknown model keys: {sorted(unknown)}")
    if "ratios" not in doc or "probs" not in doc:
        raise ValidationError("model document needs 'ratios' and 'probs'")
    return IFSModel(
        np.asarray(doc["ratios"], dtype=float),
        ProbabilityVector(np.asarray(doc["probs"], dtype=float)),
        None
        if doc.get("translations") is None
        else np.asarray(doc["translations"], dtype=float),
    )


def load_model(path) -> IFSModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read model file {path}: {exc}") from exc
    return model_from_dict(doc)


def save_model(model: IFSModel, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(model.to_dict(), fh, sort_keys=True)
        fh.write("\n")


# ----------------------------------------------------------------------
# Information-theoretic functionals.  Pure functions of immutable inputs;
# safe for unrestricted concurrent use.

def entropy(w) -> float:
    """Shannon entropy -sum w_i log w_i, with 0*log 0 = 0."""
    wv = as_weights(w)
    pos = wv > 0.0
    return float(-np.sum(wv[pos] * np.log(wv[pos])))


def cross_entropy(w, p) -> float:
    """H(w, p) = sum w_i log(1/p_i); equals entropy(w) when w = p."""
    wv = as_weights(w)
    pv = as_weights(p)
    if wv.size != pv.size:
        raise ValidationError("cross_entropy: length mismatch")
    pos = wv > 0.0
    if np.any(pv[pos] == 0.0):
        raise InfiniteCrossEntropyError(
            "cross entropy diverges: w puts mass where p vanishes"
        )
    return float(-np.sum(wv[pos] * np.log(pv[pos])))


def kl_divergence(w, p) -> float:
    """Relative entropy D(w || p) = H(w, p) - H(w) >= 0."""
    return cross_entropy(w, p) - entropy(w)


def lyapunov(w, model: IFSModel) -> float:
    """Contraction exponent chi(w) = sum w_i log(1/r_i) > 0."""
    wv = as_weights(w)
    if wv.size != model.alphabet_size:
        raise ValidationError("lyapunov: weight length mismatch")
    return float(-wv @ model.log_ratios)


def word_stats(word, model: IFSModel):
    """Product ratio, product probability and type of a nonempty word.

    Returns (r_word, p_word, type) where type is the letter-frequency
    ProbabilityVector with entries that are multiples of 1/len(word).
    """
    letters = np.asarray(tuple(word), dtype=int)
    if letters.size == 0:
        raise DomainError("type of the empty word is undefined")
    if np.any(letters < 0) or np.any(letters >= model.alphabet_size):
        raise ValidationError("word contains letters outside the alphabet")
    r_word = float(np.prod(model.ratios[letters]))
    p_word = float(np.prod(model.p[letters]))
    counts = np.bincount(letters, minlength=model.alphabet_size)
    return r_word, p_word, ProbabilityVector(counts / letters.size)
