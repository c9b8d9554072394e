"""Brute-force section enumeration and type-class counting.

A section at scale r is the prefix-free family of words whose product ratio
first drops to <= r:

    Lambda_r = { w : r_w <= r < r_parent(w) }.

Summing p_w^q over a section and dividing by log r gives the empirical
moment exponent, which converges to tau(q) as r -> 0 with an
O(log log(1/r) / log(1/r)) defect.  Grouping section words by their exact
letter-count vector gives the type classes; for equal-ratio models each
class is a full multinomial class.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .exceptions import DomainError, ResourceLimitError
from .ifs import IFSModel
from .lq import similarity_dimension

SECTION_GUARD = 10_000_000

# Queries often land exactly on a cylinder boundary (r = r_max^k), where the
# product accumulated along a word and the power computed by the caller can
# disagree by an ulp and silently shift the whole section one level deeper.
# Membership is therefore tested against r * (1 + _BOUNDARY_RTOL), which
# recovers the mathematical section for boundary queries and is far below
# any scale the estimates can resolve.
_BOUNDARY_RTOL = 1e-12


@dataclass(frozen=True)
class Section:
    """Words of a section with their exact product ratios/probabilities."""

    r: float
    words: tuple
    r_words: np.ndarray
    p_words: np.ndarray

    @property
    def count(self) -> int:
        return len(self.words)

    @property
    def lengths(self) -> np.ndarray:
        return np.fromiter((len(w) for w in self.words), dtype=np.int64,
                           count=len(self.words))


def enumerate_section(model: IFSModel, r: float, *,
                      max_words: int = SECTION_GUARD) -> Section:
    """Depth-first expansion of the section at scale r.

    Descends while the product ratio exceeds r; a word is emitted the moment
    its ratio drops to <= r, so its parent ratio is > r by construction.
    The comparison carries a relative 1e-12 slack so that queries sitting
    exactly on a cylinder boundary resolve to the boundary section instead
    of flipping on the last ulp.  Guarded twice: a cheap upfront projection
    r^(-dim) and a hard count check during the walk.  Both fail loudly with
    ResourceLimitError.
    """
    if not (0.0 < r < 1.0):
        raise DomainError("section scale r must lie in (0, 1)")
    projected = r ** (-similarity_dimension(model.ratios))
    if projected > 4.0 * max_words:
        raise ResourceLimitError(
            f"projected section size {projected:.3g} exceeds guard {max_words}"
        )

    ratios = model.ratios
    probs = model.p
    m = model.alphabet_size
    threshold = r * (1.0 + _BOUNDARY_RTOL)
    words, r_out, p_out = [], [], []
    # Stack of unfinished words (ratio still > r); children pushed in
    # reverse so the walk emits in lexicographic order.
    stack = [((), 1.0, 1.0)]
    while stack:
        word, rw, pw = stack.pop()
        for i in range(m - 1, -1, -1):
            rc = rw * ratios[i]
            pc = pw * probs[i]
            child = word + (i,)
            if rc <= threshold:
                words.append(child)
                r_out.append(rc)
                p_out.append(pc)
                if len(words) > max_words:
                    raise ResourceLimitError(
                        f"section at r = {r} exceeds the {max_words} guard"
                    )
            else:
                stack.append((child, rc, pc))
    # The reversed-push DFS emits a deterministic order but not the
    # lexicographic one across different depths; sort once for stability.
    idx = sorted(range(len(words)), key=lambda k: words[k])
    words = tuple(words[k] for k in idx)
    return Section(
        r=float(r),
        words=words,
        r_words=np.array([r_out[k] for k in idx], dtype=float),
        p_words=np.array([p_out[k] for k in idx], dtype=float),
    )


def empirical_tau(model: IFSModel, q: float, r: float, *,
                  section: Section | None = None) -> float:
    """log(sum over the section of p_w^q) / log r, in log space throughout."""
    if section is None:
        section = enumerate_section(model, r)
    log_p = np.log(section.p_words)
    return float(logsumexp(q * log_p) / math.log(section.r))


def dump_section(section: Section, path):
    """One word per line: letter string, tab, r_word, tab, p_word."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for word, rw, pw in zip(section.words, section.r_words, section.p_words):
            fh.write(f"{format_word(word)}\t{float(rw)!r}\t{float(pw)!r}\n")


def format_word(word) -> str:
    if all(letter < 10 for letter in word):
        return "".join(str(letter) for letter in word)
    return "-".join(str(letter) for letter in word)


# ----------------------------------------------------------------------
# Type classes.

@dataclass(frozen=True)
class TypeClass:
    """Section words sharing one letter-count vector.

    multiplicity is the observed class size (exact integer); multinomial is
    n!/prod(counts!) computed exactly, and log_multinomial its log-gamma
    evaluation.  For equal-ratio models multiplicity == multinomial.
    """

    counts: tuple
    n: int
    multiplicity: int
    log_multiplicity: float
    type: np.ndarray


def multinomial(counts) -> int:
    """Exact n!/prod(counts_i!) via a product of binomials."""
    total = 0
    out = 1
    for c in counts:
        total += int(c)
        out *= math.comb(total, int(c))
    return out


def log_multinomial(counts) -> float:
    counts = [int(c) for c in counts]
    n = sum(counts)
    return float(gammaln(n + 1) - sum(gammaln(c + 1) for c in counts))


def enumerate_types(model: IFSModel, r: float, *,
                    section: Section | None = None) -> list:
    """Partition the section into type classes keyed by the count vector.

    The count vector fixes the length, so the (length, counts) key of the
    unequal-ratio case collapses to counts alone.  Classes come out sorted
    by (length, counts) for determinism.
    """
    if section is None:
        section = enumerate_section(model, r)
    m = model.alphabet_size
    groups: dict = {}
    for word in section.words:
        counts = [0] * m
        for letter in word:
            counts[letter] += 1
        key = tuple(counts)
        groups[key] = groups.get(key, 0) + 1
    classes = []
    for key in sorted(groups, key=lambda k: (sum(k), k)):
        n = sum(key)
        mult = groups[key]
        # Full classes (always the case for equal ratios) take the
        # log-gamma path; partial classes fall back to a plain log.
        if mult == multinomial(key):
            logm = log_multinomial(key)
        else:
            logm = float(math.log(mult))
        classes.append(
            TypeClass(
                counts=key,
                n=n,
                multiplicity=mult,
                log_multiplicity=logm,
                type=np.asarray(key, dtype=float) / n,
            )
        )
    return classes


def type_class_for(counts) -> TypeClass:
    """Free-standing full multinomial class for a given count vector."""
    counts = tuple(int(c) for c in counts)
    n = sum(counts)
    if n < 1:
        raise DomainError("count vector must have positive total")
    return TypeClass(
        counts=counts,
        n=n,
        multiplicity=multinomial(counts),
        log_multiplicity=log_multinomial(counts),
        type=np.asarray(counts, dtype=float) / n,
    )


def type_entropy_check(tc: TypeClass):
    """(log multiplicity / n, entropy of the type, absolute gap).

    The per-symbol log-count approaches the type entropy as n grows; the
    gap is the Stirling defect, O(log n / n) for a fixed rational type.
    """
    if tc.n < 1:
        raise DomainError("type class needs n >= 1")
    rate = tc.log_multiplicity / tc.n
    t = tc.type
    pos = t > 0.0
    ent = float(-np.sum(t[pos] * np.log(t[pos])))
    return rate, ent, abs(rate - ent)
