import numpy as np
import pytest

from multifractal import IFSModel, ProbabilityVector


def make_model(ratios, probs, translations=None):
    return IFSModel(np.asarray(ratios, dtype=float),
                    ProbabilityVector(np.asarray(probs, dtype=float)),
                    None if translations is None else np.asarray(translations, dtype=float))


@pytest.fixture
def cantor():
    """Middle-thirds maps with equal weights."""
    return make_model([1/3, 1/3], [0.5, 0.5], [0.0, 2/3])


@pytest.fixture
def asymmetric():
    """Middle-thirds maps, weights (1/4, 3/4): the canonical skewed fixture."""
    return make_model([1/3, 1/3], [0.25, 0.75], [0.0, 2/3])


@pytest.fixture
def golden():
    """Unequal ratios (1/2, 1/4); attractor dimension log(phi)/log 2."""
    return make_model([0.5, 0.25], [0.5, 0.5], [0.0, 0.75])


@pytest.fixture
def three_letter():
    """Two letters share the minimal per-letter dimension."""
    return make_model([1/3, 1/3, 1/4], [0.45, 0.45, 0.10])


def random_model(rng, with_translations=False):
    """Valid random model: 2-4 letters, ratios in [0.1, 0.6], positive probs."""
    m = int(rng.integers(2, 5))
    ratios = rng.uniform(0.1, 0.6, size=m)
    probs = rng.dirichlet(np.ones(m))
    while probs.min() < 1e-3:
        probs = rng.dirichlet(np.ones(m))
    translations = None
    if with_translations:
        # Lay images side by side with positive gaps inside [0, 1].
        widths = ratios / (ratios.sum() + 1.0)
        gaps = (1.0 - widths.sum()) / (m + 1)
        lefts = []
        x = gaps
        for w in widths:
            lefts.append(x)
            x += w + gaps
        translations = np.asarray(lefts)
        ratios = widths
    return make_model(ratios, probs, translations)
