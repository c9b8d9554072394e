import math

import numpy as np
import pytest

from multifractal import (
    asymptotes,
    constrained_variational_grid,
    dim_attractor,
    dim_measure,
    f_alpha,
    is_neg_inf,
    similarity_dimension,
    spectrum_curve,
    tau,
    tau_prime,
)
from multifractal.exceptions import ValidationError

from conftest import make_model

LOG2_3 = math.log(2) / math.log(3)


# ---------------------------------------------------------------- dimensions

def test_dim_measure_examples(cantor, asymmetric):
    assert dim_measure(cantor) == pytest.approx(LOG2_3, abs=1e-14)
    # H(1/4,3/4)/log 3 evaluated directly
    assert dim_measure(asymmetric) == pytest.approx(0.5118595071429147, abs=1e-14)
    ratios = np.array([0.5, 0.25])
    s = similarity_dimension(ratios)
    natural = make_model(ratios, ratios**s / np.sum(ratios**s))
    assert dim_measure(natural) == pytest.approx(s, abs=1e-12)


def test_dim_attractor_examples(cantor, golden):
    assert dim_attractor(cantor) == pytest.approx(LOG2_3, abs=1e-12)
    phi = (1 + math.sqrt(5)) / 2
    assert dim_attractor(golden) == pytest.approx(
        math.log(phi) / math.log(2), abs=1e-12)
    full = make_model([1/3, 1/3, 1/3], [0.3, 0.3, 0.4])
    assert dim_attractor(full) == pytest.approx(1.0, abs=1e-12)


def test_dim_measure_below_attractor(asymmetric, golden, three_letter):
    for model in (asymmetric, golden, three_letter):
        assert 0.0 < dim_measure(model) <= dim_attractor(model) + 1e-12


# ---------------------------------------------------------------- f(alpha)

def test_f_alpha_tangency_and_peak(asymmetric):
    a1 = tau_prime(asymmetric, 1.0)
    assert f_alpha(asymmetric, a1) == pytest.approx(a1, abs=1e-9)
    a0 = tau_prime(asymmetric, 0.0)
    assert f_alpha(asymmetric, a0) == pytest.approx(
        dim_attractor(asymmetric), abs=1e-9)


def test_f_alpha_endpoints_exact(asymmetric, three_letter):
    for model in (asymmetric, three_letter):
        asym = asymptotes(model)
        assert f_alpha(model, asym.kappa_min) == asym.s_min
        assert f_alpha(model, asym.kappa_max) == asym.s_max
        assert is_neg_inf(f_alpha(model, asym.kappa_min - 0.01))
        assert is_neg_inf(f_alpha(model, asym.kappa_max + 0.01))


def test_f_alpha_degenerate_spectrum(cantor):
    assert f_alpha(cantor, LOG2_3) == pytest.approx(LOG2_3, abs=1e-12)
    assert is_neg_inf(f_alpha(cantor, 0.5))
    assert is_neg_inf(f_alpha(cantor, 0.75))


def test_f_alpha_concave_on_alpha_grid(asymmetric, three_letter):
    for model in (asymmetric, three_letter):
        asym = asymptotes(model)
        alphas = np.linspace(asym.kappa_min + 1e-3, asym.kappa_max - 1e-3, 21)
        values = [f_alpha(model, float(a)) for a in alphas]
        for i in range(1, len(values) - 1):
            assert values[i] >= 0.5 * (values[i - 1] + values[i + 1]) - 1e-9


# ---------------------------------------------------------------- curve

def test_spectrum_curve_identities(asymmetric):
    qs = np.arange(-6.0, 6.0 + 0.25, 0.5)
    curve = spectrum_curve(asymmetric, qs)
    by_q = {s.q: s for s in curve.samples}
    assert by_q[1.0].f == pytest.approx(by_q[1.0].alpha, abs=1e-9)
    assert by_q[1.0].alpha == pytest.approx(curve.dim_measure, abs=1e-10)
    assert by_q[0.0].f == pytest.approx(curve.dim_attractor, abs=1e-10)

    alphas = [s.alpha for s in curve.samples]
    assert all(b < a for a, b in zip(alphas, alphas[1:]))  # decreasing in q
    for s in curve.samples:
        assert -1e-12 <= s.f <= curve.dim_attractor + 1e-12
        if s.q >= 1.0:
            assert s.f <= s.alpha + 1e-9
    peak = max(s.f for s in curve.samples)
    assert peak == pytest.approx(curve.dim_attractor, abs=1e-10)

    (kmin, smin), (kmax, smax) = curve.endpoints
    asym = asymptotes(asymmetric)
    assert (kmin, smin) == (asym.kappa_min, asym.s_min)
    assert (kmax, smax) == (asym.kappa_max, asym.s_max)


def test_spectrum_curve_degenerate(cantor):
    curve = spectrum_curve(cantor, np.arange(-3.0, 3.5, 1.0))
    for s in curve.samples:
        assert s.alpha == pytest.approx(LOG2_3, abs=1e-10)
        assert s.f == pytest.approx(LOG2_3, abs=1e-9)


def test_spectrum_curve_validates_grid(asymmetric):
    with pytest.raises(ValidationError):
        spectrum_curve(asymmetric, [])
    with pytest.raises(ValidationError):
        spectrum_curve(asymmetric, [1.0, 0.5])


# ---------------------------------------------------------------- constrained oracle

def test_constrained_grid_cantor(cantor):
    value = constrained_variational_grid(cantor, LOG2_3, 16, 1e-6)
    assert value == pytest.approx(LOG2_3, abs=1e-12)
    assert is_neg_inf(constrained_variational_grid(cantor, 0.9, 16, 0.05))


def test_constrained_grid_outside_kappa_range(asymmetric):
    asym = asymptotes(asymmetric)
    assert is_neg_inf(
        constrained_variational_grid(asymmetric, asym.kappa_max + 0.05, 64, 0.01))
    assert is_neg_inf(
        constrained_variational_grid(asymmetric, asym.kappa_min - 0.05, 64, 0.01))


def test_constrained_grid_matches_f_alpha(asymmetric):
    alpha = tau_prime(asymmetric, 1.0)  # optimizer w = p lies on the grid
    value = constrained_variational_grid(asymmetric, alpha, 128, 1e-3)
    assert abs(value - f_alpha(asymmetric, alpha)) <= 5e-3


def test_constrained_grid_upper_bound_shrinks(asymmetric):
    asym = asymptotes(asymmetric)
    alpha = 0.5 * (asym.kappa_min + asym.kappa_max)
    target = f_alpha(asymmetric, alpha)
    previous = math.inf
    for eps in (0.05, 0.02, 0.01):
        value = constrained_variational_grid(asymmetric, alpha, 256, eps)
        excess = max(0.0, value - target)
        # feasible w has |u(w) - alpha| <= eps, so v(w) <= f(alpha) + L*eps
        assert excess <= 2.0 * eps + 1e-9
        assert excess <= previous + 1e-12
        previous = excess


def test_permutation_symmetry(three_letter):
    perm = [2, 0, 1]
    permuted = three_letter.permuted(perm)
    for q in (-3.0, 0.0, 1.0, 2.5):
        assert tau(three_letter, q).tau == pytest.approx(
            tau(permuted, q).tau, abs=1e-12)
    a = asymptotes(three_letter)
    b = asymptotes(permuted)
    assert a.kappa_min == pytest.approx(b.kappa_min, abs=1e-12)
    assert a.s_min == pytest.approx(b.s_min, abs=1e-12)
    assert a.s_max == pytest.approx(b.s_max, abs=1e-12)
    for alpha in np.linspace(a.kappa_min + 0.01, a.kappa_max - 0.01, 7):
        assert f_alpha(three_letter, float(alpha)) == pytest.approx(
            f_alpha(permuted, float(alpha)), abs=1e-12)
