import math

import numpy as np
import pytest

from multifractal import (
    CompositionGrid,
    RangeCapError,
    ResourceLimitError,
    asymptotes,
    composition_count,
    compositions,
    kl_divergence,
    lyapunov,
    psi,
    similarity_dimension,
    tau,
    tau_prime,
    variational_objective,
    variational_tau_grid,
)
from multifractal.exceptions import DomainError

from conftest import make_model, random_model

LOG2_3 = math.log(2) / math.log(3)


# ---------------------------------------------------------------- psi

def test_psi_examples(cantor):
    assert psi(cantor, 1.0, 0.0) == pytest.approx(1.0, abs=1e-14)
    assert psi(cantor, 0.0, 0.0) == pytest.approx(2.0, abs=1e-14)
    assert psi(cantor, 2.0, LOG2_3) == pytest.approx(1.0, abs=1e-13)


def test_psi_monotone_increasing_in_t(asymmetric):
    # r_i^(-t) = exp(t*log(1/r_i)) grows with t, so psi does too.
    ts = np.linspace(-3.0, 3.0, 25)
    for q in (-2.0, 0.0, 1.5):
        values = [psi(asymmetric, q, float(t)) for t in ts]
        assert all(b > a for a, b in zip(values, values[1:]))


def test_psi_requires_positive_probs():
    degenerate = make_model([0.3, 0.3], [1.0, 0.0])
    with pytest.raises(DomainError):
        psi(degenerate, 1.0, 0.0)


# ---------------------------------------------------------------- tau

def test_tau_cantor_anchors(cantor):
    assert tau(cantor, 0.0).tau == pytest.approx(-LOG2_3, abs=1e-12)
    assert abs(tau(cantor, 1.0).tau) <= 1e-12
    assert tau(cantor, 2.0).tau == pytest.approx(LOG2_3, abs=1e-12)


def test_tau_solution_invariants(asymmetric):
    for q in (-7.0, -1.0, 0.0, 0.5, 1.0, 3.0, 9.0):
        sol = tau(asymmetric, q)
        assert psi(asymmetric, q, sol.tau) == pytest.approx(1.0, abs=1e-10)
        assert sol.z.sum() == pytest.approx(1.0, abs=1e-10)
        assert np.all(sol.z > 0)
        expected_alpha = (
            -(sol.z @ np.log(asymmetric.p)) / lyapunov(sol.z, asymmetric)
        )
        assert sol.alpha == pytest.approx(expected_alpha, abs=1e-12)


def test_tau_q_cap():
    model = make_model([0.3, 0.4], [0.5, 0.5])
    with pytest.raises(RangeCapError):
        tau(model, 1001.0)
    tau(model, 17.0, q_cap=20.0)
    with pytest.raises(RangeCapError):
        tau(model, 17.0, q_cap=10.0)


def test_tau_requires_positive_probs():
    with pytest.raises(DomainError):
        tau(make_model([0.3, 0.3], [1.0, 0.0]), 2.0)


def test_tau_prime_constant_for_cantor(cantor):
    for q in (-4.0, 0.0, 1.0, 6.0):
        assert tau_prime(cantor, q) == pytest.approx(LOG2_3, abs=1e-12)


def test_tau_prime_natural_measure():
    # p_i = r_i^s makes z(q) = p for every q, so the slope is constant s.
    ratios = np.array([0.5, 0.25])
    s = similarity_dimension(ratios)
    model = make_model(ratios, ratios**s / np.sum(ratios**s))
    for q in (-3.0, 0.0, 2.0):
        assert tau_prime(model, q) == pytest.approx(s, abs=1e-10)


def test_tau_prime_asymmetric_at_zero(asymmetric):
    # H(z(0), p)/chi(z(0)) with z(0) = (1/2, 1/2)
    assert tau_prime(asymmetric, 0.0) == pytest.approx(0.7618595071429147, abs=1e-12)


def test_tau_prime_strictly_decreasing(asymmetric):
    qs = np.linspace(-8.0, 8.0, 33)
    slopes = [tau_prime(asymmetric, float(q)) for q in qs]
    assert all(b < a for a, b in zip(slopes, slopes[1:]))


def test_tau_prime_matches_finite_difference(asymmetric, three_letter):
    for model in (asymmetric, three_letter):
        for q in (-3.0, -0.5, 0.0, 1.0, 4.0):
            h = 1e-5
            fd = (tau(model, q + h).tau - tau(model, q - h).tau) / (2 * h)
            assert tau_prime(model, q) == pytest.approx(fd, abs=1e-6)


def test_tau_monotone_and_midpoint_concave(asymmetric, golden):
    for model in (asymmetric, golden):
        qs = np.arange(-10.0, 10.0 + 0.25, 0.5)
        vals = [tau(model, float(q)).tau for q in qs]
        assert all(b >= a - 1e-10 for a, b in zip(vals, vals[1:]))
        for i in range(1, len(vals) - 1):
            assert vals[i] >= 0.5 * (vals[i - 1] + vals[i + 1]) - 1e-10


# ---------------------------------------------------------------- asymptotes

def test_asymptotes_cantor_degenerate(cantor):
    asym = asymptotes(cantor)
    assert asym.kappa_min == pytest.approx(LOG2_3, abs=1e-14)
    assert asym.kappa_max == pytest.approx(LOG2_3, abs=1e-14)
    assert asym.s_min == pytest.approx(LOG2_3, abs=1e-12)
    assert asym.s_max == pytest.approx(LOG2_3, abs=1e-12)


def test_asymptotes_asymmetric(asymmetric):
    asym = asymptotes(asymmetric)
    assert asym.kappa_min == pytest.approx(0.2618595071429148, abs=1e-14)
    assert asym.kappa_max == pytest.approx(1.2618595071429148, abs=1e-14)
    # singleton restricted alphabets force s = 0 exactly
    assert asym.s_min == 0.0
    assert asym.s_max == 0.0
    assert np.array_equal(asym.z_plus_inf > 0, [False, True])
    assert np.array_equal(asym.z_minus_inf > 0, [True, False])


def test_asymptotes_shared_minimum(three_letter):
    asym = asymptotes(three_letter)
    assert asym.s_min == pytest.approx(LOG2_3, abs=1e-12)
    assert np.count_nonzero(asym.z_plus_inf) == 2


def test_asymptote_partition_identity():
    rng = np.random.default_rng(21)
    for _ in range(25):
        model = random_model(rng)
        asym = asymptotes(model)
        mask = asym.z_plus_inf > 0
        assert np.sum(model.ratios[mask] ** asym.s_min) == pytest.approx(1.0, abs=1e-10)
        mask = asym.z_minus_inf > 0
        assert np.sum(model.ratios[mask] ** asym.s_max) == pytest.approx(1.0, abs=1e-10)


def test_tau_approaches_asymptote(asymmetric, three_letter):
    for model in (asymmetric, three_letter):
        asym = asymptotes(model)
        gaps = [
            abs(tau(model, q).tau - (q * asym.kappa_min - asym.s_min))
            for q in (10.0, 20.0, 40.0)
        ]
        assert gaps[1] <= gaps[0] and gaps[2] <= gaps[1]
        assert gaps[-1] < 1e-8


def test_z_limit_matches_asymptote_vector(asymmetric):
    asym = asymptotes(asymmetric)
    z = tau(asymmetric, 900.0).z
    assert np.allclose(z, asym.z_plus_inf, atol=1e-12)
    z = tau(asymmetric, -900.0).z
    assert np.allclose(z, asym.z_minus_inf, atol=1e-12)


# ---------------------------------------------------------------- variational formulation

def test_variational_objective_examples(cantor):
    sol = tau(cantor, 3.0)
    assert variational_objective(cantor, 3.0, sol.z) == pytest.approx(sol.tau, abs=1e-12)
    assert variational_objective(cantor, 0.0, [0.5, 0.5]) == pytest.approx(
        -LOG2_3, abs=1e-14)
    assert variational_objective(cantor, 0.0, [1.0, 0.0]) == 0.0


def test_kl_decomposition_identity():
    rng = np.random.default_rng(31)
    for _ in range(60):
        model = random_model(rng)
        q = float(rng.uniform(-8.0, 8.0))
        w = rng.dirichlet(np.ones(model.alphabet_size))
        sol = tau(model, q)
        lhs = variational_objective(model, q, w) - sol.tau
        rhs = kl_divergence(w, sol.z) / lyapunov(w, model)
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_level_sets_convex(asymmetric):
    # {w : objective <= t} is convex for every t above the minimum.
    rng = np.random.default_rng(32)
    for _ in range(40):
        q = float(rng.uniform(-5.0, 5.0))
        t = tau(asymmetric, q).tau + float(rng.uniform(0.01, 1.0))
        w1 = rng.dirichlet([1.0, 1.0])
        w2 = rng.dirichlet([1.0, 1.0])
        if (variational_objective(asymmetric, q, w1) > t
                or variational_objective(asymmetric, q, w2) > t):
            continue
        for lam in (0.25, 0.5, 0.75):
            mix = lam * w1 + (1 - lam) * w2
            assert variational_objective(asymmetric, q, mix) <= t + 1e-10


# ---------------------------------------------------------------- composition grid oracle

def test_composition_enumeration():
    arr = compositions(3, 2)
    assert arr.tolist() == [[0, 3], [1, 2], [2, 1], [3, 0]]
    arr = compositions(2, 3)
    assert arr.shape == (composition_count(2, 3), 3)
    assert np.all(arr.sum(axis=1) == 2)
    # lexicographic order
    assert arr.tolist() == sorted(arr.tolist())
    with pytest.raises(ResourceLimitError):
        compositions(200_000_000, 2)


def test_grid_oracle_cantor(cantor):
    # n even puts the true optimizer (1/2, 1/2) on the grid
    res = variational_tau_grid(cantor, 2.0, 10)
    assert res.value >= LOG2_3 - 1e-12
    assert res.value == pytest.approx(LOG2_3, abs=1e-6)
    assert np.allclose(res.w, [0.5, 0.5])


def test_grid_oracle_point_masses(asymmetric):
    res = variational_tau_grid(asymmetric, 3.0, 1)
    expected = min(
        3.0 * math.log(1 / p) / math.log(1 / r)
        for p, r in zip(asymmetric.p, asymmetric.ratios)
    )
    assert res.value == pytest.approx(expected, abs=1e-14)


def test_grid_oracle_asymmetric_q0(asymmetric):
    res = variational_tau_grid(asymmetric, 0.0, 64)
    assert abs(res.value - (-LOG2_3)) <= 2e-3


def test_grid_oracle_dominance_and_gap():
    rng = np.random.default_rng(41)
    for _ in range(6):
        model = random_model(rng)
        if model.alphabet_size > 3:
            continue
        grid = CompositionGrid(model, 128)
        for q in (-2.0, 0.0, 1.0, 2.0):
            value, _ = grid.tau_minimum(q)
            analytic = tau(model, q).tau
            assert value >= analytic - 1e-12
            assert value - analytic <= 5e-3


def test_grid_oracle_tie_breaks_lexicographic(cantor):
    # symmetric model, q=0, n odd: the two central compositions tie exactly
    grid = CompositionGrid(cantor, 5)
    _, w = grid.tau_minimum(0.0)
    assert np.allclose(w, [2 / 5, 3 / 5])  # (2,3) precedes (3,2)


def test_similarity_dimension_examples():
    assert similarity_dimension([1/3, 1/3]) == pytest.approx(LOG2_3, abs=1e-14)
    assert similarity_dimension([1/3, 1/3, 1/3]) == pytest.approx(1.0, abs=1e-14)
    # golden ratio closed form for ratios (1/2, 1/4)
    phi = (1 + math.sqrt(5)) / 2
    assert similarity_dimension([0.5, 0.25]) == pytest.approx(
        math.log(phi) / math.log(2), abs=1e-14)
    assert similarity_dimension([0.4]) == 0.0
