import numpy as np
import pytest

from drivenjc import (ModelParams, PhaseSpaceGrid, duffing_params, hyp0f1,
                      hyp0f2, wigner_analytic, wigner_analytic_field,
                      wigner_series)
from drivenjc.exceptions import ConvergenceError, DomainError

from oracles import hyp0f1_mp, hyp0f2_mp, hyp_series_reversed, trapezoid_2d

TWO_OVER_PI = 2 / np.pi


def fig2_params(eps_over_kappa=2.17):
    g = 3347.0
    return ModelParams.dispersive(g=g, kappa=6.0, gamma=1.0, delta=g / 0.14,
                                  delta_omega_c=72.50 * 6.0,
                                  eps_d=eps_over_kappa * 6.0)


# ---------------------------------------------------------------------------
# hypergeometric series
# ---------------------------------------------------------------------------

def test_hyp0f1_at_zero_is_one():
    assert hyp0f1(2.3 - 1.1j, 0.0) == 1.0 + 0j


def test_hyp0f1_bessel_identity():
    # 0F1(; 1; 1) = I_0(2)
    val = hyp0f1(1.0, 1.0)
    assert val.real == pytest.approx(2.2795853, abs=1e-7)
    assert val == pytest.approx(hyp0f1_mp(1.0, 1.0), rel=1e-13)


@pytest.mark.parametrize("c,z", [
    (2 + 3j, 0.5 - 0.2j),
    (-2.656 + 0.653j, 8.0 + 3.0j),
    (0.7 - 4.0j, -30.0 + 12.0j),
    (5.0, 9000.0),
])
def test_hyp0f1_against_dual_order_oracle(c, z):
    val = hyp0f1(c, z)
    assert val == pytest.approx(hyp_series_reversed((c,), z, 4000), rel=1e-12)
    assert val == pytest.approx(hyp0f1_mp(c, z), rel=1e-12)


def test_hyp0f2_at_zero_is_one():
    assert hyp0f2(1.5 + 0.5j, 2.0, 0.0) == 1.0 + 0j


def test_hyp0f2_conjugate_parameters_real_for_real_argument():
    c = -2.656 + 0.653j
    for x in (0.3, 4.0, 25.0):
        val = hyp0f2(c, np.conj(c), x)
        assert abs(val.imag) < 1e-13 * abs(val)


@pytest.mark.parametrize("c1,c2,z", [
    (1.2 - 0.8j, 0.9 + 2.2j, 3.0 - 5.0j),
    (-2.656 + 0.653j, -2.656 - 0.653j, 6.1),
    (4.0, 2.5, -80.0),
])
def test_hyp0f2_against_dual_order_oracle(c1, c2, z):
    val = hyp0f2(c1, c2, z)
    assert val == pytest.approx(hyp_series_reversed((c1, c2), z, 4000), rel=1e-12)
    assert val == pytest.approx(hyp0f2_mp(c1, c2, z), rel=1e-12)


def test_hyp_accuracy_degrades_gracefully_under_cancellation():
    # strongly alternating large arguments lose digits in any fixed-precision
    # summation order; the result should still carry ~9 digits here
    val = hyp0f2(4.0, 2.5, -800.0)
    assert val == pytest.approx(hyp0f2_mp(4.0, 2.5, -800.0), rel=1e-9)


def test_hyp_conjugation_symmetry():
    rng = np.random.default_rng(6)
    for _ in range(5):
        c = complex(rng.normal(), rng.normal()) + 1.5
        z = complex(rng.normal(scale=4), rng.normal(scale=4))
        assert hyp0f1(np.conj(c), np.conj(z)) == pytest.approx(
            np.conj(hyp0f1(c, z)), rel=1e-12)
        c2 = complex(rng.normal(), rng.normal()) + 2.0
        assert hyp0f2(np.conj(c), np.conj(c2), np.conj(z)) == pytest.approx(
            np.conj(hyp0f2(c, c2, z)), rel=1e-12)


def test_hyp_parameter_pole_rejected():
    with pytest.raises(DomainError):
        hyp0f1(0.0, 1.0)
    with pytest.raises(DomainError):
        hyp0f1(-3.0 + 1e-13j, 1.0)
    with pytest.raises(DomainError):
        hyp0f2(1.0, -7, 2.0)
    hyp0f1(-3.5, 1.0)  # off-pole negative parameter is fine


def test_hyp_overflow_raises_convergence_error():
    with pytest.raises(ConvergenceError):
        hyp0f1(1.0, 1e12)


def test_hyp0f1_vectorized_matches_scalar():
    c = -2.0 + 0.9j
    zs = np.array([[0.1 + 0.2j, -3.0], [8.0j, 1.0 - 1.0j]])
    vec = hyp0f1(c, zs)
    for idx in np.ndindex(zs.shape):
        assert vec[idx] == pytest.approx(hyp0f1(c, zs[idx]), rel=1e-14)


# ---------------------------------------------------------------------------
# Duffing parameter mapping
# ---------------------------------------------------------------------------

def test_duffing_params_strong_dispersive_values():
    dp = duffing_params(fig2_params())
    # direct evaluation of the defining expressions at g=3347, delta=g/0.14,
    # kappa=6, dwc=435 (all in gamma units)
    assert dp.chi == pytest.approx(-9.18, rel=5e-3)
    assert dp.delta_omega_c_prime == pytest.approx(-24.4, rel=5e-3)
    assert 435.0 - 3347.0 ** 2 / (3347.0 / 0.14) == pytest.approx(
        dp.delta_omega_c_prime - 9.184168, rel=5e-3)


def test_duffing_params_sign_and_consistency():
    dp = duffing_params(fig2_params())
    assert dp.sigma_z == -1.0
    assert dp.chi < 0.0
    recovered = dp.c * (1j * dp.chi) + 1j * dp.delta_omega_c_prime
    assert recovered == pytest.approx(6.0 + 0j, abs=1e-12)
    assert dp.kappa == pytest.approx(6.0)
    assert dp.eps_tilde == pytest.approx(
        fig2_params().eps_d / (1j * dp.chi), rel=1e-14)


def test_duffing_params_requires_dispersive_regime():
    resonant = ModelParams(g=5.0, kappa=1.0, gamma=0.1, delta_omega_c=0.0,
                           delta_omega_q=0.0, eps_d=1.0)
    with pytest.raises(DomainError):
        duffing_params(resonant)
    uncoupled = ModelParams(g=0.0, kappa=1.0, gamma=0.1, delta_omega_c=0.0,
                            delta_omega_q=5.0, eps_d=1.0)
    with pytest.raises(DomainError):
        duffing_params(uncoupled)


# ---------------------------------------------------------------------------
# analytic Wigner function
# ---------------------------------------------------------------------------

def test_wigner_analytic_vacuum_limit():
    dp = duffing_params(fig2_params().with_drive(0.0))
    assert wigner_analytic(dp, 0.0) == pytest.approx(TWO_OVER_PI, rel=1e-12)
    for alpha in (0.3, -0.4 + 0.9j, 1.2j):
        ref = TWO_OVER_PI * np.exp(-2 * abs(alpha) ** 2)
        assert wigner_analytic(dp, alpha) == pytest.approx(ref, rel=1e-12)


def test_wigner_analytic_real_and_bounded():
    dp = duffing_params(fig2_params())
    rng = np.random.default_rng(100)
    alphas = rng.normal(scale=1.5, size=100) + 1j * rng.normal(scale=1.5, size=100)
    vals = wigner_analytic(dp, alphas)
    assert np.all(np.isfinite(vals))
    assert vals.min() >= -TWO_OVER_PI - 1e-12


def test_wigner_analytic_phase_covariance():
    p = fig2_params()
    dp = duffing_params(p)
    rng = np.random.default_rng(42)
    for _ in range(5):
        phi = rng.uniform(0, 2 * np.pi)
        alpha = complex(rng.normal(), rng.normal())
        dp_rot = duffing_params(p.with_drive(p.eps_d * np.exp(1j * phi)))
        w1 = wigner_analytic(dp, alpha)
        w2 = wigner_analytic(dp_rot, alpha * np.exp(1j * phi))
        assert w2 == pytest.approx(w1, rel=1e-10)


def test_wigner_analytic_normalized():
    dp = duffing_params(fig2_params())
    grid = PhaseSpaceGrid.square(4.2, 161)
    field = wigner_analytic_field(dp, grid)
    total = trapezoid_2d(field.values, grid.xs, grid.ys)
    assert total == pytest.approx(1.0, abs=1e-2)


def test_wigner_series_path_agrees():
    dp = duffing_params(fig2_params())
    rng = np.random.default_rng(7)
    for _ in range(12):
        alpha = complex(rng.normal(scale=1.4), rng.normal(scale=1.4))
        assert wigner_series(dp, alpha) == pytest.approx(
            wigner_analytic(dp, alpha), rel=1e-10, abs=1e-250)
