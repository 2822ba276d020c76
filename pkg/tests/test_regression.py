"""Sideband generator, sector closure, slope/eigen routes, spectrum."""

import dataclasses
import math

import numpy as np
import pytest

from maserline import (
    DenseLindblad,
    ExponentialTau,
    FixedTau,
    MaserParams,
    SidebandGenerator,
    SpectralDecomposition,
    SpectralError,
    VacuumStateError,
    build_sideband_generator,
    correlate,
    embed_sideband,
    extract_sideband,
    initial_sideband,
    linewidth_components,
    linewidth_from_slope,
    offsector_mass,
    quadrature_nodes,
    spectral_decomposition,
    spectrum_and_fwhm,
    steady_state,
)
from maserline.linewidth import jump_operator_matrices
from maserline.regression import coherence_weights


def dense_for(params, dim):
    return DenseLindblad(jump_operator_matrices(params, dim))


# -- generator construction ---------------------------------------------------


@pytest.mark.parametrize(
    "params",
    [
        MaserParams(1.0, 0.1, 50.0, 0.35, FixedTau(1.0)),
        MaserParams(1.3, 0.0, 120.0, 0.3, FixedTau(0.8)),
        MaserParams(1.0, 0.05, 30.0, 0.3, quadrature_nodes(ExponentialTau(1.0), 24)),
    ],
)
def test_generator_matches_single_dense_application(params):
    """A vector embedded on the coherence sector, pushed once through the
    literal dense superoperator, must reproduce G v on that sector and
    leave every other sector exactly zero."""
    rng = np.random.default_rng(5)
    N = 40
    gen = build_sideband_generator(params, N)
    dense = dense_for(params, N + 1)
    for _ in range(3):
        v = rng.standard_normal(N)
        dP = dense.apply(embed_sideband(v, N + 1))
        np.testing.assert_allclose(extract_sideband(dP), gen.apply(v), rtol=0, atol=1e-12 * np.max(np.abs(v)) * 100)
        assert offsector_mass(dP) == 0.0


def test_generator_rejects_tiny_sector():
    with pytest.raises(ValueError):
        build_sideband_generator(MaserParams(1.0, 0.0, 1.0, 0.3, FixedTau(1.0)), 1)


def test_pure_damping_left_eigenvector_identity():
    """r = 0, n_th = 0: w is exactly a left eigenvector, so the coherence
    decays as exp(-kappa t / 2) regardless of the initial vector."""
    p = MaserParams(kappa=1.0, n_th=0.0, r=1e-300, g=1.0, tau_dist=FixedTau(1.0))
    p = dataclasses.replace(p, r=0.0)
    N = 30
    gen = build_sideband_generator(p, N)
    w = coherence_weights(N)
    np.testing.assert_allclose(gen.dense().T @ w, -0.5 * w, rtol=0, atol=1e-13)


def test_thermal_left_eigenvector_identity_interior():
    # with n_th > 0 the identity holds exactly on all interior columns;
    # the last column carries the truncation-edge terms
    p = MaserParams(kappa=1.0, n_th=0.3, r=0.0, g=1.0, tau_dist=FixedTau(1.0))
    N = 40
    gen = build_sideband_generator(p, N)
    w = coherence_weights(N)
    lhs = gen.dense().T @ w
    np.testing.assert_allclose(lhs[: N - 1], -0.5 * w[: N - 1], rtol=0, atol=1e-12)


# -- sector closure -------------------------------------------------------------


def test_sector_closure_under_dense_evolution(maser_params):
    """The master equation never transfers weight between off-diagonal
    sectors: evolving P(0) = a rho for random diagonal rho keeps all
    other sectors numerically silent."""
    rng = np.random.default_rng(17)
    p = maser_params(2.3)
    N = 40
    dense = dense_for(p, N + 1)
    a = np.zeros((N + 1, N + 1))
    idx = np.arange(N)
    a[idx, idx + 1] = np.sqrt(idx + 1.0)
    for _ in range(3):
        diag = rng.random(N + 1)
        diag /= diag.sum()
        P0 = a @ np.diag(diag)
        states = dense.evolve(P0, np.linspace(0.0, 5.0, 6))
        for P in states:
            assert offsector_mass(P) < 1e-12


# -- initial condition and slope ---------------------------------------------


def test_initial_sideband_values(thermal_params):
    p = thermal_params(1.0)
    stats = steady_state(p)
    v0 = initial_sideband(stats)
    n = np.arange(stats.N)
    np.testing.assert_allclose(v0, np.sqrt(n + 1.0) * 0.5 ** (n + 2.0), rtol=1e-12)
    assert float(coherence_weights(stats.N) @ v0) == pytest.approx(stats.mean, rel=1e-12)


def test_initial_sideband_vacuum():
    p = MaserParams(1.0, 0.0, 0.0, 1.0, FixedTau(1.0))
    stats = steady_state(p, 4)
    assert np.all(initial_sideband(stats) == 0.0)


def test_slope_thermal_and_damping(thermal_params):
    for n_th in (0.1, 1.0):
        p = thermal_params(n_th)
        stats = steady_state(p)
        gen = build_sideband_generator(p, stats.N)
        assert linewidth_from_slope(gen, initial_sideband(stats)) == pytest.approx(1.0, rel=1e-12)


def test_slope_equals_exact_route(maser_params):
    p = maser_params(2.0)
    stats = steady_state(p)
    gen = build_sideband_generator(p, stats.N)
    d13 = linewidth_components(p, stats).total
    assert linewidth_from_slope(gen, initial_sideband(stats)) == pytest.approx(d13, rel=1e-8)


def test_slope_vacuum_raises():
    p = MaserParams(1.0, 0.0, 0.0, 1.0, FixedTau(1.0))
    stats = steady_state(p, 4)
    gen = build_sideband_generator(p, 4)
    with pytest.raises(VacuumStateError):
        linewidth_from_slope(gen, initial_sideband(stats))


# -- time evolution -------------------------------------------------------------


def test_correlation_decay_pure_damping():
    p = MaserParams(kappa=1.0, n_th=0.0, r=0.0, g=1.0, tau_dist=FixedTau(1.0))
    N = 30
    gen = build_sideband_generator(p, N)
    n = np.arange(N)
    v0 = np.sqrt(n + 1.0) * 0.4**n  # any decaying coherence profile
    t = np.linspace(0.0, 5.0, 26)
    g_t = correlate(gen, v0, t)
    g0 = float(coherence_weights(N) @ v0)
    np.testing.assert_allclose(g_t / g0, np.exp(-0.5 * t), rtol=0, atol=1e-9)


def test_correlation_asymptotic_slope_matches_slowest_mode(maser_params):
    p = maser_params(1.5)
    stats = steady_state(p)
    gen = build_sideband_generator(p, stats.N)
    v0 = initial_sideband(stats)
    dec = spectral_decomposition(gen, v0)
    keep = np.abs(dec.weights) > 1e-6 * stats.mean
    mu_min = float(dec.mu.real[keep].min())
    t1, t2 = 6.0 / mu_min, 9.0 / mu_min
    g_t = correlate(gen, v0, np.array([0.0, t1, t2]))
    slope = (math.log(g_t[2]) - math.log(g_t[1])) / (t2 - t1)
    assert slope == pytest.approx(-mu_min / 2.0, rel=1e-6)


def test_correlate_validates_grid(maser_params):
    p = maser_params(1.5)
    gen = build_sideband_generator(p, 20)
    with pytest.raises(ValueError):
        correlate(gen, np.ones(20), np.array([0.5, 1.0]))
    with pytest.raises(ValueError):
        correlate(gen, np.ones(20), np.array([0.0, 1.0, 0.5]))


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_integration_failure_reports_reached_time():
    from maserline import IntegrationError

    # runaway growth overflows the state and stalls the stepper
    gen = SidebandGenerator(
        np.zeros(4), np.full(4, 1e8), np.zeros(4), 4,
        MaserParams(1.0, 0.0, 0.0, 1.0, FixedTau(1.0)),
    )
    with pytest.raises(IntegrationError) as err:
        correlate(gen, np.ones(4), np.linspace(0.0, 100.0, 5))
    assert err.value.t_reached is not None


# -- spectral decomposition ------------------------------------------------------


def test_pure_damping_spectrum_single_dominant_pair():
    p = MaserParams(kappa=1.0, n_th=0.0, r=0.0, g=1.0, tau_dist=FixedTau(1.0))
    N = 16
    gen = build_sideband_generator(p, N)
    n = np.arange(N)
    v0 = np.sqrt(n + 1.0) * 0.3**n
    dec = spectral_decomposition(gen, v0)
    g0 = float(coherence_weights(N) @ v0)
    # only the mu = kappa mode carries weight; D equals kappa exactly
    dominant = int(np.argmax(np.abs(dec.weights)))
    assert dec.mu[dominant].real == pytest.approx(1.0, rel=1e-12)
    assert abs(dec.weights[dominant] - g0) < 1e-10 * g0
    assert dec.linewidth == pytest.approx(1.0, rel=1e-10)


def test_eigen_mean_equals_slope(maser_params):
    for theta in (0.8, 1.9, 3.1):
        p = maser_params(theta)
        stats = steady_state(p)
        gen = build_sideband_generator(p, stats.N)
        v0 = initial_sideband(stats)
        d_slope = linewidth_from_slope(gen, v0)
        dec = spectral_decomposition(gen, v0)
        assert dec.linewidth == pytest.approx(d_slope, rel=1e-8)
        assert complex(dec.weights.sum()).real == pytest.approx(stats.mean, rel=1e-10)
        assert abs(complex(dec.weights.sum()).imag) < 1e-10 * stats.mean


def test_decay_rates_are_dissipative(maser_params, laser_params):
    for p in (maser_params(2.4), maser_params(3.0, n_th=0.0), laser_params(1.5)):
        stats = steady_state(p)
        gen = build_sideband_generator(p, stats.N)
        dec = spectral_decomposition(gen, initial_sideband(stats))
        assert np.all(dec.mu.real >= -1e-10 * p.kappa)


def test_complex_rates_come_in_conjugate_pairs(maser_params):
    # n_th = 0 with strong pumping gives genuinely complex sector modes
    p = maser_params(3.0, n_th=0.0)
    stats = steady_state(p)
    gen = build_sideband_generator(p, stats.N)
    dec = spectral_decomposition(gen, initial_sideband(stats))
    cplx = np.abs(dec.mu.imag) > 1e-8
    assert np.any(cplx), "expected complex modes at these parameters"
    mus = dec.mu[cplx]
    wts = dec.weights[cplx]
    order = np.lexsort((mus.imag, mus.real))
    mus, wts = mus[order], wts[order]
    for j in range(0, len(mus), 2):
        assert mus[j + 1] == pytest.approx(np.conj(mus[j]), rel=1e-9)
        assert wts[j + 1] == pytest.approx(np.conj(wts[j]), rel=1e-6, abs=1e-12)


def test_two_significant_weights_near_trapping_transition():
    # theta pinned by scanning: relative weights 0.60 and 0.40 at 2.13 pi
    p = MaserParams(1.0, 0.1, 200.0, 2.13 * math.pi / math.sqrt(200.0), FixedTau(1.0))
    stats = steady_state(p)
    gen = build_sideband_generator(p, stats.N)
    dec = spectral_decomposition(gen, initial_sideband(stats))
    rel = np.abs(dec.weights.real) / stats.mean
    assert np.sum(rel > 0.1) >= 2


def test_defective_generator_reported():
    gen = SidebandGenerator(
        sub=np.array([0.0, 0.0]),
        diag=np.array([-1.0, -1.0]),
        sup=np.array([1.0, 0.0]),
        N=2,
        params=MaserParams(1.0, 0.0, 0.0, 1.0, FixedTau(1.0)),
    )
    with pytest.raises(SpectralError):
        spectral_decomposition(gen, np.array([1.0, 1.0]))


def test_shift_identity_on_matrices():
    """adag F(phi) = F(sqrt(nhat)) adag holds entrywise exactly: both
    sides carry sqrt(n+1) F(sqrt(n+1)) at (n+1, n)."""
    rng = np.random.default_rng(23)
    N = 30
    dim = N + 1
    adag = np.zeros((dim, dim))
    idx = np.arange(dim - 1)
    adag[idx + 1, idx] = np.sqrt(idx + 1.0)
    phi = np.sqrt(np.arange(1.0, dim + 1.0))
    sqrt_n = np.sqrt(np.arange(0.0, dim))
    for _ in range(5):
        c = rng.standard_normal(4)

        def F(x):
            return c[0] * np.sin(c[1] * x) + c[2] * np.cos(x) + c[3] * x**2

        left = adag @ np.diag(F(phi))
        right = np.diag(F(sqrt_n)) @ adag
        np.testing.assert_array_equal(left, right)


# -- spectrum and FWHM ------------------------------------------------------------


def test_single_lorentzian_fwhm():
    dec = SpectralDecomposition(np.array([0.7 + 0j]), np.array([2.5 + 0j]), 2.5)
    spectrum, fwhm = spectrum_and_fwhm(dec, np.linspace(-2.0, 2.0, 401))
    assert fwhm == pytest.approx(0.7, rel=1e-10)
    assert spectrum[200] == pytest.approx(2.5 / 0.35, rel=1e-12)  # peak 2 w / mu


def test_two_equal_weight_modes_fwhm():
    """Frozen from the quadratic half-maximum condition solved by hand:
    FWHM = 2 sqrt((-9/4 + sqrt(145)/4)/2) ~ 1.2332, strictly between the
    narrow width 1 and the arithmetic mean 2.5 (and far from the
    geometric mean 2)."""
    dec = SpectralDecomposition(np.array([1.0 + 0j, 4.0 + 0j]), np.array([1.0 + 0j, 1.0 + 0j]), 2.0)
    _, fwhm = spectrum_and_fwhm(dec, np.linspace(-3.0, 3.0, 601))
    assert fwhm == pytest.approx(1.2332061017511013, rel=1e-9)
    assert 1.0 < fwhm < 2.5


def test_non_decaying_mode_rejected():
    dec = SpectralDecomposition(np.array([-0.1 + 0j, 1.0 + 0j]), np.array([1.0 + 0j, 1.0 + 0j]), 2.0)
    with pytest.raises(SpectralError):
        spectrum_and_fwhm(dec, np.linspace(-2.0, 2.0, 101))


def test_micromaser_fwhm_close_to_linewidth(maser_params):
    # oracle-pinned: ~14% above the first trapping transition
    for theta in (2.5, 3.0):
        p = maser_params(theta)
        stats = steady_state(p)
        gen = build_sideband_generator(p, stats.N)
        dec = spectral_decomposition(gen, initial_sideband(stats))
        d = dec.linewidth
        _, fwhm = spectrum_and_fwhm(dec, np.linspace(-4.0 * d, 4.0 * d, 801))
        assert abs(fwhm - d) / d < 0.15
