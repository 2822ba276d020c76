"""Quantum-regression route: sideband generator, slope, spectrum.

The field correlation function g(t) = <adag(t) a(0)> follows from the
master equation applied to a skew operator P with initial condition
P(0) = a rho_ss.  Because the equation never mixes off-diagonal sectors,
P stays supported on the matrix elements v_n = <n|P|n+1>, and the full
superoperator restricts to a real tridiagonal generator G acting on v:

    dv_n/dt =   [ kappa n_th sqrt(n(n+1)) + r <sin(gt sqrt(n)) sin(gt sqrt(n+1))> ] v_{n-1}
              + [ -kappa (1+n_th)(n+1/2) - kappa n_th (n+3/2)
                  - r + r <cos(gt sqrt(n+1)) cos(gt sqrt(n+2))> ] v_n
              + [ kappa (1+n_th) sqrt((n+1)(n+2)) ] v_{n+1}

(gt is g tau; all tau averages use the shared machinery).  The linewidth
is read off the initial slope, D = -2 g'(0)/g(0), or equivalently from
the weighted mean of the generator's decay rates.

The boundary entries follow the truncated-operator convention (operators
are literal matrices on N+1 levels), so a single application of the
dense brute-force superoperator in this module reproduces G exactly,
including the last row.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .averages import TrigAverages, quadrature_nodes
from .errors import IntegrationError, SpectralError, VacuumStateError
from .linewidth import jump_operator_matrices
from .model import ExponentialTau, MaserParams
from .steady import PhotonStatistics

SUM_RULE_TOL = 1e-10
RESIDUAL_TOL = 1e-8
COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class SidebandGenerator:
    """Real tridiagonal generator of the first off-diagonal sector.

    ``sub[n]`` couples v_{n-1} into dv_n (sub[0] is zero), ``diag[n]``
    couples v_n, and ``sup[n]`` couples v_{n+1} (sup[N-1] is zero).
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    N: int
    params: MaserParams

    def __post_init__(self):
        for name in ("sub", "diag", "sup"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if arr.shape != (self.N,):
                raise ValueError(f"{name} must have shape ({self.N},)")

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        out = self.diag * v
        out[1:] += self.sub[1:] * v[:-1]
        out[:-1] += self.sup[:-1] * v[1:]
        return out

    def dense(self) -> np.ndarray:
        return (
            np.diag(self.diag)
            + np.diag(self.sub[1:], -1)
            + np.diag(self.sup[:-1], 1)
        )


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Decay rates mu_j = -2 eigenvalue and weights g_j of the expansion
    g(t) = sum_j g_j exp(-mu_j t / 2), with sum_j g_j = <n>."""

    mu: np.ndarray
    weights: np.ndarray
    n_mean: float

    @property
    def linewidth(self) -> float:
        """Weighted arithmetic mean of the decay rates; equals the slope D."""
        return float(np.real(self.weights @ self.mu) / np.real(self.weights.sum()))


def coherence_weights(N: int) -> np.ndarray:
    """The vector w with g(t) = w . v(t): w_n = sqrt(n+1)."""
    return np.sqrt(np.arange(1.0, N + 1.0))


def build_sideband_generator(
    params: MaserParams,
    N: int,
    averages: TrigAverages | None = None,
) -> SidebandGenerator:
    """Generator of the coherence sector on v_0..v_{N-1} (N+1 Fock levels)."""
    if N < 2:
        raise ValueError(f"the sideband sector needs at least 2 components, got {N}")
    if averages is None:
        averages = TrigAverages.for_params(params)
    kappa, n_th, r = params.kappa, params.n_th, params.r
    n = np.arange(N, dtype=float)
    s = np.sqrt(n)
    s1 = np.sqrt(n + 1.0)
    s2 = np.sqrt(n + 2.0)
    sub = kappa * n_th * s * s1 + r * averages.sin_sin(s, s1)
    diag = (
        -kappa * (1.0 + n_th) * (n + 0.5)
        - kappa * n_th * (n + 1.5)
        - r
        + r * averages.cos_cos(s1, s2)
    )
    sup = kappa * (1.0 + n_th) * s1 * s2
    sup[-1] = 0.0
    # truncated-operator convention: the anticommutator halves living on
    # level N+1 are absent from the literal matrices
    diag[-1] += kappa * n_th * (N + 1.0) / 2.0 + 0.5 * r * float(
        averages.sin_sin(np.sqrt(N + 1.0), np.sqrt(N + 1.0))
    )
    return SidebandGenerator(sub, diag, sup, N, params)


def initial_sideband(stats: PhotonStatistics) -> np.ndarray:
    """v(0) from P(0) = a rho_ss: v_n = sqrt(n+1) p_{n+1}."""
    return coherence_weights(stats.N) * stats.p[1:]


def linewidth_from_slope(gen: SidebandGenerator, v0: np.ndarray) -> float:
    """D = -2 (w . G v0) / (w . v0): one generator application, no stepping."""
    w = coherence_weights(gen.N)
    g0 = float(w @ v0)
    if g0 == 0.0:
        raise VacuumStateError("g(0) = 0: no coherence to decay")
    return -2.0 * float(w @ gen.apply(v0)) / g0


def correlate(gen: SidebandGenerator, v0: np.ndarray, t_grid) -> np.ndarray:
    """g(t) on the given grid by adaptive integration of dv/dt = G v.

    The grid must be ascending and start at 0; local error is kept at
    1e-10 relative.  A step failure raises :class:`IntegrationError`
    carrying the time that was reached.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1 or t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be ascending and start at 0")
    w = coherence_weights(gen.N)
    if t_grid.size == 1:
        return np.array([float(w @ v0)])
    scale = float(np.max(np.abs(v0)))
    stiff = float(np.max(np.abs(gen.diag)))
    sol = solve_ivp(
        lambda t, v: gen.apply(v),
        (0.0, float(t_grid[-1])),
        np.asarray(v0, dtype=float),
        method="DOP853",
        t_eval=t_grid,
        rtol=1e-10,
        atol=1e-14 * max(scale, 1e-300),
        first_step=min(0.1 / stiff, float(t_grid[-1])) if stiff > 0 else None,
    )
    if not sol.success:
        reached = float(sol.t[-1]) if sol.t.size else 0.0
        raise IntegrationError(f"integration stalled at t = {reached:g}: {sol.message}", reached)
    return w @ sol.y


def _scaling_exponents(sub: np.ndarray, sup: np.ndarray) -> np.ndarray:
    """Log of the diagonal similarity that balances the off-diagonal pair
    magnitudes (the coherence-sector analogue of detailed-balance scaling).

    ell_n - ell_{n-1} = (ln|sup_{n-1}| - ln|sub_n|)/2 where both couplings
    are nonzero, 0 otherwise; the result is centered so its exponential
    stays representable.
    """
    n = sub.size
    steps = np.zeros(n)
    both = (sub[1:] != 0.0) & (sup[:-1] != 0.0)
    steps[1:][both] = 0.5 * (np.log(np.abs(sup[:-1][both])) - np.log(np.abs(sub[1:][both])))
    ell = np.cumsum(steps)
    span = float(ell.max() - ell.min())
    if span > 1300.0:
        raise SpectralError(
            f"coherence amplitudes span e^{span:.0f}; the eigen route cannot "
            "represent this dynamic range in double precision"
        )
    return ell - 0.5 * (ell.max() + ell.min())


def spectral_decomposition(
    gen: SidebandGenerator,
    v0: np.ndarray,
    residual_tol: float = RESIDUAL_TOL,
    cond_limit: float = COND_LIMIT,
) -> SpectralDecomposition:
    """Eigen-expansion of the correlation function.

    Decay rates are mu_j = -2 lambda_j; weights follow from expanding v0
    in right eigenvectors and projecting through w.  The generator is
    first rescaled by the diagonal similarity that equalizes its
    off-diagonal pairs.  When every sub*sup product is positive the
    rescaled matrix is symmetric tridiagonal and the decomposition is
    orthogonal (perfectly conditioned); otherwise a general balanced
    solve is used, guarded by per-pair residuals and the basis condition
    number (a defective generator is reported, not silently
    approximated).  The sum rule sum_j g_j = <n> is enforced as a
    post-check either way.  Complex eigenvalues of the real generator
    come in conjugate pairs with conjugate weights.
    """
    v0 = np.asarray(v0, dtype=float)
    w = coherence_weights(gen.N)
    g0 = float(w @ v0)
    if g0 == 0.0:
        raise VacuumStateError("g(0) = 0: no coherence to decompose")
    sub, diag, sup = gen.sub, gen.diag, gen.sup
    ell = _scaling_exponents(sub, sup)
    w_scaled = w * np.exp(-ell)
    with np.errstate(divide="ignore"):
        v0_scaled = np.where(v0 != 0.0, np.sign(v0) * np.exp(ell + np.log(np.abs(v0))), 0.0)
    products = sub[1:] * sup[:-1]

    if products.size and np.all(products > 0.0):
        lam, q = scipy.linalg.eigh_tridiagonal(diag, np.sqrt(products))
        weights = ((w_scaled @ q) * (q.T @ v0_scaled)).astype(complex)
        mu = (-2.0 * lam).astype(complex)
    else:
        # sign-preserving balanced form: |T_sub| = |T_sup| = sqrt|sub*sup|
        t_sub = np.where(sup[:-1] != 0.0, np.sign(sub[1:]) * np.sqrt(np.abs(products)), sub[1:])
        t_sup = np.where(sub[1:] != 0.0, np.sign(sup[:-1]) * np.sqrt(np.abs(products)), sup[:-1])
        t = np.diag(diag) + np.diag(t_sub, -1) + np.diag(t_sup, 1)
        lam, vecs = scipy.linalg.eig(t)
        scale = max(np.linalg.norm(t, np.inf), 1.0)
        residual = np.linalg.norm(t @ vecs - vecs * lam[None, :], axis=0)
        col_norm = np.linalg.norm(vecs, axis=0)
        if np.any(residual > residual_tol * scale * col_norm):
            worst = float(np.max(residual / (scale * col_norm)))
            raise SpectralError(f"eigenpair residual {worst:.2e} exceeds {residual_tol:.0e}")
        cond = np.linalg.cond(vecs)
        if not np.isfinite(cond) or cond > cond_limit:
            raise SpectralError(
                f"eigenvector basis condition {cond:.2e} exceeds {cond_limit:.0e}; "
                "the generator is defective or nearly so"
            )
        coeffs = np.linalg.solve(vecs, v0_scaled.astype(complex))
        weights = (w_scaled @ vecs) * coeffs
        mu = -2.0 * lam

    total = weights.sum()
    if abs(total - g0) > SUM_RULE_TOL * abs(g0):
        raise SpectralError(
            f"sum rule violated: sum g_j = {complex(total):.15g} vs g(0) = {g0:.15g}"
        )
    order = np.argsort(mu.real, kind="stable")
    return SpectralDecomposition(mu[order], weights[order], g0)


def spectrum_and_fwhm(
    decomp: SpectralDecomposition,
    omega_grid,
    weight_floor: float = 1e-14,
) -> tuple[np.ndarray, float]:
    """One-sided spectrum S(w) = sum_j Re[g_j (mu_j/2 - i w)^(-1)] and its
    full width at half maximum (located by bisection on each flank).

    Modes with negligible weight are dropped; a retained mode that does
    not decay is rejected.
    """
    omega_grid = np.asarray(omega_grid, dtype=float)
    keep = np.abs(decomp.weights) > weight_floor * np.sum(np.abs(decomp.weights))
    mu = decomp.mu[keep]
    g = decomp.weights[keep]
    if np.any(mu.real <= 0):
        raise SpectralError("non-decaying mode retained; spectrum undefined")

    def value(omega):
        return np.real(g @ (1.0 / (mu[:, None] / 2.0 - 1j * np.atleast_1d(omega)[None, :])))

    spectrum = value(omega_grid)

    # refine the peak around the best grid point, then bisect each flank
    i = int(np.argmax(spectrum))
    lo = omega_grid[max(i - 1, 0)]
    hi = omega_grid[min(i + 1, omega_grid.size - 1)]
    peak_omega, peak = _golden_max(lambda x: float(value(x)[0]), lo, hi)
    half = peak / 2.0
    step = max((omega_grid[-1] - omega_grid[0]) / max(omega_grid.size - 1, 1), np.min(mu.real) / 8.0)
    left = _half_crossing(lambda x: float(value(x)[0]), peak_omega, -step, half)
    right = _half_crossing(lambda x: float(value(x)[0]), peak_omega, step, half)
    return spectrum, right - left


def _golden_max(f, lo, hi, iters=80):
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


def _half_crossing(f, start, step, half, max_doublings=200):
    """March from the peak until below half level, then bisect."""
    inner = start
    outer = start + step
    for _ in range(max_doublings):
        if f(outer) < half:
            break
        inner = outer
        step *= 2.0
        outer += step
    else:
        raise SpectralError("could not bracket the half-maximum crossing")
    for _ in range(100):
        mid = 0.5 * (inner + outer)
        if f(mid) >= half:
            inner = mid
        else:
            outer = mid
    return 0.5 * (inner + outer)


# ---------------------------------------------------------------------------
# Dense brute-force oracle
# ---------------------------------------------------------------------------


class DenseLindblad:
    """Literal dense superoperator built from a list of jump matrices.

    Exists to cross-check the banded machinery: it knows nothing about
    sectors, recurrences or detailed balance.
    """

    def __init__(self, jumps: list[np.ndarray]):
        if not jumps:
            raise ValueError("need at least one jump operator")
        self.jumps = [np.asarray(L, dtype=float) for L in jumps]
        self.dim = self.jumps[0].shape[0]
        self.anticom = sum(L.T @ L for L in self.jumps)

    @classmethod
    def for_params(cls, params: MaserParams, dim: int, n_nodes: int = 64) -> "DenseLindblad":
        if isinstance(params.tau_dist, ExponentialTau):
            dist = quadrature_nodes(params.tau_dist, n_nodes)
            params = replace(params, tau_dist=dist)
        return cls(jump_operator_matrices(params, dim))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """d rho / dt for the full density matrix."""
        out = -0.5 * (self.anticom @ rho + rho @ self.anticom)
        for L in self.jumps:
            out += L @ rho @ L.T
        return out

    def diagonal_rate_matrix(self) -> np.ndarray:
        """Rate matrix R of the diagonal dynamics, dp/dt = R p.

        diag(L diag(p) L^T) = (L o L) p, so R is assembled from the
        literal jump matrices without any recurrence knowledge; it is the
        brute-force path restricted to the photon-number populations.
        """
        gain = sum(L * L for L in self.jumps)
        return gain - np.diag(np.diagonal(self.anticom))

    def evolve(self, rho0: np.ndarray, t_grid, rtol: float = 1e-10) -> np.ndarray:
        """Density matrices at the requested times, shape (len(t), dim, dim)."""
        t_grid = np.asarray(t_grid, dtype=float)
        shape = rho0.shape
        sol = solve_ivp(
            lambda t, y: self.apply(y.reshape(shape)).ravel(),
            (float(t_grid[0]), float(t_grid[-1])),
            np.asarray(rho0, dtype=float).ravel(),
            method="DOP853",
            t_eval=t_grid,
            rtol=rtol,
            atol=1e-13,
        )
        if not sol.success:
            reached = float(sol.t[-1]) if sol.t.size else float(t_grid[0])
            raise IntegrationError(f"dense evolution stalled at t = {reached:g}", reached)
        return sol.y.T.reshape(len(t_grid), *shape)


def embed_sideband(v: np.ndarray, dim: int) -> np.ndarray:
    """Place v on the matrix elements (n, n+1) of a dim x dim operator."""
    P = np.zeros((dim, dim))
    idx = np.arange(len(v))
    P[idx, idx + 1] = v
    return P


def extract_sideband(P: np.ndarray) -> np.ndarray:
    """Read the coherence sector back: the (n, n+1) elements."""
    return np.diagonal(P, offset=1).copy()


def offsector_mass(P: np.ndarray) -> float:
    """Total |P_ij| outside the first upper off-diagonal."""
    mask = np.ones_like(P, dtype=bool)
    idx = np.arange(P.shape[0] - 1)
    mask[idx, idx + 1] = False
    return float(np.sum(np.abs(P[mask])))
