"""Uniform few-operator approximation of the exponentially averaged pump.

For an exponentially distributed interaction time the continuum of pump
operators can be traded for a small discrete family.  Writing t =
tau/tau_bar, the standard Laguerre polynomials L_k(t) are orthonormal
under the unit-mean exponential measure, and

    cos(x t) = sum_k ck_cos(x) L_k(t),   sin(x t) = sum_k ck_sin(x) L_k(t),

with coefficients that follow from the Laplace transform of L_k:

    int_0^inf e^{-t} L_k(t) e^{ixt} dt = (-ix)^k / (1 - ix)^(k+1),

so ck_cos and ck_sin are its real and imaginary parts: rational in x with
denominator (1 + x^2)^(k+1).  By orthonormality the tau-integrated pump
dissipator collapses exactly to one dissipator per retained degree, with
jump operators

    cosine family:  sqrt(r)  ck_cos(gb phi)            (Hermitian, diagonal)
    sine family:    sqrt(r)  adag  ck_sin(gb phi)/phi

where gb = g tau_bar and phi is the diagonal sqrt(n+1).  Truncating the
two families at finite degree gives a master equation in explicitly
trace-preserving dissipator form whose accuracy degrades only once the
photon statistics reach levels with gb sqrt(n) beyond the retained order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ExponentialTau, FockDiagonal, MaserParams
from .regression import SidebandGenerator, initial_sideband, linewidth_from_slope
from .steady import PhotonStatistics, statistics_from_ratios, _tail_bound, auto_truncation


def laguerre_trig_coeffs(x, kind: str, order: int) -> np.ndarray:
    """Coefficients c_k(x), k = 0..order, of trig(x t) in orthonormal
    Laguerre polynomials of the unit-mean exponential measure.

    Evaluated by the stable multiplicative recurrence
    z_{k+1} = z_k * (-ix)/(1 - ix) starting from z_0 = 1/(1 - ix); the
    ratio has modulus x/sqrt(1+x^2) < 1, so no growth occurs.  Returns an
    array of shape (order+1,) + shape(x).
    """
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    if kind not in ("cos", "sin"):
        raise ValueError(f"kind must be 'cos' or 'sin', got {kind!r}")
    x = np.asarray(x, dtype=float)
    z = 1.0 / (1.0 - 1j * x)
    ratio = -1j * x * z
    out = np.empty((order + 1,) + x.shape, dtype=float)
    part = np.real if kind == "cos" else np.imag
    current = z
    for k in range(order + 1):
        out[k] = part(current)
        current = current * ratio
    return out


@dataclass(frozen=True, eq=False)
class UniformLindbladSet:
    """Truncated cosine/sine jump families on Fock levels 0..N.

    ``cos_coeffs[k]``/``sin_coeffs[k]`` hold the degree-k coefficient
    diagonals evaluated at gb*phi (phi eigenvalue sqrt(m+1) at level m).
    """

    order_sin: int
    order_cos: int
    cos_coeffs: list[FockDiagonal]
    sin_coeffs: list[FockDiagonal]
    tau_bar: float
    params: MaserParams
    N: int

    def cos_table(self) -> np.ndarray:
        """Array [k, m] of cosine-family diagonals."""
        return np.stack([d.values for d in self.cos_coeffs])

    def sin_table(self) -> np.ndarray:
        return np.stack([d.values for d in self.sin_coeffs])

    def jump_matrices(self, dim: int | None = None) -> list[np.ndarray]:
        """Literal matrices of the truncated set, thermal operators included."""
        dim = dim or self.N + 1
        if dim > self.N + 1:
            raise ValueError("coefficient tables only cover N + 1 levels")
        p = self.params
        a = np.zeros((dim, dim))
        idx = np.arange(dim - 1)
        a[idx, idx + 1] = np.sqrt(idx + 1.0)
        phi = np.sqrt(np.arange(1.0, dim + 1.0))
        ops = [np.sqrt(p.kappa * (1.0 + p.n_th)) * a]
        if p.n_th > 0:
            ops.append(np.sqrt(p.kappa * p.n_th) * a.T)
        root_r = np.sqrt(p.r)
        for d in self.cos_coeffs:
            ops.append(root_r * np.diag(d.values[:dim]))
        for d in self.sin_coeffs:
            ops.append(root_r * a.T @ np.diag(d.values[:dim] / phi))
        return ops


def build_uniform_lindblad(
    params: MaserParams,
    orders: tuple[int, int],
    N: int | None = None,
    allow_any_orders: bool = False,
) -> UniformLindbladSet:
    """Assemble the truncated jump families for given (order_sin, order_cos).

    The supported pairing keeps the sine family one degree ahead of the
    cosine family with an odd sine order, e.g. (1, 0), (3, 2), (7, 6);
    other pairings are accepted behind ``allow_any_orders`` but are not
    exercised by the test suite.
    """
    if not isinstance(params.tau_dist, ExponentialTau):
        raise ValueError("the uniform approximation applies to exponential distributions")
    order_sin, order_cos = orders
    if not allow_any_orders:
        if order_sin < 1 or order_sin % 2 == 0 or order_cos != order_sin - 1:
            raise ValueError(
                f"orders {orders} violate the (odd sine, sine-1 cosine) pairing; "
                "pass allow_any_orders=True to override"
            )
    elif order_sin < 0 or order_cos < 0:
        raise ValueError(f"orders must be non-negative, got {orders}")
    if N is None:
        N = auto_truncation(params)
    x = params.g_bar * np.sqrt(np.arange(1.0, N + 2.0))
    cos_tab = laguerre_trig_coeffs(x, "cos", order_cos)
    sin_tab = laguerre_trig_coeffs(x, "sin", order_sin)
    return UniformLindbladSet(
        order_sin=order_sin,
        order_cos=order_cos,
        cos_coeffs=[FockDiagonal(row, "phi") for row in cos_tab],
        sin_coeffs=[FockDiagonal(row, "phi") for row in sin_tab],
        tau_bar=params.tau_dist.tau_bar,
        params=params,
        N=N,
    )


def uniform_gain(uset: UniformLindbladSet) -> np.ndarray:
    """Per-atom gain sum_k ck_sin(gb sqrt(n+1))^2 at n = 0..N (units of r)."""
    return np.sum(uset.sin_table() ** 2, axis=0)


def uniform_steady_state(uset: UniformLindbladSet) -> PhotonStatistics:
    """Stationary statistics of the truncated model (its own detailed balance):

        (1 + n_th) p_{n+1} = [ n_th + n_ex sum_k ck_sin^2 / (n+1) ] p_n
    """
    p = uset.params
    n = np.arange(uset.N + 1, dtype=float)
    gain = p.n_ex * uniform_gain(uset) / (n + 1.0)
    ratios = (p.n_th + gain) / (1.0 + p.n_th)
    probs = statistics_from_ratios(ratios[: uset.N])
    return PhotonStatistics(probs, uset.N, _tail_bound(probs, float(ratios[uset.N])))


def uniform_generator(uset: UniformLindbladSet) -> SidebandGenerator:
    """Coherence-sector generator of the truncated model.

    Same structure as the exact generator with the tau-averaged trig
    products replaced by their truncated Parseval sums; the boundary
    follows the shared truncated-operator convention.
    """
    p = uset.params
    kappa, n_th, r = p.kappa, p.n_th, p.r
    N = uset.N
    n = np.arange(N, dtype=float)
    s1 = np.sqrt(n + 1.0)
    s2 = np.sqrt(n + 2.0)
    # coefficient tables at phi eigenvalues sqrt(m+1), m = 0..N
    cos_tab = uset.cos_table()
    sin_tab = uset.sin_table()
    # values at nhat^(1/2) eigenvalues sqrt(n), n = 0..N-1 for the gain band
    sin_at_sqrt_n = laguerre_trig_coeffs(p.g_bar * np.sqrt(n), "sin", uset.order_sin)
    sub = kappa * n_th * np.sqrt(n) * s1 + r * np.sum(sin_at_sqrt_n * sin_tab[:, :N], axis=0)
    cos_here = cos_tab[:, :N]
    cos_next = cos_tab[:, 1 : N + 1]
    sin_here = sin_tab[:, :N]
    sin_next = sin_tab[:, 1 : N + 1]
    diag = (
        -kappa * (1.0 + n_th) * (n + 0.5)
        - kappa * n_th * (n + 1.5)
        + r * np.sum(cos_here * cos_next - 0.5 * cos_here**2 - 0.5 * cos_next**2, axis=0)
        - 0.5 * r * np.sum(sin_here**2 + sin_next**2, axis=0)
    )
    sup = kappa * (1.0 + n_th) * s1 * s2
    sup[-1] = 0.0
    diag[-1] += kappa * n_th * (N + 1.0) / 2.0 + 0.5 * r * float(np.sum(sin_tab[:, N] ** 2))
    return SidebandGenerator(sub, diag, sup, N, p)


def uniform_linewidth(
    uset: UniformLindbladSet,
    stats: PhotonStatistics | None = None,
    use_exact_statistics: bool = False,
) -> float:
    """Linewidth of the truncated model from the initial-slope formula.

    By default the truncated model's own steady state seeds the slope;
    ``use_exact_statistics`` substitutes the exact exponential-model
    statistics instead (same truncation).
    """
    if stats is None:
        if use_exact_statistics:
            from .steady import steady_state_exp

            stats = steady_state_exp(uset.params, uset.N)
        else:
            stats = uniform_steady_state(uset)
    gen = uniform_generator(uset)
    return linewidth_from_slope(gen, initial_sideband(stats))


def uniform_pump_weights(uset: UniformLindbladSet) -> tuple[np.ndarray, np.ndarray]:
    """Fock-resolved (cosine, sine) linewidth weights of the truncated model.

    The truncated analogue of :func:`maserline.linewidth.pump_weights`:
    trig products are replaced by truncated Parseval sums, so comparing
    the two locates the photon number where the approximation breaks.
    """
    p = uset.params
    N = uset.N
    n = np.arange(N + 1, dtype=float)
    s = np.sqrt(n)
    s1 = np.sqrt(n + 1.0)
    cos_up = laguerre_trig_coeffs(p.g_bar * s1, "cos", uset.order_cos)
    cos_dn = laguerre_trig_coeffs(p.g_bar * s, "cos", uset.order_cos)
    sin_up = laguerre_trig_coeffs(p.g_bar * s1, "sin", uset.order_sin)
    sin_dn = laguerre_trig_coeffs(p.g_bar * s, "sin", uset.order_sin)
    cos_w = p.n_ex * n * np.sum((cos_up - cos_dn) ** 2, axis=0)
    sin_w = p.n_ex * np.sum((s1[None, :] * sin_up - s[None, :] * sin_dn) ** 2, axis=0)
    return cos_w, sin_w
