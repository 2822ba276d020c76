"""Steady-state photon statistics via detailed-balance recurrences.

The stationary state of the micromaser master equation is diagonal in the
photon-number basis and satisfies, link by link,

    (1 + n_th) p_{n+1} = [ n_th + n_ex <(g tau)^2 sinc^2(g tau sqrt(n+1))>_tau ] p_n

with n_ex = r/kappa.  The recurrence is evaluated in log space with a
final renormalization because p_n spans hundreds of orders of magnitude
below threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .averages import TrigAverages
from .errors import ResourceLimitError, TruncationError, VacuumStateError
from .model import ExponentialTau, MaserParams

# Adequacy: the top retained level must be negligible against the peak,
# unless it is an exact trapping-state zero.
TAIL_TOL = 1e-12
NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PhotonStatistics:
    """Normalized steady-state diagonal p_0..p_N on a truncated Fock basis."""

    p: np.ndarray
    N: int
    tail_mass_bound: float

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        object.__setattr__(self, "p", p)
        if p.ndim != 1 or p.size != self.N + 1:
            raise ValueError("p must be a 1-d array of length N + 1")
        if np.any(p < 0):
            raise ValueError("probabilities must be non-negative")
        total = p.sum()
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"probabilities must sum to 1 within {NORMALIZATION_TOL}, got {total!r}")
        top = p[-1]
        # tail_mass_bound == 0 marks exact trapping-state support (nothing
        # beyond the edge), where a large p_N is legitimate
        if self.tail_mass_bound != 0.0 and top > TAIL_TOL * p.max():
            raise TruncationError(
                f"p_N = {top:.3e} exceeds {TAIL_TOL} of the peak; increase the truncation"
            )

    @classmethod
    def from_probabilities(cls, p, tail_mass_bound: float = 0.0) -> "PhotonStatistics":
        p = np.asarray(p, dtype=float)
        return cls(p / p.sum(), p.size - 1, tail_mass_bound)

    @property
    def mean(self) -> float:
        return float(np.arange(self.p.size) @ self.p)

    @property
    def variance(self) -> float:
        n = np.arange(self.p.size)
        m = float(n @ self.p)
        return float((n * n) @ self.p) - m * m


def moments(stats: PhotonStatistics) -> tuple[float, float]:
    """Mean and variance of the photon number by direct summation."""
    return stats.mean, stats.variance


def recurrence_ratios(params: MaserParams, N: int, averages: TrigAverages | None = None) -> np.ndarray:
    """Ratios p_{n+1}/p_n for n = 0..N-1 of the detailed-balance recurrence."""
    if averages is None:
        averages = TrigAverages.for_params(params)
    n = np.arange(N, dtype=float)
    s_up = np.sqrt(n + 1.0)
    gain = params.n_ex * averages.pump_gain(s_up, snap_trapping=(params.n_th == 0.0))
    return (params.n_th + gain) / (1.0 + params.n_th)


def statistics_from_ratios(ratios: np.ndarray) -> np.ndarray:
    """Normalized p from link ratios, in log space; zero ratios propagate
    as hard zeros (trapping-state support)."""
    ratios = np.asarray(ratios, dtype=float)
    if np.any(ratios < 0):
        raise ValueError("recurrence ratios must be non-negative")
    with np.errstate(divide="ignore"):
        log_r = np.log(ratios)
    log_p = np.concatenate(([0.0], np.cumsum(log_r)))
    log_p -= np.max(log_p)
    p = np.exp(log_p)
    return p / p.sum()


def _tail_bound(p: np.ndarray, next_ratio: float) -> float:
    """Geometric bound on the mass truncated away above level N."""
    top = float(p[-1])
    if top == 0.0:
        return 0.0
    if not (0.0 <= next_ratio < 1.0):
        raise TruncationError(
            f"recurrence ratio {next_ratio:.3f} at the truncation edge is not contracting"
        )
    return top * next_ratio / (1.0 - next_ratio)


def steady_state(
    params: MaserParams,
    N: int | None = None,
    averages: TrigAverages | None = None,
) -> PhotonStatistics:
    """Steady state for any supported interaction-time distribution.

    The tau average in the gain uses ``averages`` when given (e.g. a
    fixed Gauss-Laguerre discretization), otherwise the distribution's
    default: exact point mass, node list, or the closed exponential form.
    """
    if params.r == 0.0 and params.n_th == 0.0:
        # vacuum fixed point; shortcut documents intent
        n = 1 if N is None else N
        p = np.zeros(n + 1)
        p[0] = 1.0
        return PhotonStatistics(p, n, 0.0)
    if N is None:
        N = auto_truncation(params)
    if N < 1:
        raise ValueError(f"truncation must be at least 1, got {N}")
    ratios = recurrence_ratios(params, N + 1, averages)
    p = statistics_from_ratios(ratios[:N])
    return PhotonStatistics(p, N, _tail_bound(p, float(ratios[N])))


def steady_state_exp(params: MaserParams, N: int | None = None) -> PhotonStatistics:
    """Closed-form statistics for the exponential distribution at n_th = 0:

        p_{n+1} = 2 theta_bar^2 / (1 + 4 g_bar^2 (n+1)) p_n
    """
    if not isinstance(params.tau_dist, ExponentialTau):
        raise ValueError("steady_state_exp requires an exponential interaction-time distribution")
    if params.n_th != 0.0:
        raise ValueError("the closed-form recurrence holds for n_th = 0 only")
    if params.r == 0.0:
        return steady_state(params, N)
    if N is None:
        N = auto_truncation(params)
    n = np.arange(N + 1, dtype=float)
    ratios = 2.0 * params.theta_bar**2 / (1.0 + 4.0 * params.g_bar**2 * (n + 1.0))
    p = statistics_from_ratios(ratios[:N])
    return PhotonStatistics(p, N, _tail_bound(p, float(ratios[N])))


def auto_truncation(params: MaserParams, hard_limit: int = 20000) -> int:
    """Pick a truncation N with the recurrence contracting on n >= N/4
    and an adequately small tail; doubles on failure up to ``hard_limit``.
    """
    n_ex = params.n_ex
    if params.r == 0.0:
        if params.n_th == 0.0:
            return 1
        # thermal geometric tail: ratio q = n_th/(1+n_th) forever
        q = params.n_th / (1.0 + params.n_th)
        needed = math.ceil(-12.0 * math.log(10.0) / math.log(q)) if q > 0 else 1
        candidate = max(50, 2 * needed)
    elif isinstance(params.tau_dist, ExponentialTau):
        crossing = (2.0 * params.theta_bar**2 - 1.0) / (4.0 * params.g_bar**2)
        candidate = math.ceil(4.0 * max(50.0, crossing))
    else:
        # gain(n) <= n_ex/(n+1), so the ratio contracts beyond n_ex
        candidate = math.ceil(4.0 * max(50.0, n_ex))

    while True:
        if candidate > hard_limit:
            raise ResourceLimitError(
                f"adequate truncation exceeds the hard limit of {hard_limit} levels"
            )
        ratios = recurrence_ratios(params, candidate, None)
        if np.all(ratios[candidate // 4 :] < 1.0):
            p = statistics_from_ratios(ratios)
            top = p[-1]
            if top == 0.0 or top <= TAIL_TOL * p.max():
                return candidate
        candidate *= 2


def require_excitation(stats: PhotonStatistics) -> float:
    """Mean photon number, raising :class:`VacuumStateError` when zero."""
    mean = stats.mean
    if mean == 0.0:
        raise VacuumStateError("vacuum state: no phase coherence, linewidth undefined")
    return mean
