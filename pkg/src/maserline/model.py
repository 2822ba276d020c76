"""Physical parameters, interaction-time distributions and Fock diagonals.

Every computation in this package consumes a single :class:`MaserParams`
record: cavity decay rate ``kappa``, thermal occupation ``n_th``, atom
injection rate ``r``, one-photon Rabi frequency ``g`` and a distribution
for the atom-cavity interaction time.  Physics only depends on the
dimensionless combinations ``r/kappa``, ``g*tau`` and ``n_th``; ``kappa``
fixes the unit in which rates (and the linewidth) are expressed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

_WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class FixedTau:
    """Point mass: every atom interacts for exactly ``tau``."""

    tau: float

    def __post_init__(self):
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise ValueError(f"interaction time must be positive and finite, got {self.tau}")

    def scaled(self, factor: float) -> "FixedTau":
        return FixedTau(self.tau * factor)


@dataclass(frozen=True)
class ExponentialTau:
    """Exponentially distributed interaction time with mean ``tau_bar``."""

    tau_bar: float

    def __post_init__(self):
        if not (self.tau_bar > 0 and math.isfinite(self.tau_bar)):
            raise ValueError(f"mean interaction time must be positive and finite, got {self.tau_bar}")

    def scaled(self, factor: float) -> "ExponentialTau":
        return ExponentialTau(self.tau_bar * factor)


@dataclass(frozen=True, eq=False)
class DiscreteTau:
    """Finite node list ``(tau_k, dp_k)`` with weights summing to one."""

    taus: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        taus = np.atleast_1d(np.asarray(self.taus, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "weights", weights)
        if taus.shape != weights.shape or taus.ndim != 1 or taus.size == 0:
            raise ValueError("nodes and weights must be matching non-empty 1-d sequences")
        if not np.all(np.isfinite(taus)) or not np.all(taus > 0):
            raise ValueError("all interaction times must be positive and finite")
        if not np.all(weights > 0):
            raise ValueError("all node weights must be positive")
        total = weights.sum()
        if abs(total - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError(f"node weights must sum to 1 within {_WEIGHT_SUM_TOL}, got {total!r}")

    def scaled(self, factor: float) -> "DiscreteTau":
        return DiscreteTau(self.taus * factor, self.weights)


InteractionTimeDistribution = FixedTau | ExponentialTau | DiscreteTau


@dataclass(frozen=True)
class MaserParams:
    """Rates of the micromaser master equation plus the tau distribution.

    Parameters
    ----------
    kappa:
        Cavity decay rate, > 0.  Sets the unit of every returned rate.
    n_th:
        Thermal occupation of the cavity environment, >= 0.
    r:
        Injection rate of excited atoms (Poissonian beam), >= 0.
    g:
        One-photon Rabi frequency, > 0.
    tau_dist:
        Interaction-time distribution.
    """

    kappa: float
    n_th: float
    r: float
    g: float
    tau_dist: InteractionTimeDistribution

    def __post_init__(self):
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise ValueError(f"kappa must be positive and finite, got {self.kappa}")
        if not (self.n_th >= 0 and math.isfinite(self.n_th)):
            raise ValueError(f"n_th must be non-negative and finite, got {self.n_th}")
        if not (self.r >= 0 and math.isfinite(self.r)):
            raise ValueError(f"r must be non-negative and finite, got {self.r}")
        if not (self.g > 0 and math.isfinite(self.g)):
            raise ValueError(f"g must be positive and finite, got {self.g}")
        if not isinstance(self.tau_dist, (FixedTau, ExponentialTau, DiscreteTau)):
            raise TypeError(f"unsupported interaction-time distribution: {self.tau_dist!r}")

    @property
    def n_ex(self) -> float:
        """Atoms injected per cavity lifetime, r / kappa."""
        return self.r / self.kappa

    def theta(self, tau: float) -> float:
        """Pump parameter sqrt(r/kappa) * g * tau for a given interaction time."""
        return math.sqrt(self.n_ex) * self.g * tau

    @property
    def g_bar(self) -> float:
        """Rabi angle per mean interaction time, g * tau_bar (exponential only)."""
        if not isinstance(self.tau_dist, ExponentialTau):
            raise ValueError("g_bar is defined for exponentially distributed interaction times")
        return self.g * self.tau_dist.tau_bar

    @property
    def theta_bar(self) -> float:
        """Pump parameter sqrt(r/kappa) * g * tau_bar (exponential only)."""
        return math.sqrt(self.n_ex) * self.g_bar

    def canonical(self) -> "MaserParams":
        """Rescale to kappa = 1: rates divide by kappa, times multiply.

        The products g*tau and the ratio r/kappa are invariant, so any
        linewidth computed from the canonical record equals the physical
        one divided by kappa.
        """
        k = self.kappa
        return replace(
            self,
            kappa=1.0,
            r=self.r / k,
            g=self.g / k,
            tau_dist=self.tau_dist.scaled(k),
        )


# Tags for diagonals on the truncated Fock basis.  "phi" carries the
# eigenvalue sqrt(n+1) at index n (the operator (a a^dag)^(1/2)), "sqrt_n"
# carries sqrt(n), and "n" the photon number itself.
FOCK_BASIS_TAGS = ("n", "sqrt_n", "phi")


@dataclass(frozen=True, eq=False)
class FockDiagonal:
    """A diagonal operator on the Fock levels 0..N, with a basis tag."""

    values: np.ndarray
    basis: str

    def __post_init__(self):
        values = np.atleast_1d(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("a Fock diagonal must be a non-empty 1-d sequence")
        if self.basis not in FOCK_BASIS_TAGS:
            raise ValueError(f"unknown basis tag {self.basis!r}, expected one of {FOCK_BASIS_TAGS}")

    @property
    def n_max(self) -> int:
        return self.values.size - 1


def phi_eigenvalues(n_max: int) -> FockDiagonal:
    """Diagonal of (a a^dag)^(1/2) on levels 0..n_max: sqrt(1), ..., sqrt(n_max+1).

    n_max = 0 is rejected: a single Fock level supports no dynamics.
    """
    if n_max < 1:
        raise ValueError(f"basis size must be at least 1, got {n_max}")
    return FockDiagonal(np.sqrt(np.arange(1.0, n_max + 2.0)), "phi")
