"""Charge-propagation velocity, charge capacity and maximum throughput.

Velocity along the filament follows

    v(t) = (beta/alpha) * (1 + eta'(tau)/24),   tau = t / (24 alpha)
    eta'(tau) = 4 W^2 e^{-k tau} / (1 + c (1 - e^{-k tau}))

with ``W = Omega``, ``k = 4 mu2 / 3`` and ``c = 4 mu1 W^2 / (5 mu2)``.
Throughput counts one bit per electron: the per-micrometer charge capacity
times the velocity in micrometers per second.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from actinwire.circuit import FilamentCircuit
from actinwire.errors import ParameterDomainError

#: Returned by :func:`transmission_time` when the message does not fit
#: before the velocity stops.
NOT_DELIVERABLE = math.inf

DEFAULT_OMEGA = 2.3810
DEFAULT_BETA_M = 2 * 5.4e-9
# Initial charge velocity the default alpha is fitted to.
V0_TARGET_M_S = 0.03


def fitted_alpha(beta: float = DEFAULT_BETA_M, Omega: float = DEFAULT_OMEGA,
                 v0: float = V0_TARGET_M_S) -> float:
    """alpha such that v(0) = (beta/alpha)(1 + 4 Omega^2/24) equals ``v0``."""
    return beta * (1.0 + 4.0 * Omega**2 / 24.0) / v0


DEFAULT_ALPHA_S = fitted_alpha()


def literal_alpha(c: FilamentCircuit) -> float:
    """alpha = R/L + C R evaluated on a circuit.

    The two terms have units 1/s and s, so the sum has no consistent unit;
    with the published 1 um values it gives ~3.5e18 and a velocity many
    orders of magnitude below 0.03 m/s.
    """
    warnings.warn(
        "literal alpha = R/L + CR is dimensionally inconsistent; velocities "
        "will not match the published throughput",
        RuntimeWarning,
        stacklevel=2,
    )
    return c.R_eq / c.L_eq + c.C_eq * c.R_eq


@dataclass(frozen=True)
class TransportParams:
    Omega: float = DEFAULT_OMEGA
    mu1: float = 10.0
    mu2: float = 1.0
    alpha: float = DEFAULT_ALPHA_S
    beta: float = DEFAULT_BETA_M
    charge_per_monomer: float = 4.0
    monomers_per_um: float = 370.0
    t_stop_s: float | None = 60e-6

    def __post_init__(self) -> None:
        checks = {
            "Omega": self.Omega > 0,
            "mu1": self.mu1 >= 0,
            "mu2": self.mu2 > 0,
            "alpha": self.alpha > 0,
            "beta": self.beta > 0,
            "charge_per_monomer": self.charge_per_monomer > 0,
            "monomers_per_um": self.monomers_per_um > 0,
        }
        for name, ok in checks.items():
            value = getattr(self, name)
            if not (math.isfinite(value) and ok):
                raise ParameterDomainError(f"invalid {name}: {value!r}")
        if self.t_stop_s is not None and not (self.t_stop_s > 0):
            raise ParameterDomainError(f"t_stop_s must be > 0 or None, got {self.t_stop_s!r}")

    @property
    def decay_rate(self) -> float:
        return 4.0 * self.mu2 / 3.0

    @property
    def saturation(self) -> float:
        return 4.0 * self.mu1 * self.Omega**2 / (5.0 * self.mu2)


@dataclass(frozen=True)
class ThroughputPoint:
    t_s: float
    v_m_s: float
    throughput_bps: float


def _scalar(x):
    return x[()] if isinstance(x, np.ndarray) and x.ndim == 0 else x


def eta_prime(tau, p: TransportParams):
    """d(eta)/d(tau); decays from 4 Omega^2 at tau=0 to 0."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ParameterDomainError("tau must be >= 0")
    decay = np.exp(-p.decay_rate * tau)
    grown = -np.expm1(-p.decay_rate * tau)
    return _scalar(4.0 * p.Omega**2 * decay / (1.0 + p.saturation * grown))


def velocity(t, p: TransportParams):
    """Charge velocity in m/s at time ``t`` seconds; 0 from ``t_stop_s`` on."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ParameterDomainError("t must be >= 0")
    v = p.beta / p.alpha * (1.0 + np.asarray(eta_prime(t / (24.0 * p.alpha), p)) / 24.0)
    if p.t_stop_s is not None:
        v = np.where(t >= p.t_stop_s, 0.0, v)
    return _scalar(v)


def plateau_velocity(p: TransportParams) -> float:
    """Long-time limit of the unclamped velocity, beta/alpha."""
    return p.beta / p.alpha


def charge_capacity(length_um: float, p: TransportParams) -> float:
    """In-flight capacity in bits (one electron per bit) of a filament."""
    if not length_um > 0:
        raise ParameterDomainError(f"length_um must be > 0, got {length_um!r}")
    return p.charge_per_monomer * p.monomers_per_um * length_um


def max_throughput(t, p: TransportParams):
    """Maximum throughput in bit/s: velocity in um/s times the 1 um capacity."""
    return _scalar(np.asarray(velocity(t, p)) * 1e6 * charge_capacity(1.0, p))


def throughput_curve(t_values, p: TransportParams) -> list[ThroughputPoint]:
    t = np.asarray(t_values, dtype=float)
    v = np.atleast_1d(velocity(t, p))
    tm = v * 1e6 * charge_capacity(1.0, p)
    return [ThroughputPoint(float(a), float(b), float(c)) for a, b, c in zip(t, v, tm)]


def _knee_time(p: TransportParams) -> float:
    # e^{-k tau} < 1e-17 beyond this point: eta' is below double resolution
    return 24.0 * p.alpha * 40.0 / p.decay_rate


def bits_sent(T: float, p: TransportParams) -> float:
    """Integral of the maximum throughput over [0, T]."""
    if T <= 0:
        return 0.0
    if p.t_stop_s is not None:
        T = min(T, p.t_stop_s)
    knee = _knee_time(p)
    head = min(T, knee)
    total, _ = quad(lambda t: max_throughput(t, p), 0.0, head,
                    epsabs=0.0, epsrel=1e-11, limit=200)
    if T > knee:
        total += plateau_velocity(p) * 1e6 * charge_capacity(1.0, p) * (T - knee)
    return total


@lru_cache(maxsize=256)
def transmission_time(message_bits: float, p: TransportParams) -> float:
    """Smallest time T with bits_sent(T) >= message_bits.

    Returns :data:`NOT_DELIVERABLE` when the velocity stops before the
    message has been carried.
    """
    if not message_bits >= 1:
        raise ParameterDomainError(f"message_bits must be >= 1, got {message_bits!r}")
    # throughput never drops below the plateau before t_stop, so this brackets T
    upper = message_bits / (plateau_velocity(p) * 1e6 * charge_capacity(1.0, p))
    if p.t_stop_s is not None:
        if bits_sent(p.t_stop_s, p) < message_bits:
            return NOT_DELIVERABLE
        upper = min(upper, p.t_stop_s)
    return brentq(lambda T: bits_sent(T, p) - message_bits, 0.0, upper,
                  xtol=1e-30, rtol=1e-12, maxiter=200)
