"""Two-pole frequency response of a filament circuit.

The transfer function of the RLC chain is

    T(s) = (1/LC) / (s^2 + s R/L + 1/LC)

with two real negative poles in the overdamped regime. The frequency
variable is angular (rad/s); sweeps take hertz and convert.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from actinwire.circuit import FilamentCircuit
from actinwire.errors import ModelDomainError, ParameterDomainError, UnsupportedCombinationError

_LOG10_E = 1.0 / math.log(10.0)


class PhaseMode(str, Enum):
    # arctan of the real-valued expression, as printed
    LITERAL = "literal"
    # arg T(j*omega)
    STANDARD = "standard"


class DelayMethod(str, Enum):
    CLOSED_FORM = "closed_form"
    FINITE_DIFFERENCE = "finite_difference"


@dataclass(frozen=True)
class Poles:
    p1: float  # large magnitude
    p2: float  # small magnitude


@dataclass(frozen=True)
class ResponsePoint:
    freq_hz: float
    omega: float
    atten_db: float
    phase_deg: float
    delay_s: float


def compute_poles(c: FilamentCircuit) -> Poles:
    """Real roots of s^2 + s R/L + 1/(LC) for an overdamped circuit.

    The large root is taken from the quadratic formula (no cancellation, both
    terms share a sign); the small root comes from the product p1 p2 = 1/(LC).
    The naive ``-a + sqrt(a^2 - w0^2)`` loses nearly every digit when the two
    roots are 14 orders of magnitude apart.
    """
    a = c.R_eq / (2.0 * c.L_eq)
    w0_sq = 1.0 / (c.L_eq * c.C_eq)
    # q = w0^2 / a^2 = 4L / (R^2 C), formed without squaring a
    q = 4.0 * c.L_eq / (c.R_eq * c.R_eq * c.C_eq)
    if q > 1.0:
        raise ModelDomainError(
            f"underdamped circuit: (R/2L)^2 < 1/(LC) (w0^2/a^2 = {q:.6g}); poles are complex"
        )
    if q == 1.0:
        raise ModelDomainError("critically damped circuit: (R/2L)^2 == 1/(LC); poles coincide")
    p1 = -a * (1.0 + math.sqrt(1.0 - q))
    p2 = w0_sq / p1
    if not (p1 < p2 < 0.0):
        raise ModelDomainError(f"degenerate poles p1={p1!r}, p2={p2!r}")
    return Poles(p1, p2)


def _check_omega(omega):
    if np.any(np.asarray(omega) < 0):
        raise ParameterDomainError("omega must be >= 0")


def _pole_term_db(omega, p: float):
    """20 log10 sqrt(omega^2 + p^2), without forming omega^2 + p^2."""
    ratio = np.asarray(omega, dtype=float) / p
    return 20.0 * math.log10(abs(p)) + 10.0 * _LOG10_E * np.log1p(ratio * ratio)


def attenuation_db(c: FilamentCircuit, omega, poles: Poles | None = None):
    """Channel gain in dB at angular frequency ``omega``.

    ``20 log(1/LC) - 20 log sqrt(w^2+p1^2) - 20 log sqrt(w^2+p2^2)`` with
    base-10 logs. The value is 0 dB at DC and decreases with ``omega``.
    """
    _check_omega(omega)
    poles = poles or compute_poles(c)
    gain = -20.0 * math.log10(c.L_eq * c.C_eq)
    out = gain - _pole_term_db(omega, poles.p1) - _pole_term_db(omega, poles.p2)
    return out[()] if isinstance(out, np.ndarray) and out.ndim == 0 else out


def _phase_rad(omega, mode: PhaseMode, poles: Poles):
    w = np.asarray(omega, dtype=float)
    if mode is PhaseMode.STANDARD:
        return -(np.arctan(w / abs(poles.p1)) + np.arctan(w / abs(poles.p2)))
    # (1/LC) / ((w-p1)(w-p2)) with 1/LC = p1 p2 factored out of the denominator
    return np.arctan(1.0 / ((1.0 - w / poles.p1) * (1.0 - w / poles.p2)))


def phase_deg(
    c: FilamentCircuit,
    omega,
    mode: PhaseMode | str = PhaseMode.STANDARD,
    poles: Poles | None = None,
):
    """Phase in degrees. ``literal`` gives +45 deg at DC, ``standard`` gives 0."""
    _check_omega(omega)
    poles = poles or compute_poles(c)
    out = np.degrees(_phase_rad(omega, PhaseMode(mode), poles))
    return out[()] if isinstance(out, np.ndarray) and out.ndim == 0 else out


def default_fd_step(omega, poles: Poles):
    return 1e-4 * np.maximum(abs(poles.p2), np.asarray(omega, dtype=float))


def group_delay_s(
    c: FilamentCircuit,
    omega,
    mode: PhaseMode | str = PhaseMode.STANDARD,
    method: DelayMethod | str = DelayMethod.CLOSED_FORM,
    fd_step=None,
    poles: Poles | None = None,
):
    """Group delay -d(phase)/d(omega) in seconds, phase in radians.

    The closed form |p1|/(w^2+p1^2) + |p2|/(w^2+p2^2) only exists for the
    standard phase. The finite-difference path is a central difference with
    step ``fd_step`` (default ``1e-4 * max(|p2|, omega)``).
    """
    mode, method = PhaseMode(mode), DelayMethod(method)
    _check_omega(omega)
    poles = poles or compute_poles(c)
    w = np.asarray(omega, dtype=float)
    if method is DelayMethod.CLOSED_FORM:
        if mode is not PhaseMode.STANDARD:
            raise UnsupportedCombinationError(
                "closed-form delay is only defined for the standard phase mode"
            )
        out = 0.0
        for p in (poles.p1, poles.p2):
            ratio = w / p
            out = out + 1.0 / (abs(p) * (1.0 + ratio * ratio))
    else:
        h = default_fd_step(w, poles) if fd_step is None else np.asarray(fd_step, dtype=float)
        if np.any(h <= 0):
            raise ParameterDomainError("fd_step must be > 0")
        out = -(_phase_rad(w + h, mode, poles) - _phase_rad(w - h, mode, poles)) / (2.0 * h)
    out = np.asarray(out)
    return out[()] if out.ndim == 0 else out


def sweep(
    c: FilamentCircuit,
    f_start_hz: float,
    f_stop_hz: float,
    n_points: int,
    mode: PhaseMode | str = PhaseMode.STANDARD,
) -> list[ResponsePoint]:
    """Sample the response on an inclusive, uniformly spaced grid in hertz.

    Delay uses the closed form in standard mode and a central difference in
    literal mode.
    """
    mode = PhaseMode(mode)
    if not (0 <= f_start_hz < f_stop_hz) or not math.isfinite(f_stop_hz):
        raise ParameterDomainError(f"need 0 <= f_start < f_stop, got {f_start_hz}, {f_stop_hz}")
    if int(n_points) != n_points or n_points < 2:
        raise ParameterDomainError(f"n_points must be an integer >= 2, got {n_points!r}")
    poles = compute_poles(c)
    freqs = np.linspace(f_start_hz, f_stop_hz, int(n_points))
    omegas = 2.0 * np.pi * freqs
    atten = attenuation_db(c, omegas, poles)
    phase = phase_deg(c, omegas, mode, poles)
    method = DelayMethod.CLOSED_FORM if mode is PhaseMode.STANDARD else DelayMethod.FINITE_DIFFERENCE
    delay = group_delay_s(c, omegas, mode, method, poles=poles)
    return [
        ResponsePoint(float(f), float(w), float(a), float(ph), float(dl))
        for f, w, a, ph, dl in zip(freqs, omegas, atten, phase, delay)
    ]
