"""Per-monomer RLC components of an actin filament and their aggregation.

Each actin monomer is treated as one section of a lossy transmission line:
a counterion depletion shell (capacitance), a helical current path
(inductance) and an ionic resistance. A filament of length ``d`` is the
series chain of ``n_eff_per_um * d`` identical sections.

All quantities are SI internally; only ``length_um`` is in micrometers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy.constants import epsilon_0, mu_0

from actinwire.errors import ModelDomainError, ParameterDomainError

# Published per-micrometer effective values of a filament.
PAPER_R_PER_UM = 1.2e9  # ohm
PAPER_L_PER_UM = 340e-12  # henry
PAPER_C_PER_UM = 0.02e-12  # farad

# Published per-monomer estimates, used for deviation reports.
PAPER_C0 = 96e-6 * 1e-12  # farad
PAPER_L0 = 1.7e-12  # henry
PAPER_R0 = 6.11e6  # ohm

DEFAULT_N_EFF_PER_UM = 200.0
LITERATURE_MONOMERS_PER_UM = 370.0


class CircuitSource(str, Enum):
    DERIVED = "derived"
    PAPER = "paper"


@dataclass(frozen=True)
class PhysicalParams:
    """Geometry and medium constants of an actin monomer.

    The defaults for ``r_actin``, ``epsilon_r``, ``rho`` and ``H_turns`` are
    fitted so that the closed forms reproduce the published per-monomer
    estimates (96e-6 pF, 1.7 pH, 6.11 MOhm); they are not measured values.
    """

    r_actin: float = 2.5e-9
    lambda_B: float = 7.13e-10
    epsilon_r: float = 80.0
    mu_r: float = 1.0
    rho: float = 0.826
    l_monomer: float = 5.4e-9
    H_turns: float = 15.0
    temperature_K: float = 293.0

    def __post_init__(self) -> None:
        for name in ("r_actin", "lambda_B", "l_monomer", "mu_r", "temperature_K"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterDomainError(f"{name} must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.epsilon_r) and self.epsilon_r >= 1):
            raise ParameterDomainError(f"epsilon_r must be >= 1, got {self.epsilon_r!r}")
        if not (math.isfinite(self.rho) and self.rho > 0):
            raise ParameterDomainError(f"rho must be > 0, got {self.rho!r}")
        if not (math.isfinite(self.H_turns) and self.H_turns >= 1):
            raise ParameterDomainError(f"H_turns must be >= 1, got {self.H_turns!r}")

    @property
    def shell_log_ratio(self) -> float:
        """ln((r_actin + lambda_B) / r_actin)."""
        return math.log1p(self.lambda_B / self.r_actin)


@dataclass(frozen=True)
class MonomerRLC:
    C0: float
    L0: float
    R0: float


@dataclass(frozen=True)
class FilamentCircuit:
    """Lumped R, L, C of a filament of ``length_um`` micrometers.

    Only positivity is enforced here; the overdamped requirement is checked
    by :func:`build_filament` and by the pole computation.
    """

    length_um: float
    R_eq: float
    L_eq: float
    C_eq: float
    source: CircuitSource = CircuitSource.PAPER

    def __post_init__(self) -> None:
        for name in ("R_eq", "L_eq", "C_eq"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterDomainError(f"{name} must be finite and > 0, got {value!r}")

    @property
    def damping_ratio_sq(self) -> float:
        """(R/2L)^2 / (1/LC) = R^2 C / 4L; greater than 1 when overdamped."""
        return self.R_eq * self.R_eq * self.C_eq / (4.0 * self.L_eq)

    @property
    def is_overdamped(self) -> bool:
        return self.damping_ratio_sq > 1.0


def _finite(value: float, what: str) -> float:
    if not math.isfinite(value) or value <= 0:
        raise ParameterDomainError(f"{what} evaluated to {value!r}")
    return value


def monomer_capacitance(p: PhysicalParams) -> float:
    """Depletion-shell capacitance of one monomer, in farads."""
    eps = p.epsilon_r * epsilon_0
    return _finite(2.0 * math.pi * eps * p.l_monomer / p.shell_log_ratio, "C0")


def monomer_inductance(p: PhysicalParams) -> float:
    """Helical-path inductance of one monomer, in henries."""
    area = math.pi * (p.r_actin + p.lambda_B) ** 2
    return _finite(p.mu_r * mu_0 * p.H_turns**2 * area / p.l_monomer, "L0")


def monomer_resistance(p: PhysicalParams) -> float:
    """Ionic resistance of one monomer, in ohms."""
    return _finite(p.rho * p.shell_log_ratio / (2.0 * math.pi * p.l_monomer), "R0")


def monomer_rlc(p: PhysicalParams) -> MonomerRLC:
    return MonomerRLC(
        C0=monomer_capacitance(p), L0=monomer_inductance(p), R0=monomer_resistance(p)
    )


def build_filament(
    p: PhysicalParams | None,
    length_um: float,
    mode: CircuitSource | str = CircuitSource.PAPER,
    n_eff_per_um: float = DEFAULT_N_EFF_PER_UM,
) -> FilamentCircuit:
    """Effective circuit of a filament ``length_um`` micrometers long.

    In ``derived`` mode the monomer values are summed over
    ``n_eff_per_um * length_um`` sections (R and L in series, C additive).
    In ``paper`` mode the published per-micrometer values are scaled by the
    length and ``p`` is ignored.

    Raises:
        ParameterDomainError: non-positive length or section density.
        ModelDomainError: the resulting circuit is not overdamped.
    """
    mode = CircuitSource(mode)
    if not (math.isfinite(length_um) and length_um > 0):
        raise ParameterDomainError(f"length_um must be > 0, got {length_um!r}")
    if mode is CircuitSource.DERIVED:
        if not (math.isfinite(n_eff_per_um) and n_eff_per_um > 0):
            raise ParameterDomainError(f"n_eff_per_um must be > 0, got {n_eff_per_um!r}")
        m = monomer_rlc(p if p is not None else PhysicalParams())
        n = n_eff_per_um * length_um
        circuit = FilamentCircuit(length_um, n * m.R0, n * m.L0, n * m.C0, mode)
    else:
        circuit = FilamentCircuit(
            length_um,
            PAPER_R_PER_UM * length_um,
            PAPER_L_PER_UM * length_um,
            PAPER_C_PER_UM * length_um,
            mode,
        )
    if not circuit.is_overdamped:
        raise ModelDomainError(
            "circuit is not overdamped: (R/2L)^2 <= 1/(LC) "
            f"(ratio {circuit.damping_ratio_sq:.6g}) at length {length_um} um"
        )
    return circuit
