"""Actin nanowire channel model and wired ad hoc nanonetwork simulator."""

__version__ = "0.1.0"

from actinwire.circuit import (
    CircuitSource,
    FilamentCircuit,
    MonomerRLC,
    PhysicalParams,
    build_filament,
    monomer_capacitance,
    monomer_inductance,
    monomer_resistance,
    monomer_rlc,
)
from actinwire.errors import (
    ActinwireError,
    ConfigError,
    ModelDomainError,
    ParameterDomainError,
    UnsupportedCombinationError,
)
from actinwire.response import (
    DelayMethod,
    PhaseMode,
    Poles,
    ResponsePoint,
    attenuation_db,
    compute_poles,
    group_delay_s,
    phase_deg,
    sweep,
)
from actinwire.transport import (
    NOT_DELIVERABLE,
    ThroughputPoint,
    TransportParams,
    charge_capacity,
    eta_prime,
    max_throughput,
    throughput_curve,
    transmission_time,
    velocity,
)
from actinwire.network import (
    Node,
    RelayPolicy,
    ScenarioConfig,
    SimMetrics,
    grow_wire,
    hit_probability,
    run_campaign,
    run_simulation,
)
