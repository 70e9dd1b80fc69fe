"""TOML run configuration: defaults, overrides, validation and hashing.

Layout::

    [physical]   circuit constants (r_actin_m, rho_ohm_m, circuit_mode, ...)
    [transport]  velocity model (Omega, mu1, mu2, alpha_s, ...)
    [sweep]      distances_um, ranges_hz = [[f0, f1, n], ...], phase_mode
    [throughput] t_begin_s, t_end_s, n_points
    [compare]    fret_bps
    [scenario]   simulation knobs and number of seeds
    [[nodes]]    id, x_um, y_um, z_um, radius_um, gateway, initial_detector

Optional values that are "off" are spelled ``"none"`` so that an effective
config can be written back out and re-read unchanged.
"""
from __future__ import annotations

import copy
import hashlib
import json
import sys
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import tomli_w

from actinwire.circuit import DEFAULT_N_EFF_PER_UM, CircuitSource, PhysicalParams
from actinwire.errors import ConfigError, ParameterDomainError
from actinwire.network import Node, RelayPolicy, ScenarioConfig, default_layout
from actinwire.response import PhaseMode
from actinwire.transport import TransportParams

_P = PhysicalParams()
_T = TransportParams()

DEFAULTS: dict[str, dict[str, Any]] = {
    "physical": {
        "r_actin_m": _P.r_actin,
        "lambda_B_m": _P.lambda_B,
        "epsilon_r": _P.epsilon_r,
        "mu_r": _P.mu_r,
        "rho_ohm_m": _P.rho,
        "l_monomer_m": _P.l_monomer,
        "H_turns": _P.H_turns,
        "temperature_K": _P.temperature_K,
        "n_eff_per_um": DEFAULT_N_EFF_PER_UM,
        "circuit_mode": CircuitSource.PAPER.value,
    },
    "transport": {
        "Omega": _T.Omega,
        "mu1": _T.mu1,
        "mu2": _T.mu2,
        "alpha_s": _T.alpha,
        "beta_m": _T.beta,
        "charge_per_monomer": _T.charge_per_monomer,
        "monomers_per_um": _T.monomers_per_um,
        "t_stop_s": _T.t_stop_s,
    },
    "sweep": {
        "distances_um": [10.0, 20.0, 30.0, 40.0, 50.0],
        "ranges_hz": [[0.0, 700.0, 701], [0.0, 900.0, 901]],
        "phase_mode": PhaseMode.STANDARD.value,
        "both_phase_modes": False,
    },
    "throughput": {"t_begin_s": 0.0, "t_end_s": 60e-6, "n_points": 601},
    "compare": {"fret_bps": 5500.0},
    "scenario": {
        "dimension": 2,
        "wire_growth_um_s": 1.0,
        "wire_max_length_um": 20.0,
        "miss_timeout_s": 20.0,
        "disassembly_s": 1.0,
        "message_bits": 256,
        "per_hop_overhead_bits": 32,
        "relay_policy": RelayPolicy.EXCLUDING_SOURCE.value,
        "rng_seed": 0,
        "max_sim_time_s": 1e5,
        "seeds": 100,
        "channel_delay_s": "none",
    },
}
# keys that accept a string keyword in place of a number
_KEYWORDS = {"t_stop_s": {"none"}, "channel_delay_s": {"none"}, "alpha_s": {"literal"}}
NODE_KEYS = {"id", "x_um", "y_um", "z_um", "radius_um", "gateway", "initial_detector"}


def _check_type(section: str, key: str, value: Any) -> Any:
    default = DEFAULTS[section][key]
    where = f"{section}.{key}"
    if isinstance(value, str) and value in _KEYWORDS.get(key, ()):
        return value
    if key in _KEYWORDS or isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected a list, got {value!r}")
        return value
    return value


def _check_node(i: int, raw: dict) -> dict:
    unknown = set(raw) - NODE_KEYS
    if unknown:
        raise ConfigError(f"nodes[{i}]: unknown key(s) {sorted(unknown)}")
    for key in ("id", "x_um", "y_um", "radius_um"):
        if key not in raw:
            raise ConfigError(f"nodes[{i}]: missing key {key!r}")
    node = {"id": raw["id"]}
    if isinstance(node["id"], bool) or not isinstance(node["id"], int):
        raise ConfigError(f"nodes[{i}].id: expected an integer")
    for key in ("x_um", "y_um", "z_um", "radius_um"):
        if key in raw:
            if isinstance(raw[key], bool) or not isinstance(raw[key], (int, float)):
                raise ConfigError(f"nodes[{i}].{key}: expected a number")
            node[key] = float(raw[key])
    for key in ("gateway", "initial_detector"):
        value = raw.get(key, False)
        if not isinstance(value, bool):
            raise ConfigError(f"nodes[{i}].{key}: expected true/false")
        node[key] = value
    return node


def _resolve_key(dotted: str) -> tuple[str, str]:
    if "." in dotted:
        section, key = dotted.split(".", 1)
        if section not in DEFAULTS or key not in DEFAULTS[section]:
            raise ConfigError(f"unknown config key {dotted!r}")
        return section, key
    owners = [s for s, keys in DEFAULTS.items() if dotted in keys]
    if not owners:
        raise ConfigError(f"unknown config key {dotted!r}")
    if len(owners) > 1:
        raise ConfigError(f"ambiguous key {dotted!r}; use one of {[f'{s}.{dotted}' for s in owners]}")
    return owners[0], dotted


def parse_override(text: str) -> tuple[str, str, Any]:
    """``key=value`` with a TOML literal (bare words are taken as strings)."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    dotted, raw = (part.strip() for part in text.split("=", 1))
    section, key = _resolve_key(dotted)
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return section, key, value


def load_config(path: str | Path | None = None, overrides: list[str] | None = None) -> dict:
    """Merge defaults, the TOML file at ``path`` and ``key=value`` overrides."""
    cfg = copy.deepcopy(DEFAULTS)
    nodes = None
    if path is not None:
        try:
            raw = tomllib.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        for section, body in raw.items():
            if section == "nodes":
                if not isinstance(body, list):
                    raise ConfigError("nodes must be an array of tables ([[nodes]])")
                nodes = [_check_node(i, n) for i, n in enumerate(body)]
                continue
            if section not in DEFAULTS or not isinstance(body, dict):
                raise ConfigError(f"unknown config section {section!r}")
            for key, value in body.items():
                if key not in DEFAULTS[section]:
                    raise ConfigError(f"unknown config key {section}.{key}")
                cfg[section][key] = _check_type(section, key, value)
    for text in overrides or []:
        section, key, value = parse_override(text)
        cfg[section][key] = _check_type(section, key, value)
    if nodes is None:
        nodes = [
            {"id": n.id, "x_um": n.position[0], "y_um": n.position[1], "radius_um": n.radius_um,
             "gateway": n.is_gateway, "initial_detector": n.is_detector}
            for n in default_layout()
        ]
    cfg["nodes"] = nodes
    return cfg


def set_value(cfg: dict, dotted: str, value: Any) -> None:
    section, key = _resolve_key(dotted)
    cfg[section][key] = _check_type(section, key, value)


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def dump_config(cfg: dict) -> str:
    return tomli_w.dumps(cfg)


def _optional(value: Any) -> float | None:
    return None if value == "none" else float(value)


def _wrap(builder, *args):
    try:
        return builder(*args)
    except ParameterDomainError as exc:
        raise ConfigError(str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def physical_params(cfg: dict) -> PhysicalParams:
    s = cfg["physical"]
    return _wrap(
        PhysicalParams,
        s["r_actin_m"], s["lambda_B_m"], s["epsilon_r"], s["mu_r"], s["rho_ohm_m"],
        s["l_monomer_m"], s["H_turns"], s["temperature_K"],
    )


def circuit_mode(cfg: dict) -> CircuitSource:
    return _wrap(CircuitSource, cfg["physical"]["circuit_mode"])


def phase_mode(cfg: dict) -> PhaseMode:
    return _wrap(PhaseMode, cfg["sweep"]["phase_mode"])


def transport_params(cfg: dict) -> TransportParams:
    s = cfg["transport"]
    alpha = s["alpha_s"]
    if alpha == "literal":
        from actinwire.circuit import build_filament
        from actinwire.transport import literal_alpha

        alpha = literal_alpha(build_filament(physical_params(cfg), 1.0, circuit_mode(cfg),
                                             cfg["physical"]["n_eff_per_um"]))
    return _wrap(
        TransportParams,
        s["Omega"], s["mu1"], s["mu2"], alpha, s["beta_m"],
        s["charge_per_monomer"], s["monomers_per_um"], _optional(s["t_stop_s"]),
    )


def scenario_config(cfg: dict) -> ScenarioConfig:
    s = cfg["scenario"]
    dim = s["dimension"]
    nodes = []
    for raw in cfg["nodes"]:
        if dim == 3 and "z_um" not in raw:
            raise ConfigError(f"node {raw['id']}: z_um is required in 3D scenarios")
        pos = (raw["x_um"], raw["y_um"]) + ((raw["z_um"],) if dim == 3 else ())
        nodes.append(_wrap(Node, raw["id"], pos, raw["radius_um"], raw["gateway"],
                           raw["initial_detector"]))
    if not any(n.is_detector for n in nodes):
        raise ConfigError("scenario needs at least one node with initial_detector = true")
    if not any(n.is_gateway for n in nodes):
        raise ConfigError("scenario needs at least one node with gateway = true")
    if s["seeds"] < 1:
        raise ConfigError("scenario.seeds must be >= 1")
    return _wrap(
        ScenarioConfig,
        nodes, dim, s["wire_growth_um_s"], s["wire_max_length_um"], s["miss_timeout_s"],
        s["disassembly_s"], s["message_bits"], s["per_hop_overhead_bits"], s["relay_policy"],
        s["rng_seed"], s["max_sim_time_s"], _optional(s["channel_delay_s"]),
        physical_params(cfg), circuit_mode(cfg), cfg["physical"]["n_eff_per_um"],
        transport_params(cfg),
    )
