"""Discrete-event simulation of message spreading over actin nanowires.

Nanomachines are discs (2D) or balls (3D). An informed machine grows a wire
from its center in a uniformly random direction; the wire captures the
nearest machine (by center distance) whose body the ray passes through and
that lies within ``wire_max_length_um + radius`` of the source. A captured
wire spans the center-to-center distance. A miss costs ``miss_timeout_s``
plus ``disassembly_s`` and is retried with a fresh direction.
In 2D a machine whose whole arc is covered by nearer machines is treated
as unreachable; in 3D only the range limit is checked, so a fully hidden
machine keeps its sender retrying until ``max_sim_time_s``.

Relay discipline: the message travels as a token. The holder keeps growing
wires until it hands the message to a machine that did not have it yet;
that machine takes over. A machine that already has the message drops the
duplicate, and the sender tries again. The run ends when a gateway receives
the message, when no token can move, or at ``max_sim_time_s``.

Per-hop latency on a link = growth time + DC group delay of the realized
wire + transmission time of the framed message + disassembly time.

RNG draw schedule: one ``Generator.random()`` double per wire attempt in 2D
(angle), two in 3D (cos of polar angle, then azimuth). Nothing else draws.
"""
from __future__ import annotations

import heapq
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from actinwire.circuit import DEFAULT_N_EFF_PER_UM, CircuitSource, PhysicalParams, build_filament
from actinwire.errors import ParameterDomainError
from actinwire.response import group_delay_s
from actinwire.transport import NOT_DELIVERABLE, TransportParams, transmission_time

MAX_WIRE_LENGTH_UM = 100.0
DRAWS_PER_ATTEMPT = {2: 1, 3: 2}


class RelayPolicy(str, Enum):
    # every other machine is a candidate, including the one the message came from
    EPIDEMIC = "random_neighbor_epidemic"
    # the machine the message came from is not a candidate
    EXCLUDING_SOURCE = "random_excluding_source"


class NodeState(str, Enum):
    IDLE = "idle"
    GROWING = "growing"
    LINKED = "linked"
    INFORMED = "informed"


@dataclass
class Node:
    id: int
    position: tuple[float, ...]
    radius_um: float
    is_gateway: bool = False
    is_detector: bool = False
    state: NodeState = NodeState.IDLE

    def __post_init__(self) -> None:
        self.position = tuple(float(x) for x in self.position)
        if not (math.isfinite(self.radius_um) and self.radius_um > 0):
            raise ParameterDomainError(f"node {self.id}: radius_um must be > 0")


@dataclass
class ScenarioConfig:
    nodes: list[Node]
    dimension: int = 2
    wire_growth_um_s: float = 1.0
    wire_max_length_um: float = 20.0
    miss_timeout_s: float = 20.0
    disassembly_s: float = 1.0
    message_bits: int = 256
    per_hop_overhead_bits: int = 32
    relay_policy: RelayPolicy = RelayPolicy.EXCLUDING_SOURCE
    rng_seed: int = 0
    max_sim_time_s: float = 1e5
    # None: DC group delay of the realized wire; a number overrides it
    channel_delay_s: float | None = None
    physical: PhysicalParams = field(default_factory=PhysicalParams)
    circuit_mode: CircuitSource = CircuitSource.PAPER
    n_eff_per_um: float = DEFAULT_N_EFF_PER_UM
    transport: TransportParams = field(default_factory=TransportParams)

    def __post_init__(self) -> None:
        self.relay_policy = RelayPolicy(self.relay_policy)
        self.circuit_mode = CircuitSource(self.circuit_mode)
        if self.dimension not in (2, 3):
            raise ParameterDomainError(f"dimension must be 2 or 3, got {self.dimension!r}")
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ParameterDomainError("node ids must be unique")
        for n in self.nodes:
            if len(n.position) != self.dimension:
                raise ParameterDomainError(
                    f"node {n.id}: position has {len(n.position)} coordinates, "
                    f"scenario dimension is {self.dimension}"
                )
        if not 0 < self.wire_max_length_um <= MAX_WIRE_LENGTH_UM:
            raise ParameterDomainError(
                f"wire_max_length_um must be in (0, {MAX_WIRE_LENGTH_UM}], "
                f"got {self.wire_max_length_um!r}"
            )
        for name in ("wire_growth_um_s", "miss_timeout_s", "disassembly_s", "max_sim_time_s"):
            if not getattr(self, name) > 0:
                raise ParameterDomainError(f"{name} must be > 0")
        if self.message_bits < 1 or self.per_hop_overhead_bits < 0:
            raise ParameterDomainError("message_bits must be >= 1 and overhead >= 0")
        if self.channel_delay_s is not None and self.channel_delay_s < 0:
            raise ParameterDomainError("channel_delay_s must be >= 0")
        if not (isinstance(self.rng_seed, (int, np.integer)) and self.rng_seed >= 0):
            raise ParameterDomainError(f"rng_seed must be a non-negative integer, got {self.rng_seed!r}")


@dataclass(frozen=True)
class GrowthOutcome:
    target: Node | None
    elapsed_s: float
    wire_length_um: float | None = None

    @property
    def hit(self) -> bool:
        return self.target is not None


@dataclass(frozen=True)
class HopRecord:
    """One wire attempt. ``outcome`` is ``miss``, ``link`` or ``duplicate``."""

    t_start_s: float
    sender: int
    target: int | None
    outcome: str
    growth_s: float = 0.0
    channel_delay_s: float = 0.0
    transmission_s: float = 0.0
    disassembly_s: float = 0.0
    timeout_s: float = 0.0

    @property
    def duration_s(self) -> float:
        return (self.growth_s + self.channel_delay_s + self.transmission_s
                + self.disassembly_s + self.timeout_s)


@dataclass
class SimMetrics:
    seed: int
    delivered: bool
    delivery_time_s: float
    hops_to_gateway: int | None
    wires_attempted: int
    wires_established: int
    informed_fraction_timeline: list[tuple[float, float]]
    path: list[int] = field(default_factory=list)
    hop_log: list[HopRecord] = field(default_factory=list)


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator used for every run."""
    return np.random.Generator(np.random.Philox(int(seed)))


def hit_probability(source: Node, target: Node, dimension: int,
                    wire_max_length_um: float | None = None) -> float:
    """Chance that one random direction from ``source`` passes through ``target``.

    2D: asin(r/D)/pi. 3D: (1 - cos(asin(r/D)))/2. Returns 1 when the source
    center lies inside the target and 0 when the target is out of reach.
    Other machines that might shadow the target are ignored.
    """
    D = math.dist(source.position, target.position)
    r = target.radius_um
    if D <= r:
        return 1.0
    if wire_max_length_um is not None and D > wire_max_length_um + r:
        return 0.0
    s = r / D
    if dimension == 2:
        return math.asin(s) / math.pi
    if dimension == 3:
        return (1.0 - math.sqrt(1.0 - s * s)) / 2.0
    raise ParameterDomainError(f"dimension must be 2 or 3, got {dimension!r}")


def sample_directions(rng: np.random.Generator, n: int, dimension: int) -> np.ndarray:
    """``n`` unit vectors, uniform on the circle or sphere, shape (n, dimension).

    Consumes exactly ``n * DRAWS_PER_ATTEMPT[dimension]`` doubles, in the same
    order as ``n`` single-direction calls.
    """
    if dimension == 2:
        theta = 2.0 * np.pi * rng.random(n)
        return np.column_stack((np.cos(theta), np.sin(theta)))
    if dimension == 3:
        u = rng.random((n, 2))
        z = 1.0 - 2.0 * u[:, 0]
        phi = 2.0 * np.pi * u[:, 1]
        s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        return np.column_stack((s * np.cos(phi), s * np.sin(phi), z))
    raise ParameterDomainError(f"dimension must be 2 or 3, got {dimension!r}")


def resolve_capture(origin: np.ndarray, centers: np.ndarray, radii: np.ndarray,
                    directions: np.ndarray, max_length_um: float) -> np.ndarray:
    """Index of the captured candidate for each direction, or -1 on a miss.

    Ties in center distance go to the lower index.
    """
    directions = np.atleast_2d(directions)
    if len(centers) == 0:
        return np.full(len(directions), -1, dtype=int)
    offsets = centers - origin
    dist = np.sqrt(np.einsum("ij,ij->i", offsets, offsets))
    along = directions @ offsets.T
    perp_sq = dist * dist - along * along
    captured = (along > 0) & (perp_sq <= radii * radii)
    captured |= dist <= radii
    captured &= dist <= max_length_um + radii
    key = np.where(captured, dist, np.inf)
    best = np.argmin(key, axis=1)
    return np.where(np.isfinite(key[np.arange(len(key)), best]), best, -1)


def grow_wire(source: Node, candidates: Sequence[Node], rng: np.random.Generator,
              cfg: ScenarioConfig) -> GrowthOutcome:
    """Grow one wire from ``source`` in a random direction.

    On a hit, elapsed time is the center distance over the growth rate. On a
    miss it is ``miss_timeout_s + disassembly_s``. Always consumes one
    direction's worth of draws, even with no candidates.
    """
    direction = sample_directions(rng, 1, cfg.dimension)
    centers = np.array([c.position for c in candidates], dtype=float).reshape(-1, cfg.dimension)
    radii = np.array([c.radius_um for c in candidates], dtype=float)
    origin = np.asarray(source.position, dtype=float)
    idx = int(resolve_capture(origin, centers, radii, direction, cfg.wire_max_length_um)[0])
    if idx < 0:
        return GrowthOutcome(None, cfg.miss_timeout_s + cfg.disassembly_s)
    length = float(np.linalg.norm(centers[idx] - origin))
    return GrowthOutcome(candidates[idx], length / cfg.wire_growth_um_s, length)


@lru_cache(maxsize=4096)
def dc_channel_delay(length_um: float, physical: PhysicalParams, mode: CircuitSource,
                     n_eff_per_um: float) -> float:
    """DC group delay of a wire of ``length_um`` (standard two-pole, closed form)."""
    return float(group_delay_s(build_filament(physical, length_um, mode, n_eff_per_um), 0.0))


def _channel_delay(cfg: ScenarioConfig, length_um: float) -> float:
    if cfg.channel_delay_s is not None:
        return cfg.channel_delay_s
    return dc_channel_delay(length_um, cfg.physical, cfg.circuit_mode, cfg.n_eff_per_um)


def _visible_2d(origin: np.ndarray, centers: np.ndarray, radii: np.ndarray,
                max_length_um: float) -> np.ndarray:
    """Mask of candidates that some direction from ``origin`` captures.

    A candidate is hidden when nearer candidates cover its whole angular arc.
    """
    offsets = centers - origin
    dist = np.hypot(offsets[:, 0], offsets[:, 1])
    angle = np.arctan2(offsets[:, 1], offsets[:, 0])
    half = np.where(dist <= radii, np.pi, np.arcsin(np.minimum(1.0, radii / np.maximum(dist, 1e-300))))
    in_range = dist <= max_length_um + radii
    order = np.argsort(dist, kind="stable")
    visible = np.zeros(len(centers), dtype=bool)
    for rank, j in enumerate(order):
        if not in_range[j]:
            continue
        lo, hi = -half[j], half[j]
        blocks = []
        for k in order[:rank]:
            if not in_range[k]:
                continue
            c = (angle[k] - angle[j] + np.pi) % (2.0 * np.pi) - np.pi
            for shift in (-2.0 * np.pi, 0.0, 2.0 * np.pi):
                blocks.append((c + shift - half[k], c + shift + half[k]))
        covered_to = lo
        for a, b in sorted(blocks):
            if a > covered_to:
                break
            covered_to = max(covered_to, b)
            if covered_to >= hi:
                break
        visible[j] = covered_to < hi
    return visible


_ATTEMPT, _ARRIVAL = 0, 1


def run_simulation(cfg: ScenarioConfig) -> SimMetrics:
    """Run one seeded realization; identical ``cfg`` gives identical metrics."""
    nodes = cfg.nodes
    n = len(nodes)
    detectors = [i for i, node in enumerate(nodes) if node.is_detector]
    if not detectors:
        raise ParameterDomainError("scenario needs at least one initial detector")
    centers = np.array([node.position for node in nodes], dtype=float)
    radii = np.array([node.radius_um for node in nodes], dtype=float)
    rng = make_rng(cfg.rng_seed)

    informed = set(detectors)
    hops = {i: 0 for i in detectors}
    came_from: dict[int, int | None] = {i: None for i in detectors}
    timeline = [(0.0, len(informed) / n)]
    log: list[HopRecord] = []
    attempted = established = 0

    def finish(delivered: bool, t: float, gateway: int | None) -> SimMetrics:
        path: list[int] = []
        node = gateway
        while node is not None:
            path.append(nodes[node].id)
            node = came_from[node]
        return SimMetrics(
            seed=cfg.rng_seed,
            delivered=delivered,
            delivery_time_s=t if delivered else math.nan,
            hops_to_gateway=hops[gateway] if delivered else None,
            wires_attempted=attempted,
            wires_established=established,
            informed_fraction_timeline=timeline,
            path=path[::-1],
            hop_log=log,
        )

    for i in detectors:
        if nodes[i].is_gateway:
            return finish(True, 0.0, i)

    tx_time = transmission_time(cfg.message_bits + cfg.per_hop_overhead_bits, cfg.transport)
    if tx_time == NOT_DELIVERABLE:
        return finish(False, math.nan, None)

    reach = cfg.wire_max_length_um + radii
    reachable: dict[tuple[int, int | None], list[int]] = {}
    queue: list[tuple] = []
    seq = 0
    for i in detectors:
        heapq.heappush(queue, (0.0, seq, _ATTEMPT, i, None))
        seq += 1

    while queue:
        t, _, kind, a, b = heapq.heappop(queue)
        if t > cfg.max_sim_time_s:
            break
        if kind == _ARRIVAL:
            sender, target = a, b
            if target in informed:
                heapq.heappush(queue, (t, seq, _ATTEMPT, sender, None))
                seq += 1
                continue
            informed.add(target)
            hops[target] = hops[sender] + 1
            came_from[target] = sender
            timeline.append((t, len(informed) / n))
            if nodes[target].is_gateway:
                return finish(True, t, target)
            heapq.heappush(queue, (t, seq, _ATTEMPT, target, None))
            seq += 1
            continue

        i = a
        excluded = {i}
        if cfg.relay_policy is RelayPolicy.EXCLUDING_SOURCE and came_from[i] is not None:
            excluded.add(came_from[i])
        cand = np.array([j for j in range(n) if j not in excluded], dtype=int)
        dist = np.linalg.norm(centers[cand] - centers[i], axis=1)
        key = (i, came_from[i] if len(excluded) > 1 else None)
        if key not in reachable:
            mask = dist <= reach[cand]
            if cfg.dimension == 2:
                mask &= _visible_2d(centers[i], centers[cand], radii[cand], cfg.wire_max_length_um)
            reachable[key] = [int(j) for j in cand[mask]]
        # token is stuck once every capturable machine already has the message
        if all(j in informed for j in reachable[key]):
            continue

        direction = sample_directions(rng, 1, cfg.dimension)
        k = int(resolve_capture(centers[i], centers[cand], radii[cand], direction,
                                cfg.wire_max_length_um)[0])
        attempted += 1
        if k < 0:
            rec = HopRecord(t, nodes[i].id, None, "miss",
                            disassembly_s=cfg.disassembly_s, timeout_s=cfg.miss_timeout_s)
            log.append(rec)
            heapq.heappush(queue, (t + rec.duration_s, seq, _ATTEMPT, i, None))
            seq += 1
            continue
        j = int(cand[k])
        established += 1
        length = float(dist[k])
        rec = HopRecord(
            t, nodes[i].id, nodes[j].id,
            "duplicate" if j in informed else "link",
            growth_s=length / cfg.wire_growth_um_s,
            channel_delay_s=_channel_delay(cfg, length),
            transmission_s=tx_time,
            disassembly_s=cfg.disassembly_s,
        )
        log.append(rec)
        heapq.heappush(queue, (t + rec.duration_s, seq, _ARRIVAL, i, j))
        seq += 1

    return finish(False, math.nan, None)


def _run_seed(args: tuple[ScenarioConfig, int]) -> SimMetrics:
    cfg, seed = args
    return run_simulation(replace(cfg, rng_seed=seed))


def run_campaign(cfg: ScenarioConfig, seeds: Iterable[int], workers: int = 1) -> list[SimMetrics]:
    """Run one simulation per seed; results sorted by seed."""
    jobs = [(cfg, int(s)) for s in sorted(set(seeds))]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_seed, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_run_seed(job) for job in jobs]
    return sorted(results, key=lambda m: m.seed)


def default_layout() -> list[Node]:
    """Thirteen machines between one detector (id 0) and one gateway (id 12)."""
    coords = [
        (0.0, 0.0), (8.0, 5.0), (8.0, -5.0), (15.0, 0.0), (16.0, 10.0),
        (16.0, -10.0), (23.0, 5.0), (23.0, -5.0), (30.0, 0.0), (31.0, 10.0),
        (31.0, -10.0), (38.0, 5.0), (39.0, -4.0),
    ]
    return [
        Node(i, xy, 2.0, is_gateway=(i == 12), is_detector=(i == 0))
        for i, xy in enumerate(coords)
    ]
