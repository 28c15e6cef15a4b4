"""Node positions per slot and the per-slot view of the time-expanded graph."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from sagin_sfc import channel
from sagin_sfc.channel import G2U, S2G, S2S, STORAGE, U2G, U2S, U2U
from sagin_sfc.scenario import Geometry, Orbit, Scenario, seeded_stream

LAYER_OF = {"G": "ground", "U": "uav", "S": "satellite"}
PREFIX_OF = {"ground": "G", "uav": "U", "satellite": "S"}

# link kind -> (source layer prefix, destination layer prefix)
KIND_LAYERS = {G2U: ("G", "U"), U2G: ("U", "G"), U2U: ("U", "U"),
               U2S: ("U", "S"), S2S: ("S", "S"), S2G: ("S", "G")}


def layer(name: str) -> str:
    return LAYER_OF[name[0]]


def node_name(layer_: str, index: int) -> str:
    return f"{PREFIX_OF[layer_]}{index}"


class NodeId(NamedTuple):
    layer: str
    index: int
    slot: int

    @property
    def name(self) -> str:
        return f"{PREFIX_OF[self.layer]}{self.index}"

    def __str__(self):
        return f"{self.name}@{self.slot}"

    @classmethod
    def of(cls, name: str, slot: int) -> "NodeId":
        return cls(LAYER_OF[name[0]], int(name[1:]), slot)


class Link(NamedTuple):
    kind: str
    src: NodeId
    dst: NodeId
    rate_bps: float

    @property
    def key(self) -> tuple[str, str]:
        return self.src.name, self.dst.name


@dataclass
class SlotGraph:
    slot: int
    positions: dict                 # name -> (x, y, z)
    links: list                     # list[Link], storage links included
    failed_nodes: frozenset = frozenset()
    out: dict = field(default_factory=dict)   # name -> {dst name -> Link}, no storage

    def __post_init__(self):
        if not self.out:
            for ln in self.links:
                if ln.kind != STORAGE:
                    self.out.setdefault(ln.src.name, {})[ln.dst.name] = ln

    @property
    def nodes(self) -> list:
        return [n for n in self.positions if n not in self.failed_nodes]

    def link(self, src: str, dst: str):
        return self.out.get(src, {}).get(dst)

    def neighbors(self, name: str) -> dict:
        return self.out.get(name, {})

    def rate(self, src: str, dst: str) -> float:
        ln = self.link(src, dst)
        return ln.rate_bps if ln is not None else 0.0

    def has_node(self, name: str) -> bool:
        return name in self.positions and name not in self.failed_nodes


def dump_edge_list(graph: SlotGraph) -> str:
    """Line-based edge list: ``src dst kind rate_bps``."""
    lines = [f"# slot {graph.slot}"]
    for ln in graph.links:
        lines.append(f"{ln.src} {ln.dst} {ln.kind} {ln.rate_bps!r}")
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> list[tuple[str, str, str, float]]:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        src, dst, kind, rate = line.split()
        rows.append((src, dst, kind, float(rate)))
    return rows


# --------------------------------------------------------------------------
# mobility

def initial_uav_positions(geometry: Geometry, stream: np.random.Generator,
                          max_tries: int = 100_000) -> np.ndarray:
    if geometry.uav_initial_positions is not None:
        return np.asarray(geometry.uav_initial_positions, dtype=float).reshape(-1, 2)
    side = geometry.area_side_m
    sep = geometry.min_uav_separation_m
    pts: list[np.ndarray] = []
    tries = 0
    while len(pts) < geometry.uav_count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not place UAVs with the requested separation")
        p = stream.uniform(0.0, side, size=2)
        if all(math.dist(p, q) >= sep for q in pts):
            pts.append(p)
    return np.array(pts, dtype=float).reshape(-1, 2)


def step_uav_positions(prev_positions, geometry: Geometry, stream: np.random.Generator,
                       speed: float, tau: float, max_retries: int = 16) -> np.ndarray:
    """Move every UAV ``speed * tau`` metres along a random heading.

    UAVs move one after another; a move that leaves the area or comes closer
    than the minimum separation to any other UAV (already moved or not) is
    redrawn, and after ``max_retries`` failures the UAV hovers.  Every pair
    is therefore checked once against final positions.
    """
    pos = np.array(prev_positions, dtype=float).reshape(-1, 2)
    step = speed * tau
    if step == 0 or len(pos) == 0:
        return pos
    side = geometry.area_side_m
    sep2 = geometry.min_uav_separation_m ** 2
    for i in range(len(pos)):
        for _ in range(max_retries):
            theta = stream.uniform(0.0, 2.0 * math.pi)
            cand = pos[i] + step * np.array([math.cos(theta), math.sin(theta)])
            if not (0.0 <= cand[0] <= side and 0.0 <= cand[1] <= side):
                continue
            d2 = np.sum((pos - cand) ** 2, axis=1)
            d2[i] = np.inf
            if d2.min() >= sep2:
                pos[i] = cand
                break
    return pos


def orbit_radius(orbit: Orbit, geometry: Geometry) -> float:
    return geometry.earth_radius_m + orbit.altitude_m


def orbital_rate(orbit: Orbit, geometry: Geometry) -> float:
    return math.sqrt(geometry.earth_mu / orbit_radius(orbit, geometry) ** 3)


def satellite_position(orbit: Orbit, slot: int, tau: float,
                       geometry: Geometry | None = None) -> tuple[float, float, float]:
    geometry = geometry or Geometry()
    r = orbit_radius(orbit, geometry)
    theta = math.radians(orbit.phase_deg) + orbital_rate(orbit, geometry) * slot * tau
    az = math.radians(orbit.azimuth_deg)
    c = geometry.area_side_m / 2.0
    h = r * math.cos(theta)
    return (c + h * math.cos(az), c + h * math.sin(az),
            -geometry.earth_radius_m + r * math.sin(theta))


# --------------------------------------------------------------------------
# slot graph construction

def build_slot_graph(scenario: Scenario, slot: int, positions: dict,
                     failed=frozenset()) -> SlotGraph:
    """Feasible directed links among live nodes for one slot.

    ``positions`` maps every node name to its 3-D coordinate.  U2U links
    need distance within the UAV range, ground links the access radius,
    UAV-satellite and satellite-ground links the maximum slant range, and
    satellite pairs the inter-satellite range.  Storage links to the next
    slot exist for every live node except in the last slot.
    """
    g = scenario.geometry
    params = scenario.params
    failed = frozenset(failed)
    alive = sorted((n for n in positions if n not in failed), key=_order)
    ids = {n: NodeId.of(n, slot) for n in alive}
    by_layer = {"G": [], "U": [], "S": []}
    for n in alive:
        by_layer[n[0]].append(n)

    links: list[Link] = []

    def add(kind, a, b, d):
        links.append(Link(kind, ids[a], ids[b], channel.rate_for_kind(kind, params, d)))

    uavs = by_layer["U"]
    for i, a in enumerate(uavs):
        pa = positions[a]
        for b in uavs[i + 1:]:
            d = math.dist(pa, positions[b])
            if d <= g.uav_comm_range_m:
                rate = channel.rate_for_kind(U2U, params, d)
                links.append(Link(U2U, ids[a], ids[b], rate))
                links.append(Link(U2U, ids[b], ids[a], rate))
    for gs in by_layer["G"]:
        for u in uavs:
            d = math.dist(positions[gs], positions[u])
            if d <= g.ground_access_radius_m:
                add(G2U, gs, u, d)
                add(U2G, u, gs, d)
    for s in by_layer["S"]:
        for u in uavs:
            d = math.dist(positions[u], positions[s])
            if d <= params.max_slant_range_m:
                add(U2S, u, s, d)
        for gs in by_layer["G"]:
            d = math.dist(positions[s], positions[gs])
            if d <= params.max_slant_range_m:
                add(S2G, s, gs, d)
    sats = by_layer["S"]
    for i, a in enumerate(sats):
        for b in sats[i + 1:]:
            d = math.dist(positions[a], positions[b])
            if d <= g.isl_range_m:
                add(S2S, a, b, d)
                add(S2S, b, a, d)
    if slot + 1 < scenario.time.slot_count:
        for n in alive:
            links.append(Link(STORAGE, ids[n], NodeId.of(n, slot + 1), 0.0))
    return SlotGraph(slot=slot, positions=dict(positions), links=links, failed_nodes=failed)


def _order(name: str):
    return ("GUS".index(name[0]), int(name[1:]))


class GeometricNetwork:
    """Slot graphs of a scenario: mobility trace, orbits, ground stations.

    The trace depends only on the scenario seed, so every policy run on the
    same scenario sees the same positions.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        g = scenario.geometry
        p = scenario.params
        tau = scenario.time.slot_length_s
        self.slot_count = scenario.time.slot_count
        self.tau = tau
        self.ground = [f"G{i}" for i in range(len(g.ground_stations))]
        self.uavs = [f"U{i}" for i in range(g.uav_count)]
        self.sats = [f"S{i}" for i in range(len(g.satellites))]
        self.node_names = self.ground + self.uavs + self.sats

        xy = initial_uav_positions(g, seeded_stream(scenario.seed, "uav-init"))
        move = seeded_stream(scenario.seed, "uav-mobility")
        self.uav_xy = [xy]
        # one extra step so that path energy of the last slot is defined
        for _ in range(self.slot_count):
            xy = step_uav_positions(xy, g, move, p.uav_speed_mps, tau)
            self.uav_xy.append(xy)
        self._cache: dict = {}

    def positions(self, slot: int) -> dict:
        g = self.scenario.geometry
        h = self.scenario.params.uav_altitude_m
        pos = {}
        for i, (x, y) in enumerate(g.ground_stations):
            pos[f"G{i}"] = (float(x), float(y), 0.0)
        for i, (x, y) in enumerate(self.uav_xy[slot]):
            pos[f"U{i}"] = (float(x), float(y), h)
        for i, orbit in enumerate(g.satellites):
            pos[f"S{i}"] = satellite_position(orbit, slot, self.tau, g)
        return pos

    def slot_graph(self, slot: int, failed=frozenset()) -> SlotGraph:
        key = (slot, frozenset(failed))
        graph = self._cache.get(key)
        if graph is None:
            graph = build_slot_graph(self.scenario, slot, self.positions(slot), failed)
            self._cache[key] = graph
        return graph
