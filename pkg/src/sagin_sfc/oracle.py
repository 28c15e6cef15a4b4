"""Exact search on tiny static instances and an LP-format exporter.

A tiny instance pins everything the geometric model would otherwise
compute: per-slot link rates, node capacities and a failure schedule.
``enumerate_optimal`` runs the simulator under a chooser that walks every
combination of routing, placement, priority and recovery decisions
(depth-first, odometer style) and keeps the best complete run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import yaml

from sagin_sfc.channel import STORAGE
from sagin_sfc.engine import Prune, RunReport, Simulation
from sagin_sfc.scenario import ScenarioError, SfcSpec, parse_config, scenario_from_dict
from sagin_sfc.topology import KIND_LAYERS, Link, NodeId, SlotGraph

MAX_NODES, MAX_SLOTS, MAX_SFCS, MAX_VNFS = 5, 4, 2, 2
STATE_LIMIT = 10 ** 7

_KIND_OF = {layers: kind for kind, layers in KIND_LAYERS.items()}


class OracleRefusal(ValueError):
    """Instance too large to enumerate; ``states`` holds the estimate."""

    def __init__(self, msg, states):
        super().__init__(msg)
        self.states = states


def _order(name: str):
    return ("GUS".index(name[0]), int(name[1:]))


@dataclass(frozen=True)
class TinyInstance:
    nodes: tuple                     # node names, ground stations first
    slot_count: int
    slot_length_s: float
    rates: tuple                     # per slot: ((src, dst, bps), ...)
    sfcs: tuple                      # SfcSpec, ground indices for endpoints
    compute_capacity: float = 3.0
    storage_capacity_bits: float = 1.6e9
    compute_ability: float = 1.0
    failures: tuple = ()             # ((slot, (names...)), ...)
    positions: tuple = ()            # ((name, (x, y, z)), ...); defaults to a line

    def __post_init__(self):
        names = list(self.nodes)
        if len(set(names)) != len(names) or any(n[0] not in "GUS" for n in names):
            raise ScenarioError("tiny instance: node names must be unique G/U/S names")
        if len(names) > MAX_NODES or self.slot_count > MAX_SLOTS or self.slot_count < 1:
            raise ScenarioError("tiny instance: too many nodes or slots")
        if not self.sfcs or len(self.sfcs) > MAX_SFCS:
            raise ScenarioError("tiny instance: 1 or 2 SFCs required")
        if any(not 1 <= len(s.sigma) <= MAX_VNFS for s in self.sfcs):
            raise ScenarioError("tiny instance: 1 or 2 VNFs per SFC required")
        if len(self.rates) != self.slot_count:
            raise ScenarioError("tiny instance: one rate table per slot required")
        gs = self.ground
        for s in self.sfcs:
            if not (0 <= s.origin < len(gs) and 0 <= s.destination < len(gs)) \
                    or s.origin == s.destination:
                raise ScenarioError("tiny instance: bad SFC endpoints")
        for table in self.rates:
            for a, b, r in table:
                if a not in names or b not in names or (a[0], b[0]) not in _KIND_OF or r <= 0:
                    raise ScenarioError(f"tiny instance: bad link {a}->{b}")

    @property
    def ground(self) -> list:
        return sorted((n for n in self.nodes if n[0] == "G"), key=_order)

    @property
    def node_names(self) -> list:
        return sorted(self.nodes, key=_order)

    def failed_at(self, slot: int) -> frozenset:
        cur = frozenset()
        for t, names in sorted(self.failures):
            if t <= slot:
                cur = frozenset(names)
        return cur

    # ------------------------------------------------------------ (de)serialize

    def to_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "slot_count": self.slot_count,
            "slot_length_s": self.slot_length_s,
            "rates": [[[a, b, float(r)] for a, b, r in table] for table in self.rates],
            "sfcs": [{"data_bits": s.data_bits, "origin": s.origin,
                      "destination": s.destination, "sigma": list(s.sigma)} for s in self.sfcs],
            "compute_capacity": self.compute_capacity,
            "storage_capacity_bits": self.storage_capacity_bits,
            "compute_ability": self.compute_ability,
            "failures": {int(t): list(n) for t, n in self.failures},
            "positions": {n: list(p) for n, p in self.positions},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TinyInstance":
        try:
            return cls(
                nodes=tuple(doc["nodes"]),
                slot_count=int(doc["slot_count"]),
                slot_length_s=float(doc.get("slot_length_s", 5.0)),
                rates=tuple(tuple((str(a), str(b), float(r)) for a, b, r in table)
                            for table in doc["rates"]),
                sfcs=tuple(SfcSpec(float(s["data_bits"]), int(s["origin"]),
                                   int(s["destination"]), tuple(float(x) for x in s["sigma"]))
                           for s in doc["sfcs"]),
                compute_capacity=float(doc.get("compute_capacity", 3.0)),
                storage_capacity_bits=float(doc.get("storage_capacity_bits", 1.6e9)),
                compute_ability=float(doc.get("compute_ability", 1.0)),
                failures=tuple(sorted((int(t), tuple(sorted(n)))
                                      for t, n in (doc.get("failures") or {}).items())),
                positions=tuple(sorted((n, tuple(float(c) for c in p))
                                       for n, p in (doc.get("positions") or {}).items())),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"tiny instance: {exc}") from exc

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "TinyInstance":
        return cls.from_dict(parse_config(text))

    # ------------------------------------------------------------ engine glue

    def to_scenario(self, policy: str = "FRMG"):
        g_xy = [list(self._position(n)[:2]) for n in self.ground]
        sched = {0: []}
        sched.update({int(t): list(n) for t, n in self.failures})
        doc = {
            "seed": 0,
            "policy": policy,
            "time": {"slot_count": self.slot_count, "slot_length_s": self.slot_length_s},
            "params": {"compute_capacity_units": self.compute_capacity,
                       "storage_capacity_bits": self.storage_capacity_bits,
                       "compute_ability_units_per_s": self.compute_ability},
            "geometry": {"ground_stations": g_xy,
                         "uav_count": sum(1 for n in self.nodes if n[0] == "U")},
            "sfcs": [{"data_bits": s.data_bits, "origin": s.origin,
                      "destination": s.destination, "sigma": list(s.sigma)} for s in self.sfcs],
            "failure": {"schedule": sched},
        }
        return scenario_from_dict(doc)

    def _position(self, name):
        given = dict(self.positions)
        if name in given:
            return given[name]
        i = self.node_names.index(name)
        z = {"G": 0.0, "U": 100.0, "S": 550e3}[name[0]]
        return (200.0 * i, 0.0, z)


class TableNetwork:
    """Network view of a tiny instance, interchangeable with GeometricNetwork."""

    def __init__(self, instance: TinyInstance):
        self.instance = instance
        self.slot_count = instance.slot_count
        self.tau = instance.slot_length_s
        self.node_names = instance.node_names
        self.ground = instance.ground
        self.uavs = [n for n in self.node_names if n[0] == "U"]
        self.sats = [n for n in self.node_names if n[0] == "S"]
        self._cache: dict = {}

    def positions(self, slot: int) -> dict:
        return {n: tuple(self.instance._position(n)) for n in self.node_names}

    def slot_graph(self, slot: int, failed=frozenset()) -> SlotGraph:
        key = (slot, frozenset(failed))
        g = self._cache.get(key)
        if g is None:
            failed = frozenset(failed)
            links = []
            for a, b, r in sorted(self.instance.rates[slot]):
                if a in failed or b in failed:
                    continue
                links.append(Link(_KIND_OF[(a[0], b[0])], NodeId.of(a, slot),
                                  NodeId.of(b, slot), float(r)))
            if slot + 1 < self.slot_count:
                for n in self.node_names:
                    if n not in failed:
                        links.append(Link(STORAGE, NodeId.of(n, slot), NodeId.of(n, slot + 1), 0.0))
            g = SlotGraph(slot=slot, positions=self.positions(slot), links=links,
                          failed_nodes=failed)
            self._cache[key] = g
        return g


# --------------------------------------------------------------------------
# search space size

def _rteg_paths(instance: TinyInstance, origin: str, dest: str, limit: int) -> list:
    """Relay-copy counts of every simple path (origin, 0) -> (dest, t)."""
    out: list = []
    adj = []
    for t, table in enumerate(instance.rates):
        failed = instance.failed_at(t)
        a: dict = {}
        for u, v, _ in table:
            if u not in failed and v not in failed:
                a.setdefault(u, []).append(v)
        adj.append(a)

    def walk(u, t, seen, relays):
        if len(out) > limit:
            return
        if u == dest:
            out.append(relays)
            return
        if u != origin and u[0] == "G":
            return
        nxt = [(v, t) for v in adj[t].get(u, ())]
        if t + 1 < instance.slot_count and u not in instance.failed_at(t + 1):
            nxt.append((u, t + 1))
        for v, tv in nxt:
            if (v, tv) in seen:
                continue
            seen.add((v, tv))
            walk(v, tv, seen, relays + (1 if v[0] != "G" and v != dest else 0))
            seen.discard((v, tv))

    walk(origin, 0, {(origin, 0)}, 0)
    return out


def estimate_states(instance: TinyInstance) -> int:
    """Number of joint (x, y, z) schedules: per SFC, every simple path in the
    time-expanded graph times every ordered placement of its VNFs onto the
    relay copies along it; the joint space is the product over SFCs."""
    total = 1
    gs = instance.ground
    for s in instance.sfcs:
        paths = _rteg_paths(instance, gs[s.origin], gs[s.destination], STATE_LIMIT)
        l = len(s.sigma)
        n = sum(math.comb(r + l - 1, l) for r in paths if r > 0)
        total *= max(n, 1)
        if total > STATE_LIMIT:
            return total
    return total


# --------------------------------------------------------------------------
# exhaustive search

class _Walker:
    """Chooser that follows ``prefix`` and then takes option 0."""

    def __init__(self, prefix, best):
        self.prefix = prefix
        self.best = best
        self.picks: list = []
        self.counts: list = []
        self.labels: list = []

    def choose(self, label, options, sim):
        d = len(self.picks)
        if self.best < math.inf and sim.lower_bound(sim.slot * sim.tau) >= self.best - 1e-9:
            raise Prune(d)
        i = self.prefix[d] if d < len(self.prefix) else 0
        if i >= len(options):
            raise RuntimeError("decision replay diverged")
        self.picks.append(i)
        self.counts.append(len(options))
        self.labels.append((label, options[i]))
        return i


class _Replay:
    def __init__(self, picks):
        self.picks = list(picks)
        self.d = 0

    def choose(self, label, options, sim):
        i = self.picks[self.d]
        self.d += 1
        return i


@dataclass
class OracleResult:
    value: float                      # optimal total time; inf when infeasible
    feasible: bool
    decisions: list = field(default_factory=list)   # [(label, choice)] of the witness
    picks: list = field(default_factory=list)
    report: RunReport | None = None
    runs: int = 0
    pruned: int = 0
    states: int = 0


def _objective(report: RunReport) -> float:
    if report.metrics["completed"] < report.metrics["sfc_count"]:
        return math.inf
    return report.total_time


def enumerate_optimal(instance: TinyInstance, max_runs: int = 200_000,
                      state_limit: int = STATE_LIMIT) -> OracleResult:
    """Minimum total time over every decision sequence the simulator admits.

    Runs that leave an SFC unfinished do not count as schedules.  A branch
    is cut as soon as the completed times plus the current slot start for
    every open SFC reach the best total found.
    """
    states = estimate_states(instance)
    if states > state_limit:
        raise OracleRefusal(f"instance has about {states} schedules, limit is {state_limit}",
                            states)
    scenario = instance.to_scenario()
    net = TableNetwork(instance)
    best = math.inf
    best_picks: list = []
    best_labels: list = []
    prefix: list = []
    runs = pruned = 0
    while True:
        if runs >= max_runs:
            raise OracleRefusal(f"search exceeded {max_runs} runs", states)
        runs += 1
        w = _Walker(prefix, best)
        try:
            report = Simulation(scenario, net, "FRMG", chooser=w).run()
            value = _objective(report)
            if value < best - 1e-9:
                best, best_picks, best_labels = value, list(w.picks), list(w.labels)
            depth = len(w.picks)
        except Prune as cut:
            pruned += 1
            depth = cut.args[0]
        # odometer: advance the deepest decision that still has options
        picks, counts = w.picks[:depth], w.counts[:depth]
        while picks and picks[-1] + 1 >= counts[-1]:
            picks.pop()
            counts.pop()
        if not picks:
            break
        picks[-1] += 1
        prefix = picks
    result = OracleResult(best, best < math.inf, best_labels, best_picks, None, runs, pruned,
                          states)
    if result.feasible:
        result.report = replay(instance, best_picks)
    return result


def replay(instance: TinyInstance, picks, audit: bool = True) -> RunReport:
    """Re-run the decision sequence ``picks`` (audited by default)."""
    from sagin_sfc.audit import audit_events

    scenario = instance.to_scenario()
    net = TableNetwork(instance)
    report = Simulation(scenario, net, "FRMG", chooser=_Replay(picks)).run()
    if audit:
        report.violations = audit_events(report.events, scenario, net)
    return report


def heuristic_value(instance: TinyInstance, policy: str = "FRMG") -> float:
    """Total time of a plain policy run; inf when it leaves an SFC unfinished."""
    scenario = instance.to_scenario(policy)
    report = Simulation(scenario, TableNetwork(instance), policy).run()
    return _objective(report)


# --------------------------------------------------------------------------
# random instances

def random_tiny_instance(seed: int) -> TinyInstance:
    rng = np.random.default_rng(seed)
    n_uav = int(rng.integers(2, 4))
    n_sat = int(rng.integers(0, 2)) if n_uav == 2 else 0
    nodes = ["G0", "G1"] + [f"U{i}" for i in range(n_uav)] + [f"S{i}" for i in range(n_sat)]
    T = int(rng.integers(2, 5))
    uavs = nodes[2:2 + n_uav]
    rates = []
    base = {}
    for a in uavs:
        for b in uavs:
            if a < b and rng.uniform() < 0.7:
                base[(a, b)] = float(rng.uniform(2e8, 1e9))
    for g in ("G0", "G1"):
        for u in uavs:
            if rng.uniform() < 0.6:
                base[(g, u)] = float(rng.uniform(2e8, 1e9))
    # keep at least one relay chain G0 - U0 - ... - G1 alive in slot 0
    base.setdefault(("G0", uavs[0]), float(rng.uniform(2e8, 1e9)))
    base.setdefault(("G1", uavs[-1]), float(rng.uniform(2e8, 1e9)))
    for a, b in zip(uavs, uavs[1:]):
        base.setdefault((a, b), float(rng.uniform(2e8, 1e9)))
    for t in range(T):
        table = []
        for (a, b), r in sorted(base.items()):
            if t > 0 and rng.uniform() < 0.2:
                continue                      # link lost to mobility this slot
            r_t = r * float(rng.uniform(0.8, 1.2))
            table += [(a, b, r_t), (b, a, r_t)]
        for s in nodes[2 + n_uav:]:
            table += [(uavs[0], s, 1e6), (s, "G1", 1e6), (s, "G0", 1e6)]
        rates.append(tuple(sorted(table)))
    sfcs = []
    for _ in range(int(rng.integers(1, 3))):
        o = int(rng.integers(0, 2))
        sfcs.append(SfcSpec(float(rng.uniform(1e8, 4e8)), o, 1 - o,
                            tuple(float(x) for x in rng.uniform(0.5, 2.0,
                                                                size=int(rng.integers(1, 3))))))
    failures = ()
    if T >= 3 and rng.uniform() < 0.5:
        failures = ((2, (uavs[int(rng.integers(len(uavs)))],)),)
    return TinyInstance(tuple(nodes), T, 5.0, tuple(rates), tuple(sfcs),
                        compute_capacity=3.0, storage_capacity_bits=1.6e9,
                        compute_ability=1.0, failures=failures)


# --------------------------------------------------------------------------
# LP export

def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _terms(pairs) -> str:
    out = []
    for coef, var in pairs:
        sign = "-" if coef < 0 else "+"
        out.append(f"{sign} {_fmt(abs(coef))} {var}")
    s = " ".join(out)
    return s[2:] if s.startswith("+ ") else s


def _wrap(text: str, width: int = 200) -> list:
    lines, cur = [], ""
    for tok in text.split(" "):
        if cur and len(cur) + 1 + len(tok) > width and tok in "+-":
            lines.append(cur)
            cur = "   " + tok
        else:
            cur = tok if not cur else cur + " " + tok
    lines.append(cur)
    return lines


def ilp_variables(instance: TinyInstance) -> dict:
    """Variable names by family: x (VNF placement per node and slot), y
    (transit link use per slot), z (storage link use), s (VNF start times)."""
    K = range(len(instance.sfcs))
    names = instance.node_names
    T = instance.slot_count
    x = [f"x_{k}_{m}_{n}_{t}" for k in K for m in range(len(instance.sfcs[k].sigma))
         for n in names for t in range(T)]
    y = [f"y_{k}_{a}_{b}_{t}" for k in K for t in range(T)
         for a, b, _ in sorted(instance.rates[t])]
    z = [f"z_{k}_{n}_{t}" for k in K for n in names for t in range(T - 1)]
    s = [f"s_{k}_{m}" for k in K for m in range(len(instance.sfcs[k].sigma))]
    return {"x": x, "y": y, "z": z, "s": s}


def export_ilp(instance: TinyInstance, energy_capacity_j: float = 1e5,
               compute_energy_j_per_unit: float = 50.0,
               uav_operation_power_w: float = 1.0,
               satellite_operation_power_w: float = 10.0) -> str:
    tau = instance.slot_length_s
    T = instance.slot_count
    phi = instance.compute_ability
    names = instance.node_names
    gs = instance.ground
    sfcs = instance.sfcs
    big_m = T * tau + sum(sum(s.sigma) for s in sfcs) / phi
    rate = [{(a, b): r for a, b, r in table} for table in instance.rates]
    var = ilp_variables(instance)

    obj = []
    for k, s in enumerate(sfcs):
        for m, sg in enumerate(s.sigma):
            for n in names:
                for t in range(T):
                    obj.append((sg / phi, f"x_{k}_{m}_{n}_{t}"))
        for t in range(T):
            for (a, b), r in sorted(rate[t].items()):
                obj.append((s.data_bits / r, f"y_{k}_{a}_{b}_{t}"))
        for n in names:
            for t in range(T - 1):
                obj.append((tau, f"z_{k}_{n}_{t}"))

    rows: list = []

    def row(name, pairs, sense, rhs):
        rows.append((name, pairs, sense, rhs))

    for k, s in enumerate(sfcs):
        o, d = gs[s.origin], gs[s.destination]
        l = len(s.sigma)
        # every VNF processed exactly once, never on a ground station
        for m in range(l):
            row(f"once_{k}_{m}", [(1, f"x_{k}_{m}_{n}_{t}") for n in names for t in range(T)],
                "=", 1)
            for g in gs:
                for t in range(T):
                    row(f"noground_{k}_{m}_{g}_{t}", [(1, f"x_{k}_{m}_{g}_{t}")], "=", 0)
        # flow through the time-expanded graph
        for n in names:
            for t in range(T):
                inflow = [(1, f"y_{k}_{a}_{n}_{t}") for a, b in sorted(rate[t]) if b == n]
                outflow = [(1, f"y_{k}_{n}_{b}_{t}") for a, b in sorted(rate[t]) if a == n]
                if t > 0:
                    inflow.append((1, f"z_{k}_{n}_{t - 1}"))
                if t < T - 1:
                    outflow.append((1, f"z_{k}_{n}_{t}"))
                if n == d:
                    if t < T - 1:
                        row(f"sinkstore_{k}_{t}", [(1, f"z_{k}_{n}_{t}")], "=", 0)
                    continue
                if n[0] == "G" and n != o:
                    if inflow:
                        row(f"norelay_{k}_{n}_{t}", inflow, "=", 0)
                    continue
                if n == o:
                    src = 1 if t == 0 else 0
                    if [p for p in inflow if p[1].startswith("y_")]:
                        row(f"noreturn_{k}_{t}", [p for p in inflow if p[1].startswith("y_")],
                            "=", 0)
                    row(f"flow_{k}_{n}_{t}", outflow + [(-c, v) for c, v in inflow], "=", src)
                    continue
                row(f"flow_{k}_{n}_{t}", inflow + [(-c, v) for c, v in outflow], "=", 0)
                # a VNF can only run where the data is
                for m in range(l):
                    row(f"here_{k}_{m}_{n}_{t}",
                        [(1, f"x_{k}_{m}_{n}_{t}")] + [(-c, v) for c, v in inflow], "<=", 0)
        row(f"arrive_{k}", [(1, f"y_{k}_{a}_{d}_{t}") for t in range(T)
                            for a, b in sorted(rate[t]) if b == d], "=", 1)
        # sequencing with big-M: each VNF inside its slot, in chain order
        for m, sg in enumerate(s.sigma):
            for n in names:
                for t in range(T):
                    xv = f"x_{k}_{m}_{n}_{t}"
                    row(f"start_{k}_{m}_{n}_{t}", [(1, f"s_{k}_{m}"), (-big_m, xv)], ">=",
                        t * tau - big_m)
                    row(f"end_{k}_{m}_{n}_{t}", [(1, f"s_{k}_{m}"), (big_m, xv)], "<=",
                        (t + 1) * tau - sg / phi + big_m)
            if m + 1 < l:
                row(f"order_{k}_{m}", [(1, f"s_{k}_{m + 1}"), (-1, f"s_{k}_{m}")], ">=", sg / phi)

    for t in range(T):
        failed = instance.failed_at(t)
        for (a, b), r in sorted(rate[t].items()):
            pairs = [(s.data_bits, f"y_{k}_{a}_{b}_{t}") for k, s in enumerate(sfcs)]
            row(f"link_{a}_{b}_{t}", pairs, "<=", r * tau)
            if a in failed or b in failed:
                row(f"dead_{a}_{b}_{t}", [(1, v) for _, v in pairs], "=", 0)
        for n in names:
            if n[0] == "G":
                continue
            row(f"compute_{n}_{t}", [(sg, f"x_{k}_{m}_{n}_{t}") for k, s in enumerate(sfcs)
                                     for m, sg in enumerate(s.sigma)],
                "<=", instance.compute_capacity)
            if t < T - 1:
                row(f"storage_{n}_{t}", [(s.data_bits, f"z_{k}_{n}_{t}")
                                         for k, s in enumerate(sfcs)],
                    "<=", instance.storage_capacity_bits)
            if n in failed:
                dead = [(1, f"x_{k}_{m}_{n}_{t}") for k, s in enumerate(sfcs)
                        for m in range(len(s.sigma))]
                if t < T - 1:
                    dead += [(1, f"z_{k}_{n}_{t}") for k in range(len(sfcs))]
                if t > 0:
                    dead += [(1, f"z_{k}_{n}_{t - 1}") for k in range(len(sfcs))]
                row(f"down_{n}_{t}", dead, "=", 0)
    for n in names:
        if n[0] == "G":
            continue
        op = (uav_operation_power_w if n[0] == "U" else satellite_operation_power_w) * tau * T
        row(f"energy_{n}", [(compute_energy_j_per_unit * sg, f"x_{k}_{m}_{n}_{t}")
                            for k, s in enumerate(sfcs) for m, sg in enumerate(s.sigma)
                            for t in range(T)], "<=", energy_capacity_j - op)

    lines = [
        "\\ SFC deployment on a time-expanded network",
        f"\\ nodes {len(names)} slots {T} sfcs {len(sfcs)} slot length {_fmt(tau)} s",
        "\\ objective: processing + transmission + storage time; waiting caused by",
        "\\ contention is not linear in these variables and is left out",
        f"\\ big-M {_fmt(big_m)}",
        "Minimize",
    ]
    lines += _wrap(" obj: " + _terms(obj))
    lines.append("Subject To")
    for name, pairs, sense, rhs in rows:
        lines += _wrap(f" {name}: {_terms(pairs)} {sense} {_fmt(rhs)}")
    lines.append("Bounds")
    for v in var["s"]:
        lines.append(f" 0 <= {v} <= {_fmt(big_m)}")
    lines.append("Binaries")
    for fam in ("x", "y", "z"):
        for i in range(0, len(var[fam]), 8):
            lines.append(" " + " ".join(var[fam][i:i + 8]))
    lines.append("End")
    return "\n".join(lines) + "\n"


def binary_count(instance: TinyInstance) -> int:
    """Closed form: K-sum of VNFs times N times T, plus link terms."""
    N, T = len(instance.nodes), instance.slot_count
    K = len(instance.sfcs)
    place = sum(len(s.sigma) for s in instance.sfcs) * N * T
    links = K * sum(len(table) for table in instance.rates) + K * N * (T - 1)
    return place + links
