"""Slot-by-slot simulation of SFC deployment under node failures.

Scheduling is slotted but time inside a slot is continuous.  Per slot:

1. failure update (on boundaries) and rollback of affected SFCs,
2. recovery of affected SFCs by the configured policy,
3. in-service work re-reserves its node / link, then every idle SFC acts
   in policy order: process the next VNF if it sits here, otherwise send
   the data to the next hop, otherwise wait (store) for the next slot.

Resources per slot: a node hosts VNFs with total demand at most ``C``
(reservations last the whole slot); a link is a serial server at the
slot's rate, so it never moves more than ``R * tau`` bits; a node never
holds more than ``A`` bits, counting transfers headed to it.
"""

from __future__ import annotations

import csv
import hashlib
import heapq
import io
import itertools
from dataclasses import dataclass, field

from sagin_sfc import energy as en
from sagin_sfc.failure import FailureProcess, apply_failures
from sagin_sfc.pathing import INF, NoAccessError, RouteCache, nearest_uav, path_time, simple_paths
from sagin_sfc.recovery import Matching, Policy, make_policy, quota, recovery_candidates
from sagin_sfc.scenario import Scenario, seeded_stream
from sagin_sfc.topology import GeometricNetwork

EPS = 1e-9

EVENT_COLUMNS = ("id", "slot", "time", "until", "kind", "sfc", "vnf", "node", "peer",
                 "amount", "work", "rate", "info")


def spread(pending, nodes) -> dict:
    """Place ``pending`` VNFs in order over ``nodes``: j -> nodes[j*p // r]."""
    r, p = len(pending), len(nodes)
    return {m: nodes[(j * p) // r] for j, m in enumerate(pending)} if p else {}


def admit_at_node(free_capacity: float, arrivals, key=None):
    """Split co-located arrivals into the admitted prefix and the rest.

    ``arrivals`` are objects with ``data_bits``, ``k`` and ``sigma_next``.
    They are taken in ascending data order (or ``key``) until the next
    one no longer fits.
    """
    key = key or (lambda a: (a.data_bits, a.k))
    admitted, deferred = [], []
    free = free_capacity
    blocked = False
    for a in sorted(arrivals, key=key):
        if not blocked and a.sigma_next <= free + EPS:
            admitted.append(a)
            free -= a.sigma_next
        else:
            blocked = True
            deferred.append(a)
    return admitted, deferred


@dataclass
class Tx:
    src: str
    dst: str
    hop: int
    bits_left: float


class SfcRuntime:
    def __init__(self, k, spec, origin, dest):
        self.k = k
        self.data_bits = float(spec.data_bits)
        self.sigma = tuple(spec.sigma)
        self.origin = origin
        self.dest = dest
        self.current = origin
        self.route: list = []          # planned hops after ``current``
        self.placement: dict = {}      # vnf -> node
        self.next_vnf = 0
        self.proc_left = None          # remaining demand of the in-service VNF
        self.proc_node = None
        self.proc_rows: list = []
        self.tx: Tx | None = None
        self.tx_rows: dict = {}        # hop -> row ids
        self.history = [origin]
        self.w = [False] * len(self.sigma)
        self.done = False
        self.completion = None
        self.redeployed = False
        self.needs_recovery = False
        self.re_key = None
        self.mark = 0.0                # logged up to this time

    @property
    def vnf_count(self):
        return len(self.sigma)

    @property
    def sigma_next(self):
        return self.sigma[self.next_vnf] if self.next_vnf < self.vnf_count else 0.0


class Prune(Exception):
    """Raised by a chooser to abandon the current run."""


@dataclass
class DelayBreakdown:
    sfc: int
    processing: float = 0.0
    transmission: float = 0.0
    storage: float = 0.0
    redeploy: float = 0.0
    other: float = 0.0
    total: float = 0.0
    completed: bool = False
    completion_time: float | None = None
    first_tx: float | None = None
    redeploy_by_vnf: dict = field(default_factory=dict)

    @property
    def bucket_sum(self):
        return self.processing + self.transmission + self.storage + self.redeploy + self.other


def delay_breakdown(events, k: int, horizon: float) -> DelayBreakdown:
    """Delay buckets of SFC ``k`` recomputed from the event log alone.

    Processing and transmission slices count as such unless a later
    rollback lists them as lost, in which case they move to the redeploy
    bucket; waits carry their bucket in ``info``.
    """
    rows = [r for r in events if r[5] == k]
    lost: dict = {}
    for r in rows:
        if r[4] == "ROLLBACK" and r[12]:
            key, _, ids = r[12].partition(":")
            for i in ids.split(";") if ids else ():
                lost[int(i)] = None if key == "-" else int(key)
    b = DelayBreakdown(sfc=k)
    for r in rows:
        kind, t0, t1 = r[4], r[2], r[3]
        if kind == "ARRIVE":
            b.completed = True
            b.completion_time = t0
        elif kind == "TX_START" and b.first_tx is None:
            b.first_tx = t0
        if kind not in ("PROC_SLICE", "TX_SLICE", "STORE"):
            continue
        d = t1 - t0
        if r[0] in lost:
            b.redeploy += d
            key = lost[r[0]]
            b.redeploy_by_vnf[key] = b.redeploy_by_vnf.get(key, 0.0) + d
        elif kind == "PROC_SLICE":
            b.processing += d
        elif kind == "TX_SLICE":
            b.transmission += d
        else:
            bucket, _, key = r[12].partition(":")
            if bucket == "re":
                b.redeploy += d
                kk = None if key in ("", "-") else int(key)
                b.redeploy_by_vnf[kk] = b.redeploy_by_vnf.get(kk, 0.0) + d
            elif bucket == "o":
                b.other += d
            else:
                b.storage += d
    b.total = b.completion_time if b.completed else horizon
    return b


@dataclass
class RunReport:
    scenario_digest: str
    policy: str
    seed: int
    breakdowns: list
    metrics: dict
    events: list
    slots: list
    failures: list
    energy: dict
    violations: list = field(default_factory=list)
    failure_trace: list = field(default_factory=list)   # (slot, failed) over the horizon

    @property
    def audit(self) -> str:
        return "pass" if not self.violations else "fail"

    @property
    def valid(self) -> bool:
        return not self.violations

    @property
    def total_time(self) -> float:
        return self.metrics["total_time_s"]

    def events_csv(self) -> str:
        return rows_to_csv(EVENT_COLUMNS, self.events)

    def failure_digest(self) -> str:
        """Digest of the failed sets alone, which do not depend on the policy."""
        return hashlib.sha256(repr(self.failure_trace).encode()).hexdigest()[:16]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


class Simulation:
    """One run.  ``chooser`` (used by the exact oracle) may override every
    routing, placement, ordering and recovery decision; without it the
    configured policy decides."""

    def __init__(self, scenario: Scenario, network=None, policy: Policy | str | None = None,
                 chooser=None):
        self.scenario = scenario
        self.params = scenario.params
        self.weights = scenario.weights
        self.net = network if network is not None else GeometricNetwork(scenario)
        if policy is None or isinstance(policy, str):
            policy = make_policy(policy or scenario.policy, scenario.seed)
        self.policy = policy
        self.chooser = chooser
        self.tau = scenario.time.slot_length_s
        self.T = scenario.time.slot_count
        self.horizon = self.T * self.tau
        self.phi = self.params.compute_ability_units_per_s
        self.C = self.params.compute_capacity_units
        self.A = self.params.storage_capacity_bits
        self.routes = RouteCache()
        names = list(self.net.node_names)
        self.node_names = names
        budgets = {n: self.params.energy_capacity_j for n in names if n[0] != "G"}
        self.ledger = en.EnergyLedger(budgets)
        self.failures = FailureProcess(scenario.failure, names,
                                       seeded_stream(scenario.seed, "failures"))
        self.failed: frozenset = frozenset()
        self.depleted: set = set()
        gs = self.net.ground
        self.sfcs = [SfcRuntime(k, s, gs[s.origin], gs[s.destination])
                     for k, s in enumerate(scenario.sfcs)]
        self.events: list = []
        self.slot_rows: list = []
        self.failure_rows: list = []
        self.failure_trace: list = []
        self.resident = {n: 0.0 for n in names}
        self.inflight = {n: 0.0 for n in names}
        for s in self.sfcs:
            self.resident[s.origin] += s.data_bits
        self.now = 0.0
        self.slot = 0
        self.rank = None              # explicit priority order (oracle)

    # ------------------------------------------------------------------ log

    def log(self, kind, sfc=None, vnf=None, node=None, peer=None, amount=None, work=None,
            rate=None, time=None, until=None, info=""):
        rid = len(self.events)
        t = self.now if time is None else time
        self.events.append((rid, self.slot, t, t if until is None else until, kind,
                            sfc, vnf, node, peer, amount, work, rate, info))
        return rid

    def _choose(self, label, default, options_fn):
        if self.chooser is None:
            return default
        options = [default]
        for o in options_fn():
            if o not in options:
                options.append(o)
        return options[self.chooser.choose(label, options, self)]

    def lower_bound(self, now):
        return sum(s.completion if s.done else now for s in self.sfcs)

    # ----------------------------------------------------------- state api

    def pending_vnfs(self, s) -> list:
        start = s.next_vnf + (1 if s.proc_left is not None else 0)
        return list(range(start, s.vnf_count))

    def is_processing_at(self, s, node) -> bool:
        return s.proc_left is not None and s.proc_node == node

    def is_stored_at(self, s, node) -> bool:
        return not s.done and s.proc_left is None and s.tx is None and s.current == node

    def node_quota(self, node) -> int:
        busy = 0.0
        for s in self.sfcs:
            if s.done:
                continue
            if s.proc_left is not None and s.proc_node == node:
                busy += s.sigma[s.next_vnf]
            elif s.current == node and s.tx is None and s.next_vnf < s.vnf_count:
                busy += s.sigma[s.next_vnf]
        return quota(self.C, busy, 0.0)

    @property
    def time_left(self):
        return self.horizon - self.now

    def order_key(self, s):
        if self.rank is not None:
            return (self.rank[s.k], s.k)
        return self.policy.order_key(s)

    # --------------------------------------------------------------- routes

    def _path_ok(self, graph, names, s, budget):
        return names is not None and path_time(graph, names, s.data_bits) <= budget

    def initial_route(self, s, graph):
        pos = self.net.positions(0)
        default = None
        try:
            uo = nearest_uav(pos[s.origin], pos).name
            ud = nearest_uav(pos[s.dest], pos).name
            mid = self.routes.route(graph, uo, ud)
            if mid is not None and graph.link(s.origin, uo) and graph.link(ud, s.dest):
                cand = [s.origin] + mid + [s.dest]
                if len(set(cand)) == len(cand):
                    default = cand
        except NoAccessError:
            pass
        if default is None:
            default = self.routes.route(graph, s.origin, s.dest)
        if default is not None and not self._path_ok(graph, default, s, self.horizon):
            default = None
        chosen = self._choose(("route", s.k), default,
                              lambda: simple_paths(graph, s.origin, s.dest))
        return chosen

    def set_route(self, s, names, include_current: bool):
        """Adopt ``names`` (starting at the current node) and re-place pending VNFs."""
        s.route = list(names[1:])
        relays = [n for n in names[(0 if include_current else 1):] if n[0] != "G"]
        pending = self.pending_vnfs(s)
        for m in pending:
            s.placement.pop(m, None)
        if pending and relays:
            default = spread(pending, relays)
            chosen = self._choose(("place", s.k), default,
                                  lambda: _monotone_placements(pending, relays))
            s.placement.update(chosen)

    # ------------------------------------------------------------- failures

    def rollback(self, s, failed, slot, attribute_to=None):
        lost = []
        if s.tx is not None and (s.tx.src in failed or s.tx.dst in failed
                                 or s.current in failed):
            lost += s.tx_rows.get(s.tx.hop, [])
            self.inflight[s.tx.dst] -= s.data_bits
            s.tx = None
        target = s.current
        if s.current in failed:
            # latest surviving node that can still hold the data; the origin always can
            idx = max(i for i, n in enumerate(s.history)
                      if n not in failed and (n[0] == "G" or self.resident[n] + self.inflight[n]
                                              + s.data_bits <= self.A + EPS))
            target = s.history[idx]
            for hop in range(idx, len(s.history)):
                lost += s.tx_rows.pop(hop, [])
            self.resident[s.current] -= s.data_bits
            self.resident[target] += s.data_bits
            s.history = s.history[:idx + 1]
            s.current = target
        if s.proc_left is not None and (s.proc_node in failed or s.proc_node != s.current):
            lost += s.proc_rows
            s.proc_rows = []
            s.proc_left = None
            s.proc_node = None
        for m in self.pending_vnfs(s):
            s.placement.pop(m, None)
        s.route = []
        s.needs_recovery = True
        s.re_key = attribute_to
        key = "-" if attribute_to is None else str(attribute_to)
        self.log("ROLLBACK", sfc=s.k, node=target, vnf=attribute_to,
                 info=f"{key}:{';'.join(str(i) for i in sorted(lost))}")
        return target

    def _recover(self, graph, slot):
        todo = [s for s in self.sfcs if not s.done and s.needs_recovery and s.tx is None]
        if not todo:
            return
        m: Matching = self.policy.recover(self, todo, graph, slot)
        for action, k, n in m.trace:
            self.log("MATCH", sfc=k, node=n, info=action)
        for s in sorted(todo, key=lambda x: x.k):
            default = m.assignment.get(s.k)
            a = self._choose(("recover", s.k), default,
                             lambda: recovery_candidates(self, s, graph) + [None])
            if a is None:
                continue
            if a == s.dest:
                tail = [s.dest]
            else:
                tail = self.routes.route(graph, a, s.dest)
                if tail is None or not self._path_ok(graph, tail, s, self.horizon - self.now):
                    tail = [a]
                tail = self._choose(("reroute", s.k), tail,
                                    lambda: simple_paths(graph, a, s.dest) or [[a]])
            s.needs_recovery = False
            s.redeployed = True
            self.set_route(s, [s.current] + tail, include_current=False)
            first = self.pending_vnfs(s)
            self.log("REDEPLOY", sfc=s.k, vnf=first[0] if first else None, node=a,
                     info="" if s.re_key is None else str(s.re_key))

    # ----------------------------------------------------------------- loop

    def run(self) -> RunReport:
        g0 = self.net.slot_graph(0)
        for s in self.sfcs:
            names = self.initial_route(s, g0)
            if names is not None:
                self.set_route(s, names, include_current=False)
        if self.chooser is not None:
            order = sorted(self.sfcs, key=self.policy.order_key)
            default = tuple(x.k for x in order)
            perm = self._choose(("priority",), default,
                                lambda: list(itertools.permutations(sorted(default))))
            self.rank = {k: i for i, k in enumerate(perm)}
        for t in range(self.T):
            self.slot = t
            self.now = t * self.tau
            self._slot(t)
            if all(s.done for s in self.sfcs):
                break
        return self._finish()

    def _slot(self, t):
        t0, t1 = t * self.tau, (t + 1) * self.tau
        new = self.failures.advance(t)
        if new is not None:
            self.failed = new
            self.failure_trace.append((t, " ".join(sorted(new, key=_order))))
            self.log("FAIL", info=" ".join(sorted(new, key=_order)))
            ev = apply_failures(self, new, t)
            self.failure_rows.append((t, " ".join(sorted(new, key=_order)),
                                      " ".join(str(k) for k in sorted(ev.affected_sfcs))))
        dead = self.failed | self.depleted
        # operation energy of every live relay for this slot
        for n in self.node_names:
            if n[0] == "G" or n in dead:
                continue
            p = (self.params.uav_operation_power_w if n[0] == "U"
                 else self.params.satellite_operation_power_w) * self.tau
            if self.ledger.enforced_total(n) + p > self.ledger.budgets[n]:
                self.depleted.add(n)
                self.log("DEPLETE", node=n)
            else:
                self.ledger.add(n, "operation", p)
        if self.depleted - dead:
            newly = set(self.depleted) - set(dead)
            apply_failures(self, frozenset(newly), t)
        dead = frozenset(self.failed | self.depleted)
        graph = self.net.slot_graph(t, dead)
        self.graph = graph
        active = [s for s in self.sfcs if not s.done]
        self.policy.begin_slot(t, active)
        self._recover(graph, t)

        self.reserved: dict = {}       # node -> [(sfc, sigma)]
        self.closed: set = set()
        self.busy: dict = {}           # (src, dst) -> (free_at, holder)
        self.proc_in_slot: set = set()
        heap: list = []
        self._heap = heap
        self._t1 = t1
        for s in sorted(active, key=self.order_key):
            if s.proc_left is not None:
                self._reserve(s, s.proc_node)
                self._run_proc(s, t0)
            elif s.tx is not None:
                link = graph.link(s.tx.src, s.tx.dst)
                if link is None:
                    # hop vanished with mobility: the partial transfer is wasted
                    self.inflight[s.tx.dst] -= s.data_bits
                    self.log("TX_ABORT", sfc=s.k, node=s.tx.src, peer=s.tx.dst, time=t0)
                    s.tx = None
                    self._push(s, t0)
                else:
                    self._run_tx(s, t0, link.rate_bps)
            elif s.needs_recovery:
                self._wait(s, t0, "re")
            else:
                self._push(s, t0)
        while heap:
            now, _, k = heapq.heappop(heap)
            if now >= t1 - EPS:
                continue              # acts at the start of the next slot instead
            self.now = now
            self._decide(self.sfcs[k], now)
        self.now = t1
        unfinished = len(active)
        row = (t, unfinished, len(self.proc_in_slot),
               (len(self.proc_in_slot) / unfinished) if unfinished else 0.0,
               sum(1 for s in self.sfcs if s.done), len(dead))
        self.slot_rows.append(row)

    def _push(self, s, when):
        heapq.heappush(self._heap, (when, self.order_key(s), s.k))

    def _reserve(self, s, node):
        self.reserved.setdefault(node, []).append((s, s.sigma[s.next_vnf]))

    def _wait(self, s, now, bucket, blockers=()):
        t1 = self._t1
        if bucket == "s" and any(b.redeployed and b is not s for b in blockers):
            bucket = "o"
        key = ""
        if bucket == "re":
            key = ":" + ("-" if s.re_key is None else str(s.re_key))
        if t1 > now:
            self.log("STORE", sfc=s.k, node=s.current, time=now, until=t1, info=bucket + key)
        s.mark = t1

    def _gap(self, s, now, until, blockers):
        if until > now + EPS:
            bucket = "o" if any(b.redeployed and b is not s for b in blockers) else "s"
            self.log("STORE", sfc=s.k, node=s.current, time=now, until=until, info=bucket)

    # ------------------------------------------------------------ decisions

    def _plan_ok(self, s, graph) -> bool:
        if not s.route:
            return False
        if graph.link(s.current, s.route[0]) is None:
            return False
        m = s.next_vnf
        return m == s.vnf_count or s.placement.get(m) in s.route

    def _decide(self, s, now):
        if s.done:
            return
        if s.needs_recovery:
            self._wait(s, now, "re")
            return
        graph = self.graph
        m = s.next_vnf
        if m < s.vnf_count and s.placement.get(m) == s.current:
            self._try_process(s, now)
            return
        if not self._plan_ok(s, graph):
            # hop lost to mobility or no plan yet: shortest path from here
            names = self.routes.route(graph, s.current, s.dest)
            if names is not None and not self._path_ok(graph, names, s, self.horizon - now):
                names = None
            names = self._choose(("replan", s.k), names,
                                 lambda: simple_paths(graph, s.current, s.dest))
            if names is None or len(names) < 2:
                self._wait(s, now, "s")
                return
            self.set_route(s, names, include_current=s.current[0] != "G")
            if m < s.vnf_count and s.placement.get(m) == s.current:
                self._try_process(s, now)
                return
            if not self._plan_ok(s, graph):
                self._wait(s, now, "s")
                return
        self._try_send(s, s.route[0], now)

    def _try_process(self, s, now):
        node = s.current
        sigma = s.sigma[s.next_vnf]
        held = self.reserved.get(node, [])
        used = sum(x for _, x in held)
        if node in self.closed or used + sigma > self.C + EPS or not en.charge_compute(
                self.ledger, node, sigma, self.params.compute_energy_j_per_unit):
            self.closed.add(node)
            self._wait(s, now, "s", [b for b, _ in held])
            return
        self._reserve(s, node)
        s.proc_left = sigma
        s.proc_node = node
        s.proc_rows = []
        self.log("PROCESS_START", sfc=s.k, vnf=s.next_vnf, node=node, amount=sigma)
        self._run_proc(s, now)

    def _run_proc(self, s, now):
        t1 = self._t1
        need = s.proc_left / self.phi
        end = now + need
        self.proc_in_slot.add(s.k)
        sigma = s.sigma[s.next_vnf]
        if end <= t1 + EPS:
            rid = self.log("PROC_SLICE", sfc=s.k, vnf=s.next_vnf, node=s.proc_node, amount=sigma,
                           work=s.proc_left, rate=self.phi, time=now, until=end)
            s.proc_rows.append(rid)
            self.now = end
            self.log("PROCESS_END", sfc=s.k, vnf=s.next_vnf, node=s.proc_node, time=end)
            s.proc_left = None
            s.proc_node = None
            s.proc_rows = []
            s.next_vnf += 1
            s.mark = end
            self._push(s, end)
        else:
            work = self.phi * (t1 - now)
            rid = self.log("PROC_SLICE", sfc=s.k, vnf=s.next_vnf, node=s.proc_node, amount=sigma,
                           work=work, rate=self.phi, time=now, until=t1)
            s.proc_rows.append(rid)
            s.proc_left -= work
            s.mark = t1

    def _try_send(self, s, nxt, now):
        t1 = self._t1
        if nxt[0] != "G":
            if self.resident[nxt] + self.inflight[nxt] + s.data_bits > self.A + EPS:
                blockers = [b for b in self.sfcs if not b.done and (
                    b.current == nxt or (b.tx is not None and b.tx.dst == nxt))]
                self._wait(s, now, "s", blockers)
                return
        key = (s.current, nxt)
        free_at, holder = self.busy.get(key, (now, None))
        start = max(now, free_at)
        if start >= t1 - EPS:
            self._wait(s, now, "s", [holder] if holder else [])
            return
        self._gap(s, now, start, [holder] if holder else [])
        self.now = start
        hop = len(s.history) - 1
        s.tx = Tx(s.current, nxt, hop, s.data_bits)
        s.tx_rows[hop] = []
        self.inflight[nxt] += s.data_bits
        self.log("TX_START", sfc=s.k, node=s.current, peer=nxt, amount=s.data_bits, time=start)
        self._run_tx(s, start, self.graph.link(s.current, nxt).rate_bps)

    def _run_tx(self, s, now, rate):
        t1 = self._t1
        tx = s.tx
        end = now + tx.bits_left / rate
        key = (tx.src, tx.dst)
        if end <= t1 + EPS:
            rid = self.log("TX_SLICE", sfc=s.k, node=tx.src, peer=tx.dst, amount=tx.bits_left,
                           rate=rate, time=now, until=end)
            s.tx_rows.setdefault(tx.hop, []).append(rid)
            self.busy[key] = (end, s)
            self.now = end
            self.log("TX_END", sfc=s.k, node=tx.src, peer=tx.dst, time=end)
            self.inflight[tx.dst] -= s.data_bits
            self.resident[tx.src] -= s.data_bits
            self.resident[tx.dst] += s.data_bits
            s.current = tx.dst
            s.history.append(tx.dst)
            if s.route and s.route[0] == tx.dst:
                s.route.pop(0)
            s.tx = None
            s.mark = end
            if s.current == s.dest and s.next_vnf == s.vnf_count:
                s.done = True
                s.completion = end
                self.resident[s.dest] -= s.data_bits
                self.log("ARRIVE", sfc=s.k, node=s.dest, time=end)
            else:
                self._push(s, end)
        else:
            bits = rate * (t1 - now)
            rid = self.log("TX_SLICE", sfc=s.k, node=tx.src, peer=tx.dst, amount=bits,
                           rate=rate, time=now, until=t1)
            s.tx_rows.setdefault(tx.hop, []).append(rid)
            self.busy[key] = (t1, s)
            tx.bits_left -= bits
            s.mark = t1

    # ---------------------------------------------------------------- report

    def _finish(self) -> RunReport:
        # draw the rest of the trace so early finishers report the same one
        for t in range(self.slot + 1, self.T):
            new = self.failures.advance(t)
            if new is not None:
                self.failure_trace.append((t, " ".join(sorted(new, key=_order))))
        bds = [delay_breakdown(self.events, s.k, self.horizon) for s in self.sfcs]
        self._energy_post()
        done = [b for b in bds if b.completed]
        firsts = [b.first_tx for b in bds if b.first_tx is not None]
        if len(done) == len(bds) and firsts:
            max_c = max(b.completion_time for b in done) - min(firsts)
        else:
            max_c = self.horizon - (min(firsts) if firsts else 0.0)
        ratios = [r[3] for r in self.slot_rows]
        metrics = {
            "total_time_s": sum(b.total for b in bds),
            "mean_time_s": (sum(b.total for b in bds) / len(bds)) if bds else 0.0,
            "max_completion_s": max_c,
            "completed": len(done),
            "sfc_count": len(bds),
            "mean_processed_ratio": (sum(ratios) / len(ratios)) if ratios else 0.0,
            "redeployments": sum(1 for e in self.events if e[4] == "REDEPLOY"),
            "rollbacks": sum(1 for e in self.events if e[4] == "ROLLBACK"),
        }
        return RunReport(
            scenario_digest=self.scenario.digest(), policy=self.policy.name,
            seed=self.scenario.seed, breakdowns=bds, metrics=metrics, events=self.events,
            slots=self.slot_rows, failures=self.failure_rows, energy=self.ledger.snapshot(),
            failure_trace=self.failure_trace)

    def _energy_post(self):
        p = self.params
        comm: dict = {}
        rx: dict = {}
        tx: dict = {}
        for e in self.events:
            if e[4] != "TX_SLICE":
                continue
            slot, src, dst, bits, rate = e[1], e[7], e[8], e[9], e[11]
            kind = src[0] + dst[0]
            a = {"kind": _KIND.get(kind, kind), "bits": bits, "rate": rate}
            if src[0] == "U":
                comm.setdefault((src, slot), []).append(a)
            if src[0] == "S":
                tx.setdefault((src, slot), []).append(a)
            if dst[0] == "S":
                rx.setdefault((dst, slot), []).append(a)
        positions = getattr(self.net, "positions", None)
        last = self.slot
        for t in range(last + 1):
            cur = positions(t) if positions else None
            nxt = positions(min(t + 1, self.T)) if positions and hasattr(self.net, "uav_xy") else cur
            for n in self.node_names:
                if n[0] == "U":
                    a, b = (cur[n], nxt[n]) if cur else ((0, 0, 0), (0, 0, 0))
                    e = en.uav_slot_energy(a, b, p, comm.get((n, t), []), self.tau)
                    self.ledger.add(n, "path", e["path"])
                    self.ledger.add(n, "communication", e["communication"])
                elif n[0] == "S":
                    e = en.satellite_slot_energy(p, rx.get((n, t), []), tx.get((n, t), []),
                                                 self.tau)
                    self.ledger.add(n, "reception", e["reception"])
                    self.ledger.add(n, "transmission", e["transmission"])


_KIND = {"GU": "G2U", "UG": "U2G", "UU": "U2U", "US": "U2S", "SS": "S2S", "SG": "S2G"}


def _order(name: str):
    return ("GUS".index(name[0]), int(name[1:]))


def _monotone_placements(pending, relays) -> list:
    out = []

    def rec(i, lo, acc):
        if i == len(pending):
            out.append(dict(acc))
            return
        for j in range(lo, len(relays)):
            acc[pending[i]] = relays[j]
            rec(i + 1, j, acc)
        acc.pop(pending[i], None)

    rec(0, 0, {})
    return out


def run_simulation(scenario: Scenario, network=None, policy=None, audit: bool = True,
                   chooser=None) -> RunReport:
    sim = Simulation(scenario, network, policy, chooser)
    report = sim.run()
    if audit:
        from sagin_sfc.audit import audit_events
        report.violations = audit_events(report.events, scenario, sim.net)
    return report
