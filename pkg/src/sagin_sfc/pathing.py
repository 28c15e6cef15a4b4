"""Shortest-path route initialization and time-to-destination bounds."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from sagin_sfc.channel import STORAGE
from sagin_sfc.topology import NodeId, SlotGraph

INF = math.inf


class NoAccessError(LookupError):
    pass


@dataclass
class Path:
    nodes: list          # list[NodeId]
    links: list          # list[Link]
    total_cost_s: float

    @property
    def names(self) -> list:
        return [n.name for n in self.nodes]


def _order(name: str):
    return ("GUS".index(name[0]), int(name[1:]))


def transit_ok(name: str) -> bool:
    """Ground stations terminate paths; they never relay."""
    return name[0] != "G"


def nearest_uav(point, positions: dict, failed=frozenset(), slot: int = 0) -> NodeId:
    best, best_d = None, INF
    for name, p in positions.items():
        if name[0] != "U" or name in failed:
            continue
        d = math.hypot(p[0] - point[0], p[1] - point[1])
        if d < best_d or (d == best_d and _order(name) < _order(best)):
            best, best_d = name, d
    if best is None:
        raise NoAccessError("no live UAV available")
    return NodeId.of(best, slot)


def transmission_cost(data_bits: float):
    def cost(link):
        if link.kind == STORAGE:
            return None
        return data_bits / link.rate_bps if link.rate_bps > 0 else INF
    return cost


def shortest_path(graph: SlotGraph, src: str, dst: str, cost_fn=None,
                  can_transit=transit_ok) -> Path | None:
    """Minimum-cost path from ``src`` to ``dst`` within one slot graph.

    ``cost_fn(link)`` gives seconds; the default charges one bit per unit
    rate, so pass ``transmission_cost(data_bits)`` for real transfer times.
    Returns None when ``dst`` is unreachable.  Equal tentative costs keep
    the first predecessor found; the frontier is ordered by node index.
    """
    if cost_fn is None:
        cost_fn = transmission_cost(1.0)
    src = getattr(src, "name", src)
    dst = getattr(dst, "name", dst)
    slot = graph.slot
    if not graph.has_node(src) or not graph.has_node(dst):
        return None
    if src == dst:
        return Path([NodeId.of(src, slot)], [], 0.0)
    dist = {src: 0.0}
    prev: dict = {}
    done = set()
    heap = [(0.0, _order(src), src)]
    while heap:
        d, _, u = heapq.heappop(heap)
        if u in done:
            continue          # stale entry: skip it, keep scanning
        done.add(u)
        if u == dst:
            break
        if u != src and not can_transit(u):
            continue
        for v, link in graph.neighbors(u).items():
            if v in done:
                continue
            c = cost_fn(link)
            if c is None or c == INF:
                continue
            nd = d + c
            if nd < dist.get(v, INF):
                dist[v] = nd
                prev[v] = link
                heapq.heappush(heap, (nd, _order(v), v))
    if dst not in done:
        return None
    links = []
    v = dst
    while v != src:
        ln = prev[v]
        links.append(ln)
        v = ln.src.name
    links.reverse()
    nodes = [links[0].src] + [ln.dst for ln in links]
    total = 0.0
    for ln in links:
        total += cost_fn(ln)
    return Path(nodes, links, total)


def time_to_destination(graph: SlotGraph, node: str, dst: str, data_bits: float) -> float:
    """Shortest transfer time of ``data_bits`` from ``node`` to ``dst``; inf if unreachable."""
    p = shortest_path(graph, node, dst, transmission_cost(data_bits))
    return INF if p is None else p.total_cost_s


def path_time(graph: SlotGraph, names, data_bits: float) -> float:
    """Transfer time along an explicit node sequence, summed hop by hop."""
    total = 0.0
    for a, b in zip(names, names[1:]):
        r = graph.rate(a, b)
        if r <= 0:
            return INF
        total += data_bits / r
    return total


class RouteCache:
    """Memoized shortest routes per slot graph.

    Transfer time is linear in the data amount, so the route structure for
    a given (graph, src, dst) does not depend on the SFC; only the node
    sequence is cached and the cost is re-summed per query.
    """

    def __init__(self):
        self._routes: dict = {}

    def route(self, graph: SlotGraph, src: str, dst: str):
        key = (id(graph), src, dst)
        hit = self._routes.get(key)
        if hit is None:
            p = shortest_path(graph, src, dst)
            hit = (graph, None if p is None else p.names)
            self._routes[key] = hit
        return hit[1]

    def time(self, graph: SlotGraph, src: str, dst: str, data_bits: float) -> float:
        names = self.route(graph, src, dst)
        if names is None:
            return INF
        return path_time(graph, names, data_bits)


def simple_paths(graph: SlotGraph, src: str, dst: str, can_transit=transit_ok,
                 limit: int | None = None) -> list:
    """All simple node sequences src -> dst, ground stations never interior."""
    out: list = []

    def walk(u, seen, acc):
        if limit is not None and len(out) >= limit:
            return
        if u == dst:
            out.append(list(acc))
            return
        if u != src and not can_transit(u):
            return
        for v in sorted(graph.neighbors(u), key=_order):
            if v in seen:
                continue
            seen.add(v)
            acc.append(v)
            walk(v, seen, acc)
            acc.pop()
            seen.discard(v)

    if graph.has_node(src) and graph.has_node(dst):
        walk(src, {src}, [src])
    return out
