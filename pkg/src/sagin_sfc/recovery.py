"""Redeployment of failure-affected SFCs: a capacitated matching between
SFCs and candidate next-hop nodes, plus the three baseline policies.

SFCs rank candidates by the time to get there and on to the destination;
nodes rank SFCs by ``a * processing + b * stored + c / data``.  Deferred
acceptance with SFCs proposing yields a stable matching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from sagin_sfc.pathing import INF, RouteCache
from sagin_sfc.scenario import PreferenceWeights, seeded_stream


def _order(name: str):
    return ("GUS".index(name[0]), int(name[1:]))


@dataclass
class SfcPreference:
    proposer: int
    ranked: list        # [(node name, L_S seconds)], ascending

    @property
    def nodes(self) -> list:
        return [n for n, _ in self.ranked]

    @property
    def viable(self) -> list:
        """Candidates from which the destination is reachable in time."""
        return [n for n, ls in self.ranked if ls < INF]


@dataclass
class NodeRanking:
    node: str
    ranked: list        # [(sfc id, L_N)], descending

    @property
    def scores(self) -> dict:
        return dict(self.ranked)


@dataclass
class Matching:
    assignment: dict = field(default_factory=dict)     # sfc -> node
    trace: list = field(default_factory=list)          # (action, sfc, node)
    proposals: int = 0

    def matched_at(self, node) -> list:
        return sorted(k for k, n in self.assignment.items() if n == node)


# --------------------------------------------------------------------------
# preferences

def recovery_candidates(state, sfc, graph) -> list:
    """Live next hops of ``sfc`` from its current node.

    Ground stations only qualify as the SFC's own destination once no
    VNF is left to place.
    """
    out = []
    for v in graph.neighbors(sfc.current):
        if v == sfc.current:
            continue
        if v[0] == "G" and not (v == sfc.dest and not state.pending_vnfs(sfc)):
            continue
        out.append(v)
    return sorted(out, key=_order)


def build_sfc_preferences(state, sfc, graph, routes: RouteCache | None = None,
                          budget: float = INF) -> SfcPreference:
    """Candidates ranked by L_S; anything slower than ``budget`` seconds
    (the time left in the run) gets the unreachable sentinel."""
    routes = routes or getattr(state, "routes", None) or RouteCache()
    ranked = []
    for a in recovery_candidates(state, sfc, graph):
        rate = graph.rate(sfc.current, a)
        t_ca = sfc.data_bits / rate if rate > 0 else INF
        t_ad = 0.0 if a == sfc.dest else routes.time(graph, a, sfc.dest, sfc.data_bits)
        ls = t_ca + t_ad
        ranked.append((a, ls if ls <= budget else INF))
    ranked.sort(key=lambda e: (e[1], _order(e[0])))
    return SfcPreference(sfc.k, ranked)


def node_score(weights: PreferenceWeights, processing: bool, stored: bool, others: float) -> float:
    return weights.a * float(processing) + weights.b * float(stored) + others


def build_node_preferences(node, proposers, weights: PreferenceWeights, state,
                           others=None) -> NodeRanking:
    """Rank proposers at ``node``; ``others(sfc)`` gives the c-term (default c/data)."""
    if others is None:
        others = lambda s: weights.c / s.data_bits   # noqa: E731
    ranked = []
    for s in proposers:
        score = node_score(weights, state.is_processing_at(s, node),
                           state.is_stored_at(s, node), others(s))
        ranked.append((s.k, score))
    ranked.sort(key=lambda e: (-e[1], e[0]))
    return NodeRanking(node, ranked)


# --------------------------------------------------------------------------
# matching

def deferred_acceptance(sfc_prefs: dict, node_scores: dict, capacities: dict) -> Matching:
    """SFC-proposing deferred acceptance.

    ``sfc_prefs``: sfc -> list of nodes, best first.  ``node_scores``:
    node -> {sfc: score}, higher preferred; an SFC missing there is not
    acceptable to that node.  ``capacities``: node -> max matches.
    The lowest-id free SFC proposes next; a full node keeps the proposer
    only if it beats the worst current match, which is then released.
    """
    m = Matching()
    nxt = {k: 0 for k in sfc_prefs}
    held = {n: [] for n in capacities}
    free = sorted(sfc_prefs)
    while free:
        k = free[0]
        prefs = sfc_prefs[k]
        if nxt[k] >= len(prefs):
            free.pop(0)                       # list exhausted: stays unmatched
            continue
        n = prefs[nxt[k]]
        nxt[k] += 1
        m.proposals += 1
        m.trace.append(("propose", k, n))
        scores = node_scores.get(n, {})
        if k not in scores or capacities.get(n, 0) <= 0:
            m.trace.append(("reject", k, n))
            continue
        cur = held.setdefault(n, [])
        if len(cur) < capacities[n]:
            cur.append(k)
            m.assignment[k] = n
            free.pop(0)
            m.trace.append(("accept", k, n))
            continue
        worst = min(cur, key=lambda j: (scores[j], -j))
        if scores[k] > scores[worst]:
            cur.remove(worst)
            cur.append(k)
            del m.assignment[worst]
            m.assignment[k] = n
            free.pop(0)
            free.append(worst)
            free.sort()
            m.trace.append(("accept", k, n))
            m.trace.append(("evict", worst, n))
        else:
            m.trace.append(("reject", k, n))
    return m


def is_stable(matching, sfc_prefs: dict, node_scores: dict, capacities: dict):
    """Return ``(True, None)`` or ``(False, (sfc, node))`` for a blocking pair."""
    assignment = matching.assignment if isinstance(matching, Matching) else dict(matching)
    holders: dict = {}
    for k, n in assignment.items():
        holders.setdefault(n, []).append(k)
    for k, prefs in sorted(sfc_prefs.items()):
        mine = assignment.get(k)
        for n in prefs:
            if n == mine:
                break
            scores = node_scores.get(n, {})
            if k not in scores or capacities.get(n, 0) <= 0:
                continue
            cur = holders.get(n, [])
            if len(cur) < capacities[n]:
                return False, (k, n)
            if any(scores[k] > scores[j] for j in cur):
                return False, (k, n)
    return True, None


def match_recover(affected, graph, state, weights: PreferenceWeights, others=None) -> Matching:
    """Match affected SFCs to next-hop nodes for this slot."""
    budget = getattr(state, "time_left", INF)
    prefs = {s.k: build_sfc_preferences(state, s, graph, budget=budget) for s in affected}
    by_id = {s.k: s for s in affected}
    proposers: dict = {}
    # sentinel candidates stay in the ranking but are never proposed to:
    # moving there cannot bring the SFC closer to its destination
    for k, p in prefs.items():
        for n in p.viable:
            proposers.setdefault(n, []).append(by_id[k])
    node_scores = {}
    caps = {}
    for n, ps in sorted(proposers.items(), key=lambda e: _order(e[0])):
        node_scores[n] = build_node_preferences(n, ps, weights, state, others).scores
        caps[n] = len(ps) if (n[0] == "G") else state.node_quota(n)
    return deferred_acceptance({k: p.viable for k, p in prefs.items()}, node_scores, caps)


# --------------------------------------------------------------------------
# policies

class Policy:
    """FRMG: ascending-data admission and matching-game recovery."""

    name = "FRMG"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def begin_slot(self, slot: int, sfcs) -> None:
        pass

    def order_key(self, sfc) -> tuple:
        return (sfc.data_bits, sfc.k)

    def others(self, state, weights):
        return lambda s: weights.c / s.data_bits

    def recover(self, state, affected, graph, slot) -> Matching:
        return match_recover(affected, graph, state, state.weights,
                             self.others(state, state.weights))


class FltsPolicy(Policy):
    """Largest data first, both at nodes and in the recovery ranking."""

    name = "FLTS"

    def order_key(self, sfc) -> tuple:
        return (-sfc.data_bits, sfc.k)

    def others(self, state, weights):
        top = max(s.data_bits for s in state.sfcs)
        return lambda s: weights.c * s.data_bits / top


class RsspPolicy(Policy):
    """Nodes serve and rank SFCs in a random order, redrawn every slot."""

    name = "RSSP"

    def __init__(self, seed: int = 0):
        super().__init__(seed)
        self.rng = seeded_stream(seed, "policy-rssp")
        self.rank: dict = {}

    def begin_slot(self, slot, sfcs):
        ids = sorted(s.k for s in sfcs)
        perm = self.rng.permutation(len(ids))
        self.rank = {k: int(p) for k, p in zip(ids, perm)}

    def order_key(self, sfc):
        return (self.rank.get(sfc.k, 0), sfc.k)

    def others(self, state, weights):
        draws = {}

        def f(s):
            if s.k not in draws:
                draws[s.k] = weights.c * float(self.rng.uniform(0.0, 1.0))
            return draws[s.k]
        return f


class RsntPolicy(Policy):
    """Affected SFCs jump to a uniformly random live neighbour."""

    name = "RSNT"

    def __init__(self, seed: int = 0):
        super().__init__(seed)
        self.rng = seeded_stream(seed, "policy-rsnt")

    def recover(self, state, affected, graph, slot) -> Matching:
        m = Matching()
        for s in sorted(affected, key=lambda x: x.k):
            cands = recovery_candidates(state, s, graph)
            if not cands:
                continue
            n = cands[int(self.rng.integers(len(cands)))]
            m.assignment[s.k] = n
            m.trace.append(("random", s.k, n))
        return m


POLICY_CLASSES = {"FRMG": Policy, "FLTS": FltsPolicy, "RSSP": RsspPolicy, "RSNT": RsntPolicy}


def make_policy(name: str, seed: int = 0) -> Policy:
    try:
        return POLICY_CLASSES[name](seed)
    except KeyError:
        raise ValueError(f"unknown policy {name!r}") from None


def quota(capacity: float, in_service: float, stored_next: float) -> int:
    return max(0, int(math.floor(capacity - in_service - stored_next + 1e-9)))
