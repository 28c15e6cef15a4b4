import itertools
import random
from types import SimpleNamespace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import line_instance
from sagin_sfc.channel import U2G, U2U
from sagin_sfc.engine import admit_at_node, run_simulation
from sagin_sfc.oracle import TableNetwork
from sagin_sfc.pathing import INF, time_to_destination
from sagin_sfc.recovery import (FltsPolicy, Matching, Policy, RsntPolicy, RsspPolicy,
                                build_node_preferences, build_sfc_preferences,
                                deferred_acceptance, is_stable, make_policy, match_recover,
                                quota)
from sagin_sfc.scenario import PreferenceWeights
from sagin_sfc.topology import Link, NodeId, SlotGraph

W = PreferenceWeights()


class FakeState:
    def __init__(self, processing=(), stored=(), pending=True):
        self.processing = set(processing)       # (k, node)
        self.stored = set(stored)
        self.pending = pending

    def is_processing_at(self, s, node):
        return (s.k, node) in self.processing

    def is_stored_at(self, s, node):
        return (s.k, node) in self.stored

    def pending_vnfs(self, s):
        return [0] if self.pending else []


def sfc(k, data, current="U0", dest="G1"):
    return SimpleNamespace(k=k, data_bits=data, current=current, dest=dest)


def graph(edges):
    names = sorted({a for a, _, _ in edges} | {b for _, b, _ in edges})
    kinds = {("U", "U"): U2U, ("U", "G"): U2G}
    links = [Link(kinds[(a[0], b[0])], NodeId.of(a, 0), NodeId.of(b, 0), r) for a, b, r in edges]
    return SlotGraph(0, {n: (0.0, 0.0, 0.0) for n in names}, links)


# ------------------------------------------------------------ preferences

def test_single_candidate():
    g = graph([("U0", "U1", 1e8), ("U1", "G1", 1e8)])
    p = build_sfc_preferences(FakeState(), sfc(0, 4e8), g)
    assert p.nodes == ["U1"] and p.ranked[0][1] == pytest.approx(8.0)


def test_direct_candidate_beats_detour():
    g = graph([("U0", "U1", 1e8), ("U1", "G1", 1e9),
               ("U0", "U2", 1e8), ("U2", "U3", 1e8), ("U3", "G1", 1e8)])
    p = build_sfc_preferences(FakeState(), sfc(0, 1e8), g)
    assert p.nodes == ["U1", "U2"]
    assert p.ranked[0][1] == pytest.approx(1.1) and p.ranked[1][1] == pytest.approx(3.0)


def test_destination_only_once_vnfs_done():
    g = graph([("U0", "G1", 1e8), ("U0", "U1", 1e6), ("U1", "G1", 1e6)])
    assert build_sfc_preferences(FakeState(pending=True), sfc(0, 1e8), g).nodes == ["U1"]
    done = build_sfc_preferences(FakeState(pending=False), sfc(0, 1e8), g)
    assert done.nodes == ["G1", "U1"] and done.ranked[0][1] == pytest.approx(1.0)


def test_unreachable_sorted_last_and_not_viable():
    g = graph([("U0", "U1", 1e6), ("U0", "U2", 1e8), ("U1", "G1", 1e6)])
    p = build_sfc_preferences(FakeState(), sfc(0, 1e8), g)
    assert p.nodes == ["U1", "U2"] and p.ranked[-1][1] == INF
    assert p.viable == ["U1"]
    assert build_sfc_preferences(FakeState(), sfc(0, 1e8), g, budget=100.0).viable == []


def test_preferences_match_recomputed_times():
    rng = random.Random(3)
    for trial in range(50):
        names = [f"U{i}" for i in range(6)]
        edges = [(a, b, rng.uniform(1e6, 1e8)) for a, b in itertools.permutations(names, 2)
                 if rng.random() < 0.4]
        edges += [(u, "G1", rng.uniform(1e6, 1e8)) for u in names[1:] if rng.random() < 0.5]
        g = graph(edges + [("U0", "U5", 1e7)])
        s = sfc(0, rng.uniform(2e8, 8e8))
        p = build_sfc_preferences(FakeState(), s, g)
        want = []
        for a in g.neighbors("U0"):
            if a[0] == "G":
                continue
            ls = s.data_bits / g.rate("U0", a) + time_to_destination(g, a, "G1", s.data_bits)
            want.append((a, ls))
        want.sort(key=lambda e: (e[1], int(e[0][1:])))
        assert p.nodes == [a for a, _ in want]
        for (a, x), (b, y) in zip(p.ranked, want):
            assert x == pytest.approx(y, rel=1e-12) or x == y == INF
        assert all(g.link("U0", n) is not None for n in p.nodes)


def test_node_scores_and_class_order():
    s0, s1, s2 = sfc(0, 8e8), sfc(1, 5e8), sfc(2, 2e8)
    st_ = FakeState(processing={(0, "U1")}, stored={(1, "U1")})
    r = build_node_preferences("U1", [s2, s1, s0], W, st_)
    assert [k for k, _ in r.ranked] == [0, 1, 2]
    assert r.scores[0] == pytest.approx(100 + 1 / 8e8)
    assert r.scores[1] == pytest.approx(10 + 1 / 5e8)
    assert r.scores[2] == pytest.approx(5e-9)


def test_smaller_data_ranks_first_among_new():
    r = build_node_preferences("U1", [sfc(0, 800e6), sfc(1, 200e6)], W, FakeState())
    assert [k for k, _ in r.ranked] == [1, 0]


def test_ranking_invariant_to_weight_rescaling():
    rng = random.Random(9)
    for _ in range(100):
        sfcs = [sfc(k, rng.uniform(2e8, 8e8)) for k in range(6)]
        state = FakeState(processing={(k, "U1") for k in range(6) if rng.random() < 0.3},
                          stored={(k, "U1") for k in range(6) if rng.random() < 0.3})
        base = build_node_preferences("U1", sfcs, W, state)
        a = rng.uniform(50, 1000)
        b = rng.uniform(2, a / 2)
        other = PreferenceWeights(a, b, rng.uniform(0.1, 1.0))
        again = build_node_preferences("U1", sfcs, other, state)
        assert [k for k, _ in base.ranked] == [k for k, _ in again.ranked]


# ------------------------------------------------------------ matching

def gale_shapley_rounds(prefs, scores, caps):
    """Round-based reference: all free SFCs propose at once, nodes keep their best."""
    nxt = {k: 0 for k in prefs}
    held = {n: [] for n in caps}
    free = set(prefs)
    while True:
        proposals = {}
        for k in sorted(free):
            while nxt[k] < len(prefs[k]):
                n = prefs[k][nxt[k]]
                nxt[k] += 1
                if k in scores.get(n, {}) and caps.get(n, 0) > 0:
                    proposals.setdefault(n, []).append(k)
                    break
        if not proposals:
            break
        for n, ks in proposals.items():
            pool = sorted(held[n] + ks, key=lambda j: (-scores[n][j], j))
            held[n] = pool[:caps[n]]
            for j in pool[caps[n]:]:
                free.add(j)
            for j in held[n]:
                free.discard(j)
        free = {k for k in free if nxt[k] < len(prefs[k])}
    return {k: n for n, ks in held.items() for k in ks}


def random_market(rng, max_sfcs=6, max_nodes=5, max_cap=2):
    n_s = rng.randint(1, max_sfcs)
    nodes = [f"U{i}" for i in range(rng.randint(1, max_nodes))]
    prefs = {k: rng.sample(nodes, rng.randint(0, len(nodes))) for k in range(n_s)}
    scores = {}
    for n in nodes:
        pool = [k for k in range(n_s) if rng.random() < 0.85]
        vals = rng.sample(range(1000), len(pool))
        scores[n] = {k: float(v) for k, v in zip(pool, vals)}
    caps = {n: rng.randint(0, max_cap) for n in nodes}
    return prefs, scores, caps


def test_one_sfc_one_node():
    m = deferred_acceptance({0: ["U0"]}, {"U0": {0: 1.0}}, {"U0": 1})
    assert m.assignment == {0: "U0"} and m.proposals == 1


def test_small_data_wins_contested_node():
    s = [sfc(0, 800e6), sfc(1, 200e6)]
    scores = build_node_preferences("U0", s, W, FakeState()).scores
    prefs = {0: ["U0", "U1"], 1: ["U0", "U1"]}
    nscore = {"U0": scores, "U1": {0: 1.0, 1: 2.0}}
    m = deferred_acceptance(prefs, nscore, {"U0": 1, "U1": 1})
    assert m.assignment == {1: "U0", 0: "U1"}
    # brute force: the other split is blocked by (1, U0)
    assert not is_stable({0: "U0", 1: "U1"}, prefs, nscore, {"U0": 1, "U1": 1})[0]
    m1 = deferred_acceptance(prefs, nscore, {"U0": 1, "U1": 0})
    assert m1.assignment == {1: "U0"}
    # SFC 0 proposes first and is then displaced by the smaller SFC 1
    assert m.trace[:5] == [("propose", 0, "U0"), ("accept", 0, "U0"), ("propose", 1, "U0"),
                           ("accept", 1, "U0"), ("evict", 0, "U0")]


def test_thousand_random_markets():
    rng = random.Random(20240611)
    for _ in range(1000):
        prefs, scores, caps = random_market(rng)
        m = deferred_acceptance(prefs, scores, caps)
        ok, witness = is_stable(m, prefs, scores, caps)
        assert ok, witness
        assert m.proposals <= len(prefs) * len(caps)
        for n in caps:
            assert len(m.matched_at(n)) <= caps[n]
        for k, n in m.assignment.items():
            assert n in prefs[k] and k in scores[n]
        assert m.assignment == gale_shapley_rounds(prefs, scores, caps)


def stable_matchings(prefs, scores, caps):
    nodes = list(caps)
    out = []
    for combo in itertools.product([None] + nodes, repeat=len(prefs)):
        a = {k: n for k, n in zip(sorted(prefs), combo) if n is not None}
        if any(n not in prefs[k] or k not in scores[n] for k, n in a.items()):
            continue
        if any(sum(1 for x in a.values() if x == n) > caps[n] for n in nodes):
            continue
        if is_stable(a, prefs, scores, caps)[0]:
            out.append(a)
    return out


def test_sfc_optimal_among_all_stable_matchings():
    rng = random.Random(77)
    for _ in range(150):
        prefs, scores, caps = random_market(rng, max_sfcs=4, max_nodes=3)
        m = deferred_acceptance(prefs, scores, caps).assignment
        every = stable_matchings(prefs, scores, caps)
        assert m in every
        for other in every:
            assert len(other) == len(m)          # same matched set size
            for k, n in m.items():
                mine = prefs[k].index(n)
                theirs = prefs[k].index(other[k]) if k in other else len(prefs[k])
                assert mine <= theirs


def test_is_stable_examples():
    assert is_stable(Matching(), {}, {}, {}) == (True, None)
    prefs = {0: ["U0", "U1"], 1: ["U0"]}
    scores = {"U0": {0: 5.0, 1: 1.0}, "U1": {0: 1.0}}
    planted = {1: "U0", 0: "U1"}
    assert is_stable(planted, prefs, scores, {"U0": 1, "U1": 1}) == (False, (0, "U0"))
    assert is_stable({0: "U1"}, prefs, scores, {"U0": 1, "U1": 1}) == (False, (0, "U0"))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matching_properties_hypothesis(seed):
    prefs, scores, caps = random_market(random.Random(seed))
    m = deferred_acceptance(prefs, scores, caps)
    assert is_stable(m, prefs, scores, caps)[0]
    assert m.proposals <= len(prefs) * len(caps)


def test_quota():
    assert quota(3.0, 1.5, 0.0) == 1
    assert quota(3.0, 0.0, 0.0) == 3
    assert quota(3.0, 4.0, 0.0) == 0


# ------------------------------------------------------------ engine glue / policies

def test_match_recover_on_live_simulation():
    from helpers import stepper
    from test_failure import advance
    from sagin_sfc.failure import apply_failures
    sim = stepper(line_instance(tau=8.0, slots=4))
    advance(sim, 1)
    apply_failures(sim, frozenset({"U1"}), 1)
    g = sim.net.slot_graph(1, frozenset({"U1"}))
    m = match_recover([sim.sfcs[0]], g, sim, W)
    assert m.assignment == {}            # U0 cannot reach G1 without U1
    g_ok = sim.net.slot_graph(1)
    sim.sfcs[0].current = "U0"
    m = match_recover([sim.sfcs[0]], g_ok, sim, W)
    assert m.assignment == {0: "U1"}


def test_flts_admits_largest_first():
    a = [SimpleNamespace(k=0, data_bits=200e6, sigma_next=1.0),
         SimpleNamespace(k=1, data_bits=800e6, sigma_next=1.0)]
    adm, dfr = admit_at_node(1.0, a, key=FltsPolicy().order_key)
    assert [x.k for x in adm] == [1] and [x.k for x in dfr] == [0]
    adm, dfr = admit_at_node(1.0, a, key=Policy().order_key)
    assert [x.k for x in adm] == [0]


def test_flts_other_term_prefers_large():
    state = SimpleNamespace(sfcs=[sfc(0, 2e8), sfc(1, 8e8)])
    f = FltsPolicy().others(state, W)
    assert f(sfc(1, 8e8)) > f(sfc(0, 2e8))


@pytest.mark.parametrize("cls", [RsspPolicy, RsntPolicy])
def test_random_policies_reproducible(cls):
    from sagin_sfc.scenario import default_scenario
    sc = default_scenario(12, slot_count=40, policy=cls.name)
    a = run_simulation(sc)
    b = run_simulation(sc)
    assert a.events_csv() == b.events_csv() and a.valid
    c = run_simulation(default_scenario(13, slot_count=40, policy=cls.name), audit=False)
    assert c.events_csv() != a.events_csv()


def test_rssp_redraws_each_slot():
    p = RsspPolicy(5)
    sfcs = [sfc(k, 1e8) for k in range(8)]
    p.begin_slot(0, sfcs)
    first = dict(p.rank)
    p.begin_slot(1, sfcs)
    assert sorted(first.values()) == list(range(8)) and p.rank != first


def test_rsnt_picks_live_neighbour():
    g = graph([("U0", "U1", 1e8), ("U0", "U2", 1e8), ("U1", "G1", 1e8)])
    p = RsntPolicy(3)
    seen = set()
    for _ in range(40):
        m = p.recover(FakeState(), [sfc(0, 1e8)], g, 0)
        seen.add(m.assignment[0])
    assert seen == {"U1", "U2"}


def test_policies_agree_without_contention_or_failures():
    inst = line_instance(data_bits=4e8, sigma=(1.0, 2.0), rate=1e8, slots=4)
    totals = set()
    for name in ("FRMG", "FLTS", "RSSP", "RSNT"):
        r = run_simulation(inst.to_scenario(name), TableNetwork(inst), name)
        assert r.valid and r.metrics["completed"] == 1
        totals.add(r.total_time)
    assert totals == {15.0}


def test_make_policy():
    assert make_policy("FLTS").name == "FLTS"
    with pytest.raises(ValueError):
        make_policy("XYZ")
