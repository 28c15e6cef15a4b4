"""Independent replay of an event log against the deployment constraints.

Nothing here reads simulator state: the log, the scenario and the network
(for link existence and rates) are the only inputs.  Each violation is a
short human-readable string; an empty list means the run is valid.
"""

from __future__ import annotations

from collections import defaultdict

REL = 1e-9

ID, SLOT, TIME, UNTIL, KIND, SFC, VNF, NODE, PEER, AMOUNT, WORK, RATE, INFO = range(13)


def _close(a, b, scale=1.0):
    return abs(a - b) <= REL * max(abs(a), abs(b), scale)


def _failed_by_slot(events, slot_count):
    failed = [frozenset()] * slot_count
    updates = {}
    depleted_from = {}
    for r in events:
        if r[KIND] == "FAIL":
            updates[r[SLOT]] = frozenset(r[INFO].split()) if r[INFO] else frozenset()
        elif r[KIND] == "DEPLETE":
            depleted_from.setdefault(r[NODE], r[SLOT])
    cur = frozenset()
    for t in range(slot_count):
        if t in updates:
            cur = updates[t]
        extra = {n for n, s in depleted_from.items() if s <= t}
        failed[t] = cur | extra
    return failed


def audit_events(events, scenario, network) -> list:
    p = scenario.params
    tau = scenario.time.slot_length_s
    T = scenario.time.slot_count
    C, A, EM = p.compute_capacity_units, p.storage_capacity_bits, p.energy_capacity_j
    phi = p.compute_ability_units_per_s
    out: list = []
    failed = _failed_by_slot(events, T)
    last_slot = max((r[SLOT] for r in events), default=0)

    # link budget per slot, serial use, rates from the network itself
    link_use = defaultdict(list)
    for r in events:
        if r[KIND] != "TX_SLICE":
            continue
        t = r[SLOT]
        src, dst = r[NODE], r[PEER]
        if src in failed[t] or dst in failed[t]:
            out.append(f"slot {t}: transmission touches failed node {src}->{dst}")
            continue
        graph = network.slot_graph(t, failed[t])
        rate = graph.rate(src, dst)
        if rate <= 0:
            out.append(f"slot {t}: sfc {r[SFC]} used missing link {src}->{dst}")
            continue
        if not _close(rate, r[RATE]):
            out.append(f"slot {t}: rate mismatch on {src}->{dst}: {r[RATE]} vs {rate}")
        if r[TIME] < t * tau - 1e-6 or r[UNTIL] > (t + 1) * tau + 1e-6:
            out.append(f"slot {t}: transmission slice outside its slot")
        if not _close(r[AMOUNT], rate * (r[UNTIL] - r[TIME]), 1.0):
            out.append(f"slot {t}: slice bits {r[AMOUNT]} != rate * duration")
        link_use[(t, src, dst)].append((r[TIME], r[UNTIL], r[AMOUNT], rate))
    for (t, src, dst), slices in link_use.items():
        bits = sum(s[2] for s in slices)
        cap = slices[0][3] * tau
        if bits > cap * (1 + REL) + 1e-6:
            out.append(f"link slot {t} {src}->{dst}: {bits} bits > R*tau = {cap}")
        slices.sort()
        for a, b in zip(slices, slices[1:]):
            if b[0] < a[1] - 1e-6:
                out.append(f"link slot {t} {src}->{dst}: overlapping transfers")

    # compute occupancy per node and slot
    occ = defaultdict(dict)
    for r in events:
        if r[KIND] != "PROC_SLICE":
            continue
        t, node = r[SLOT], r[NODE]
        if node in failed[t]:
            out.append(f"slot {t}: processing on failed node {node}")
        if not _close(r[WORK], phi * (r[UNTIL] - r[TIME]), 1.0):
            out.append(f"slot {t}: processed work inconsistent with compute ability")
        occ[(t, node)][(r[SFC], r[VNF])] = r[AMOUNT]
    for (t, node), used in occ.items():
        total = sum(used.values())
        if total > C * (1 + REL):
            out.append(f"compute slot {t} node {node}: demand {total} > C = {C}")

    # compute + operation energy
    e_compute = defaultdict(float)
    for r in events:
        if r[KIND] == "PROCESS_START":
            e_compute[r[NODE]] += r[AMOUNT] * p.compute_energy_j_per_unit
            if r[NODE] in failed[r[SLOT]]:
                out.append(f"slot {r[SLOT]}: processing started on failed node {r[NODE]}")
    for node in network.node_names:
        if node[0] == "G":
            continue
        op_w = p.uav_operation_power_w if node[0] == "U" else p.satellite_operation_power_w
        live = sum(1 for t in range(last_slot + 1) if node not in failed[t])
        if e_compute[node] + op_w * tau * live > EM * (1 + REL):
            out.append(f"energy node {node}: energy over capacity")

    # per-SFC replay: placement, order, flow and work
    gs = network.ground
    timelines = {}
    for k, spec in enumerate(scenario.sfcs):
        rows = [r for r in events if r[SFC] == k]
        out += _replay_sfc(k, spec, gs[spec.origin], gs[spec.destination], rows, timelines)

    # resident data at every slot boundary
    for t in range(last_slot + 1):
        b = (t + 1) * tau
        load = defaultdict(float)
        for k, tl in timelines.items():
            loc = None
            for when, where in tl:
                if when <= b + 1e-9:
                    loc = where
                else:
                    break
            if loc is not None and loc[0] != "G":
                load[loc] += scenario.sfcs[k].data_bits
        for node, bits in load.items():
            if bits > A * (1 + REL):
                out.append(f"storage boundary {t + 1} node {node}: {bits} bits > A = {A}")
    return out


def _replay_sfc(k, spec, origin, dest, rows, timelines) -> list:
    out = []
    loc = origin
    visited = [origin]
    tl = [(0.0, origin)]
    tx = None            # (src, dst, bits, slice ids)
    proc = None          # (vnf, node, work, slice ids)
    ends = defaultdict(int)
    end_time = {}
    expected = 0
    arrived = 0
    lost: set = set()
    for r in rows:
        kind = r[KIND]
        if kind == "TX_START":
            if tx is not None or proc is not None:
                out.append(f"sfc {k}: transmission started while busy")
            if r[NODE] != loc:
                out.append(f"flow sfc {k}: transmission from {r[NODE]} but data at {loc}")
            if r[NODE][0] == "G" and r[NODE] != origin:
                out.append(f"flow sfc {k}: ground station {r[NODE]} used as relay")
            tx = [r[NODE], r[PEER], 0.0, []]
        elif kind == "TX_SLICE":
            if tx is None or (tx[0], tx[1]) != (r[NODE], r[PEER]):
                out.append(f"sfc {k}: stray transmission slice")
                continue
            tx[2] += r[AMOUNT]
            tx[3].append(r[ID])
        elif kind in ("TX_END", "TX_ABORT"):
            if tx is None or (tx[0], tx[1]) != (r[NODE], r[PEER]):
                out.append(f"sfc {k}: {kind} without matching start")
                continue
            if kind == "TX_END":
                if not _close(tx[2], spec.data_bits, 1.0):
                    out.append(f"sfc {k}: hop {tx[0]}->{tx[1]} moved {tx[2]} of {spec.data_bits} bits")
                loc = tx[1]
                visited.append(loc)
                tl.append((r[TIME], loc))
            tx = None
        elif kind == "PROCESS_START":
            if proc is not None or tx is not None:
                out.append(f"sfc {k}: processing started while busy")
            if r[NODE] != loc:
                out.append(f"sfc {k}: vnf {r[VNF]} processed at {r[NODE]} but data at {loc}")
            if r[VNF] != expected:
                out.append(f"order sfc {k}: vnf {r[VNF]} started before vnf {expected} finished")
            if r[VNF] > 0 and r[TIME] < end_time.get(r[VNF] - 1, float("inf")) - 1e-9:
                out.append(f"order sfc {k}: vnf {r[VNF]} starts before its predecessor ends")
            if r[NODE][0] == "G":
                out.append(f"sfc {k}: vnf placed on ground station")
            proc = [r[VNF], r[NODE], 0.0, []]
        elif kind == "PROC_SLICE":
            if proc is None or proc[0] != r[VNF] or proc[1] != r[NODE]:
                out.append(f"sfc {k}: stray processing slice")
                continue
            proc[2] += r[WORK]
            proc[3].append(r[ID])
        elif kind == "PROCESS_END":
            if proc is None or proc[0] != r[VNF]:
                out.append(f"sfc {k}: PROCESS_END without start")
                continue
            sigma = spec.sigma[r[VNF]]
            if not _close(proc[2], sigma, 1.0):
                out.append(f"sfc {k}: vnf {r[VNF]} processed {proc[2]} of {sigma}")
            ends[r[VNF]] += 1
            if ends[r[VNF]] > 1:
                out.append(f"once sfc {k}: vnf {r[VNF]} completed twice")
            end_time[r[VNF]] = r[TIME]
            expected = r[VNF] + 1
            proc = None
        elif kind == "ROLLBACK":
            _, _, ids = (r[INFO] or "").partition(":")
            lost = {int(i) for i in ids.split(";")} if ids else set()
            if tx is not None and set(tx[3]) <= lost:
                tx = None
            if proc is not None and set(proc[3]) <= lost:
                proc = None
            if r[NODE] not in visited:
                out.append(f"sfc {k}: rolled back to unvisited node {r[NODE]}")
            else:
                visited = visited[:len(visited) - visited[::-1].index(r[NODE])]
            if r[NODE] != loc:
                loc = r[NODE]
                tl.append((r[TIME], loc))
            if tx is not None and tx[0] != loc:
                out.append(f"sfc {k}: transfer survives rollback away from its source")
        elif kind == "ARRIVE":
            arrived += 1
            if loc != dest or r[NODE] != dest:
                out.append(f"flow sfc {k}: arrival at {r[NODE]} but destination is {dest}")
            if expected != len(spec.sigma):
                out.append(f"complete sfc {k}: arrived with {expected} of {len(spec.sigma)} VNFs")
            tl.append((r[TIME], "done"))
    if arrived > 1:
        out.append(f"flow sfc {k}: {arrived} destination arrivals")
    if arrived == 1:
        for m in range(len(spec.sigma)):
            if ends[m] != 1:
                out.append(f"once sfc {k}: vnf {m} completed {ends[m]} times")
    timelines[k] = [(t, ("G" if w == "done" else w)) for t, w in tl]
    return out
