"""UAV and satellite energy accounting, and the per-node energy cap."""

from __future__ import annotations

import math
from collections import defaultdict

from sagin_sfc.scenario import ParameterSet

CATEGORIES = ("path", "communication", "reception", "transmission", "operation", "compute")


class EnergyError(ValueError):
    pass


def hover_power(params: ParameterSet) -> float:
    gm = params.gravity * params.uav_mass_kg
    return math.sqrt(gm ** 3 / (2.0 * math.pi * params.air_density
                                * params.propeller_radius_m ** 2 * params.propeller_count))


def move_power(params: ParameterSet, speed: float) -> float:
    """Extra propulsion power while moving at ``speed``.

    Negative whenever the hover power exceeds ``P_max`` (it does with the
    default airframe); path energy stays positive for displacements within
    one slot of flight.
    """
    if speed < 0 or speed > params.uav_max_speed_mps * (1 + 1e-12):
        raise EnergyError(f"speed {speed} outside [0, {params.uav_max_speed_mps}]")
    return speed / params.uav_max_speed_mps * (params.uav_max_power_w - hover_power(params))


def _comm_sum(assignments, power_for) -> float:
    total = 0.0
    for a in assignments:
        rate = a["rate"]
        if not rate > 0:
            raise EnergyError(f"zero-rate link on assignment {a!r}")
        total += power_for(a) * a["bits"] / rate
    return total


def uav_slot_energy(prev_pos, next_pos, params: ParameterSet, comm_assignments,
                    tau: float) -> dict:
    """Path and communication energy of one UAV over one slot.

    ``comm_assignments`` are mappings with ``kind``, ``bits`` and ``rate``
    for every outgoing transfer of this UAV in the slot; ``power`` may
    override the transmit power implied by ``kind``.
    """
    ph = hover_power(params)
    s = params.uav_speed_mps
    dist = math.dist(prev_pos, next_pos)
    path = ph * tau
    if dist > 0:
        path += move_power(params, s) * dist / s
    kind_power = {"U2U": params.p_uu_w, "U2G": params.p_tr_uav_w, "U2S": params.p_us_w}
    comm = _comm_sum(comm_assignments, lambda a: a.get("power", kind_power.get(a["kind"])))
    return {"path": path, "communication": comm}


def satellite_slot_energy(params: ParameterSet, rx_assignments, tx_assignments,
                          tau: float) -> dict:
    rx_power = {"U2S": params.p_re_us_w, "S2S": params.p_re_ss_w}
    tx_power = {"S2S": params.p_ss_w, "S2G": params.p_sg_w}
    return {
        "reception": _comm_sum(rx_assignments, lambda a: rx_power[a["kind"]]),
        "transmission": _comm_sum(tx_assignments, lambda a: tx_power[a["kind"]]),
        "operation": params.satellite_operation_power_w * tau,
    }


class EnergyLedger:
    """Cumulative joules per node and category.

    Only ``compute`` and ``operation`` count against the node budget; the
    other categories are reported but not enforced.
    """

    def __init__(self, budgets: dict):
        self.budgets = dict(budgets)
        self.totals = defaultdict(lambda: dict.fromkeys(CATEGORIES, 0.0))
        self.debits: list[tuple[str, str, float]] = []

    def add(self, node: str, category: str, joules: float) -> None:
        if category not in CATEGORIES:
            raise EnergyError(f"unknown category {category!r}")
        if joules < 0:
            raise EnergyError("negative energy debit")
        if joules == 0:
            return
        self.totals[node][category] += joules
        self.debits.append((node, category, joules))

    def enforced_total(self, node: str) -> float:
        t = self.totals.get(node)
        if t is None:
            return 0.0
        return t["compute"] + t["operation"]

    def total(self, node: str) -> float:
        t = self.totals.get(node)
        return sum(t.values()) if t else 0.0

    def snapshot(self) -> dict:
        return {n: dict(c) for n, c in sorted(self.totals.items())}

    def to_rows(self):
        for node, cats in sorted(self.totals.items()):
            for cat in CATEGORIES:
                yield node, cat, cats[cat]


def charge_compute(ledger: EnergyLedger, node: str, sigma_units: float,
                   e_per_unit: float) -> bool:
    """Debit ``sigma * e_c`` if the node stays within its energy capacity."""
    if sigma_units < 0:
        raise EnergyError("sigma must be >= 0")
    cost = sigma_units * e_per_unit
    t = ledger.totals.get(node)
    compute = t["compute"] if t else 0.0
    operation = t["operation"] if t else 0.0
    if compute + cost + operation <= ledger.budgets[node]:
        ledger.add(node, "compute", cost)
        return True
    return False
