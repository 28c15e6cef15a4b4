import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sagin_sfc import energy as en
from sagin_sfc.scenario import ParameterSet

P = ParameterSet()


def test_hover_power_default_airframe():
    want = math.sqrt(19.6 ** 3 / (2 * math.pi * 1.225 * 0.04 * 4))
    assert en.hover_power(P) == pytest.approx(want, rel=1e-12)
    assert en.hover_power(P) == pytest.approx(78.2, abs=0.05)


def test_hover_power_scalings():
    base = en.hover_power(P)
    assert en.hover_power(ParameterSet(uav_mass_kg=8.0)) / base == pytest.approx(math.sqrt(64))
    assert en.hover_power(ParameterSet(propeller_count=16.0)) / base == pytest.approx(0.5)


def test_move_power_endpoints():
    assert en.move_power(P, 0.0) == 0.0
    assert en.move_power(P, P.uav_max_speed_mps) == pytest.approx(P.uav_max_power_w - en.hover_power(P))
    with pytest.raises(en.EnergyError):
        en.move_power(P, 13.0)


def test_uav_slot_energy_examples():
    e = en.uav_slot_energy((0, 0, 100), (0, 0, 100), P, [], 5.0)
    assert e == {"path": pytest.approx(en.hover_power(P) * 5.0), "communication": 0.0}
    one = [{"kind": "U2U", "bits": 4e8, "rate": 1e8, "power": 10.0}]
    assert en.uav_slot_energy((0, 0, 100), (0, 0, 100), P, one, 5.0)["communication"] == pytest.approx(40.0)
    two = [{"kind": "U2U", "bits": 8e8, "rate": 1e8, "power": 10.0}]
    assert en.uav_slot_energy((0, 0, 100), (0, 0, 100), P, two, 5.0)["communication"] == pytest.approx(80.0)


def test_uav_path_energy_when_moving():
    e = en.uav_slot_energy((0, 0, 100), (60, 0, 100), P, [], 5.0)
    want = en.move_power(P, 12.0) * 60 / 12.0 + en.hover_power(P) * 5.0
    assert e["path"] == pytest.approx(want, rel=1e-12)
    assert e["path"] > 0


def test_satellite_slot_energy_examples():
    idle = en.satellite_slot_energy(P, [], [], 5.0)
    assert idle == {"reception": 0.0, "transmission": 0.0,
                    "operation": P.satellite_operation_power_w * 5.0}
    one = en.satellite_slot_energy(P, [], [{"kind": "S2G", "bits": 8e8, "rate": 2e8}], 5.0)
    assert one["transmission"] == pytest.approx(80.0)
    both = [{"kind": "S2G", "bits": 1.6e9, "rate": 2e8}]
    split = [{"kind": "S2G", "bits": 8e8, "rate": 2e8}, {"kind": "S2G", "bits": 8e8, "rate": 2e8}]
    assert (en.satellite_slot_energy(P, [], both, 5.0)["transmission"]
            == pytest.approx(en.satellite_slot_energy(P, [], split, 5.0)["transmission"]))


def test_zero_rate_assignment_rejected():
    with pytest.raises(en.EnergyError):
        en.satellite_slot_energy(P, [{"kind": "U2S", "bits": 1.0, "rate": 0.0}], [], 5.0)


def test_charge_compute_boundary():
    led = en.EnergyLedger({"U0": 1e5})
    assert en.charge_compute(led, "U0", 1.0, 50.0)
    led = en.EnergyLedger({"U0": 100.0})
    led.add("U0", "operation", 50.0)
    assert en.charge_compute(led, "U0", 1.0, 50.0)          # lands exactly on E^M
    before = led.snapshot()
    debits = list(led.debits)
    assert not en.charge_compute(led, "U0", 0.01, 50.0)
    assert led.snapshot() == before and led.debits == debits


def test_ledger_rejects_unknown_or_negative():
    led = en.EnergyLedger({"U0": 1.0})
    with pytest.raises(en.EnergyError):
        led.add("U0", "fuel", 1.0)
    with pytest.raises(en.EnergyError):
        led.add("U0", "path", -1.0)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["compute", "operation", "path"]),
                          st.floats(min_value=0, max_value=5e3)), max_size=40),
       st.floats(min_value=1e3, max_value=2e4))
def test_random_sequences_respect_cap_and_conserve(ops, budget):
    led = en.EnergyLedger({"U0": budget})
    accepted = []
    for cat, amount in ops:
        if cat == "compute":
            if en.charge_compute(led, "U0", amount / 50.0, 50.0):
                accepted.append(amount)
        elif cat == "operation":
            if led.enforced_total("U0") + amount <= budget:
                led.add("U0", "operation", amount)
        else:
            led.add("U0", "path", amount)
        assert led.enforced_total("U0") <= budget * (1 + 1e-12)
    assert sum(j for _, _, j in led.debits) == pytest.approx(led.total("U0"))
    assert led.totals["U0"]["compute"] == pytest.approx(sum(a for a in accepted if a > 0))
