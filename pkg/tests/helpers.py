"""Small builders shared by engine-level tests."""

from sagin_sfc.engine import Simulation
from sagin_sfc.oracle import TableNetwork, TinyInstance
from sagin_sfc.scenario import SfcSpec


def line_instance(data_bits=1e9, sigma=(1.0,), rate=1e8, slots=4, tau=5.0, failures=(),
                  sfcs=None, capacity=3.0, storage=1.6e9, phi=1.0):
    """G0 -> U0 -> U1 -> G1 with the same rate on every hop and slot."""
    table = (("G0", "U0", rate), ("U0", "U1", rate), ("U1", "G1", rate))
    sfcs = sfcs or (SfcSpec(data_bits, 0, 1, tuple(sigma)),)
    return TinyInstance(nodes=("G0", "G1", "U0", "U1"), slot_count=slots, slot_length_s=tau,
                        rates=(table,) * slots, sfcs=tuple(sfcs), compute_capacity=capacity,
                        storage_capacity_bits=storage, compute_ability=phi, failures=failures)


def stepper(instance, policy="FRMG"):
    """A simulation with routes initialised, ready for ``sim._slot(t)`` calls."""
    sim = Simulation(instance.to_scenario(policy), TableNetwork(instance), policy)
    g0 = sim.net.slot_graph(0)
    for s in sim.sfcs:
        names = sim.initial_route(s, g0)
        if names is not None:
            sim.set_route(s, names, include_current=False)
    return sim


def kinds(report, k=None):
    return [e[4] for e in report.events if k is None or e[5] == k]


def golden_instance():
    """3 UAVs, 2 SFCs, U1 fails at slot 2; the trace is checked by hand in test_engine."""
    from sagin_sfc.oracle import TinyInstance
    from sagin_sfc.scenario import SfcSpec
    table = (("G0", "U0", 2e8), ("U0", "U1", 2e8), ("U1", "G1", 2e8),
             ("U0", "U2", 3e8), ("U2", "G1", 3e8))
    pos = (("G0", (0.0, 0.0, 0.0)), ("G1", (400.0, 0.0, 0.0)), ("U0", (100.0, 0.0, 100.0)),
           ("U1", (300.0, 0.0, 100.0)), ("U2", (300.0, 300.0, 100.0)))
    return TinyInstance(nodes=("G0", "G1", "U0", "U1", "U2"), slot_count=4, slot_length_s=5.0,
                        rates=(table,) * 4,
                        sfcs=(SfcSpec(4e8, 0, 1, (1.0,)), SfcSpec(6e8, 0, 1, (2.0, 1.0))),
                        compute_capacity=3.0, compute_ability=1.0,
                        failures=((2, ("U1",)),), positions=pos)
