import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from formula_impl import package_values, rel_err
from reference_calc import evaluate
from sagin_sfc import channel as ch
from sagin_sfc.scenario import ParameterSet, db_to_linear, linear_to_db

P = ParameterSet()


def test_golden_vectors_match_package(golden_formulas):
    assert len(golden_formulas) == 20
    for row in golden_formulas:
        got = package_values(row["inputs"])
        for key, want in row["expected"].items():
            assert rel_err(got[key], want) <= 1e-9, key


def test_golden_file_is_what_the_calculator_gives(golden_formulas):
    for row in golden_formulas[:5]:
        again = evaluate(row["inputs"])
        for key, want in row["expected"].items():
            assert rel_err(again[key], want) <= 1e-12, key


@pytest.mark.parametrize("b,snr,want", [(2e6, 1.0, 2e6), (7e6, 0.0, 0.0), (4e6, 3.0, 8e6)])
def test_shannon_examples(b, snr, want):
    assert ch.shannon_rate(b, snr) == pytest.approx(want, rel=1e-15, abs=0)


def test_shannon_concave_increasing():
    snr = np.logspace(-3, 4, 200)
    r = np.array([ch.shannon_rate(1e6, x) for x in snr])
    assert np.all(np.diff(r) > 0)
    lin = np.linspace(0.1, 100, 300)
    rl = np.array([ch.shannon_rate(1e6, x) for x in lin])
    assert np.all(np.diff(rl, 2) < 0)


def test_g2u_overhead_hand_value():
    snr = ch.snr_g2u(P, (500.0, 500.0, 100.0), (500.0, 500.0, 0.0))
    assert snr == pytest.approx(0.5e-4 / (1e-13 * 1e4), rel=1e-12)


def test_g2u_inverse_square_and_uplink_ratio():
    a = ch.snr_ground_link(P, 150.0)
    assert ch.snr_ground_link(P, 300.0) / a == pytest.approx(0.25, rel=1e-12)
    assert ch.snr_ground_link(P, 150.0, uplink=False) / a == pytest.approx(20.0, rel=1e-12)


def test_g2u_u2g_rates_differ_only_by_power():
    d = 250.0
    omega = ch.snr_ground_link(P, d)
    ratio = ch.rate_for_kind(ch.U2G, P, d) / ch.rate_for_kind(ch.G2U, P, d)
    assert ratio == pytest.approx(math.log2(1 + 20 * omega) / math.log2(1 + omega), rel=1e-12)


def test_u2u_path_loss_examples():
    base = ch.path_loss_u2u(1.0, 2.4e9)
    assert base == pytest.approx(20 * math.log10(4 * math.pi * 2.4e9 / 3e8), rel=1e-12)
    assert base == pytest.approx(40.05, abs=0.01)
    assert ch.path_loss_u2u(100.0, 2.4e9) - base == pytest.approx(40.0, rel=1e-12)
    assert ch.path_loss_u2u(1.0, 9.6e9) - base == pytest.approx(20 * math.log10(4), rel=1e-12)


def test_u2u_snr_and_rate_at_100m():
    snr = ch.snr_u2u(P, 100.0)
    assert snr == pytest.approx(2.47e5, rel=5e-3)
    assert ch.rate_for_kind(ch.U2U, P, 100.0) == pytest.approx(7.16e7, rel=5e-3)


def test_u2u_zero_loss_gives_power_over_noise():
    # the distance at which the path loss is exactly 0 dB
    d0 = 3e8 / (4 * math.pi * P.f_uu_hz)
    assert ch.snr_u2u(P, d0) == pytest.approx(P.p_uu_w / P.sigma2_uu_w, rel=1e-9)


def test_u2u_snr_strictly_decreasing():
    d = np.linspace(20, 500, 100)
    snr = [ch.snr_u2u(P, x) for x in d]
    assert all(a > b for a, b in zip(snr, snr[1:]))


def test_free_space_loss():
    assert ch.free_space_loss(1.1e6, 20e9) / ch.free_space_loss(5.5e5, 20e9) == pytest.approx(0.25)
    want = (3e8 / (4 * math.pi * 5.5e5 * 2e10)) ** 2
    assert ch.free_space_loss(5.5e5, 20e9) == pytest.approx(want, rel=1e-12)
    for s in np.logspace(0, 7, 50):
        assert 0 < ch.free_space_loss(s, 20e9) < 1


def test_s2g_reduces_to_link_budget_without_rain():
    p = ParameterSet(rain_attenuation_db=0.0, slant_path_length=1.0)
    s = 5.5e5
    want = p.p_sg_w * 10 ** 4.2 * ch.free_space_loss(s, p.f_sg_hz) / (p.n0_w * p.b_sg_hz)
    assert ch.snr_s2g(p, s) == pytest.approx(want, rel=1e-12)
    assert p.gain_sg_lin == pytest.approx(10 ** 4.2, rel=1e-12)


def test_satellite_rate_scalings():
    s = 5.5e5
    r = ch.rate_satellite(P, ch.U2S, s)
    halved = ParameterSet(ebn0_required_db=P.ebn0_required_db - 10 * math.log10(2))
    assert ch.rate_satellite(halved, ch.U2S, s) / r == pytest.approx(2.0, rel=1e-12)
    same = ParameterSet(p_ss_w=P.p_us_w, f_ss_hz=P.f_us_hz)
    ratio = ch.rate_satellite(same, ch.S2S, s) / ch.rate_satellite(same, ch.U2S, s)
    assert ratio == pytest.approx(10.0, rel=1e-12)


def test_default_stack_golden_values_at_550km():
    # frozen from the stand-alone calculator with package defaults
    from reference_calc import fsl, lin, rate_budget, snr_sg
    v = {"c": 3e8, "k_b": P.boltzmann, "line_loss_db": P.line_loss_db, "ebn0_db": P.ebn0_required_db,
         "t_s": P.system_noise_temp_k, "s_m": P.max_slant_range_m, "p_sg_w": P.p_sg_w,
         "gain_sg_db": P.gain_sg_db, "slant_path_length": P.slant_path_length,
         "rain_attenuation_db": P.rain_attenuation_db, "f_sg_hz": P.f_sg_hz, "n0_dbm": P.n0_dbm,
         "b_sg_hz": P.b_sg_hz}
    assert float(fsl(3e8, 5.5e5, 2e10)) == pytest.approx(ch.free_space_loss(5.5e5, 2e10), rel=1e-12)
    assert ch.snr_s2g(P, 5.5e5) == pytest.approx(float(snr_sg(v, 5.5e5)), rel=1e-12)
    want = float(rate_budget(v, P.p_us_w, P.gain_us_db, P.f_us_hz, 5.5e5))
    assert ch.rate_satellite(P, ch.U2S, 5.5e5) == pytest.approx(want, rel=1e-12)
    assert float(lin(10)) == pytest.approx(10.0)


@pytest.mark.parametrize("kind", ch.LINK_KINDS)
def test_rates_finite_and_decreasing(kind):
    grid = np.linspace(150, 2e6, 60) if kind in (ch.U2S, ch.S2S, ch.S2G) else np.linspace(20, 800, 60)
    r = [ch.rate_for_kind(kind, P, d) for d in grid]
    assert all(math.isfinite(x) and x >= 0 for x in r)
    assert all(a > b for a, b in zip(r, r[1:]))


def test_link_rate_dispatch():
    from sagin_sfc.topology import Link, NodeId
    pos = {"U0": (0.0, 0.0, 100.0), "U1": (100.0, 0.0, 100.0), "S0": (0.0, 0.0, 5e5),
           "S1": (3e5, 0.0, 5e5)}
    u2u = Link(ch.U2U, NodeId.of("U0", 0), NodeId.of("U1", 0), 0.0)
    assert ch.link_rate(u2u, P, pos) == ch.shannon_rate(P.b_uu_hz, ch.snr_u2u(P, 100.0))
    s2s = Link(ch.S2S, NodeId.of("S0", 0), NodeId.of("S1", 0), 0.0)
    assert ch.link_rate(s2s, P, pos) == ch.rate_satellite(P, ch.S2S, 3e5)
    with pytest.raises(ch.ChannelError):
        ch.link_rate(Link(ch.STORAGE, NodeId.of("U0", 0), NodeId.of("U0", 1), 0.0), P, pos)


def test_bad_inputs_raise():
    with pytest.raises(ch.ChannelError):
        ch.snr_ground_link(P, 0.0)
    with pytest.raises(ch.ChannelError):
        ch.rate_satellite(P, ch.U2U, 1e5)
    with pytest.raises(ch.ChannelError):
        ch.rate_for_kind("X2Y", P, 10.0)


@given(st.floats(min_value=-200, max_value=200, allow_nan=False))
def test_db_round_trip(x):
    assert linear_to_db(db_to_linear(x)) == pytest.approx(x, rel=1e-12, abs=1e-12)
