"""Maximum data rates for the six inter-node link kinds.

Ground/UAV links and the satellite downlink use the Shannon capacity of
their SNR; the UAV uplink to a satellite and inter-satellite links use the
energy-per-bit link budget.
"""

from __future__ import annotations

import math

from sagin_sfc.scenario import ParameterSet

G2U, U2G, U2U, U2S, S2S, S2G, STORAGE = "G2U", "U2G", "U2U", "U2S", "S2S", "S2G", "STORAGE"
LINK_KINDS = (G2U, U2G, U2U, U2S, S2S, S2G)


class ChannelError(ValueError):
    pass


def shannon_rate(bandwidth_hz: float, snr_linear: float) -> float:
    # log1p keeps full precision for the very small SNRs of satellite links
    return bandwidth_hz * math.log1p(snr_linear) / math.log(2.0)


def snr_ground_link(params: ParameterSet, distance_m: float, uplink: bool = True) -> float:
    """SNR of a G2U (``uplink``) or U2G link at 3-D distance ``distance_m``."""
    if not distance_m > 0:
        raise ChannelError("ground link distance must be > 0")
    p_tr = params.p_tr_ground_w if uplink else params.p_tr_uav_w
    return p_tr * params.ref_gain_g0 / (params.sigma2_ground_w * distance_m * distance_m)


def snr_g2u(params: ParameterSet, uav_pos, ground_pos, uplink: bool = True) -> float:
    dx = uav_pos[0] - ground_pos[0]
    dy = uav_pos[1] - ground_pos[1]
    h = uav_pos[2] - (ground_pos[2] if len(ground_pos) > 2 else 0.0)
    return snr_ground_link(params, math.sqrt(dx * dx + dy * dy + h * h), uplink)


def path_loss_u2u(distance_m: float, f_hz: float, c: float = 3e8) -> float:
    """Free-space path loss in dB."""
    if not distance_m > 0:
        raise ChannelError("U2U distance must be > 0")
    return 20.0 * math.log10(distance_m) + 20.0 * math.log10(4.0 * math.pi * f_hz / c)


def snr_u2u(params: ParameterSet, distance_m: float) -> float:
    loss_db = path_loss_u2u(distance_m, params.f_uu_hz, params.speed_of_light_mps)
    return params.p_uu_w / params.sigma2_uu_w * 10.0 ** (-loss_db / 10.0)


def free_space_loss(slant_m: float, f_center_hz: float, c: float = 3e8) -> float:
    if not slant_m > 0:
        raise ChannelError("slant range must be > 0")
    x = c / (4.0 * math.pi * slant_m * f_center_hz)
    return x * x


def snr_s2g(params: ParameterSet, slant_m: float) -> float:
    ls = free_space_loss(slant_m, params.f_sg_hz, params.speed_of_light_mps)
    num = (params.p_sg_w * params.gain_sg_lin * params.slant_path_length
           * params.rain_attenuation_lin * ls)
    return num / (params.n0_w * params.b_sg_hz)


def rate_satellite(params: ParameterSet, kind: str, slant_m: float) -> float:
    """Link-budget rate of a U2S or S2S link at range ``slant_m``."""
    if kind == U2S:
        p, gain, f = params.p_us_w, params.gain_us_lin, params.f_us_hz
    elif kind == S2S:
        p, gain, f = params.p_ss_w, params.gain_ss_lin, params.f_ss_hz
    else:
        raise ChannelError(f"rate_satellite expects U2S or S2S, got {kind!r}")
    ls = free_space_loss(slant_m, f, params.speed_of_light_mps)
    return (p * gain * ls * params.line_loss_lin
            / (params.ebn0_required_lin * params.boltzmann * params.system_noise_temp_k
               * params.max_slant_range_m))


def rate_for_kind(kind: str, params: ParameterSet, distance_m: float) -> float:
    """Rate of a link of ``kind`` whose endpoints are ``distance_m`` apart."""
    if kind == G2U:
        return shannon_rate(params.b_gu_hz, snr_ground_link(params, distance_m, True))
    if kind == U2G:
        # U2G reuses the G2U bandwidth; the source gives a single ground-link band
        return shannon_rate(params.b_gu_hz, snr_ground_link(params, distance_m, False))
    if kind == U2U:
        return shannon_rate(params.b_uu_hz, snr_u2u(params, distance_m))
    if kind == S2G:
        return shannon_rate(params.b_sg_hz, snr_s2g(params, distance_m))
    if kind in (U2S, S2S):
        return rate_satellite(params, kind, distance_m)
    if kind == STORAGE:
        raise ChannelError("storage links carry no rate")
    raise ChannelError(f"unknown link kind {kind!r}")


def link_rate(link, params: ParameterSet, positions) -> float:
    """Rate of ``link`` given node positions for its slot (``name -> xyz``)."""
    if link.kind == STORAGE:
        raise ChannelError("storage links carry no rate")
    a = positions[link.src.name]
    b = positions[link.dst.name]
    return rate_for_kind(link.kind, params, math.dist(a, b))
