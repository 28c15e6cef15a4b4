import json
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

from sagin_sfc.scenario import ParameterSet  # noqa: E402

# golden-vector key -> ParameterSet field
PARAM_FIELDS = {
    "b_gu_hz": "b_gu_hz", "b_uu_hz": "b_uu_hz", "b_sg_hz": "b_sg_hz",
    "p_tr_ground_w": "p_tr_ground_w", "p_tr_uav_w": "p_tr_uav_w", "p_uu_w": "p_uu_w",
    "p_sg_w": "p_sg_w", "p_us_w": "p_us_w", "p_ss_w": "p_ss_w",
    "g0": "ref_gain_g0", "sigma0": "sigma2_ground_w", "sigma_uu": "sigma2_uu_w",
    "f_uu_hz": "f_uu_hz", "f_us_hz": "f_us_hz", "f_ss_hz": "f_ss_hz", "f_sg_hz": "f_sg_hz",
    "gain_sg_db": "gain_sg_db", "gain_us_db": "gain_us_db", "gain_ss_db": "gain_ss_db",
    "n0_dbm": "n0_dbm", "t_s": "system_noise_temp_k", "line_loss_db": "line_loss_db",
    "ebn0_db": "ebn0_required_db", "s_m": "max_slant_range_m",
    "slant_path_length": "slant_path_length", "rain_attenuation_db": "rain_attenuation_db",
    "g": "gravity", "mass": "uav_mass_kg", "rho": "air_density", "radius": "propeller_radius_m",
    "props": "propeller_count", "p_max": "uav_max_power_w", "s_max": "uav_max_speed_mps",
    "speed": "uav_speed_mps", "p_op": "satellite_operation_power_w", "k_b": "boltzmann",
    "c": "speed_of_light_mps", "p_re_us": "p_re_us_w", "p_re_ss": "p_re_ss_w",
}


def params_for(vector: dict) -> ParameterSet:
    return ParameterSet(**{f: float(vector[k]) for k, f in PARAM_FIELDS.items()})


@pytest.fixture(scope="session")
def golden_formulas():
    return json.loads((HERE / "golden" / "formulas.json").read_text())
