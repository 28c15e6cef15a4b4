"""Experiment descriptions: parameters, geometry, SFC set, seeds.

A :class:`Scenario` is immutable once loaded.  Documents are YAML or JSON
mappings tagged with ``schema: sagin-sfc-sim/v1``; every field is optional
except ``seed`` and falls back to the defaults below.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import re
from dataclasses import dataclass, field, fields
from functools import cached_property
from typing import Any

import numpy as np
import yaml

from sagin_sfc.failure import FailureConfig

SCHEMA_VERSION = "sagin-sfc-sim/v1"
POLICIES = ("FRMG", "FLTS", "RSSP", "RSNT")


class ScenarioError(ValueError):
    """Raised for schema violations and broken invariants."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def seeded_stream(seed: int, label: str) -> np.random.Generator:
    """Independent random stream for ``(seed, label)``.

    The label is hashed into the seed sequence so that each subsystem draws
    from its own sub-stream and adding draws in one place never perturbs
    another.
    """
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    label_key = int.from_bytes(digest[:8], "little")
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, label_key])
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class TimeGrid:
    slot_count: int = 120      # long enough that nearly every SFC finishes
    slot_length_s: float = 5.0

    def __post_init__(self):
        if int(self.slot_count) != self.slot_count or self.slot_count < 1:
            raise ScenarioError("time.slot_count must be a positive integer")
        if not self.slot_length_s > 0:
            raise ScenarioError("time.slot_length_s must be > 0")

    @property
    def horizon_s(self) -> float:
        return self.slot_count * self.slot_length_s


@dataclass(frozen=True)
class ParameterSet:
    """Physical constants.

    Values are stored in the units they are usually quoted in (W, Hz, dB,
    dBm, K).  dB quantities are converted to linear factors once, through
    the cached ``*_lin`` properties.
    """

    # transmit powers (W)
    p_tr_ground_w: float = 0.5
    p_tr_uav_w: float = 10.0
    p_uu_w: float = 10.0
    p_sg_w: float = 20.0
    p_us_w: float = 10.0
    p_ss_w: float = 20.0
    # bandwidths (Hz)
    b_gu_hz: float = 2e6
    b_uu_hz: float = 4e6
    b_us_hz: float = 50e6
    b_ss_hz: float = 80e6
    b_sg_hz: float = 80e6
    # carrier / centre frequencies (Hz)
    f_uu_hz: float = 2.4e9
    f_us_hz: float = 3.4e9
    f_ss_hz: float = 2.2e9
    f_sg_hz: float = 20e9
    # antenna gain products G^tr G^re (dB)
    gain_sg_db: float = 42.0
    gain_us_db: float = 42.0
    gain_ss_db: float = 52.0
    # noise and losses
    sigma2_uu_w: float = 4e-13
    n0_dbm: float = -114.0
    system_noise_temp_k: float = 1000.0
    line_loss_db: float = 2.0
    # UAV kinematics and airframe
    uav_speed_mps: float = 12.0
    uav_max_speed_mps: float = 12.0
    uav_max_power_w: float = 5.0
    propeller_radius_m: float = 0.2
    propeller_count: float = 4.0
    uav_altitude_m: float = 100.0
    # not given numerically in the source; see README for the rationale
    ref_gain_g0: float = 1e-4
    sigma2_ground_w: float = 1e-13
    uav_mass_kg: float = 2.0
    air_density: float = 1.225
    gravity: float = 9.8
    slant_path_length: float = 1.0
    rain_attenuation_db: float = 0.1
    p_re_us_w: float = 1.0
    p_re_ss_w: float = 1.0
    ebn0_required_db: float = 10.0
    max_slant_range_m: float = 2.0e6
    boltzmann: float = 1.380649e-23
    speed_of_light_mps: float = 3e8
    uav_operation_power_w: float = 1.0
    satellite_operation_power_w: float = 10.0
    compute_energy_j_per_unit: float = 50.0
    compute_capacity_units: float = 3.0
    storage_capacity_bits: float = 1.6e9
    energy_capacity_j: float = 1e5
    compute_ability_units_per_s: float = 0.2
    sigma_min_units: float = 0.5
    sigma_max_units: float = 2.0

    # dB-valued fields may be negative; everything else must be positive
    _SIGNED = frozenset({"n0_dbm", "rain_attenuation_db"})
    _NONNEG = frozenset({"line_loss_db", "ebn0_required_db", "uav_operation_power_w",
                         "satellite_operation_power_w", "compute_energy_j_per_unit"})

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise ScenarioError(f"params.{f.name} must be a finite number")
            if f.name in self._SIGNED:
                continue
            if f.name in self._NONNEG:
                if v < 0:
                    raise ScenarioError(f"params.{f.name} must be >= 0")
            elif v <= 0:
                raise ScenarioError(f"params.{f.name} must be > 0")
        if self.sigma_min_units > self.sigma_max_units:
            raise ScenarioError("params.sigma_min_units must not exceed sigma_max_units")
        if self.uav_speed_mps > self.uav_max_speed_mps:
            raise ScenarioError("params.uav_speed_mps must not exceed uav_max_speed_mps")

    @cached_property
    def gain_sg_lin(self) -> float:
        return db_to_linear(self.gain_sg_db)

    @cached_property
    def gain_us_lin(self) -> float:
        return db_to_linear(self.gain_us_db)

    @cached_property
    def gain_ss_lin(self) -> float:
        return db_to_linear(self.gain_ss_db)

    @cached_property
    def n0_w(self) -> float:
        return db_to_linear(self.n0_dbm) * 1e-3

    @cached_property
    def line_loss_lin(self) -> float:
        # a loss: enters the link budget as a factor below one
        return db_to_linear(-self.line_loss_db)

    @cached_property
    def rain_attenuation_lin(self) -> float:
        return db_to_linear(-self.rain_attenuation_db)

    @cached_property
    def ebn0_required_lin(self) -> float:
        return db_to_linear(self.ebn0_required_db)


@dataclass(frozen=True)
class Orbit:
    """Circular orbit over a flat-earth frame.

    The orbit circle has radius ``earth_radius + altitude`` and its centre
    sits ``earth_radius`` below the middle of the service area.  The orbital
    plane is vertical and contains the horizontal direction ``azimuth_deg``;
    an anomaly of 90 degrees puts the satellite at the zenith.
    """

    altitude_m: float = 550e3
    azimuth_deg: float = 0.0
    phase_deg: float = 90.0

    def __post_init__(self):
        if not self.altitude_m > 0:
            raise ScenarioError("satellite altitude_m must be > 0")


def _default_orbits() -> tuple[Orbit, ...]:
    return (Orbit(550e3, 0.0, 86.0), Orbit(550e3, 60.0, 94.0))


def _default_ground_stations() -> tuple[tuple[float, float], ...]:
    return ((200.0, 200.0), (1800.0, 200.0), (200.0, 1800.0), (1800.0, 1800.0))


@dataclass(frozen=True)
class Geometry:
    area_side_m: float = 2000.0
    uav_count: int = 30
    min_uav_separation_m: float = 20.0
    uav_comm_range_m: float = 500.0
    ground_access_radius_m: float = 800.0
    isl_range_m: float = 5.0e6
    earth_radius_m: float = 6.371e6
    earth_mu: float = 3.986004418e14
    satellites: tuple[Orbit, ...] = field(default_factory=_default_orbits)
    ground_stations: tuple[tuple[float, float], ...] = field(default_factory=_default_ground_stations)
    # optional explicit initial UAV positions (x, y); drawn from the seed otherwise
    uav_initial_positions: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if not self.area_side_m > 0:
            raise ScenarioError("geometry.area_side_m must be > 0")
        if int(self.uav_count) != self.uav_count or self.uav_count < 0:
            raise ScenarioError("geometry.uav_count must be a nonnegative integer")
        if not self.min_uav_separation_m < self.uav_comm_range_m:
            raise ScenarioError(
                "invariant violated: min_uav_separation_m < uav_comm_range_m "
                f"({self.min_uav_separation_m} >= {self.uav_comm_range_m})")
        if not self.ground_stations:
            raise ScenarioError("geometry.ground_stations must not be empty")
        for x, y in self.ground_stations:
            if not (0 <= x <= self.area_side_m and 0 <= y <= self.area_side_m):
                raise ScenarioError(f"ground station ({x}, {y}) lies outside the area")
        if self.uav_initial_positions is not None:
            pos = np.asarray(self.uav_initial_positions, dtype=float).reshape(-1, 2)
            if len(pos) != self.uav_count:
                raise ScenarioError("uav_initial_positions length must equal uav_count")
            if np.any(pos < 0) or np.any(pos > self.area_side_m):
                raise ScenarioError("invariant violated: UAV initial positions inside the area")
            if len(pos) > 1:
                d = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)
                d[np.diag_indices(len(pos))] = np.inf
                if d.min() < self.min_uav_separation_m:
                    raise ScenarioError(
                        "invariant violated: UAV initial positions pairwise >= min separation")


@dataclass(frozen=True)
class SfcSpec:
    data_bits: float
    origin: int
    destination: int
    sigma: tuple[float, ...]

    @property
    def vnf_count(self) -> int:
        return len(self.sigma)


@dataclass(frozen=True)
class PreferenceWeights:
    a: float = 100.0
    b: float = 10.0
    c: float = 1.0

    def __post_init__(self):
        if not (self.a > self.b > self.c > 0):
            raise ScenarioError("weights must satisfy a > b > c > 0")


@dataclass(frozen=True)
class Scenario:
    seed: int
    time: TimeGrid = field(default_factory=TimeGrid)
    params: ParameterSet = field(default_factory=ParameterSet)
    geometry: Geometry = field(default_factory=Geometry)
    sfcs: tuple[SfcSpec, ...] = ()
    failure: FailureConfig = field(default_factory=FailureConfig)
    policy: str = "FRMG"
    weights: PreferenceWeights = field(default_factory=PreferenceWeights)

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ScenarioError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        n_gs = len(self.geometry.ground_stations)
        for k, s in enumerate(self.sfcs):
            for end in (s.origin, s.destination):
                if not 0 <= end < n_gs:
                    raise ScenarioError(
                        f"invariant violated: sfc {k} references ground station {end}, "
                        f"only {n_gs} exist")
            if not s.sigma:
                raise ScenarioError(f"sfc {k} must have at least one VNF")
            if any(x <= 0 for x in s.sigma):
                raise ScenarioError(f"sfc {k} sigma values must be > 0")
            if not s.data_bits > 0:
                raise ScenarioError(f"sfc {k} data_bits must be > 0")

    @property
    def total_vnf_count(self) -> int:
        return sum(s.vnf_count for s in self.sfcs)

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def digest(self) -> str:
        return hashlib.sha256(dump_scenario(self).encode("utf-8")).hexdigest()[:16]


# --------------------------------------------------------------------------
# loading / serialization

_GEOMETRY_KEYS = {f.name for f in fields(Geometry)}
_TIME_KEYS = {f.name for f in fields(TimeGrid)}
_PARAM_KEYS = {f.name for f in fields(ParameterSet)}
_FAILURE_KEYS = {"lambda", "update_interval_slots", "eligible_layers", "per_layer_lambda", "schedule"}
_GEN_KEYS = {"sfc_count", "data_range_mbit", "vnf_range"}
_TOP_KEYS = ({"schema", "seed", "policy", "time", "params", "geometry", "sfcs", "failure",
              "weights"} | _GEOMETRY_KEYS | _TIME_KEYS | _GEN_KEYS)


def _check_keys(section: str, got: dict, allowed: set) -> None:
    unknown = sorted(set(got) - allowed)
    if unknown:
        raise ScenarioError(f"unknown field {section}{unknown[0]!r}")


def _num(section: str, name: str, v: Any) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"field {section}{name} must be a number, got {v!r}")
    return v


def _build_geometry(doc: dict) -> Geometry:
    g = dict(doc.get("geometry") or {})
    _check_keys("geometry.", g, _GEOMETRY_KEYS)
    for k in _GEOMETRY_KEYS:
        if k in doc:
            g[k] = doc[k]
    if "satellites" in g:
        sats = []
        for i, o in enumerate(g["satellites"]):
            if not isinstance(o, dict):
                raise ScenarioError(f"field geometry.satellites[{i}] must be a mapping")
            _check_keys(f"geometry.satellites[{i}].", o, {"altitude_m", "azimuth_deg", "phase_deg"})
            sats.append(Orbit(**o))
        g["satellites"] = tuple(sats)
    if "ground_stations" in g:
        g["ground_stations"] = tuple((float(p[0]), float(p[1])) for p in g["ground_stations"])
    if g.get("uav_initial_positions") is not None:
        g["uav_initial_positions"] = tuple((float(p[0]), float(p[1]))
                                           for p in g["uav_initial_positions"])
    for k, v in g.items():
        if k not in ("satellites", "ground_stations", "uav_initial_positions"):
            _num("geometry.", k, v)
    if "uav_count" in g:
        if int(g["uav_count"]) != g["uav_count"]:
            raise ScenarioError("field geometry.uav_count must be an integer")
        g["uav_count"] = int(g["uav_count"])
    return Geometry(**g)


def _build_failure(doc: dict) -> FailureConfig:
    f = dict(doc.get("failure") or {})
    _check_keys("failure.", f, _FAILURE_KEYS)
    kw: dict[str, Any] = {}
    if "lambda" in f:
        kw["lambda_"] = float(_num("failure.", "lambda", f["lambda"]))
    if "update_interval_slots" in f:
        kw["update_interval_slots"] = int(_num("failure.", "update_interval_slots",
                                               f["update_interval_slots"]))
    if "eligible_layers" in f:
        kw["eligible_layers"] = tuple(f["eligible_layers"])
    if f.get("per_layer_lambda") is not None:
        kw["per_layer_lambda"] = tuple(sorted((str(k), float(v))
                                              for k, v in f["per_layer_lambda"].items()))
    if f.get("schedule") is not None:
        kw["schedule"] = tuple(sorted((int(k), tuple(sorted(str(n) for n in v)))
                                      for k, v in f["schedule"].items()))
    try:
        return FailureConfig(**kw)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def generate_sfcs(seed: int, count: int, n_ground: int, data_range_mbit=(200.0, 800.0),
                  vnf_range=(2, 3), sigma_range=(0.5, 2.0)) -> tuple[SfcSpec, ...]:
    """Draw a random SFC set from the ``"sfcs"`` stream."""
    if n_ground < 2:
        raise ScenarioError("need at least two ground stations to generate SFCs")
    lo, hi = data_range_mbit
    vlo, vhi = vnf_range
    if lo <= 0 or hi < lo or vlo < 1 or vhi < vlo:
        raise ScenarioError("invalid data_range_mbit / vnf_range")
    rng = seeded_stream(seed, "sfcs")
    out = []
    for _ in range(count):
        data = float(rng.uniform(lo, hi)) * 1e6
        n_vnf = int(rng.integers(vlo, vhi + 1))
        o, d = (int(x) for x in rng.choice(n_ground, size=2, replace=False))
        sigma = tuple(float(x) for x in rng.uniform(sigma_range[0], sigma_range[1], size=n_vnf))
        out.append(SfcSpec(data, o, d, sigma))
    return tuple(out)


def _build_sfcs(doc: dict, seed: int, geometry: Geometry, params: ParameterSet) -> tuple[SfcSpec, ...]:
    n_gs = len(geometry.ground_stations)
    if "sfcs" in doc:
        rng = seeded_stream(seed, "sfc-sigma")
        out = []
        for k, s in enumerate(doc["sfcs"]):
            if not isinstance(s, dict):
                raise ScenarioError(f"field sfcs[{k}] must be a mapping")
            _check_keys(f"sfcs[{k}].", s, {"data_bits", "data_mbit", "origin", "destination",
                                           "sigma", "vnf_count"})
            if "data_bits" in s:
                data = float(_num(f"sfcs[{k}].", "data_bits", s["data_bits"]))
            elif "data_mbit" in s:
                data = float(_num(f"sfcs[{k}].", "data_mbit", s["data_mbit"])) * 1e6
            else:
                raise ScenarioError(f"missing field sfcs[{k}].data_bits")
            for req in ("origin", "destination"):
                if req not in s:
                    raise ScenarioError(f"missing field sfcs[{k}].{req}")
            if "sigma" in s:
                sigma = tuple(float(x) for x in s["sigma"])
                if "vnf_count" in s and s["vnf_count"] != len(sigma):
                    raise ScenarioError(
                        f"invariant violated: sfcs[{k}].vnf_count must equal len(sigma)")
            elif "vnf_count" in s:
                sigma = tuple(float(x) for x in rng.uniform(
                    params.sigma_min_units, params.sigma_max_units, size=int(s["vnf_count"])))
            else:
                raise ScenarioError(f"missing field sfcs[{k}].sigma")
            out.append(SfcSpec(data, int(s["origin"]), int(s["destination"]), sigma))
        return tuple(out)
    count = int(doc.get("sfc_count", 10))
    return generate_sfcs(seed, count, n_gs,
                         tuple(doc.get("data_range_mbit", (200.0, 800.0))),
                         tuple(doc.get("vnf_range", (2, 3))),
                         (params.sigma_min_units, params.sigma_max_units))


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a mapping")
    _check_keys("", doc, _TOP_KEYS)
    schema = doc.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ScenarioError(f"field 'schema' must be {SCHEMA_VERSION!r}, got {schema!r}")
    if "seed" not in doc:
        raise ScenarioError("missing field 'seed'")
    seed = doc["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ScenarioError("field 'seed' must be an integer")

    t = dict(doc.get("time") or {})
    _check_keys("time.", t, _TIME_KEYS)
    for k in _TIME_KEYS:
        if k in doc:
            t[k] = doc[k]
    for k, v in t.items():
        _num("time.", k, v)
    time = TimeGrid(**t)

    p = dict(doc.get("params") or {})
    _check_keys("params.", p, _PARAM_KEYS)
    for k, v in p.items():
        _num("params.", k, v)
    params = ParameterSet(**p)

    geometry = _build_geometry(doc)
    failure = _build_failure(doc)
    w = dict(doc.get("weights") or {})
    _check_keys("weights.", w, {"a", "b", "c"})
    weights = PreferenceWeights(**w)
    sfcs = _build_sfcs(doc, seed, geometry, params)
    return Scenario(seed=seed, time=time, params=params, geometry=geometry, sfcs=sfcs,
                    failure=failure, policy=str(doc.get("policy", "FRMG")), weights=weights)


class ConfigLoader(yaml.SafeLoader):
    """Safe loader that also reads ``1e-13`` style numbers as floats."""


ConfigLoader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"^[-+]?(?:[0-9][0-9_]*)(?:\.[0-9_]*)?[eE][-+]?[0-9]+$"),
    list("-+0123456789"))


def parse_config(text: str):
    return yaml.load(text, Loader=ConfigLoader)


def load_scenario(text: str) -> Scenario:
    """Parse a YAML/JSON scenario document and validate it."""
    try:
        doc = parse_config(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"scenario document is not valid YAML/JSON: {exc}") from exc
    return scenario_from_dict(doc)


def scenario_to_dict(sc: Scenario) -> dict:
    g = sc.geometry
    geometry = {f.name: getattr(g, f.name) for f in fields(Geometry)}
    geometry["satellites"] = [dataclasses.asdict(o) for o in g.satellites]
    geometry["ground_stations"] = [list(p) for p in g.ground_stations]
    if g.uav_initial_positions is not None:
        geometry["uav_initial_positions"] = [list(p) for p in g.uav_initial_positions]
    f = sc.failure
    failure: dict[str, Any] = {
        "lambda": f.lambda_,
        "update_interval_slots": f.update_interval_slots,
        "eligible_layers": list(f.eligible_layers),
    }
    if f.per_layer_lambda is not None:
        failure["per_layer_lambda"] = dict(f.per_layer_lambda)
    if f.schedule is not None:
        failure["schedule"] = {str(s): list(nodes) for s, nodes in f.schedule}
    return {
        "schema": SCHEMA_VERSION,
        "seed": sc.seed,
        "policy": sc.policy,
        "time": dataclasses.asdict(sc.time),
        "params": {fl.name: getattr(sc.params, fl.name) for fl in fields(ParameterSet)},
        "geometry": geometry,
        "sfcs": [{"data_bits": s.data_bits, "origin": s.origin, "destination": s.destination,
                  "sigma": list(s.sigma)} for s in sc.sfcs],
        "failure": failure,
        "weights": dataclasses.asdict(sc.weights),
    }


def dump_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2, sort_keys=True)


def default_scenario(seed: int = 1, **top) -> Scenario:
    """Scenario with every default, optionally overriding top-level document keys."""
    doc = {"seed": seed}
    doc.update(top)
    return scenario_from_dict(doc)
