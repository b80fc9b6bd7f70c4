"""Scenario files and result export.

Scenario files are YAML with an explicit schema version.  Powers, SINR
thresholds and antenna gains are written in dB units and converted to
linear on load; angles are degrees in files, radians in memory.  Unknown
keys are rejected so typos fail loudly.

Map export is CSV, one row per unit spectrum space in canonical order
(region-major, then time, then band), floats in full-precision
scientific notation so output is byte-stable across runs.
"""

from __future__ import annotations

import math
from typing import Any, Mapping

import numpy as np
import yaml

from .consumption import ConsumptionMaps
from .grid import Band, GridSpec
from .model import Receiver, RFLink, RFNetwork, RFSystem, SystemParams, Transmitter
from .propagation import OMNI, AntennaPattern, PropagationModel
from .smf import OpportunityMap
from .units import db_to_linear, dbm_to_watts, linear_to_db, watts_to_dbm

__all__ = [
    "ScenarioError",
    "parse_scenario",
    "serialize_scenario",
    "load_scenario",
    "save_scenario",
    "write_map_csv",
    "read_map_csv",
    "map_csv_text",
    "heatmap_text",
    "MAP_CSV_HEADER",
]

SCHEMA_VERSION = 1

MAP_CSV_HEADER = (
    "region_index,time_index,band_index,centroid_x_m,centroid_y_m,"
    "occupancy_w,opportunity_w,raw_opportunity_w,liability_w"
)


class ScenarioError(ValueError):
    """A scenario document is malformed."""


def _require_mapping(obj, context: str) -> Mapping:
    if not isinstance(obj, Mapping):
        raise ScenarioError(f"{context}: expected a mapping, got {type(obj).__name__}")
    return obj


def _check_keys(obj: Mapping, allowed: set[str], required: set[str], context: str):
    unknown = set(obj) - allowed
    if unknown:
        raise ScenarioError(f"{context}: unknown key(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ScenarioError(f"{context}: missing key(s) {sorted(missing)}")


def _number(obj, context: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ScenarioError(f"{context}: expected a number, got {obj!r}")
    return float(obj)


def _position(obj, context: str) -> tuple[float, float]:
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise ScenarioError(f"{context}: position must be [x_m, y_m]")
    return (_number(obj[0], context), _number(obj[1], context))


def _activity(obj, context: str) -> frozenset[int] | None:
    if obj is None or obj == "all":
        return None
    if not isinstance(obj, (list, tuple)) or not all(isinstance(i, int) and not isinstance(i, bool) for i in obj):
        raise ScenarioError(f"{context}: expected 'all' or a list of indices")
    return frozenset(obj)


def _antenna(obj, context: str) -> AntennaPattern:
    if obj is None or obj == "omni":
        return OMNI
    obj = _require_mapping(obj, context)
    _check_keys(
        obj,
        {"kind", "boresight_deg", "beamwidth_deg", "main_gain_db", "back_gain_db"},
        {"kind"},
        context,
    )
    if obj["kind"] == "omni":
        return OMNI
    if obj["kind"] != "sector":
        raise ScenarioError(f"{context}: unknown antenna kind {obj['kind']!r}")
    return AntennaPattern(
        kind="sector",
        boresight=math.radians(_number(obj.get("boresight_deg", 0.0), context)),
        beamwidth=math.radians(_number(obj.get("beamwidth_deg", 360.0), context)),
        main_gain=db_to_linear(_number(obj.get("main_gain_db", 0.0), context)),
        back_gain=db_to_linear(_number(obj.get("back_gain_db", 0.0), context)),
    )


def parse_scenario(text: str) -> RFSystem:
    doc = yaml.safe_load(text)
    doc = _require_mapping(doc, "scenario")
    _check_keys(
        doc,
        {"muse_scenario", "system", "propagation", "grid", "networks"},
        {"muse_scenario", "system", "propagation", "grid", "networks"},
        "scenario",
    )
    if doc["muse_scenario"] != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema version {doc['muse_scenario']!r} (expected {SCHEMA_VERSION})")

    sysdoc = _require_mapping(doc["system"], "system")
    _check_keys(sysdoc, {"p_max_dbm", "p_min_dbm", "noise_dbm"}, {"p_max_dbm", "p_min_dbm", "noise_dbm"}, "system")
    noise = sysdoc["noise_dbm"]
    if isinstance(noise, (list, tuple)):
        ambient = tuple(dbm_to_watts(_number(v, "system.noise_dbm")) for v in noise)
    else:
        ambient = dbm_to_watts(_number(noise, "system.noise_dbm"))
    try:
        params = SystemParams(
            p_max=dbm_to_watts(_number(sysdoc["p_max_dbm"], "system.p_max_dbm")),
            p_min=dbm_to_watts(_number(sysdoc["p_min_dbm"], "system.p_min_dbm")),
            ambient_noise=ambient,
        )
    except ValueError as exc:
        raise ScenarioError(f"system: {exc}") from exc

    propdoc = _require_mapping(doc["propagation"], "propagation")
    _check_keys(propdoc, {"alpha", "reference_distance_m", "band_overrides"}, {"alpha"}, "propagation")

    def _model(src: Mapping, context: str, default: PropagationModel | None = None) -> PropagationModel:
        alpha = _number(src["alpha"], context) if "alpha" in src else default.alpha
        ref = (
            _number(src["reference_distance_m"], context)
            if "reference_distance_m" in src
            else (default.reference_distance if default else 1.0)
        )
        try:
            return PropagationModel(alpha=alpha, reference_distance=ref)
        except ValueError as exc:
            raise ScenarioError(f"{context}: {exc}") from exc

    propagation = _model(propdoc, "propagation")
    band_models: dict[int, PropagationModel] = {}
    for key, override in _require_mapping(propdoc.get("band_overrides", {}), "propagation.band_overrides").items():
        if not isinstance(key, int):
            raise ScenarioError("propagation.band_overrides: keys must be band indices")
        override = _require_mapping(override, f"propagation.band_overrides[{key}]")
        _check_keys(override, {"alpha", "reference_distance_m"}, set(), f"propagation.band_overrides[{key}]")
        band_models[key] = _model(override, f"propagation.band_overrides[{key}]", propagation)

    griddoc = _require_mapping(doc["grid"], "grid")
    _check_keys(
        griddoc,
        {
            "width_m",
            "height_m",
            "hex_side_m",
            "time_quantum_s",
            "time_quanta",
            "bands",
            "sample_point_policy",
            "worst_case_placement",
        },
        {"width_m", "height_m", "hex_side_m", "bands"},
        "grid",
    )
    bands = []
    if not isinstance(griddoc["bands"], (list, tuple)) or not griddoc["bands"]:
        raise ScenarioError("grid.bands: expected a non-empty list")
    for k, banddoc in enumerate(griddoc["bands"]):
        banddoc = _require_mapping(banddoc, f"grid.bands[{k}]")
        _check_keys(banddoc, {"center_mhz", "bandwidth_mhz"}, {"center_mhz", "bandwidth_mhz"}, f"grid.bands[{k}]")
        bands.append(
            Band(
                center_hz=_number(banddoc["center_mhz"], f"grid.bands[{k}]") * 1e6,
                bandwidth_hz=_number(banddoc["bandwidth_mhz"], f"grid.bands[{k}]") * 1e6,
            )
        )
    policy = griddoc.get("sample_point_policy", "centroid")
    sample_offset = None
    policy_name = policy
    if isinstance(policy, Mapping):
        _check_keys(policy, {"offset_m"}, {"offset_m"}, "grid.sample_point_policy")
        sample_offset = _position(policy["offset_m"], "grid.sample_point_policy.offset_m")
        policy_name = "offset"
    elif policy not in ("centroid",):
        raise ScenarioError(f"grid.sample_point_policy: expected 'centroid' or an offset mapping, got {policy!r}")
    horizon = griddoc.get("time_quanta", 1)
    if isinstance(horizon, bool) or not isinstance(horizon, int):
        raise ScenarioError("grid.time_quanta: expected an integer")
    try:
        grid_spec = GridSpec(
            region_width=_number(griddoc["width_m"], "grid.width_m"),
            region_height=_number(griddoc["height_m"], "grid.height_m"),
            hex_side=_number(griddoc["hex_side_m"], "grid.hex_side_m"),
            time_quantum=_number(griddoc.get("time_quantum_s", 1.0), "grid.time_quantum_s"),
            horizon=horizon,
            bands=tuple(bands),
            sample_point_policy=policy_name,
            sample_offset=sample_offset,
            worst_case_placement=bool(griddoc.get("worst_case_placement", False)),
        )
    except ValueError as exc:
        raise ScenarioError(f"grid: {exc}") from exc

    if isinstance(ambient, tuple) and len(ambient) != len(bands):
        raise ScenarioError("system.noise_dbm: per-band list length does not match grid.bands")

    if not isinstance(doc["networks"], (list, tuple)):
        raise ScenarioError("networks: expected a list")
    networks = []
    for netdoc in doc["networks"]:
        netdoc = _require_mapping(netdoc, "networks[]")
        _check_keys(netdoc, {"id", "orthogonal", "links"}, {"id", "links"}, f"network {netdoc.get('id')}")
        links = []
        for linkdoc in netdoc["links"]:
            linkdoc = _require_mapping(linkdoc, "links[]")
            context = f"link {linkdoc.get('id')}"
            _check_keys(linkdoc, {"id", "transmitter", "transmitters", "receivers"}, {"id"}, context)
            txdocs = []
            if "transmitter" in linkdoc and linkdoc["transmitter"] is not None:
                txdocs.append(linkdoc["transmitter"])
            txdocs.extend(linkdoc.get("transmitters", ()))
            transmitters = tuple(_parse_tx(t, context) for t in txdocs)
            receivers = tuple(_parse_rx(r, context) for r in linkdoc.get("receivers", ()))
            links.append(RFLink(id=str(linkdoc["id"]), transmitters=transmitters, receivers=receivers))
        networks.append(
            RFNetwork(id=str(netdoc["id"]), links=tuple(links), orthogonal=bool(netdoc.get("orthogonal", False)))
        )

    return RFSystem(
        params=params,
        propagation=propagation,
        grid_spec=grid_spec,
        networks=tuple(networks),
        band_propagation=band_models,
    )


def _parse_tx(obj, context: str) -> Transmitter:
    obj = _require_mapping(obj, f"{context}: transmitter")
    ctx = f"{context}: transmitter {obj.get('id')}"
    _check_keys(obj, {"id", "position", "power_dbm", "antenna", "active", "bands"}, {"id", "position", "power_dbm"}, ctx)
    try:
        return Transmitter(
            id=str(obj["id"]),
            position=_position(obj["position"], ctx),
            tx_power=dbm_to_watts(_number(obj["power_dbm"], ctx)),
            antenna=_antenna(obj.get("antenna"), ctx),
            active_intervals=_activity(obj.get("active"), ctx),
            bands=_activity(obj.get("bands"), ctx),
        )
    except ValueError as exc:
        raise ScenarioError(f"{ctx}: {exc}") from exc


def _parse_rx(obj, context: str) -> Receiver:
    obj = _require_mapping(obj, f"{context}: receiver")
    ctx = f"{context}: receiver {obj.get('id')}"
    _check_keys(
        obj,
        {"id", "position", "beta_db", "antenna", "active", "bands", "margin_dbm"},
        {"id", "position", "beta_db"},
        ctx,
    )
    try:
        return Receiver(
            id=str(obj["id"]),
            position=_position(obj["position"], ctx),
            beta=db_to_linear(_number(obj["beta_db"], ctx)),
            antenna=_antenna(obj.get("antenna"), ctx),
            active_intervals=_activity(obj.get("active"), ctx),
            bands=_activity(obj.get("bands"), ctx),
            explicit_margin=dbm_to_watts(_number(obj["margin_dbm"], ctx)) if "margin_dbm" in obj else None,
        )
    except ValueError as exc:
        raise ScenarioError(f"{ctx}: {exc}") from exc


# ---------------------------------------------------------------------------
# serialization


def _antenna_doc(antenna: AntennaPattern):
    if antenna.kind == "omni":
        return "omni"
    return {
        "kind": "sector",
        "boresight_deg": math.degrees(antenna.boresight),
        "beamwidth_deg": math.degrees(antenna.beamwidth),
        "main_gain_db": linear_to_db(antenna.main_gain),
        "back_gain_db": linear_to_db(antenna.back_gain),
    }


def _activity_doc(value: frozenset[int] | None):
    return "all" if value is None else sorted(value)


def serialize_scenario(sys: RFSystem) -> str:
    params = sys.params
    if isinstance(params.ambient_noise, tuple):
        noise_doc: Any = [watts_to_dbm(w) for w in params.ambient_noise]
    else:
        noise_doc = watts_to_dbm(params.ambient_noise)
    spec = sys.grid_spec
    doc: dict[str, Any] = {
        "muse_scenario": SCHEMA_VERSION,
        "system": {
            "p_max_dbm": watts_to_dbm(params.p_max),
            "p_min_dbm": watts_to_dbm(params.p_min),
            "noise_dbm": noise_doc,
        },
        "propagation": {
            "alpha": sys.propagation.alpha,
            "reference_distance_m": sys.propagation.reference_distance,
        },
        "grid": {
            "width_m": spec.region_width,
            "height_m": spec.region_height,
            "hex_side_m": spec.hex_side,
            "time_quantum_s": spec.time_quantum,
            "time_quanta": spec.horizon,
            "bands": [{"center_mhz": b.center_hz / 1e6, "bandwidth_mhz": b.bandwidth_hz / 1e6} for b in spec.bands],
            "sample_point_policy": (
                "centroid" if spec.sample_point_policy == "centroid" else {"offset_m": list(spec.sample_offset)}
            ),
            "worst_case_placement": spec.worst_case_placement,
        },
        "networks": [],
    }
    if sys.band_propagation:
        doc["propagation"]["band_overrides"] = {
            k: {"alpha": m.alpha, "reference_distance_m": m.reference_distance}
            for k, m in sorted(sys.band_propagation.items())
        }
    for net in sys.networks:
        netdoc: dict[str, Any] = {"id": net.id, "links": []}
        if net.orthogonal:
            netdoc["orthogonal"] = True
        for link in net.links:
            linkdoc: dict[str, Any] = {"id": link.id}
            if len(link.transmitters) == 1:
                linkdoc["transmitter"] = _tx_doc(link.transmitters[0])
            elif link.transmitters:
                linkdoc["transmitters"] = [_tx_doc(t) for t in link.transmitters]
            if link.receivers:
                linkdoc["receivers"] = [_rx_doc(r) for r in link.receivers]
            netdoc["links"].append(linkdoc)
        doc["networks"].append(netdoc)
    return yaml.safe_dump(doc, sort_keys=False)


def _tx_doc(tx: Transmitter) -> dict[str, Any]:
    out: dict[str, Any] = {
        "id": tx.id,
        "position": list(tx.position),
        "power_dbm": watts_to_dbm(tx.tx_power),
    }
    if tx.antenna != OMNI:
        out["antenna"] = _antenna_doc(tx.antenna)
    if tx.active_intervals is not None:
        out["active"] = _activity_doc(tx.active_intervals)
    if tx.bands is not None:
        out["bands"] = _activity_doc(tx.bands)
    return out


def _rx_doc(rx: Receiver) -> dict[str, Any]:
    out: dict[str, Any] = {
        "id": rx.id,
        "position": list(rx.position),
        "beta_db": linear_to_db(rx.beta),
    }
    if rx.antenna != OMNI:
        out["antenna"] = _antenna_doc(rx.antenna)
    if rx.active_intervals is not None:
        out["active"] = _activity_doc(rx.active_intervals)
    if rx.bands is not None:
        out["bands"] = _activity_doc(rx.bands)
    if rx.explicit_margin is not None:
        out["margin_dbm"] = watts_to_dbm(rx.explicit_margin)
    return out


def load_scenario(path) -> RFSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def save_scenario(sys: RFSystem, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_scenario(sys))


# ---------------------------------------------------------------------------
# map CSV


def map_csv_text(maps: ConsumptionMaps) -> str:
    grid = maps.grid
    lines = [MAP_CSV_HEADER]
    for chi in range(grid.region_count):
        cx, cy = grid.centroids[chi]
        for tau in range(grid.horizon):
            for nu in range(grid.band_count):
                lines.append(
                    f"{chi},{tau},{nu},{cx:.17e},{cy:.17e},"
                    f"{maps.occupancy[chi, tau, nu]:.17e},{maps.opportunity[chi, tau, nu]:.17e},"
                    f"{maps.raw_opportunity[chi, tau, nu]:.17e},{maps.liability[chi, tau, nu]:.17e}"
                )
    return "\n".join(lines) + "\n"


def write_map_csv(path, maps: ConsumptionMaps):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(map_csv_text(maps))


def read_map_csv(path) -> dict[str, np.ndarray | OpportunityMap]:
    """Load a map CSV back into arrays plus an OpportunityMap."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != MAP_CSV_HEADER:
            raise ScenarioError(f"unexpected map CSV header: {header!r}")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if not rows:
        raise ScenarioError("map CSV has no data rows")
    chis = np.array([int(r[0]) for r in rows])
    taus = np.array([int(r[1]) for r in rows])
    nus = np.array([int(r[2]) for r in rows])
    n_regions = int(chis.max()) + 1
    horizon = int(taus.max()) + 1
    n_bands = int(nus.max()) + 1
    if len(rows) != n_regions * horizon * n_bands:
        raise ScenarioError("map CSV row count does not match its index ranges")

    shape = (n_regions, horizon, n_bands)
    centroids = np.zeros((n_regions, 2))
    data = {name: np.zeros(shape) for name in ("occupancy", "opportunity", "raw_opportunity", "liability")}
    for r in rows:
        chi, tau, nu = int(r[0]), int(r[1]), int(r[2])
        centroids[chi] = (float(r[3]), float(r[4]))
        data["occupancy"][chi, tau, nu] = float(r[5])
        data["opportunity"][chi, tau, nu] = float(r[6])
        data["raw_opportunity"][chi, tau, nu] = float(r[7])
        data["liability"][chi, tau, nu] = float(r[8])
    result: dict[str, Any] = dict(data)
    result["centroids"] = centroids
    result["opportunity_map"] = OpportunityMap(values=data["opportunity"], centroids=centroids, provenance="ground-truth")
    return result


def heatmap_text(maps: ConsumptionMaps, quantity: str, time_index: int, band_index: int) -> str:
    """Gnuplot-compatible matrix of one quantity for one (time, band) slice.

    Rows follow the hexagon rows bottom-up; short rows are padded with nan.
    """
    grid = maps.grid
    values = getattr(maps, quantity)[:, time_index, band_index]
    width = int(max(grid._row_counts))
    lines = []
    for i in range(grid.row_count):
        lo, hi = int(grid._row_start[i]), int(grid._row_start[i + 1])
        row = [f"{v:.17e}" for v in values[lo:hi]]
        row += ["nan"] * (width - (hi - lo))
        lines.append(" ".join(row))
    return "\n".join(lines) + "\n"
