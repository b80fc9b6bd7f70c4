"""Core spectrum-consumption arithmetic.

Definitions, all in linear watts at a point:

* transmitter occupancy     received power from one transmitter,
                            P_t * antenna gains * path gain;
* spectrum occupancy        sum of all co-banded, co-active transmitter
                            occupancies plus ambient noise (P_bar);
* interference margin       extra interference a receiver tolerates while
                            keeping SINR >= beta: serving power / beta
                            minus noise; negative means the receiver is
                            infeasible even without interferers;
* interference opportunity  the remaining margin of a receiver, projected
                            back to a transmit power at the evaluation
                            point by dividing by the point-to-receiver
                            gain; negative flags harmful interference;
* net opportunity           minimum interference opportunity over all
                            receivers, never exceeding the regulatory
                            headroom p_max - P_bar; with no receivers it
                            is the headroom itself;
* liability                 complement that closes the per-cell budget:
                            occupancy + opportunity + liability = p_cmax.

The clamped cell opportunity gamma is raw opportunity clipped to
[0, p_cmax - occupancy], so the per-cell conservation identity holds
exactly by construction while the unclamped value stays available for
diagnostics.

Cell evaluations are pure and independent; maps are computed in chunks
with a fixed-order reduction, so results are bitwise deterministic under
any MUSE_THREADS setting.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .grid import Cell, SpectrumGrid
from .model import Receiver, RFSystem, Transmitter, entity_selector
from .propagation import pattern_gain

__all__ = [
    "PointMetrics",
    "ReceiverPointMetrics",
    "CellMetrics",
    "ConsumptionMaps",
    "ConsumptionReport",
    "tx_occupancy_at",
    "aggregate_occupancy_at",
    "interference_margin",
    "interference_opportunity",
    "net_opportunity_at",
    "receiver_sinr",
    "point_metrics",
    "cell_metrics",
    "compute_maps",
    "entity_consumption",
    "system_report",
]

_CHUNK = 1 << 18  # points per evaluation chunk; bounds peak memory


def _thread_budget() -> int:
    env = os.environ.get("MUSE_THREADS")
    if env is not None:
        try:
            cap = int(env)
        except ValueError as exc:
            raise ValueError(f"MUSE_THREADS must be an integer, got {env!r}") from exc
        return max(1, cap)
    return min(4, os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# scalar link budget helpers


def _gain_between_banded(sys: RFSystem, src, dst, band_index: int) -> float:
    """Path gain times both antenna gains between two transceivers."""
    sp = sys.position_of(src)
    dp = sys.position_of(dst)
    d = math.hypot(dp[0] - sp[0], dp[1] - sp[1])
    model = sys.model_for_band(band_index)
    g = 1.0 if d <= model.reference_distance else (d / model.reference_distance) ** -model.alpha
    if src.antenna.kind != "omni":
        if d == 0.0:
            g *= src.antenna.main_gain
        else:
            g *= pattern_gain(src.antenna, math.atan2(dp[1] - sp[1], dp[0] - sp[0]))
    if dst.antenna.kind != "omni":
        if d == 0.0:
            g *= dst.antenna.main_gain
        else:
            g *= pattern_gain(dst.antenna, math.atan2(sp[1] - dp[1], sp[0] - dp[0]))
    return g


def _serving_power(sys: RFSystem, rx: Receiver, band_index: int) -> float:
    link = sys.link_of(rx.id)
    tx = link.transmitter
    if tx is None:
        raise ValueError(f"receiver {rx.id} has no serving transmitter")
    return tx.tx_power * _gain_between_banded(sys, tx, rx, band_index)


def interference_margin(sys: RFSystem, rx: Receiver | str, band_index: int = 0) -> float:
    """Interference power the receiver tolerates at zero separation.

    Serving receivers derive it from their link budget; receive-only
    links must declare it explicitly.  A negative value is returned as is
    and marks the receiver as infeasible even without interferers.
    """
    if isinstance(rx, str):
        rx = sys.receiver(rx)
    link = sys.link_of(rx.id)
    if link.transmitter is None:
        if rx.explicit_margin is None:
            raise ValueError(f"receiver {rx.id}: no serving signal and no explicit margin")
        return rx.explicit_margin
    noise = sys.noise_at(sys.position_of(rx), band_index)
    return _serving_power(sys, rx, band_index) / rx.beta - noise


def _interference_at(sys: RFSystem, rx: Receiver, time_index: int, band_index: int) -> float:
    """Aggregate interference power received by rx from every co-banded,
    co-active transmitter except its own serving transmitter (and, for
    orthogonal networks, sibling links)."""
    own_link = sys.link_of(rx.id)
    own_net = sys.network_of(rx.id)
    serving = own_link.transmitter
    total = 0.0
    for net, link, tx in sys.iter_transmitters():
        if not tx.is_active(time_index, band_index):
            continue
        if serving is not None and tx.id == serving.id:
            continue
        if net.orthogonal and net.id == own_net.id and link.id != own_link.id:
            continue
        total += tx.tx_power * _gain_between_banded(sys, tx, rx, band_index)
    return total


def receiver_sinr(sys: RFSystem, rx: Receiver | str, time_index: int = 0, band_index: int = 0) -> float:
    """Experienced SINR (linear) of a served receiver."""
    if isinstance(rx, str):
        rx = sys.receiver(rx)
    noise = sys.noise_at(sys.position_of(rx), band_index)
    interference = _interference_at(sys, rx, time_index, band_index)
    return _serving_power(sys, rx, band_index) / (interference + noise)


# ---------------------------------------------------------------------------
# vectorized slice evaluation


def _path_gain_vec(model, d: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        decayed = (d / model.reference_distance) ** -model.alpha
    return np.where(d <= model.reference_distance, 1.0, decayed)


def _antenna_gain_vec(antenna, origin, pts: np.ndarray, d: np.ndarray) -> np.ndarray | float:
    """Gain of an antenna at ``origin`` toward each point; main lobe at
    coincident points (the bearing is undefined there)."""
    if antenna.kind == "omni":
        return 1.0
    bearing = np.arctan2(pts[:, 1] - origin[1], pts[:, 0] - origin[0])
    g = pattern_gain(antenna, bearing)
    return np.where(d == 0.0, antenna.main_gain, g)


def _noise_vector(sys: RFSystem, pts: np.ndarray, band_index: int, region_indices) -> np.ndarray | float:
    base = sys.params.noise_for_band(band_index)
    if not sys.noise_cell_overrides:
        return base
    n = np.full(len(pts), base)
    if region_indices is not None:
        offset = int(region_indices[0])
        for (chi, nu), w in sys.noise_cell_overrides.items():
            if nu == band_index and offset <= chi < offset + len(pts):
                n[chi - offset] = w
    else:
        for k in range(len(pts)):
            n[k] = sys.noise_at(pts[k], band_index)
    return n


@dataclass
class _SliceFields:
    occupancy: np.ndarray
    raw_opportunity: np.ndarray
    gamma: np.ndarray
    phi: np.ndarray
    tx_received: dict[str, np.ndarray] | None = None
    rx_opportunity: dict[str, np.ndarray] | None = None
    rx_liability: dict[str, np.ndarray] | None = None
    harmful: frozenset[str] = frozenset()


def _evaluate_slice(
    sys: RFSystem,
    pts: np.ndarray,
    time_index: int,
    band_index: int,
    detail: bool = False,
    region_indices=None,
) -> _SliceFields:
    params = sys.params
    model = sys.model_for_band(band_index)
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)

    occupancy = np.zeros(len(pts))
    occupancy += _noise_vector(sys, pts, band_index, region_indices)
    tx_received = {} if detail else None
    for _, _, tx in sys.iter_transmitters():
        if not tx.is_active(time_index, band_index):
            if detail:
                tx_received[tx.id] = np.zeros(len(pts))
            continue
        pos = sys.position_of(tx)
        d = np.hypot(pts[:, 0] - pos[0], pts[:, 1] - pos[1])
        received = tx.tx_power * _path_gain_vec(model, d) * _antenna_gain_vec(tx.antenna, pos, pts, d)
        occupancy += received
        if detail:
            tx_received[tx.id] = received

    raw = None
    rx_opportunity = {} if detail else None
    harmful: set[str] = set()
    for _, _, rx in sys.iter_receivers():
        if not rx.is_active(time_index, band_index):
            continue
        remaining = interference_margin(sys, rx, band_index) - _interference_at(sys, rx, time_index, band_index)
        pos = sys.position_of(rx)
        d = np.hypot(pts[:, 0] - pos[0], pts[:, 1] - pos[1])
        gain = _path_gain_vec(model, d) * _antenna_gain_vec(rx.antenna, pos, pts, d)
        opp = remaining / gain
        raw = opp if raw is None else np.minimum(raw, opp)
        if detail:
            rx_opportunity[rx.id] = opp
            if remaining < 0.0:
                harmful.add(rx.id)

    headroom = params.p_max - occupancy
    raw = headroom if raw is None else np.minimum(raw, headroom)
    gamma = np.clip(raw, 0.0, np.maximum(params.p_cmax - occupancy, 0.0))
    phi = params.p_cmax - occupancy - gamma

    fields = _SliceFields(occupancy=occupancy, raw_opportunity=raw, gamma=gamma, phi=phi)
    if detail:
        fields.tx_received = tx_received
        fields.rx_opportunity = rx_opportunity
        fields.rx_liability = {
            rid: np.clip(params.p_cmax - (occupancy + opp), 0.0, params.p_cmax)
            for rid, opp in rx_opportunity.items()
        }
        fields.harmful = frozenset(harmful)
    return fields


def _evaluate_grid_slice(sys: RFSystem, grid: SpectrumGrid, time_index: int, band_index: int) -> _SliceFields:
    """Chunked slice evaluation over every sample point of the grid."""
    pts = grid.sample_points
    n = len(pts)
    if n <= _CHUNK:
        return _evaluate_slice(sys, pts, time_index, band_index, region_indices=np.arange(n))
    occupancy = np.empty(n)
    raw = np.empty(n)
    gamma = np.empty(n)
    phi = np.empty(n)
    spans = [(lo, min(lo + _CHUNK, n)) for lo in range(0, n, _CHUNK)]

    def run(span):
        lo, hi = span
        f = _evaluate_slice(sys, pts[lo:hi], time_index, band_index, region_indices=np.arange(lo, hi))
        occupancy[lo:hi] = f.occupancy
        raw[lo:hi] = f.raw_opportunity
        gamma[lo:hi] = f.gamma
        phi[lo:hi] = f.phi

    workers = min(_thread_budget(), len(spans))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, spans))
    else:
        for span in spans:
            run(span)
    return _SliceFields(occupancy=occupancy, raw_opportunity=raw, gamma=gamma, phi=phi)


# ---------------------------------------------------------------------------
# public point operations


def tx_occupancy_at(sys: RFSystem, tx: Transmitter | str, point, time_index: int = 0, band_index: int = 0) -> float:
    """Power received from one transmitter at a point; zero while inactive."""
    if isinstance(tx, str):
        tx = sys.transmitter(tx)
    if not tx.is_active(time_index, band_index):
        return 0.0
    model = sys.model_for_band(band_index)
    pos = sys.position_of(tx)
    d = math.hypot(point[0] - pos[0], point[1] - pos[1])
    g = 1.0 if d <= model.reference_distance else (d / model.reference_distance) ** -model.alpha
    if tx.antenna.kind != "omni":
        g *= tx.antenna.main_gain if d == 0.0 else pattern_gain(tx.antenna, math.atan2(point[1] - pos[1], point[0] - pos[0]))
    return tx.tx_power * g


def aggregate_occupancy_at(sys: RFSystem, point, time_index: int = 0, band_index: int = 0) -> float:
    """Aggregate received power plus ambient noise at a point."""
    total = sys.noise_at(point, band_index)
    for _, _, tx in sys.iter_transmitters():
        total += tx_occupancy_at(sys, tx, point, time_index, band_index)
    return total


def interference_opportunity(sys: RFSystem, rx: Receiver | str, point, time_index: int = 0, band_index: int = 0) -> float:
    """Interference power sourceable at a point without harming this receiver.

    The receiver's remaining margin (margin minus interference it already
    receives) projected back to a transmit power at the point.  Negative
    values mean the receiver is already experiencing harmful interference.
    """
    if isinstance(rx, str):
        rx = sys.receiver(rx)
    remaining = interference_margin(sys, rx, band_index) - _interference_at(sys, rx, time_index, band_index)
    model = sys.model_for_band(band_index)
    pos = sys.position_of(rx)
    d = math.hypot(point[0] - pos[0], point[1] - pos[1])
    g = 1.0 if d <= model.reference_distance else (d / model.reference_distance) ** -model.alpha
    if rx.antenna.kind != "omni":
        g *= rx.antenna.main_gain if d == 0.0 else pattern_gain(rx.antenna, math.atan2(point[1] - pos[1], point[0] - pos[0]))
    return remaining / g


def net_opportunity_at(sys: RFSystem, point, time_index: int = 0, band_index: int = 0) -> float:
    """Net spectrum opportunity at a point (raw, unclamped below zero).

    Minimum interference opportunity over all co-banded, co-active
    receivers, never exceeding the regulatory headroom p_max - P_bar.
    With no receivers it is the headroom itself.
    """
    fields = _evaluate_slice(sys, np.array([point], dtype=float), time_index, band_index)
    return float(fields.raw_opportunity[0])


@dataclass(frozen=True)
class ReceiverPointMetrics:
    receiver_id: str
    margin: float  # tolerable interference at zero separation
    bound: float  # receiver-imposed power bound at the point
    backprojected_interference: float  # existing interference, projected to the point
    opportunity: float  # bound minus backprojected interference (may be negative)
    liability: float  # spectrum the receiver consumes at the point


@dataclass(frozen=True)
class PointMetrics:
    point: tuple[float, float]
    time_index: int
    band_index: int
    tx_received: dict[str, float]
    occupancy: float
    receivers: tuple[ReceiverPointMetrics, ...]
    net_opportunity: float


def point_metrics(sys: RFSystem, point, time_index: int = 0, band_index: int = 0) -> PointMetrics:
    """Full consumption breakdown at one point."""
    params = sys.params
    model = sys.model_for_band(band_index)
    tx_received = {
        tx.id: tx_occupancy_at(sys, tx, point, time_index, band_index)
        for _, _, tx in sys.iter_transmitters()
    }
    occupancy = sys.noise_at(point, band_index) + math.fsum(tx_received.values())

    views = []
    raw = None
    for _, _, rx in sys.iter_receivers():
        if not rx.is_active(time_index, band_index):
            continue
        margin = interference_margin(sys, rx, band_index)
        existing = _interference_at(sys, rx, time_index, band_index)
        pos = sys.position_of(rx)
        d = math.hypot(point[0] - pos[0], point[1] - pos[1])
        g = 1.0 if d <= model.reference_distance else (d / model.reference_distance) ** -model.alpha
        if rx.antenna.kind != "omni":
            g *= rx.antenna.main_gain if d == 0.0 else pattern_gain(rx.antenna, math.atan2(point[1] - pos[1], point[0] - pos[0]))
        opp = (margin - existing) / g
        views.append(
            ReceiverPointMetrics(
                receiver_id=rx.id,
                margin=margin,
                bound=margin / g,
                backprojected_interference=existing / g,
                opportunity=opp,
                liability=min(max(params.p_cmax - (occupancy + opp), 0.0), params.p_cmax),
            )
        )
        raw = opp if raw is None else min(raw, opp)
    headroom = params.p_max - occupancy
    raw = headroom if raw is None else min(raw, headroom)
    return PointMetrics(
        point=(float(point[0]), float(point[1])),
        time_index=time_index,
        band_index=band_index,
        tx_received=tx_received,
        occupancy=occupancy,
        receivers=tuple(views),
        net_opportunity=raw,
    )


# ---------------------------------------------------------------------------
# cell and system level


@dataclass(frozen=True)
class CellMetrics:
    cell: Cell
    occupancy: float  # omega
    opportunity: float  # gamma, clamped to [0, p_cmax - omega]
    raw_opportunity: float  # net opportunity before clamping
    liability: float  # phi = p_cmax - (omega + gamma)
    tx_occupancy: dict[str, float]  # per-transmitter contribution
    rx_liability: dict[str, float]  # per-receiver consumption
    harmful_interference: frozenset[str]  # receivers with negative remaining margin


def cell_metrics(sys: RFSystem, cell: Cell) -> CellMetrics:
    """Occupancy / opportunity / liability of one unit spectrum space,
    evaluated at its sample point."""
    fields = _evaluate_slice(
        sys,
        np.array([cell.sample_point], dtype=float),
        cell.time_index,
        cell.band_index,
        detail=True,
    )
    return CellMetrics(
        cell=cell,
        occupancy=float(fields.occupancy[0]),
        opportunity=float(fields.gamma[0]),
        raw_opportunity=float(fields.raw_opportunity[0]),
        liability=float(fields.phi[0]),
        tx_occupancy={k: float(v[0]) for k, v in fields.tx_received.items()},
        rx_liability={k: float(v[0]) for k, v in fields.rx_liability.items()},
        harmful_interference=fields.harmful,
    )


@dataclass
class ConsumptionMaps:
    """Per-cell consumption fields, shape (regions, time quanta, bands)."""

    grid: SpectrumGrid
    occupancy: np.ndarray
    opportunity: np.ndarray
    raw_opportunity: np.ndarray
    liability: np.ndarray


def compute_maps(sys: RFSystem) -> ConsumptionMaps:
    """Evaluate the full grid, one (time, band) slice at a time."""
    grid = sys.grid
    shape = (grid.region_count, grid.horizon, grid.band_count)
    occupancy = np.empty(shape)
    opportunity = np.empty(shape)
    raw = np.empty(shape)
    liability = np.empty(shape)
    for tau in range(grid.horizon):
        for nu in range(grid.band_count):
            f = _evaluate_grid_slice(sys, grid, tau, nu)
            occupancy[:, tau, nu] = f.occupancy
            opportunity[:, tau, nu] = f.gamma
            raw[:, tau, nu] = f.raw_opportunity
            liability[:, tau, nu] = f.phi
    return ConsumptionMaps(grid=grid, occupancy=occupancy, opportunity=opportunity, raw_opportunity=raw, liability=liability)


def _tx_consumed(sys: RFSystem, tx: Transmitter) -> float:
    grid = sys.grid
    pos = sys.position_of(tx)
    pts = grid.sample_points
    d = np.hypot(pts[:, 0] - pos[0], pts[:, 1] - pos[1])
    total = 0.0
    for nu in range(grid.band_count):
        model = sys.model_for_band(nu)
        received = tx.tx_power * _path_gain_vec(model, d) * _antenna_gain_vec(tx.antenna, pos, pts, d)
        active_quanta = sum(1 for tau in range(grid.horizon) if tx.is_active(tau, nu))
        total += active_quanta * float(np.sum(received))
    return total


def _rx_consumed(sys: RFSystem, rx: Receiver) -> float:
    grid = sys.grid
    total = 0.0
    for tau in range(grid.horizon):
        for nu in range(grid.band_count):
            if not rx.is_active(tau, nu):
                continue
            fields = _evaluate_slice(sys, grid.sample_points, tau, nu, region_indices=np.arange(grid.region_count))
            remaining = interference_margin(sys, rx, nu) - _interference_at(sys, rx, tau, nu)
            pos = sys.position_of(rx)
            pts = grid.sample_points
            d = np.hypot(pts[:, 0] - pos[0], pts[:, 1] - pos[1])
            model = sys.model_for_band(nu)
            gain = _path_gain_vec(model, d) * _antenna_gain_vec(rx.antenna, pos, pts, d)
            opp = remaining / gain
            liab = np.clip(sys.params.p_cmax - (fields.occupancy + opp), 0.0, sys.params.p_cmax)
            total += float(np.sum(liab))
    return total


def entity_consumption(sys: RFSystem, entity: str) -> float:
    """Spectrum consumed by an entity, in watt x unit-region units.

    Transmitter members contribute their aggregated occupancy, receiver
    members their aggregated liability; composite entities sum over all
    member transceivers.
    """
    members = entity_selector(sys, entity)
    total = 0.0
    for member in sorted(members, key=lambda m: m.id):
        if isinstance(member, Transmitter):
            total += _tx_consumed(sys, member)
        else:
            total += _rx_consumed(sys, member)
    return total


@dataclass(frozen=True)
class ConsumptionReport:
    psi_total: float
    psi_utilized: float
    psi_forbidden: float
    psi_available: float
    entity_consumption: dict[str, float]
    conservation_residual: float

    @property
    def utilized_fraction(self) -> float:
        return self.psi_utilized / self.psi_total

    @property
    def forbidden_fraction(self) -> float:
        return self.psi_forbidden / self.psi_total

    @property
    def available_fraction(self) -> float:
        return self.psi_available / self.psi_total


def system_report(sys: RFSystem, include_entities: bool = True) -> ConsumptionReport:
    """System-wide consumption spaces and the conservation check."""
    maps = compute_maps(sys)
    grid = maps.grid
    psi_total = sys.params.p_cmax * grid.cell_count
    psi_utilized = float(np.sum(maps.occupancy))
    psi_forbidden = float(np.sum(maps.liability))
    psi_available = float(np.sum(maps.opportunity))
    residual = abs(psi_utilized + psi_forbidden + psi_available - psi_total) / psi_total

    entities: dict[str, float] = {}
    if include_entities:
        for _, _, tx in sys.iter_transmitters():
            entities[tx.id] = _tx_consumed(sys, tx)
        for _, _, rx in sys.iter_receivers():
            entities[rx.id] = _rx_consumed(sys, rx)

    return ConsumptionReport(
        psi_total=psi_total,
        psi_utilized=psi_utilized,
        psi_forbidden=psi_forbidden,
        psi_available=psi_available,
        entity_consumption=entities,
        conservation_residual=residual,
    )
