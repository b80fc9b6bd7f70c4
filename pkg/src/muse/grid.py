"""Discretization of a region x time horizon x frequency range into
unit spectrum spaces.

Layout rules (deterministic, row-major):

* Hexagons are regular with circumradius ``hex_side`` and a vertex at the
  top ("pointy-top"): vertical extent 2*s, horizontal extent sqrt(3)*s.
* Row i sits at y = 1.5*s*i; odd rows are shifted left by sqrt(3)*s/2.
* A hexagon belongs to the grid iff its closed bounding box overlaps the
  closed region rectangle [0, W] x [0, H].  Boundary-clipped hexagons
  still carry weight 1.
* Region indices run row-major: row 0 left to right, then row 1, ...

Each cell's area weight is one unit region regardless of hex_side, so the
total spectrum space is p_cmax * A * T * B; multiply by ``hex_area`` for
physical square meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

__all__ = [
    "Band",
    "GridSpec",
    "Cell",
    "SpectrumGrid",
    "tessellate",
    "total_spectrum_space",
]

SQRT3 = math.sqrt(3.0)

# Vertex bearings of a pointy-top hexagon, counterclockwise from the top.
_VERTEX_ANGLES = tuple(math.pi / 2.0 + k * math.pi / 3.0 for k in range(6))


@dataclass(frozen=True)
class Band:
    center_hz: float
    bandwidth_hz: float


@dataclass(frozen=True)
class GridSpec:
    region_width: float
    region_height: float
    hex_side: float
    time_quantum: float = 1.0
    horizon: int = 1
    bands: tuple[Band, ...] = (Band(600e6, 6e6),)
    sample_point_policy: str = "centroid"  # "centroid" | "offset"
    sample_offset: tuple[float, float] | None = None
    worst_case_placement: bool = False

    def __post_init__(self):
        for name in ("region_width", "region_height", "hex_side", "time_quantum"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.region_width > 0.0 and self.region_height > 0.0):
            raise ValueError("region dimensions must be positive")
        if not self.hex_side > 0.0:
            raise ValueError("hex_side must be positive")
        if self.horizon < 1:
            raise ValueError("horizon must be at least one time quantum")
        if not self.time_quantum > 0.0:
            raise ValueError("time_quantum must be positive")
        if len(self.bands) == 0:
            raise ValueError("at least one frequency band is required")
        if self.sample_point_policy not in ("centroid", "offset"):
            raise ValueError(f"unknown sample point policy {self.sample_point_policy!r}")
        if self.sample_point_policy == "offset":
            if self.sample_offset is None:
                raise ValueError("offset sample policy requires sample_offset")
            if not _point_in_hex(self.sample_offset[0], self.sample_offset[1], self.hex_side):
                raise ValueError("sample_offset falls outside the unit hexagon")

    @property
    def band_count(self) -> int:
        return len(self.bands)

    @property
    def hex_area(self) -> float:
        return 1.5 * SQRT3 * self.hex_side ** 2


@dataclass(frozen=True)
class Cell:
    """One unit spectrum space: a region hexagon in one time quantum and band."""

    region_index: int
    time_index: int
    band_index: int
    centroid: tuple[float, float]
    sample_point: tuple[float, float]


def _point_in_hex(dx: float, dy: float, side: float, tol: float = 0.0) -> bool:
    """True if the offset (dx, dy) from a centroid lies in its pointy-top hexagon."""
    return (
        abs(dx) <= SQRT3 * side / 2.0 + tol
        and abs(dx) / SQRT3 + abs(dy) <= side + tol
    )


class SpectrumGrid:
    """Materialized tessellation: centroids, sample points and index math."""

    def __init__(self, spec: GridSpec):
        s = spec.hex_side
        if spec.region_width < SQRT3 * s or spec.region_height < 2.0 * s:
            raise ValueError(
                "degenerate grid: region smaller than one hexagon "
                f"({spec.region_width} x {spec.region_height} m, hex_side {s} m)"
            )
        self.spec = spec
        col_pitch = SQRT3 * s
        row_pitch = 1.5 * s
        nrows = math.floor((spec.region_height + s) / row_pitch) + 1

        self._row_offset = np.empty(nrows)
        self._row_jmin = np.empty(nrows, dtype=np.int64)
        counts = np.empty(nrows, dtype=np.int64)
        for i in range(nrows):
            off = 0.0 if i % 2 == 0 else -0.5 * col_pitch
            j_min = math.ceil((-0.5 * col_pitch - off) / col_pitch)
            j_max = math.floor((spec.region_width + 0.5 * col_pitch - off) / col_pitch)
            self._row_offset[i] = off
            self._row_jmin[i] = j_min
            counts[i] = j_max - j_min + 1

        self._row_counts = counts
        self._row_start = np.concatenate(([0], np.cumsum(counts)))
        self.region_count = int(self._row_start[-1])

        centroids = np.empty((self.region_count, 2))
        for i in range(nrows):
            lo, hi = self._row_start[i], self._row_start[i + 1]
            js = np.arange(self._row_jmin[i], self._row_jmin[i] + counts[i])
            centroids[lo:hi, 0] = self._row_offset[i] + col_pitch * js
            centroids[lo:hi, 1] = row_pitch * i
        self.centroids = centroids
        self.centroids.setflags(write=False)

        if spec.sample_point_policy == "centroid":
            self.sample_points = centroids
        else:
            ox, oy = spec.sample_offset
            pts = centroids + np.array([ox, oy])
            pts.setflags(write=False)
            self.sample_points = pts

        self._kdtree = None

    # -- dimensions ------------------------------------------------------

    @property
    def horizon(self) -> int:
        return self.spec.horizon

    @property
    def band_count(self) -> int:
        return self.spec.band_count

    @property
    def cell_count(self) -> int:
        return self.region_count * self.horizon * self.band_count

    @property
    def row_count(self) -> int:
        return len(self._row_counts)

    def row_of(self, region_index: int) -> int:
        return int(np.searchsorted(self._row_start, region_index, side="right") - 1)

    def cell_index(self, region_index: int, time_index: int, band_index: int) -> int:
        """Flat index in canonical order: region-major, then time, then band."""
        return (region_index * self.horizon + time_index) * self.band_count + band_index

    # -- geometry --------------------------------------------------------

    def hex_vertices(self, region_index: int) -> np.ndarray:
        cx, cy = self.centroids[region_index]
        s = self.spec.hex_side
        return np.array([(cx + s * math.cos(a), cy + s * math.sin(a)) for a in _VERTEX_ANGLES])

    def locate(self, point) -> int:
        """Region index of the hexagon containing the point.

        Points on a shared edge resolve to the lowest region index.
        Raises ValueError for points outside the tessellated area.
        """
        x, y = float(point[0]), float(point[1])
        s = self.spec.hex_side
        col_pitch = SQRT3 * s
        i0 = int(round(y / (1.5 * s)))
        tol = 1e-9 * s
        hits = []
        for i in range(max(0, i0 - 1), min(self.row_count, i0 + 2)):
            off = self._row_offset[i]
            j0 = int(round((x - off) / col_pitch))
            jmin = int(self._row_jmin[i])
            jmax = jmin + int(self._row_counts[i]) - 1
            for j in range(max(jmin, j0 - 1), min(jmax, j0 + 1) + 1):
                cx = off + col_pitch * j
                cy = 1.5 * s * i
                if _point_in_hex(x - cx, y - cy, s, tol):
                    hits.append(int(self._row_start[i]) + (j - jmin))
        if not hits:
            raise ValueError(f"point {(x, y)} outside the tessellated area")
        return min(hits)

    def neighbors(self, region_index: int) -> list[int]:
        """Indices of edge-sharing hexagons (up to six), ascending."""
        if self._kdtree is None:
            from scipy.spatial import cKDTree

            self._kdtree = cKDTree(self.centroids)
        pitch = SQRT3 * self.spec.hex_side
        found = self._kdtree.query_ball_point(self.centroids[region_index], r=1.001 * pitch)
        return sorted(i for i in found if i != region_index)

    # -- cells -----------------------------------------------------------

    def cell(self, region_index: int, time_index: int = 0, band_index: int = 0) -> Cell:
        if not 0 <= region_index < self.region_count:
            raise IndexError(f"region index {region_index} out of range")
        if not 0 <= time_index < self.horizon:
            raise IndexError(f"time index {time_index} out of range")
        if not 0 <= band_index < self.band_count:
            raise IndexError(f"band index {band_index} out of range")
        return Cell(
            region_index=region_index,
            time_index=time_index,
            band_index=band_index,
            centroid=tuple(self.centroids[region_index]),
            sample_point=tuple(self.sample_points[region_index]),
        )

    def cells(self) -> Iterator[Cell]:
        for chi in range(self.region_count):
            for tau in range(self.horizon):
                for nu in range(self.band_count):
                    yield self.cell(chi, tau, nu)


def tessellate(spec: GridSpec) -> list[Cell]:
    """All unit spectrum spaces of the grid, in canonical order."""
    return list(SpectrumGrid(spec).cells())


def total_spectrum_space(spec: GridSpec, params) -> float:
    """Maximum consumable spectrum: p_cmax * A * T * B (unit-region weights)."""
    grid = SpectrumGrid(spec)
    return params.p_cmax * grid.region_count * spec.horizon * spec.band_count
