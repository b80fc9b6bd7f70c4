import math

import numpy as np
import pytest

from muse import Band, GridSpec, SpectrumGrid, tessellate, total_spectrum_space

from helpers import reference_grid, reference_params

SQRT3 = math.sqrt(3.0)


def independent_region_count(width, height, side):
    """Count lattice hexagons overlapping the region by direct enumeration."""
    total = 0
    i = 0
    while 1.5 * side * i - side <= height:
        y = 1.5 * side * i
        if y + side >= 0.0:
            off = 0.0 if i % 2 == 0 else -SQRT3 * side / 2.0
            j = math.ceil((-SQRT3 * side / 2.0 - off) / (SQRT3 * side)) - 2
            while True:
                x = off + SQRT3 * side * j
                if x - SQRT3 * side / 2.0 > width:
                    break
                if x + SQRT3 * side / 2.0 >= 0.0:
                    total += 1
                j += 1
        i += 1
    return total


def test_reference_region_count():
    grid = SpectrumGrid(reference_grid(100.0))
    assert grid.region_count == 676


def test_cell_count_product_rule():
    spec = reference_grid(100.0, horizon=2, bands=(Band(6e8, 6e6), Band(6.1e8, 6e6), Band(6.2e8, 6e6)))
    grid = SpectrumGrid(spec)
    assert grid.cell_count == 676 * 2 * 3
    assert len(tessellate(spec)) == grid.cell_count


@pytest.mark.parametrize("side", [50.0, 100.0, 137.0, 230.0])
def test_count_matches_independent_enumeration(side):
    grid = SpectrumGrid(reference_grid(side))
    assert grid.region_count == independent_region_count(4300.0, 3700.0, side)


def test_halving_side_roughly_quadruples_count():
    a100 = SpectrumGrid(reference_grid(100.0)).region_count
    a50 = SpectrumGrid(reference_grid(50.0)).region_count
    assert abs(a50 / a100 - 4.0) < 0.4


def test_deterministic_tessellation():
    a = SpectrumGrid(reference_grid(100.0))
    b = SpectrumGrid(reference_grid(100.0))
    assert np.array_equal(a.centroids, b.centroids)
    assert np.array_equal(a.sample_points, b.sample_points)
    cells = tessellate(reference_grid(100.0))
    assert [c.region_index for c in cells[:3]] == [0, 1, 2]


def test_total_spectrum_space_values():
    params = reference_params()
    assert total_spectrum_space(reference_grid(100.0), params) == pytest.approx(676.0, rel=1e-12)
    spec = reference_grid(100.0, horizon=2, bands=(Band(6e8, 6e6),) * 3)
    assert total_spectrum_space(spec, params) == pytest.approx(4056.0, rel=1e-12)

    class HalfWatt:
        p_cmax = 0.5

    ten_cells = GridSpec(region_width=690.0, region_height=590.0, hex_side=100.0)
    assert SpectrumGrid(ten_cells).region_count == 25
    assert total_spectrum_space(ten_cells, HalfWatt()) == pytest.approx(12.5, rel=1e-12)


def test_degenerate_region_rejected():
    with pytest.raises(ValueError, match="degenerate grid"):
        SpectrumGrid(GridSpec(region_width=150.0, region_height=150.0, hex_side=100.0))


def test_locate_and_vertices():
    grid = SpectrumGrid(reference_grid(100.0))
    for chi in (0, 137, 675):
        assert grid.locate(grid.centroids[chi]) == chi
        v = grid.hex_vertices(chi)
        d = np.hypot(v[:, 0] - grid.centroids[chi][0], v[:, 1] - grid.centroids[chi][1])
        assert np.allclose(d, 100.0, rtol=1e-12)
    with pytest.raises(ValueError):
        grid.locate((1e6, 1e6))


def test_locate_fuzz_region_and_boundaries():
    from muse.grid import _point_in_hex

    rng = np.random.default_rng(0)
    for side in (37.0, 100.0):
        grid = SpectrumGrid(reference_grid(side))
        pts = np.column_stack([rng.uniform(0, 4300, 2000), rng.uniform(0, 3700, 2000)])
        for p in pts:
            c = grid.centroids[grid.locate(p)]
            assert _point_in_hex(p[0] - c[0], p[1] - c[1], side, 1e-9 * side)
        # vertices sit on shared corners; locate must resolve them without error
        for chi in rng.integers(0, grid.region_count, 50):
            for p in grid.hex_vertices(int(chi)):
                if 0 <= p[0] <= 4300 and 0 <= p[1] <= 3700:
                    c = grid.centroids[grid.locate(p)]
                    assert _point_in_hex(p[0] - c[0], p[1] - c[1], side, 1e-6 * side)


def test_sample_point_policies():
    spec = reference_grid(100.0, sample_point_policy="offset", sample_offset=(30.0, -20.0))
    grid = SpectrumGrid(spec)
    assert np.allclose(grid.sample_points - grid.centroids, [30.0, -20.0])
    with pytest.raises(ValueError, match="outside the unit hexagon"):
        reference_grid(100.0, sample_point_policy="offset", sample_offset=(100.0, 100.0))
    with pytest.raises(ValueError):
        reference_grid(100.0, sample_point_policy="offset")


def test_neighbors_share_edges():
    grid = SpectrumGrid(reference_grid(100.0))
    interior = grid.locate((2000.0, 2000.0))
    nb = grid.neighbors(interior)
    assert len(nb) == 6
    pitch = SQRT3 * 100.0
    for other in nb:
        d = math.hypot(*(grid.centroids[other] - grid.centroids[interior]))
        assert d == pytest.approx(pitch, rel=1e-9)
    corner_nb = grid.neighbors(0)
    assert 2 <= len(corner_nb) <= 4


def test_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(region_width=0.0, region_height=100.0, hex_side=10.0)
    with pytest.raises(ValueError):
        reference_grid(100.0, horizon=0)
    with pytest.raises(ValueError):
        reference_grid(100.0, bands=())
    with pytest.raises(ValueError):
        reference_grid(-5.0)
