"""Effect of the spatial sampling rate on quantified consumption.

Cell values are sampled at centroids, so coarse grids mis-place
transceivers by up to one hexagon side.  The worst-case placement mode
bounds that error: every transceiver is relocated to the vertex of its
containing hexagon that is least favorable for its link budget.  As the
hexagons shrink, the placement error vanishes and the quantified
transceiver-consumed share falls toward its true value while the
available share rises.
"""

import dataclasses
from pathlib import Path

from muse import SpectrumGrid, load_scenario, system_report

HERE = Path(__file__).parent

base = load_scenario(HERE / "scenarios" / "region_with_link.yaml")
base = dataclasses.replace(base, grid_spec=dataclasses.replace(base.grid_spec, worst_case_placement=True))

print(f"{'hex side m':>10} {'cells':>9} {'consumed %':>11} {'available %':>12}")
for side in (100.0, 50.0, 25.0, 10.0, 1.0):
    spec = dataclasses.replace(base.grid_spec, hex_side=side)
    swept = dataclasses.replace(base, grid_spec=spec)
    rep = system_report(swept, include_entities=False)
    consumed = 100.0 * (rep.psi_utilized + rep.psi_forbidden) / rep.psi_total
    print(f"{side:>10g} {SpectrumGrid(spec).region_count:>9} {consumed:>11.3f} {100 * rep.available_fraction:>12.3f}")

print(
    "\nAcross this sweep the consumed share falls and the available share"
    "\nrises as the hexagons shrink: the coarse-grid figures bound the true"
    "\nconsumption from above."
)
