"""
Turning a density map into sensing requirements
===============================================

A risk density over the cells is converted into hover seconds that add up
to the swarm's total operating budget. Cells with zero density get nothing.
"""

import numpy as np

from swarmsense.sensemap import allocate_hover_time, build_map

smap = build_map(4, 4, 1.68, 1.18)

# a made-up density: a hot spot in the lower right, nothing in the top row
rows, cols = np.mgrid[0:4, 0:4]
density = np.exp(-((rows - 3) ** 2 + (cols - 2.5) ** 2) / 3.0)
density[0, 1:] = 0.0

budget = 720.0  # seconds, e.g. 10 drones x 72 s of hovering
alloc = allocate_hover_time(density.ravel(), budget)

np.set_printoptions(precision=1, suppress=True)
print("hover seconds per cell:")
print(smap.as_grid(alloc.t))
print("total %.1f s of %.1f s budget" % (alloc.t.sum(), alloc.T))
