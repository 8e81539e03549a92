import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for `import oracles`

from terragp import TerrainClassParams, TerrainGrid


def make_grid(width, height, class_of, energy, classes, cell_size=1.0, slope=None):
    """Terse grid builder for hand-written fixtures."""
    table = [
        TerrainClassParams(class_id=i, name=f"c{i}", prior_mean=p, signal_std=sf, length_scale=sd)
        for i, (p, sf, sd) in enumerate(classes)
    ]
    grid = TerrainGrid(
        width=width,
        height=height,
        cell_size=cell_size,
        class_count=len(table),
        class_of=np.asarray(class_of, dtype=np.int32),
        energy_true=np.asarray(energy, dtype=np.float64),
        slope=None if slope is None else np.asarray(slope, dtype=np.float64),
    )
    return grid, table


@pytest.fixture
def two_band_grid():
    """6x6, top half class 0 at 50 J/m, bottom half class 1 at 10 J/m."""
    class_of = [0] * 18 + [1] * 18
    energy = [50.0] * 18 + [10.0] * 18
    return make_grid(6, 6, class_of, energy, [(50.0, 5.0, 2.0), (10.0, 2.0, 2.0)])
