"""Random form fields for property tests."""

import random

from ainfty.constructions import random_poly_map
from ainfty.families import FormField, Grid1D, Grid2D
from ainfty.forms import DS, DT, FormCochain, form_degree
from ainfty.graded import GradedSpace

SPACE = GradedSpace(["1", "x", "y"], [0, 1, -1])


def random_field(rng: random.Random, degree: int, grid=None, cap: int = 4, arities=(1, 2),
                 density: float = 0.3) -> FormField:
    grid = grid or Grid2D()
    two_d = isinstance(grid, Grid2D)
    masks = (0, DS, DT, DS | DT) if two_d else (0, DS)
    cells = {}
    for idx in grid.cell_indices():
        parts = {}
        for n in arities:
            for mask in masks:
                if rng.random() < 0.5:
                    continue
                shift = degree - form_degree(mask) - n + 1
                f = random_poly_map(rng, SPACE, n, shift, mask, 1, 1 if two_d else 0, density, 2)
                parts[n] = parts[n] + f if n in parts else f
        cells[idx] = FormCochain(SPACE, degree, cap, parts)
    return FormField(grid, SPACE, degree, cap, cells)
