"""Seeded test data shared by the module tests and the acceptance suite."""

import random
from functools import lru_cache

from ainfty.constructions import (acyclic_dga, dual_numbers, exterior_algebra, matrix_algebra,
                                  random_ainf, random_interval_family, square_zero,
                                  upper_triangular)
from ainfty.families import Grid1D, Grid2D
from ainfty.square import random_square


@lru_cache(maxsize=None)
def algebra_corpus(cap=3):
    """Named algebras: ungraded ones, graded dgas and a genuine A-infinity example."""
    ext = exterior_algebra(cap)
    return (
        ("M2", matrix_algebra(2, cap)),
        ("dual", dual_numbers(cap)),
        ("upper", upper_triangular(cap)),
        ("ext", ext),
        ("acyclic", acyclic_dga(cap)),
        ("sqzero", square_zero((1, 1), cap)),
        ("ainf", random_ainf(random.Random(11), ext, density=0.6)),
    )


def graded_bases(cap=3):
    """Algebras that admit nonconstant families (they have negative-shift maps)."""
    names = {"ext", "acyclic", "sqzero", "ainf"}
    return [(n, A) for n, A in algebra_corpus(cap) if n in names]


UNEVEN = {1: [0, 1], 2: [0, "1/3", 1], 3: [0, "1/3", "1/2", 1], 4: [0, "1/5", "1/3", "3/4", 1]}


@lru_cache(maxsize=None)
def family_corpus(count=24):
    """``count`` random Maurer-Cartan families on grids of 1 to 4 cells."""
    out = []
    bases = graded_bases(3) + [("ext4", exterior_algebra(4))]
    for k in range(count):
        rng = random.Random(1000 + k)
        name, A = bases[k % len(bases)]
        cells = 1 + k % 4
        if name == "ext4":
            grid = Grid1D.uniform(min(cells, 2))
        elif k % 3 == 0:
            grid = Grid1D(UNEVEN[cells])
        else:
            grid = Grid1D.uniform(cells)
        out.append((f"{name}-{k}", random_interval_family(rng, A, grid, s_degree=1 + k % 2)))
    return tuple(out)


@lru_cache(maxsize=None)
def square_corpus(count=10):
    out = []
    bases = graded_bases(3)
    for k in range(count):
        rng = random.Random(2000 + k)
        name, A = bases[k % len(bases)]
        grid = Grid2D(Grid1D.uniform(1 + k % 2), Grid1D())
        out.append((f"{name}-{k}", random_square(rng, A, grid)))
    return tuple(out)
