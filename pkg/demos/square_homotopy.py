"""From a square of structures to a homotopy between the two edge transports."""

import random

from ainfty.constructions import square_zero
from ainfty.families import Grid1D, Grid2D
from ainfty.square import (classical_candidate, diff_homotopy_defect, hat_defect_is_zero,
                           hat_morphism_defect, random_square, square_homotopy)


def main():
    A = square_zero((1, 1), 3)
    sq = random_square(random.Random(3), A, Grid2D(Grid1D.uniform(2), Grid1D()))
    hat, GG, D = square_homotopy(sq)
    print("collapsed family components (m, n):", hat.components())
    print("collapsed family is Maurer-Cartan:", hat_defect_is_zero(hat))
    print("GG is a morphism:", all(hat_morphism_defect(GG, n).is_zero() for n in (1, 2, 3)))
    for t in (0, "1/3", 1):
        ok = all(diff_homotopy_defect(D, t, n).is_zero() for n in (1, 2, 3))
        print(f"differential homotopy relation at t = {t}:", ok)
    _, report = classical_candidate(D)
    print("integrated Theta is a homotopy, by level:", report)


if __name__ == "__main__":
    main()
