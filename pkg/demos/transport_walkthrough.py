"""Transport along a random family over [0, 1] and check the group-like laws."""

import random

from ainfty.algebra import compose, identity_morphism, morphism_defect
from ainfty.constructions import exterior_algebra, random_interval_family
from ainfty.families import Grid1D
from ainfty.transport import (TransportRequest, enumerate_level_trees, max_deviation, transport,
                              transport_oracle)


def main():
    A = exterior_algebra(3)
    fam = random_interval_family(random.Random(4), A, Grid1D([0, "1/3", 1]), s_degree=0)
    print("level trees with 2 nodes and 4 leaves:", len(enumerate_level_trees(2, 4)))

    F = transport(TransportRequest(fam, 0, 1))
    for n in range(1, F.arity_cap + 1):
        print(f"F^{n}: {int((F.component(n).table != 0).sum())} nonzero entries,",
              "defect zero" if morphism_defect(F, n).is_zero() else "defect NONZERO")

    half = transport(TransportRequest(fam, 0, "1/2"))
    rest = transport(TransportRequest(fam, "1/2", 1))
    print("F(1/2 -> 1) o F(0 -> 1/2) = F(0 -> 1):", compose(rest, half).equal_maps(F))
    back = transport(TransportRequest(fam, 1, 0))
    print("F(1 -> 0) o F(0 -> 1) = id:", compose(back, F).equal_maps(identity_morphism(F.source)))

    req = TransportRequest(fam, 0, 1)
    print(f"max deviation from the RK4 oracle: {max_deviation(F, transport_oracle(req, 1e-3)):.2e}")


if __name__ == "__main__":
    main()
