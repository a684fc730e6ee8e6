import itertools
import random

import pytest

from ainfty.constructions import exterior_algebra, square_zero
from ainfty.families import FormField, Grid1D, Grid2D, GridError
from ainfty.forms import DT, FormCochain, FormMap
from ainfty.graded import MultiMap
from ainfty.square import (DiffHomotopy, SquareError, SquareFamily, classical_candidate, collapse,
                           constant_square, diff_homotopy_defect, hat_defect_is_zero,
                           hat_morphism_defect, random_square, square_homotopy)

from corpus import square_corpus

T_SAMPLES = [0, "1/4", "1/3", "1/2", 1]


@pytest.fixture(scope="module")
def homotopies():
    return [(name, sq) + square_homotopy(sq) for name, sq in square_corpus()]


def test_corpus_size():
    assert len(square_corpus()) >= 10


def test_collapse_is_maurer_cartan(homotopies):
    for name, sq, hat, GG, D in homotopies:
        assert hat_defect_is_zero(hat), name
        assert all(m <= 1 for m, n in hat.components()), name


def test_hat_transport_is_a_morphism(homotopies):
    for name, sq, hat, GG, D in homotopies:
        for n in range(1, hat.arity_cap + 1):
            assert hat_morphism_defect(GG, n).is_zero(), (name, n)


def test_differential_homotopy(homotopies):
    for name, sq, hat, GG, D in homotopies:
        for t in T_SAMPLES:
            for n in range(1, D.arity_cap + 1):
                assert diff_homotopy_defect(D, t, n).is_zero(), (name, t, n)


def test_edges_of_F(homotopies):
    # F_t at t = 0, 1 is transport along the bottom and top edges
    from ainfty.transport import TransportRequest, transport
    from ainfty.families import FamilyForm
    name, sq, hat, GG, D = homotopies[1]
    for t in (0, 1):
        cells = {i: sq.family.cells[(i, 0)].filter_parts(lambda n, m, s: not m & DT)
                 .map(lambda f, t=t: f.substitute("t", t))
                 for i in sq.grid.s.cell_indices()}
        edge = FamilyForm(sq.grid.s, sq.space, sq.arity_cap, cells)
        assert D.F_at(t).equal_maps(transport(TransportRequest(edge, 0, 1)))


def test_classical_candidate_in_arity_one(homotopies):
    nontrivial = 0
    for name, sq, hat, GG, D in homotopies:
        H, report = classical_candidate(D)
        assert report[1], name
        nontrivial += bool(D.Theta)
    assert nontrivial > 0


def test_perturbed_theta_is_detected(homotopies):
    name, sq, hat, GG, D = next(h for h in homotopies if h[4].Theta.get(2) is not None)
    V = D.source.space
    bump = MultiMap.from_entries(V, 2, -2, _some_entry(V))
    theta = dict(D.Theta)
    theta[2] = theta[2] + FormMap.constant(bump)
    bad = DiffHomotopy(D.source, D.target, D.F, theta)
    assert any(not diff_homotopy_defect(bad, t, n).is_zero()
               for t in T_SAMPLES for n in range(2, D.arity_cap + 1))


def _entries(V, arity, shift):
    """All basis entries ``|out| = sum |a_i| + shift``."""
    deg = dict(zip(V.labels, V.degrees))
    entries = {}
    for args in itertools.product(V.labels, repeat=arity):
        for out in V.labels:
            if deg[out] == sum(deg[a] for a in args) + shift:
                entries[args] = {out: 1}
    assert entries
    return entries


def _some_entry(V):
    return dict([next(iter(_entries(V, 2, -2).items()))])


def test_constant_square():
    A = exterior_algebra(2)
    sq = constant_square(A, Grid2D(Grid1D.uniform(2), Grid1D()))
    hat, GG, D = square_homotopy(sq)
    assert not D.Theta
    assert D.F_at("1/2").equal_maps(D.F_at(0))
    assert D.F[1] == FormMap.constant(MultiMap.identity(A.space))


def test_square_validation():
    A = square_zero((1, 1), 3)
    grid = Grid2D()
    with pytest.raises(GridError):
        SquareFamily(FormField.zero(Grid1D(), A.space, 1, 3))
    # a dt-part at the edges
    V = A.space
    mu = FormCochain(V, 1, 3, {2: FormMap.constant(A.mu(2))})
    shift = FormMap.constant(A.mu(2)).map_shift(DT)
    x = MultiMap.from_entries(V, 2, shift, dict([next(iter(_entries(V, 2, shift).items()))]))
    bad = FormCochain(V, 1, 3, {2: FormMap.constant(A.mu(2)) + FormMap.constant(x, DT)})
    with pytest.raises(SquareError):
        SquareFamily(FormField.constant(grid, bad))
    # not Maurer-Cartan
    with pytest.raises(SquareError):
        SquareFamily(FormField.constant(grid, _dense_product(V)))
    ok = SquareFamily(FormField.constant(grid, mu))
    hat = collapse(ok)
    assert hat_defect_is_zero(hat)


def _dense_product(V):
    # every admissible product set to one; not associative
    m = MultiMap.from_entries(V, 2, 0, _entries(V, 2, 0))
    return FormCochain(V, 1, 3, {2: FormMap.constant(m)})


def test_piecewise_in_t_is_rejected():
    rng = random.Random(7)
    A = square_zero((1, 1), 3)
    sq = random_square(rng, A, Grid2D(Grid1D(), Grid1D.uniform(2)))
    # globally polynomial data replicated on t-cells collapses fine
    collapse(sq)
    cells = dict(sq.family.cells)
    cells[(0, 1)] = cells[(0, 1)].map(lambda f: f.substitute("t", 0), 1)
    field = FormField(sq.grid, sq.space, 1, sq.arity_cap, cells)
    loose = SquareFamily(field, check=False)
    with pytest.raises(SquareError):
        collapse(loose)


def test_t_outside_interval():
    D = square_homotopy(constant_square(square_zero((1, 1), 3)))[2]
    with pytest.raises(GridError):
        D.F_at("3/2")
