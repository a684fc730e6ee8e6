"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import itertools
import random
import time
from contextlib import contextmanager

import numpy as np
import pytest

from ainfty.algebra import (AInfAlgebra, compose, identity_morphism, is_ainf, morphism_defect,
                            stasheff_defect)
from ainfty.constructions import exterior_algebra, random_interval_family, square_zero
from ainfty.families import FormField, Grid1D, Grid2D
from ainfty.graded import MultiMap, scalar
from ainfty.groups import (FiniteGroup, free_group_cohomology, group_cohomology_dim,
                           strictify_free)
from ainfty.hochschild import hh_dimension
from ainfty.interval import QuiverI, form, phi, phi_defect
from ainfty.scenarios import load_bundled
from ainfty.square import (classical_candidate, diff_homotopy_defect, hat_defect_is_zero,
                           hat_morphism_defect, square_homotopy)
from ainfty.transport import (TransportRequest, enumerate_level_trees, max_deviation, transport,
                              transport_oracle)

from corpus import algebra_corpus, family_corpus, square_corpus
from fields import random_field
from test_families import _filtered_data, check_jacobi, check_leibniz
from test_groups import _character_invariants, _free_oracle, _random_invertible, _reps
from test_hochschild import _classical_hh
from test_transport import brute_force_count

RESULTS = {}


@contextmanager
def criterion(number, title, limit=None):
    """Time the block, record the verdict and print one line."""
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        if ok and limit is not None and elapsed >= limit:
            ok = False
            title = f"{title} (over the {limit:g} s limit)"
        line = f"criterion {number:2d} {title}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f} s)"
        RESULTS[number] = line
        print(line)
    assert elapsed < limit if limit is not None else True, line


def test_01_stasheff_suite():
    with criterion(1, "Stasheff suite", limit=5):
        # construction counts towards the runtime limit
        algebra_corpus.cache_clear()
        corpus = algebra_corpus(3)
        assert len(corpus) >= 5
        names = dict(corpus)
        assert {"M2", "dual", "ext", "ainf"} <= set(names)
        assert not names["ainf"].mu(3).is_zero()
        for name, A in corpus:
            assert is_ainf(A), name
        M2 = names["M2"]
        table = M2.mu(2).table.copy()
        idx = tuple(int(i) for i in np.argwhere(table != 0)[0])
        table[idx] += 1
        mutant = AInfAlgebra(M2.space, {2: MultiMap(M2.space, 2, 0, table)}, 3)
        assert not stasheff_defect(mutant, 3).is_zero()


def test_02_transport_is_a_morphism():
    with criterion(2, "transport correctness", limit=60):
        family_corpus.cache_clear()
        corpus = family_corpus()
        assert len(corpus) >= 20
        for name, fam in corpus:
            assert fam.grid.ncells <= 4
            assert all(c.parts.get(1) is None or c.parts[1].strip("s").is_zero()
                       for c in fam.cells.values())
            F = transport(TransportRequest(fam, 0, 1))
            for n in range(1, F.arity_cap + 1):
                assert morphism_defect(F, n).is_zero(), (name, n)


def test_03_composition_and_inverse():
    with criterion(3, "composition and inverse"):
        pts = [scalar(0), scalar("2/7"), scalar(1)]
        for name, fam in family_corpus():
            T = {(a, b): transport(TransportRequest(fam, a, b)) for a in pts for b in pts}
            for r, s, t in itertools.product(pts, repeat=3):
                assert compose(T[(s, t)], T[(r, s)]).equal_maps(T[(r, t)]), (name, r, s, t)
            for p, q in itertools.product(pts, repeat=2):
                assert compose(T[(q, p)], T[(p, q)]).equal_maps(identity_morphism(T[(p, p)].source))


def test_04_oracle_agreement():
    with criterion(4, "oracle agreement"):
        for seed in range(4):
            rng = random.Random(100 + seed)
            A = exterior_algebra(3) if seed % 2 else square_zero((1, 1), 3)
            fam = random_interval_family(rng, A, Grid1D([0, "1/3", "3/4", 1]), s_degree=0)
            for p, q in ((0, 1), ("1/5", "7/8"), (1, 0)):
                req = TransportRequest(fam, p, q)
                assert max_deviation(transport(req), transport_oracle(req, 1e-3)) < 1e-8


def test_05_tree_counts():
    with criterion(5, "tree counts"):
        for i, n in itertools.product(range(1, 6), repeat=2):
            assert len(enumerate_level_trees(i, n)) == brute_force_count(i, n), (i, n)
        assert all(len(enumerate_level_trees(1, n)) == 1 for n in range(2, 6))
        assert len(enumerate_level_trees(2, 3)) == 2


@pytest.fixture(scope="module")
def squares():
    return [(name,) + square_homotopy(sq) for name, sq in square_corpus()]


def test_06_collapse(squares):
    with criterion(6, "collapse"):
        assert len(squares) >= 10
        for name, hat, GG, D in squares:
            assert hat_defect_is_zero(hat), name
            assert all(m <= 1 for m, _ in hat.components()), name


def test_07_differential_homotopy(squares):
    with criterion(7, "differential homotopy"):
        ts = [0, "1/4", "1/3", "1/2", 1]
        for name, hat, GG, D in squares:
            for n in range(1, D.arity_cap + 1):
                assert hat_morphism_defect(GG, n).is_zero(), (name, n)
                for t in ts:
                    assert diff_homotopy_defect(D, t, n).is_zero(), (name, t, n)
            assert classical_candidate(D)[1][1], name


def test_08_phi_suite():
    with criterion(8, "Phi suite"):
        Q = QuiverI()
        assert all(Q.axioms().values())
        val = phi([form([1], 1), form([1], 1)])
        assert list(val.coeffs) == [0, 0, scalar("1/2")]
        basis = [form([0] * j + [1], f) for f in (0, 1) for j in range(4)]
        for k in range(1, 5):
            for args in itertools.product(basis, repeat=k):
                assert phi_defect(list(args)).is_zero()


def test_09_dg_lie_axioms():
    with criterion(9, "dg Lie axioms"):
        rng = random.Random(9)
        grid = Grid2D(Grid1D.uniform(2), Grid1D())
        count = 0
        for _ in range(20):
            a, b, c = (rng.randint(-1, 2) for _ in range(3))
            x, y, z = (random_field(rng, d, grid) for d in (a, b, c))
            assert check_jacobi(x, y, z)
            assert check_leibniz(x, y) and check_leibniz(y, z)
            count += 3
        assert count >= 50


def test_10_gauge_suite():
    with criterion(10, "gauge suite"):
        for K in (1, 2, 3):
            A, lie, element = _filtered_data(K)
            zero = FormField.zero(lie.grid, A.space, 1, 3)
            alpha = lie.gauge_exp(element(0), zero, K)
            assert lie.mc_defect(alpha, K).is_zero()
            beta = lie.gauge_exp(element(0), alpha, K)
            assert lie.mc_defect(beta, K).is_zero()
            none = FormField.zero(lie.grid, A.space, 0, 3)
            assert lie.gauge_exp(none, alpha, K) == alpha
            assert lie.mc_path_check(element(0), alpha, K)["defect_zero"]


def test_11_cohomology():
    with criterion(11, "cohomology"):
        seen = set()
        for name, group, rep in _reps():
            seen.add(name.split("-")[0])
            assert group_cohomology_dim(group, rep, 0) == _character_invariants(group, rep)
            for p in (1, 2):
                assert group_cohomology_dim(group, rep, p) == 0, (name, p)
        assert seen == {"Z2", "Z3", "S3"}
        rng = random.Random(11)
        for r in (1, 2, 3):
            for _ in range(4):
                m = rng.randint(1, 3)
                mats = [_random_invertible(rng, m) for _ in range(r)]
                assert all(free_group_cohomology(mats, p) == _free_oracle(mats, p)
                           for p in range(3))
        names = dict(algebra_corpus(3))
        for key in ("dual", "M2"):
            assert all(hh_dimension(names[key], q) == _classical_hh(names[key], q)
                       for q in range(3))


def test_12_strictification():
    with criterion(12, "strictification", limit=120):
        z2 = load_bundled("z2_scenario").actions["swap"].scenario.strictify()
        assert z2["identity"] and all(z2["table"].values())
        assert len(z2["table"]) == 4
        free = strictify_free(load_bundled("free2_scenario").actions["loops"].model)
        assert free["identity"] and all(free["table"].values())
        assert len(free["table"]) == 25
