import itertools
import random
from math import factorial

import numpy as np
import pytest

from ainfty.algebra import (ArityError, compose, identity_morphism, is_morphism, linear_morphism,
                            morphism_defect)
from ainfty.constructions import (exterior_algebra, random_interval_family, square_zero)
from ainfty.families import FamilyForm, FormField, Grid1D, GridError, gauge_action
from ainfty.forms import FormCochain, FormMap
from ainfty.graded import MultiMap, scalar
from ainfty.transport import (LevelTree, TransportError, TransportRequest, enumerate_level_trees,
                              max_deviation, transport, transport_oracle, tree_term)

from corpus import family_corpus


# -- level trees -----------------------------------------------------------------

def _planar_trees(internal, leaves, max_unary):
    """Planar trees as nested tuples (``None`` is a leaf)."""
    if internal == 0:
        return [None] if leaves == 1 else []
    out = []
    for r in range(1, leaves + 1):
        if r == 1 and max_unary == 0:
            continue
        for split in _splits(internal - 1, r):
            for lsplit in _splits(leaves, r, positive=True):
                for children in _children(split, lsplit, max_unary - (r == 1)):
                    out.append(children)
    return out


def _splits(total, parts, positive=False):
    lo = 1 if positive else 0
    if parts == 0:
        return [()] if total == 0 else []
    return [c for c in itertools.product(range(lo, total + 1), repeat=parts) if sum(c) == total]


def _children(internals, leaves, max_unary):
    """Tuples of subtrees with the given sizes and a shared unary budget."""
    options = []

    def rec(k, acc, budget):
        if k == len(internals):
            options.append(tuple(acc))
            return
        for t in _planar_trees(internals[k], leaves[k], budget):
            rec(k + 1, acc + [t], budget - _unary_count(t))

    rec(0, [], max_unary)
    return options


def _unary_count(t):
    if t is None:
        return 0
    return (len(t) == 1) + sum(_unary_count(c) for c in t)


def _linear_extensions(tree):
    """Orderings of the internal nodes in which parents come first."""
    parent = {}
    ids = []

    def walk(t, par):
        if t is None:
            return
        me = len(ids)
        ids.append(me)
        parent[me] = par
        for c in t:
            walk(c, me)

    walk(tree, None)
    count = 0
    for perm in itertools.permutations(ids):
        pos = {v: k for k, v in enumerate(perm)}
        if all(parent[v] is None or pos[parent[v]] < pos[v] for v in ids):
            count += 1
    return count


def brute_force_count(i, n, d=0):
    return sum(_linear_extensions(t) for t in _planar_trees(i, n, d))


@pytest.mark.parametrize("i,n", [(i, n) for i in range(1, 6) for n in range(1, 6)])
def test_level_tree_counts_match_brute_force(i, n):
    assert len(enumerate_level_trees(i, n)) == brute_force_count(i, n)


@pytest.mark.parametrize("i,n,d", [(2, 2, 1), (3, 3, 1), (3, 2, 2), (4, 4, 2)])
def test_level_tree_counts_with_unary_nodes(i, n, d):
    assert len(enumerate_level_trees(i, n, d)) == brute_force_count(i, n, d)


def test_small_tree_counts():
    assert all(len(enumerate_level_trees(1, n)) == 1 for n in range(2, 6))
    assert len(enumerate_level_trees(2, 3)) == 2
    assert len(enumerate_level_trees(2, 4)) == 5
    assert enumerate_level_trees(1, 1) == []
    t = LevelTree(((2, 0), (3, 1)))
    assert (t.levels, t.leaves, t.unary) == (2, 4, 0)


def test_tree_sum_equals_transport():
    name, fam = [x for x in family_corpus() if x[0].startswith("ext4")][0]
    req = TransportRequest(fam, 0, "3/4")
    F = transport(req)
    for n in range(2, 5):
        total = MultiMap.zero(fam.space, n, 1 - n)
        for i in range(1, n):
            for tree in enumerate_level_trees(i, n):
                total = total + tree_term(req, tree)
        assert total == F.component(n)


# -- transport -------------------------------------------------------------------

@pytest.mark.parametrize("name,fam", family_corpus())
def test_transport_is_a_morphism(name, fam):
    F = transport(TransportRequest(fam, 0, 1))
    for n in range(1, F.arity_cap + 1):
        assert morphism_defect(F, n).is_zero()


@pytest.mark.parametrize("name,fam", family_corpus()[:12])
def test_composition_and_inverse(name, fam):
    pts = [scalar(0), scalar("1/7"), scalar("1/2"), scalar(1)]
    T = {(a, b): transport(TransportRequest(fam, a, b)) for a in pts for b in pts}
    for r, s, t in itertools.permutations(pts, 3):
        assert compose(T[(s, t)], T[(r, s)]).equal_maps(T[(r, t)])
    for p in pts:
        assert T[(p, p)].equal_maps(identity_morphism(T[(p, p)].source))


def test_second_component_is_minus_integral():
    fam = family_corpus()[1][1]
    F = transport(TransportRequest(fam, 0, 1))
    total = MultiMap.zero(fam.space, 2, -1)
    for k in fam.grid.cell_indices():
        a, b = fam.grid.cell(k)
        B2 = fam.cells[k].part(2).strip("s")
        prim = B2.antiderivative("s")
        total = total - (prim.substitute("s", b) - prim.substitute("s", a)).coefficient(0)
    assert F.component(2) == total


def test_constant_family_transports_to_identity():
    A = exterior_algebra(3)
    mu = FormCochain(A.space, 1, 3, {n: FormMap.constant(f) for n, f in A.maps.items()})
    fam = FamilyForm(Grid1D.uniform(3), A.space, 3, {k: mu for k in range(3)})
    assert transport(TransportRequest(fam, 0, 1)).equal_maps(identity_morphism(A))


def test_oracle_agreement_on_piecewise_constant_families():
    for seed in range(3):
        rng = random.Random(seed)
        A = exterior_algebra(3) if seed % 2 else square_zero((1, 1), 3)
        fam = random_interval_family(rng, A, Grid1D([0, "1/4", "2/3", 1]), s_degree=0)
        req = TransportRequest(fam, "1/8", "5/6")
        assert max_deviation(transport(req), transport_oracle(req, 1e-3)) < 1e-8
        back = TransportRequest(fam, "5/6", "1/8")
        assert max_deviation(transport(back), transport_oracle(back, 1e-3)) < 1e-8


def test_oracle_detects_wrong_sign():
    fam = family_corpus()[2][1]
    req = TransportRequest(fam, 0, 1)
    exact = transport(req)
    flipped = {n: -np.array(exact.component(n).table, dtype=float) for n in (2, 3)}
    flipped[1] = np.eye(fam.space.dim)
    assert max_deviation(exact, flipped) > 1e-3


def _unary_family():
    """``exp(s L) * mu`` for a square-zero linear ``L``; its unary one-form is ``-L``."""
    A = square_zero((1, 1), 3)
    V = A.space
    L = MultiMap.from_entries(V, 1, 0, {("x1",): {"x2": 1}})
    gamma = FormField.constant(Grid1D(), FormCochain(V, 0, 3, {1: FormMap.constant(L, 0, (1, 0))}))
    mu = FormField.constant(Grid1D(), FormCochain(V, 1, 3, {2: FormMap.constant(A.mu(2))}))
    field = gauge_action(gamma, mu)
    return A, L, FamilyForm(Grid1D(), V, 3, field.cells, unary_flat=False)


def test_unary_depth():
    A, L, fam = _unary_family()
    with pytest.raises(TransportError):
        transport(TransportRequest(fam, 0, 1))
    F = transport(TransportRequest(fam, 0, 1, unary_depth=1))
    assert is_morphism(F)
    expected = MultiMap.identity(A.space) + L
    assert F.component(1) == expected
    assert F.component(2).is_zero() and F.component(3).is_zero()
    assert F.equal_maps(transport(TransportRequest(fam, 0, 1, unary_depth=3)))


def test_request_validation():
    fam = family_corpus()[0][1]
    with pytest.raises(GridError):
        TransportRequest(fam, 0, "3/2")
    with pytest.raises(ArityError):
        TransportRequest(fam, 0, 1, arity_cap=fam.arity_cap + 1)
    broken = FamilyForm(fam.grid, fam.space, fam.arity_cap,
                        {k: c + c for k, c in fam.cells.items()})
    with pytest.raises(TransportError):
        transport(TransportRequest(broken, 0, 1))


def test_lower_cap_truncates():
    fam = [x for x in family_corpus() if x[0].startswith("ext4")][0][1]
    full = transport(TransportRequest(fam, 0, 1))
    low = transport(TransportRequest(fam, 0, 1, arity_cap=3))
    assert all(low.component(n) == full.component(n) for n in (1, 2, 3))
