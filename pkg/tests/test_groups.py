import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from ainfty.algebra import identity_morphism
from ainfty.constructions import random_map, square_zero
from ainfty.graded import GradingError, as_object_array
from ainfty.groups import (BarComplex, FiniteGroup, GroupError, LinearAction, Representation,
                           average_invariant, free_group_cohomology, group_cohomology_dim,
                           reduce_word, strictify_free, words)
from ainfty.scenarios import load_bundled

GROUPS = {"Z2": FiniteGroup.cyclic(2), "Z3": FiniteGroup.cyclic(3),
          "S3": FiniteGroup.symmetric3()}


def _perm_matrix(label):
    p = [int(c) for c in label]
    m = [[0] * 3 for _ in range(3)]
    for i in range(3):
        m[p[i]][i] = 1
    return m


def _sign(label):
    p = [int(c) for c in label]
    inv = sum(p[i] > p[j] for i in range(3) for j in range(i + 1, 3))
    return -1 if inv % 2 else 1


def _reps():
    Z2, Z3, S3 = GROUPS["Z2"], GROUPS["Z3"], GROUPS["S3"]
    rot = np.array([[0, -1], [1, -1]], dtype=object)
    out = [
        ("Z2-trivial", Z2, Representation.trivial(Z2, 2)),
        ("Z2-sign", Z2, Representation(Z2, {"g0": [[1]], "g1": [[-1]]})),
        ("Z2-swap", Z2, Representation(Z2, {"g0": [[1, 0], [0, 1]], "g1": [[0, 1], [1, 0]]})),
        ("Z3-rotation", Z3, Representation(Z3, {"g0": np.eye(2, dtype=int).astype(object),
                                                "g1": rot, "g2": rot.dot(rot)})),
        ("Z3-regular", Z3, Representation(Z3, {f"g{k}": np.roll(np.eye(3, dtype=int), k, 0)
                                                for k in range(3)})),
        ("S3-sign", S3, Representation(S3, {g: [[_sign(g)]] for g in S3.labels})),
        ("S3-permutation", S3, Representation(S3, {g: _perm_matrix(g) for g in S3.labels})),
    ]
    return out


def _character_invariants(group, rep):
    # (1/|G|) sum_g tr(rho_g)
    total = sum(Fraction(int(np.trace(rep.matrices[g]))) for g in group.labels)
    return total / group.order


def test_group_validation():
    with pytest.raises(GroupError):
        FiniteGroup(["a", "b"], [["a", "a"], ["a", "b"]])
    with pytest.raises(GroupError):
        FiniteGroup(["e", "a"], [["e", "a"], ["a", "a"]])
    with pytest.raises(GroupError):
        FiniteGroup(["e", "a"], [["e", "x"], ["a", "e"]])
    with pytest.raises(GroupError):
        FiniteGroup(["e", "a", "b"], [["e", "a", "b"], ["a", "b", "e"], ["b", "b", "a"]])
    with pytest.raises(GroupError):
        Representation(GROUPS["Z2"], {"g0": [[1]], "g1": [[2]]})
    with pytest.raises(GroupError):
        Representation(GROUPS["Z2"], {"g0": [[1]]})
    S3 = GROUPS["S3"]
    assert S3.order == 6 and S3.identity == "012"
    assert all(S3.mul(g, S3.inverse(g)) == "012" for g in S3.labels)
    assert S3.mul("102", "021") != S3.mul("021", "102")


@pytest.mark.parametrize("name", sorted(GROUPS))
def test_bar_boundary_squares_to_zero(name):
    bar = BarComplex(GROUPS[name], 3)
    for q in range(2, 5 if name != "S3" else 4):
        assert not np.any(bar.boundary(q - 1).dot(bar.boundary(q)))


@pytest.mark.parametrize("name,group,rep", _reps(), ids=[r[0] for r in _reps()])
def test_finite_group_cohomology(name, group, rep):
    assert group_cohomology_dim(group, rep, 0) == rep.invariant_dimension()
    assert rep.invariant_dimension() == _character_invariants(group, rep)
    top = 2 if group.order * rep.dim > 6 else 3
    for p in range(1, top + 1):
        assert group_cohomology_dim(group, rep, p) == 0


def test_cohomology_errors():
    rep = Representation.trivial(GROUPS["Z2"])
    with pytest.raises(GroupError):
        group_cohomology_dim(GROUPS["Z2"], rep, -1)
    with pytest.raises(GroupError):
        group_cohomology_dim(GROUPS["Z2"], rep, 5, cap=3)
    with pytest.raises(GroupError):
        free_group_cohomology([], 0)


def _fraction_rank(rows):
    rows = [[Fraction(int(x)) for x in r] for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                f = rows[i][c] / rows[rank][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _free_oracle(mats, p):
    # crossed homomorphisms are free on the generators (dimension r m); the
    # coboundaries are the image of u -> (g_s u - u)_s
    m = len(mats[0])
    delta = []
    for g in mats:
        for i in range(m):
            delta.append([g[i][j] - (1 if i == j else 0) for j in range(m)])
    r = _fraction_rank(delta)
    return {0: m - r, 1: len(mats) * m - r}.get(p, 0)


def _random_invertible(rng, m):
    while True:
        a = [[rng.randint(-2, 2) for _ in range(m)] for _ in range(m)]
        if round(abs(np.linalg.det(np.array(a, dtype=float)))) == 1:
            return a


@pytest.mark.parametrize("r", [1, 2, 3])
def test_free_group_cohomology_matches_cokernel(r):
    rng = random.Random(r)
    for trial in range(6):
        m = rng.randint(1, 3)
        mats = [_random_invertible(rng, m) if rng.random() < 0.7 else np.eye(m, dtype=int).tolist()
                for _ in range(r)]
        dims = [free_group_cohomology(mats, p) for p in range(4)]
        assert dims == [_free_oracle(mats, p) for p in range(4)]
        # Euler characteristic of a free group of rank r
        assert dims[0] - dims[1] == m * (1 - r)


def test_average_invariant():
    A = square_zero((1, 1), 3)
    swap = as_object_array([[1, 0, 0], [0, 0, 1], [0, 1, 0]])
    act = LinearAction(GROUPS["Z2"], A.space, {"g0": np.eye(3, dtype=int), "g1": swap})
    assert act.preserves(A)
    f = random_map(random.Random(1), A.space, 2, -1, 0.8, 2)
    avg = average_invariant(f, act)
    assert act.act("g1", avg) == avg
    assert average_invariant(avg, act) == avg
    with pytest.raises((GroupError, GradingError)):
        LinearAction(GROUPS["Z2"], A.space, {"g0": np.eye(3, dtype=int),
                                            "g1": [[0, 1, 0], [1, 0, 0], [0, 0, 1]]})


def test_words():
    assert reduce_word("abBa") == "aa"
    assert reduce_word("aAbB") == ""
    assert words("ab", 1) == ["", "a", "b", "A", "B"]
    assert len(words("ab", 2)) == 1 + 4 + 12


def test_free_group_scenario_strictifies():
    act = load_bundled("free2_scenario").actions["loops"]
    res = strictify_free(act.model)
    assert res["identity"] and res["ok"]
    assert len(res["table"]) == 25
    F = res["representatives"]
    base = act.model.base
    # the action is not the trivial one and has genuinely nonlinear components
    assert not F["a"].equal_maps(identity_morphism(base))
    assert not F["a"].equal_maps(F["b"])
    assert any(not F[w].component(n).is_zero() for w in "ab" for n in (2, 3))


def test_finite_group_scenario_strictifies():
    act = load_bundled("z2_scenario").actions["swap"]
    sc = act.scenario
    assert all(v for v in sc.path_report().values() if isinstance(v, bool))
    res = sc.strictify()
    assert res["identity"] and res["ok"]
    assert set(res["table"]) == {(g, h) for g in ("g0", "g1") for h in ("g0", "g1")}
    Fg = res["representatives"]["g1"]
    assert any(not Fg.component(n).is_zero() for n in (2, 3))
    assert not sc.algebra(0) == sc.algebra(1)
    # the swap is a strict symmetry of alpha1 only
    assert sc.action.preserves(sc.algebra(1))
    assert not sc.action.preserves(sc.algebra(0))


def test_broken_loop_is_rejected():
    from ainfty.families import FamilyForm
    from ainfty.groups import FreeGroupModel
    act = load_bundled("free2_scenario").actions["loops"]
    model = act.model
    fam = model.loops["a"].family
    broken = FamilyForm(fam.grid, fam.space, fam.arity_cap,
                        {k: c + c for k, c in fam.cells.items()})
    with pytest.raises(GroupError):
        FreeGroupModel(model.base, {"a": (broken, model.loops["a"].rho)})
    with pytest.raises(GroupError):
        FreeGroupModel(model.base, {"e": (fam, model.loops["a"].rho)})
