import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ainfty.graded import GradingError, scalar
from ainfty.interval import (QuiverI, TensorDGA, TensorElement, form, interval_forms, phi,
                             phi_defect, simplex_integral)

from corpus import algebra_corpus

BASIS = [form([0] * j + [1], f) for f in (0, 1) for j in range(4)]


def test_quiver_axioms():
    assert QuiverI().axioms() == {"associative": True, "d_squared_zero": True, "leibniz": True}


def test_quiver_algebra_is_a_dga():
    from ainfty.algebra import is_ainf
    assert is_ainf(QuiverI().algebra(4))
    assert is_ainf(QuiverI().algebra(4, differential_sign=-1))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_phi_is_a_morphism_on_monomials(k):
    for args in itertools.product(BASIS, repeat=k):
        assert phi_defect(list(args)).is_zero(), [a.terms for a in args]


_poly = st.lists(st.integers(-3, 3), min_size=1, max_size=4)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(_poly, st.integers(0, 1)), min_size=1, max_size=4))
def test_phi_is_a_morphism_on_polynomials(data):
    args = [form(p, f) for p, f in data]
    assert phi_defect(args).is_zero()


def test_phi_values():
    h = QuiverI().space.index["h"]
    u0, u1 = QuiverI().space.index["u0"], QuiverI().space.index["u1"]
    dt = form([1], 1)
    assert phi([dt, dt]).coeffs[h] == scalar("1/2")
    assert phi([dt, dt, dt]).coeffs[h] == scalar("1/6")
    v = phi([form([2, 3])]).coeffs
    assert (v[u0], v[u1], v[h]) == (2, 5, 0)
    assert phi([form([0, 0, 1], 1)]).coeffs[h] == scalar("1/3")
    assert phi([form([1]), dt]).is_zero()
    with pytest.raises(GradingError):
        phi([])


def _simplex_monomial(exps):
    # int over 1 >= t_1 >= ... >= t_k >= 0 of prod t_i^a_i, integrating t_k first
    out = Fraction(1)
    for m in range(len(exps)):
        out /= sum(a + 1 for a in exps[m:])
    return out


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=5))
def test_simplex_integral_of_monomials(exps):
    polys = [[0] * a + [1] for a in exps]
    assert simplex_integral([[scalar(c) for c in p] for p in polys]) == _simplex_monomial(exps)


def _random_element(rng, space, degree):
    terms = {}
    for i, d in enumerate(space.degrees):
        for f in (0, 1):
            if f + d == degree and rng.random() < 0.7:
                for j in range(rng.randint(1, 2)):
                    terms[(f, rng.randint(0, 2), i)] = rng.randint(-2, 2)
    return TensorElement(space, terms, degree)


@pytest.mark.parametrize("name", ["dual", "ext", "acyclic", "ainf"])
def test_tensor_structure_is_ainfinity(name):
    B = dict(algebra_corpus(3))[name]
    T = TensorDGA(B)
    rng = random.Random(3)
    degrees = sorted(set(B.space.degrees) | {d + 1 for d in B.space.degrees})
    checked = 0
    for n in range(1, 4):
        for _ in range(25):
            args = [_random_element(rng, B.space, rng.choice(degrees)) for _ in range(n)]
            if any(a.is_zero() for a in args):
                continue
            assert T.stasheff_residual(args).is_zero()
            checked += 1
    assert checked > 20


def test_interval_forms_differential():
    F = interval_forms()
    t2 = form([0, 0, 1])
    assert F.mu(1, [t2]) == form([0, 2], 1)
    assert F.mu(1, [form([1], 1)]).is_zero()
