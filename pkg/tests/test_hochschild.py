import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ainfty.algebra import stasheff_defect
from ainfty.constructions import (dual_numbers, matrix_algebra, random_ainf, random_map,
                                  square_zero, upper_triangular)
from ainfty.graded import GradedSpace, GradingError, MultiMap
from ainfty.hochschild import circle, gbracket, hh_dimension, hochschild_differential

V = GradedSpace(["a", "b", "c"], [0, 1, -1])


def _maps(seed):
    rng = random.Random(seed)
    out = []
    for _ in range(3):
        arity = rng.randint(1, 2)
        shift = rng.randint(-1, 1)
        out.append(random_map(rng, V, arity, shift, 0.6, 2))
    return out


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_bracket_graded_antisymmetric(seed):
    f, g, _ = _maps(seed)
    sign = -1 if (f.degree * g.degree) % 2 else 1
    assert gbracket(f, g) == -sign * gbracket(g, f)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_pre_lie_identity(seed):
    f, g, h = _maps(seed)
    assoc = lambda x, y, z: circle(circle(x, y), z) - circle(x, circle(y, z))
    sign = -1 if (g.degree * h.degree) % 2 else 1
    assert assoc(f, g, h) == sign * assoc(f, h, g)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_jacobi(seed):
    f, g, h = _maps(seed)
    e = lambda x, y: -1 if (x.degree * y.degree) % 2 else 1
    lhs = gbracket(f, gbracket(g, h))
    rhs = gbracket(gbracket(f, g), h) + e(f, g) * gbracket(g, gbracket(f, h))
    assert lhs == rhs


def test_mu_squared_is_stasheff():
    A = random_ainf(random.Random(3), square_zero((1, 1), 3), density=0.7)
    for n in range(1, 4):
        total = MultiMap.zero(A.space, n, 3 - n)
        for k in range(1, n + 1):
            j = n - k + 1
            if k in A.maps and j in A.maps:
                total = total + circle(A.maps[k], A.maps[j])
        assert total == stasheff_defect(A, n)


def test_differential_squares_to_zero():
    A = upper_triangular(4)
    rng = random.Random(2)
    f = random_map(rng, A.space, 2, 0, 0.7, 2)
    once = hochschild_differential(f, A)
    twice = hochschild_differential(once, A)
    assert all(m.is_zero() for m in twice.values())


# -- independent oracle: the classical unsigned Hochschild complex ---------------

def _rank(rows):
    rows = [list(r) for r in rows if any(r)]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


def _classical_delta(A, n):
    """Matrix of ``delta: Hom(A^n, A) -> Hom(A^{n+1}, A)`` in elementary coordinates."""
    d = A.space.dim
    m = A.mu(2).table
    mult = lambda x, y: [Fraction(int(m[o, x, y].numerator), int(m[o, x, y].denominator))
                         for o in range(d)]
    src = [(o, ins) for o in range(d) for ins in itertools.product(range(d), repeat=n)]
    dst = [(o, ins) for o in range(d) for ins in itertools.product(range(d), repeat=n + 1)]
    di = {k: i for i, k in enumerate(dst)}
    cols = []
    for o, ins in src:
        col = [Fraction(0)] * len(dst)
        f = lambda args: {o: Fraction(1)} if tuple(args) == ins else {}
        for args in itertools.product(range(d), repeat=n + 1):
            acc = [Fraction(0)] * d
            for k, c in f(args[1:]).items():
                for out, v in enumerate(mult(args[0], k)):
                    acc[out] += c * v
            for i in range(n):
                for ab, v in enumerate(mult(args[i], args[i + 1])):
                    if v:
                        for k, c in f(args[:i] + (ab,) + args[i + 2:]).items():
                            acc[k] += (-1) ** (i + 1) * v * c
            for k, c in f(args[:-1]).items():
                for out, v in enumerate(mult(k, args[-1])):
                    acc[out] += (-1) ** (n + 1) * c * v
            for out in range(d):
                if acc[out]:
                    col[di[(out, args)]] += acc[out]
        cols.append(col)
    return cols


def _classical_hh(A, q):
    dim_q = A.space.dim ** (q + 1)
    out_rank = _rank(_classical_delta(A, q))
    in_rank = _rank(_classical_delta(A, q - 1)) if q > 0 else 0
    return dim_q - out_rank - in_rank


@pytest.mark.parametrize("make,expected", [(dual_numbers, [2, 1, 1]),
                                           (lambda cap: matrix_algebra(2, cap), [1, 0, 0]),
                                           (upper_triangular, [1, 0, 0])])
def test_hh_dimensions_match_classical_oracle(make, expected):
    A = make(3)
    dims = [hh_dimension(A, q) for q in range(3)]
    assert dims == [_classical_hh(A, q) for q in range(3)]
    assert dims == expected


def test_hh_rejects_graded_input():
    with pytest.raises(GradingError):
        hh_dimension(square_zero((1, 1), 3), 1)
