"""Gerstenhaber bracket, Hochschild differential and HH dimensions."""

from __future__ import annotations

import itertools

from .algebra import AInfAlgebra, ArityError
from .graded import ONE, GradedSpace, GradingError, MultiMap, insert, zeros
from .linalg import rank


def circle(f: MultiMap, g: MultiMap) -> MultiMap:
    """Pre-Lie product: sum of signed insertions of ``g`` into every slot of ``f``."""
    shape_arity = f.arity + g.arity - 1
    total = MultiMap.zero(g.source, max(shape_arity, 0), f.shift + g.shift, target=f.target)
    if f.arity == 0:
        return total
    for j in range(f.arity):
        total = total + insert(f, g, j)
    return total


def gbracket(f: MultiMap, g: MultiMap, arity_cap: int | None = None) -> MultiMap:
    """``[f, g] = f o g - (-1)^(||f|| ||g||) g o f``."""
    arity = f.arity + g.arity - 1
    if arity < 0:
        raise ArityError("bracket of two constants is undefined")
    if arity_cap is not None and arity > arity_cap:
        raise ArityError(f"bracket has arity {arity} > cap {arity_cap}")
    out = circle(f, g)
    other = circle(g, f)
    if (f.degree * g.degree) % 2:
        return out + other
    return out - other


def hochschild_differential(f, A: AInfAlgebra):
    """``[mu^1 + mu^2, f]``, returned as ``{arity: MultiMap}`` (zero parts dropped).

    ``f`` may be a single map or such a dictionary.
    """
    if not A.flat:
        raise GradingError("Hochschild differential needs a flat algebra")
    parts = f.values() if isinstance(f, dict) else [f]
    out = {}
    for piece in parts:
        for k in (1, 2):
            mu = A.maps.get(k)
            if mu is None or mu.is_zero():
                continue
            arity = piece.arity + k - 1
            if arity > A.arity_cap:
                raise ArityError(f"differential leaves the arity cap {A.arity_cap}")
            term = gbracket(mu, piece)
            out[arity] = out[arity] + term if arity in out else term
    return {k: v for k, v in out.items() if not v.is_zero()}


def cochain_basis(space: GradedSpace, arity: int, shift: int):
    """Elementary maps sending one basis tuple to one basis vector."""
    mask_degrees = space.degrees
    for out in range(space.dim):
        for ins in itertools.product(range(space.dim), repeat=arity):
            if mask_degrees[out] - sum(mask_degrees[i] for i in ins) != shift:
                continue
            table = zeros((space.dim,) + (space.dim,) * arity)
            table[(out,) + ins] = ONE
            yield MultiMap(space, arity, shift, table, check=False)


def differential_matrix(A: AInfAlgebra, q: int):
    """Columns are ``[mu^2, e]`` for the elementary cochains ``e`` of arity ``q``."""
    mu = A.mu(2)
    cols = [gbracket(mu, e).table.reshape(-1) for e in cochain_basis(A.space, q, 0)]
    return cols


def _check_ungraded(A: AInfAlgebra):
    if any(d != 0 for d in A.space.degrees):
        raise GradingError("HH dimensions are computed for algebras in degree 0 only")
    for k, f in A.maps.items():
        if k != 2 and not f.is_zero():
            raise GradingError("expected an associative algebra (only mu^2)")


def hh_dimension(A: AInfAlgebra, q: int, arity_cap: int | None = None) -> int:
    """``dim HH^q(A, A)`` for an associative algebra concentrated in degree 0."""
    cap = A.arity_cap if arity_cap is None else arity_cap
    if q < 0 or q > cap - 1:
        raise ArityError(f"q={q} needs arity {q + 1} within cap {cap}")
    _check_ungraded(A)
    out_cols = differential_matrix(A, q)
    n_q = len(out_cols)
    kernel = n_q - (rank(out_cols) if out_cols else 0)
    if q == 0:
        return kernel
    in_cols = differential_matrix(A, q - 1)
    image = rank(in_cols) if in_cols else 0
    return kernel - image

