"""Concrete algebras and random exact test data."""

from __future__ import annotations

import itertools
import random

from .algebra import AInfAlgebra
from .families import FamilyForm, FormField, Grid1D
from .forms import DS, FormCochain, FormMap
from .graded import GradedSpace, MultiMap, zeros


def dga(space: GradedSpace, differential: dict, product: dict, arity_cap: int = 3) -> AInfAlgebra:
    """A-infinity structure of a dg algebra in the shifted sign convention.

    ``differential`` is ``{a: {b: c}}`` and ``product`` is ``{(a, b): {c: coeff}}``
    over basis labels; the resulting operations are ``mu^1 = d`` and
    ``mu^2(a, b) = (-1)^|a| a b``.
    """
    deg = dict(zip(space.labels, space.degrees))
    d = MultiMap.from_entries(space, 1, 1, {(a,): out for a, out in differential.items()})
    signed = {}
    for (a, b), out in product.items():
        sign = -1 if deg[a] % 2 else 1
        signed[(a, b)] = {k: sign * v for k, v in ((k, _int_or_str(v)) for k, v in out.items())}
    m2 = MultiMap.from_entries(space, 2, 0, signed)
    maps = {2: m2}
    if not d.is_zero():
        maps[1] = d
    return AInfAlgebra(space, maps, arity_cap)


def _int_or_str(v):
    from .graded import scalar
    return scalar(v)


def dual_numbers(arity_cap: int = 3) -> AInfAlgebra:
    """``Q[x]/(x^2)`` in degree 0."""
    V = GradedSpace(["1", "x"], [0, 0])
    prod = {("1", "1"): {"1": 1}, ("1", "x"): {"x": 1}, ("x", "1"): {"x": 1}}
    return dga(V, {}, prod, arity_cap)


def matrix_algebra(n: int = 2, arity_cap: int = 3) -> AInfAlgebra:
    """Full ``n x n`` matrices in degree 0 with matrix units ``e_ij``."""
    labels = [f"e{i}{j}" for i in range(n) for j in range(n)]
    V = GradedSpace(labels, [0] * len(labels))
    prod = {}
    for i, j, k in itertools.product(range(n), repeat=3):
        prod[(f"e{i}{j}", f"e{j}{k}")] = {f"e{i}{k}": 1}
    return dga(V, {}, prod, arity_cap)


def upper_triangular(arity_cap: int = 3) -> AInfAlgebra:
    """Upper triangular ``2 x 2`` matrices (path algebra of ``1 -> 2``)."""
    V = GradedSpace(["e1", "e2", "a"], [0, 0, 0])
    prod = {("e1", "e1"): {"e1": 1}, ("e2", "e2"): {"e2": 1},
            ("e1", "a"): {"a": 1}, ("a", "e2"): {"a": 1}}
    return dga(V, {}, prod, arity_cap)


def exterior_algebra(arity_cap: int = 3) -> AInfAlgebra:
    """``Lambda(x, y)`` with ``|x| = |y| = 1`` and zero differential."""
    V = GradedSpace(["1", "x", "y", "xy"], [0, 1, 1, 2])
    prod = {("1", l): {l: 1} for l in V.labels}
    prod.update({(l, "1"): {l: 1} for l in V.labels})
    prod[("x", "y")] = {"xy": 1}
    prod[("y", "x")] = {"xy": -1}
    return dga(V, {}, prod, arity_cap)


def acyclic_dga(arity_cap: int = 3) -> AInfAlgebra:
    """Unit plus a contractible pair ``d a = b`` with ``|a| = -1``."""
    V = GradedSpace(["1", "a", "b"], [0, -1, 0])
    prod = {("1", l): {l: 1} for l in V.labels}
    prod.update({(l, "1"): {l: 1} for l in V.labels if l != "1"})
    return dga(V, {"a": {"b": 1}}, prod, arity_cap)


def square_zero(degrees=(1, 1), arity_cap: int = 3) -> AInfAlgebra:
    """Unit plus generators ``x1, x2, ..`` of the given degrees with all products zero."""
    labels = ["1"] + [f"x{k + 1}" for k in range(len(degrees))]
    V = GradedSpace(labels, [0] + list(degrees))
    prod = {("1", l): {l: 1} for l in V.labels}
    prod.update({(l, "1"): {l: 1} for l in V.labels if l != "1"})
    return dga(V, {}, prod, arity_cap)


# -- random data -------------------------------------------------------------

def random_map(rng: random.Random, source: GradedSpace, arity: int, shift: int,
               density: float = 0.5, bound: int = 2, target=None) -> MultiMap:
    """Integer entries in ``[-bound, bound]`` on the allowed degree pattern."""
    target = source if target is None else target
    table = zeros((target.dim,) + (source.dim,) * arity)
    for out in range(target.dim):
        for ins in itertools.product(range(source.dim), repeat=arity):
            if target.degrees[out] - sum(source.degrees[i] for i in ins) != shift:
                continue
            if rng.random() < density:
                table[(out,) + ins] = rng.randint(-bound, bound)
    return MultiMap(source, arity, shift, table, target=target)


def random_poly_map(rng: random.Random, source: GradedSpace, arity: int, shift: int,
                    mask: int = 0, s_degree: int = 1, t_degree: int = 0,
                    density: float = 0.4, bound: int = 2) -> FormMap:
    """Random polynomial-coefficient form map with the given map shift."""
    from .forms import form_degree
    degree = shift + arity - 1 + form_degree(mask)
    out = FormMap.zero(source, arity, degree)
    for i in range(s_degree + 1):
        for j in range(t_degree + 1):
            f = random_map(rng, source, arity, shift, density, bound)
            out = out + FormMap.constant(f, mask, (i, j))
    return out


def solve_interval_family(A0: AInfAlgebra, grid: Grid1D, B: dict) -> FamilyForm:
    """The family ``A + ds ^ B`` with ``A(0) = A0`` solving ``dA/ds = [A, B]``.

    ``B`` maps cell index to a degree-0 :class:`FormCochain` of 0-forms in
    ``s`` whose pieces have arity at least 2; the equation is then
    triangular in arity and is integrated exactly, cell by cell, keeping
    ``A`` continuous across breakpoints.
    """
    cap = A0.arity_cap
    V = A0.space
    start = {n: FormMap.constant(f) for n, f in A0.maps.items() if not f.is_zero()}
    cells = {}
    for k in grid.cell_indices():
        a, _ = grid.cell(k)
        b = B[k]
        if any(n < 2 for n in b.parts):
            raise ValueError("the one-form part must have arity at least 2")
        A = {}
        for n in range(1, cap + 1):
            rhs = FormMap.zero(V, n, 1)
            for m, f in A.items():
                g = b.parts.get(n - m + 1)
                if g is not None:
                    rhs = rhs + f.bracket(g)
            piece = rhs.antiderivative("s", a)
            if n in start:
                piece = piece + start[n]
            if not piece.is_zero():
                A[n] = piece
        base = FormCochain(V, 1, cap, A)
        ds_part = b.map(lambda f: f.prepend("s"), 1)
        cells[k] = base + ds_part
        end = grid.cell(k)[1]
        start = {n: f.substitute("s", end) for n, f in A.items()}
    return FamilyForm(grid, V, cap, cells)


def random_interval_family(rng: random.Random, A0: AInfAlgebra, grid: Grid1D | None = None,
                           s_degree: int = 1, density: float = 0.4,
                           bound: int = 2) -> FamilyForm:
    """Random exact family starting at ``A0`` with piecewise-polynomial one-form part."""
    grid = grid or Grid1D()
    cap = A0.arity_cap
    B = {}
    for k in grid.cell_indices():
        parts = {}
        for n in range(2, cap + 1):
            parts[n] = random_poly_map(rng, A0.space, n, 1 - n, 0, s_degree, 0, density, bound)
        B[k] = FormCochain(A0.space, 0, cap, parts)
    return solve_interval_family(A0, grid, B)


def random_symmetry(rng: random.Random, A0: AInfAlgebra, arity: int, bound: int = 2) -> MultiMap:
    """Random degree-0 cochain ``c`` of the given arity with ``[mu^2, c] = 0``."""
    from .hochschild import cochain_basis, gbracket
    from .linalg import nullspace
    if any(k != 2 and not f.is_zero() for k, f in A0.maps.items()):
        raise ValueError("expected a base with only mu^2")
    basis = list(cochain_basis(A0.space, arity, 1 - arity))
    mu = A0.mu(2)
    kernel = nullspace([gbracket(mu, e).table.reshape(-1) for e in basis])
    out = MultiMap.zero(A0.space, arity, 1 - arity)
    for v in kernel:
        c = rng.randint(-bound, bound)
        for x, e in zip(v, basis):
            if x != 0 and c != 0:
                out = out + (c * x) * e
    return out


def random_loop_family(rng: random.Random, A0: AInfAlgebra, grid: Grid1D | None = None,
                       s_degree: int = 1, density: float = 0.4, bound: int = 2,
                       symmetric: bool = True) -> FamilyForm:
    """``exp(beta) * A0`` with ``beta = s c + s(1-s) beta'``, a loop at ``A0``.

    ``c`` commutes with ``mu^2`` (so the end fibre is ``A0`` again) and makes
    the transport around the loop nontrivial; ``beta'`` has arity at least 2.
    """
    from .families import gauge_action
    grid = grid or Grid1D()
    cap = A0.arity_cap
    parts = {}
    for n in range(2, cap + 1):
        f = random_poly_map(rng, A0.space, n, 1 - n, 0, s_degree, 0, density, bound)
        parts[n] = f.multiply_poly({(1, 0): 1, (2, 0): -1})
        if symmetric:
            parts[n] = parts[n] + FormMap.constant(random_symmetry(rng, A0, n, bound), 0, (1, 0))
    beta = FormField.constant(grid, FormCochain(A0.space, 0, cap, parts))
    mu = FormField.constant(grid, FormCochain(
        A0.space, 1, cap, {n: FormMap.constant(f) for n, f in A0.maps.items() if not f.is_zero()}))
    field = gauge_action(beta, mu)
    return FamilyForm(grid, A0.space, cap, field.cells)


def random_ainf(rng: random.Random, A0: AInfAlgebra, **kw) -> AInfAlgebra:
    """End fibre of a random family out of ``A0``; typically has ``mu^3 != 0``."""
    fam = random_interval_family(rng, A0, **kw)
    return fam.fibre(1, side="left")


def field_from_cochains(grid, cochains: dict) -> FormField:
    first = next(iter(cochains.values()))
    return FormField(grid, first.space, first.degree, first.arity_cap, cochains)
