"""A-infinity algebras, morphisms and homotopies, truncated at an arity cap."""

from __future__ import annotations

from functools import lru_cache

from .graded import GradedSpace, GradingError, MultiMap, compose_tensor, insert


class ArityError(ValueError):
    pass


@lru_cache(maxsize=None)
def compositions(n: int, parts: int | None = None, max_part: int | None = None):
    """Ordered tuples of positive integers summing to ``n``.

    ``parts`` fixes the number of summands; ``max_part`` bounds each summand.
    """
    max_part = n if max_part is None else max_part
    if parts is None:
        out = []
        for k in range(1, n + 1):
            out.extend(compositions(n, k, max_part))
        return tuple(out)
    if parts == 0:
        return ((),) if n == 0 else ()
    out = []
    for first in range(1, min(n - parts + 1, max_part) + 1):
        for rest in compositions(n - first, parts - 1, max_part):
            out.append((first,) + rest)
    return tuple(out)


def _collect(maps, space, target, expected_shift, lo, cap, what):
    out = {}
    for k, f in maps.items():
        k = int(k)
        if k < lo or k > cap:
            raise ArityError(f"{what} component of arity {k} outside {lo}..{cap}")
        if f.arity != k:
            raise GradingError(f"{what} component keyed {k} has arity {f.arity}")
        if f.shift != expected_shift(k):
            raise GradingError(
                f"{what}^{k} has shift {f.shift}, expected {expected_shift(k)}")
        if f.source != space or f.target != target:
            raise GradingError(f"{what}^{k} acts on the wrong space")
        out[k] = f
    return out


class AInfAlgebra:
    """Operations ``mu^k : V^{(x) k} -> V`` of shift ``2 - k`` for ``k <= N``."""

    def __init__(self, space: GradedSpace, maps: dict, arity_cap: int, flat: bool = True):
        self.space = space
        self.arity_cap = int(arity_cap)
        self.flat = flat
        self.maps = _collect(maps, space, space, lambda k: 2 - k, 0, self.arity_cap, "mu")
        if flat and 0 in self.maps and not self.maps[0].is_zero():
            raise GradingError("curvature mu^0 must vanish for a flat algebra")

    def mu(self, k: int) -> MultiMap:
        if k in self.maps:
            return self.maps[k]
        return MultiMap.zero(self.space, k, 2 - k)

    def with_cap(self, cap):
        return AInfAlgebra(self.space, {k: f for k, f in self.maps.items() if k <= cap},
                           cap, self.flat)

    def __eq__(self, other):
        if not isinstance(other, AInfAlgebra) or self.space != other.space:
            return NotImplemented
        top = max(self.arity_cap, other.arity_cap)
        return all(self.mu(k) == other.mu(k) for k in range(top + 1))

    __hash__ = None

    def __repr__(self):
        return f"AInfAlgebra(dim={self.space.dim}, cap={self.arity_cap}, arities={sorted(self.maps)})"


class AInfMorphism:
    """Components ``F^n : V^{(x) n} -> W`` of shift ``1 - n``, ``1 <= n <= N``."""

    def __init__(self, source: AInfAlgebra, target: AInfAlgebra, maps: dict):
        if source.arity_cap != target.arity_cap:
            raise ArityError("source and target must share the arity cap")
        self.source = source
        self.target = target
        self.maps = _collect(maps, source.space, target.space, lambda n: 1 - n, 1,
                             source.arity_cap, "F")

    @property
    def arity_cap(self):
        return self.source.arity_cap

    def component(self, n: int) -> MultiMap:
        if n in self.maps:
            return self.maps[n]
        return MultiMap.zero(self.source.space, n, 1 - n, target=self.target.space)

    def equal_maps(self, other) -> bool:
        top = max(self.arity_cap, other.arity_cap)
        return all(self.component(n) == other.component(n) for n in range(1, top + 1))

    def __eq__(self, other):
        if not isinstance(other, AInfMorphism):
            return NotImplemented
        return self.equal_maps(other)

    __hash__ = None

    def __repr__(self):
        return f"AInfMorphism(cap={self.arity_cap}, arities={sorted(self.maps)})"


class AInfHomotopy:
    """Components ``T^n`` of shift ``-n`` between morphisms ``F`` and ``G``."""

    def __init__(self, F: AInfMorphism, G: AInfMorphism, maps: dict):
        if F.source.space != G.source.space or F.target.space != G.target.space:
            raise GradingError("homotopic morphisms must share source and target")
        self.F = F
        self.G = G
        self.maps = _collect(maps, F.source.space, F.target.space, lambda n: -n, 1,
                             F.arity_cap, "T")

    def component(self, n: int) -> MultiMap:
        if n in self.maps:
            return self.maps[n]
        return MultiMap.zero(self.F.source.space, n, -n, target=self.F.target.space)


def _check_level(n, lo, cap):
    if n < lo or n > cap:
        raise ArityError(f"level {n} outside {lo}..{cap}")


def stasheff_defect(A: AInfAlgebra, n: int) -> MultiMap:
    """Signed sum of ``mu^k(.., mu^r(..), ..)`` over ``k + r - 1 = n``."""
    _check_level(n, 0, A.arity_cap)
    total = MultiMap.zero(A.space, n, 3 - n)
    for k in range(1, n + 2):
        r = n + 1 - k
        if k > A.arity_cap or r > A.arity_cap:
            continue
        outer, inner = A.maps.get(k), A.maps.get(r)
        if outer is None or inner is None:
            continue
        for j in range(k):
            total = total + insert(outer, inner, j)
    return total


def morphism_defect(F: AInfMorphism, n: int) -> MultiMap:
    """LHS minus RHS of the level-``n`` morphism relation."""
    _check_level(n, 1, F.arity_cap)
    A, B = F.source, F.target
    total = MultiMap.zero(A.space, n, 2 - n, target=B.space)
    for r, mu in B.maps.items():
        if r == 0 or r > n:
            continue
        for parts in compositions(n, r):
            if all(s in F.maps for s in parts):
                total = total + compose_tensor(mu, [F.maps[s] for s in parts])
    for m, mu in A.maps.items():
        if m == 0 or m > n:
            continue
        outer = F.maps.get(n - m + 1)
        if outer is None:
            continue
        for j in range(n - m + 1):
            total = total - insert(outer, mu, j)
    return total


def compose(F: AInfMorphism, G: AInfMorphism) -> AInfMorphism:
    """The composite ``F o G`` (apply ``G`` first), truncated at the arity cap."""
    if G.target.space != F.source.space or not (G.target == F.source):
        raise GradingError("target of G must be the source of F")
    cap = F.arity_cap
    maps = {}
    for n in range(1, cap + 1):
        total = None
        for i, outer in F.maps.items():
            for parts in compositions(n, i):
                if all(s in G.maps for s in parts):
                    term = compose_tensor(outer, [G.maps[s] for s in parts])
                    total = term if total is None else total + term
        if total is not None and not total.is_zero():
            maps[n] = total
    return AInfMorphism(G.source, F.target, maps)


def homotopy_defect(H: AInfHomotopy, n: int) -> MultiMap:
    """``F^n - G^n`` minus the ``T``-insertion and ``mu(G.., T, F..)`` sums."""
    F, G = H.F, H.G
    _check_level(n, 1, F.arity_cap)
    A, B = F.source, F.target
    total = F.component(n) - G.component(n)
    for r, mu in A.maps.items():
        if r == 0 or r > n:
            continue
        outer = H.maps.get(n - r + 1)
        if outer is None:
            continue
        for j in range(n - r + 1):
            total = total - insert(outer, mu, j)
    for k, mu in B.maps.items():
        if k == 0 or k > n:
            continue
        for parts in compositions(n, k):
            for pos in range(k):
                t = H.maps.get(parts[pos])
                if t is None:
                    continue
                inner = [G.maps.get(s) for s in parts[:pos]] + [t] + \
                        [F.maps.get(s) for s in parts[pos + 1:]]
                if any(x is None for x in inner):
                    continue
                total = total - compose_tensor(mu, inner)
    return total


def invert(F: AInfMorphism) -> AInfMorphism:
    """The inverse of a morphism whose linear part is invertible.

    ``G^1 = (F^1)^{-1}`` and ``G^n`` is fixed by the vanishing of the arity-``n``
    component of ``G o F``; the result is a two-sided inverse.
    """
    from .linalg import inverse
    try:
        L = MultiMap.linear(F.target.space, inverse(F.component(1).table), target=F.source.space)
    except ValueError:
        raise GradingError("the linear part is not invertible") from None
    maps = {1: L}
    for n in range(2, F.arity_cap + 1):
        partial = compose(AInfMorphism(F.target, F.source, maps), F).component(n)
        maps[n] = -compose_tensor(partial, [L] * n)
    return AInfMorphism(F.target, F.source, maps)


def identity_morphism(A: AInfAlgebra) -> AInfMorphism:
    return AInfMorphism(A, A, {1: MultiMap.identity(A.space)})


def linear_morphism(A: AInfAlgebra, B: AInfAlgebra, matrix) -> AInfMorphism:
    """Strict morphism with ``F^1`` given by a degree-0 matrix and no higher terms."""
    return AInfMorphism(A, B, {1: MultiMap.linear(A.space, matrix, target=B.space)})


def is_ainf(A: AInfAlgebra) -> bool:
    return all(stasheff_defect(A, n).is_zero() for n in range(A.arity_cap + 1))


def is_morphism(F: AInfMorphism) -> bool:
    return all(morphism_defect(F, n).is_zero() for n in range(1, F.arity_cap + 1))
