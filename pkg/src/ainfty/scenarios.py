"""Deterministic builders for the bundled group-action scenarios."""

from __future__ import annotations

import json
import random
from importlib import resources

import numpy as np

from . import io
from .constructions import random_loop_family, random_map, square_zero
from .families import FilteredLie, FormField, Grid1D, eta_embed_cochain
from .graded import as_object_array
from .groups import FiniteGroup, LinearAction, average_invariant


def _identity(n):
    return as_object_array(np.eye(n, dtype=int).tolist())


def z2_scenario(seed: int = 2, arity_cap: int = 3) -> io.Document:
    """``Z/2`` swapping the two odd generators of a square-zero algebra.

    ``alpha1`` is an invariant deformation obtained by gauging zero, ``gamma``
    a gauge parameter that is not invariant and ``alpha0 = exp(-gamma) * alpha1``,
    so the swap does not preserve ``alpha0`` and ``F_g`` is not linear.
    """
    A = square_zero((1, 1), arity_cap)
    V = A.space
    group = FiniteGroup.cyclic(2)
    swap = as_object_array([[1, 0, 0], [0, 0, 1], [0, 1, 0]])
    act = LinearAction(group, V, {"g0": _identity(3), "g1": swap})
    rng = random.Random(seed)

    def invariant():
        return {n: average_invariant(random_map(rng, V, n, 1 - n, 0.7, 2), act)
                for n in range(2, arity_cap + 1)}

    grid = Grid1D()
    lie = FilteredLie(A, grid)
    zero = FormField.zero(grid, V, 1, arity_cap)
    alpha1 = lie.gauge_exp(eta_embed_cochain(invariant(), grid, arity_cap), zero, arity_cap)
    gamma = eta_embed_cochain({n: random_map(rng, V, n, 1 - n, 0.7, 2)
                               for n in range(2, arity_cap + 1)}, grid, arity_cap)
    alpha0 = lie.gauge_exp(-gamma, alpha1, arity_cap)
    doc = io.Document(V, arity_cap)
    doc.algebras["A"] = A
    doc.groups["Z2"] = group
    doc.gauges.update({"alpha0": alpha0, "alpha1": alpha1, "gamma": gamma})
    doc.actions["swap"] = io.Action(
        group, A, dict(act.matrices), linear=act,
        raw={"scenario": {"alpha0": "alpha0", "alpha1": "alpha1", "gamma": "gamma",
                          "level": arity_cap}})
    return doc


def free2_scenario(seed: int = 5, arity_cap: int = 3) -> io.Document:
    """Free group on ``a, b`` acting on a square-zero algebra through loop families.

    Each loop starts and ends at the base algebra; its monodromy is a graded
    automorphism (a shear for ``a``, the swap for ``b``).
    """
    A = square_zero((1, 1), arity_cap)
    V = A.space
    rng = random.Random(seed)
    ra = as_object_array([[1, 0, 0], [0, 1, 1], [0, 0, 1]])
    rb = as_object_array([[1, 0, 0], [0, 0, 1], [0, 1, 0]])
    doc = io.Document(V, arity_cap)
    doc.algebras["A"] = A
    doc.groups["F2"] = io.FreeGroup(("a", "b"))
    doc.families["loop_a"] = random_loop_family(rng, A, Grid1D.uniform(2), density=0.6)
    doc.families["loop_b"] = random_loop_family(rng, A, density=0.6)
    doc.actions["loops"] = io.Action(doc.groups["F2"], A, {"a": ra, "b": rb},
                                     raw={"loops": {"a": "loop_a", "b": "loop_b"}})
    return doc


BUNDLED = {"z2_scenario": z2_scenario, "free2_scenario": free2_scenario}


def bundled_text(name: str) -> str:
    return resources.files("ainfty").joinpath("data", f"{name}.json").read_text(encoding="utf-8")


def load_bundled(name: str) -> io.Document:
    return io.loads(bundled_text(name))


def write_bundled(directory):
    """Regenerate the data files (``python -m ainfty.scenarios DIR``)."""
    from pathlib import Path
    for name, build in BUNDLED.items():
        # reparse so the file holds exactly what a reader will validate
        text = io.dumps(build())
        io.loads(text)
        Path(directory, f"{name}.json").write_text(text, encoding="utf-8")


if __name__ == "__main__":
    import sys
    write_bundled(sys.argv[1] if len(sys.argv) > 1 else str(resources.files("ainfty") / "data"))
