"""Exact computations with A-infinity algebras, their families and transport."""

from .algebra import (AInfAlgebra, AInfHomotopy, AInfMorphism, ArityError, compose,
                      homotopy_defect, identity_morphism, invert, is_ainf, is_morphism,
                      linear_morphism, morphism_defect, stasheff_defect)
from .families import (FamilyForm, FilteredLie, FormField, Grid1D, Grid2D, gauge_action,
                       mc_defect)
from .graded import Element, GradedSpace, GradingError, MultiMap, scalar
from .transport import (LevelTree, TransportRequest, enumerate_level_trees, transport,
                        transport_oracle)

__all__ = [
    "AInfAlgebra", "AInfHomotopy", "AInfMorphism", "ArityError", "Element", "FamilyForm",
    "FilteredLie", "FormField", "GradedSpace", "GradingError", "Grid1D", "Grid2D", "LevelTree",
    "MultiMap", "TransportRequest", "compose", "enumerate_level_trees", "gauge_action",
    "homotopy_defect", "identity_morphism", "invert", "is_ainf", "is_morphism",
    "linear_morphism", "mc_defect", "morphism_defect", "scalar", "stasheff_defect", "transport",
    "transport_oracle",
]
