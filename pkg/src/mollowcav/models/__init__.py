"""Concrete atom-cavity systems."""

from .angular import clebsch_gordan, dipole_element
from .base import BuiltSystem, ConvergenceReport, convergence_check
from .cesium import (ALL_MANIFOLDS, DEFAULT_MANIFOLDS, LINEWIDTH_MHZ, AtomicBasis,
                     CesiumParams, build_cesium, population_confinement)
from .dressed import (build_dressed_secular, dressed_basis, dressed_g2_auto,
                      dressed_g2_cross, dressed_operators)
from .two_level import TwoLevelParams, build_two_level

__all__ = [
    "BuiltSystem", "ConvergenceReport", "convergence_check",
    "TwoLevelParams", "build_two_level",
    "build_dressed_secular", "dressed_basis", "dressed_operators",
    "dressed_g2_auto", "dressed_g2_cross",
    "clebsch_gordan", "dipole_element",
    "CesiumParams", "AtomicBasis", "build_cesium", "population_confinement",
    "LINEWIDTH_MHZ", "DEFAULT_MANIFOLDS", "ALL_MANIFOLDS",
]
