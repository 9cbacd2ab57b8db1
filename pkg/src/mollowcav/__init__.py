"""Photon correlations from two cavity modes coupled to a strongly driven atom."""

from .correlations import (CauchySchwarzReport, CorrelationKind, CorrelationSeries,
                           UndefinedCorrelationError, cauchy_schwarz_report, first_order,
                           g2_zero, second_order)
from .hilbert import (DensityOperator, Operator, SpaceLayout, annihilation, basis_state,
                      embed, expectation, identity, maximally_mixed, number, transition)
from .lindblad import (CollapseChannel, ConvergenceError, DegenerateSteadyStateError,
                       Liouvillian, SolverError, StiffnessError, build_liouvillian,
                       dissipator, evolve, evolve_expect, steady_state, uniform_grid)
from .spectra import Spectrum, power_spectrum, steady_flux

__version__ = "0.1.0"
