from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from ..hilbert import DensityOperator, Operator, SpaceLayout
from ..lindblad import Liouvillian, steady_state

__all__ = ["BuiltSystem", "ConvergenceReport", "convergence_check", "RESOLVED_RATIO"]

RESOLVED_RATIO = 5.0


@dataclass(frozen=True, eq=False)
class BuiltSystem:
    """A model ready to solve: Liouvillian plus the operators observables need."""

    layout: SpaceLayout
    liouvillian: Liouvillian
    named_operators: Mapping[str, Operator]
    params: Any
    warnings: tuple[str, ...] = ()
    extras: Mapping[str, Any] = field(default_factory=dict)

    def op(self, name: str) -> Operator:
        try:
            return self.named_operators[name]
        except KeyError:
            raise KeyError(f"no operator {name!r}; have {sorted(self.named_operators)}") from None

    def steady_state(self, **kwargs) -> DensityOperator:
        return steady_state(self.liouvillian, **kwargs)


@dataclass(frozen=True)
class ConvergenceReport:
    n_max: int
    values: dict[str, float]
    values_next: dict[str, float]
    max_relative_change: float
    tol: float

    @property
    def converged(self) -> bool:
        return self.max_relative_change <= self.tol


def convergence_check(builder: Callable[[Any], BuiltSystem], params,
                      observables: Callable[[BuiltSystem, DensityOperator], Mapping[str, float]],
                      tol: float = 1e-2) -> ConvergenceReport:
    """Re-solve at ``n_max + 1`` and report the largest relative change.

    ``params`` must be a dataclass with an ``n_max`` field.
    """
    out = []
    for p in (params, dataclasses.replace(params, n_max=params.n_max + 1)):
        system = builder(p)
        out.append(dict(observables(system, system.steady_state())))
    a, b = out
    change = 0.0
    for k in a:
        ref = max(abs(b[k]), 1e-300)
        change = max(change, abs(a[k] - b[k]) / ref)
    return ConvergenceReport(params.n_max, a, b, float(change), tol)
