"""
Two-time correlation functions via the quantum regression formulae.

All series are steady-state quantities on a uniform delay grid starting at
zero. Second-order series are normalized by the steady-state photon numbers
recomputed from the supplied ``rho_ss`` on every call.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from .hilbert import DensityOperator, Operator, expectation
from .lindblad import (Liouvillian, SolverError, _check_grid, evolve_expect,
                       evolve_expect_many, steady_state_residual)

__all__ = [
    "CorrelationKind",
    "CorrelationSeries",
    "UndefinedCorrelationError",
    "first_order",
    "second_order",
    "first_order_many",
    "second_order_matrix",
    "g2_zero",
    "CauchySchwarzReport",
    "cauchy_schwarz_report",
]

IMAG_TOL = 1e-8
STEADY_TOL = 1e-8


class CorrelationKind(str, Enum):
    FIRST_ORDER = "first_order"
    SECOND_ORDER_AUTO = "second_order_auto"
    SECOND_ORDER_CROSS = "second_order_cross"


class UndefinedCorrelationError(ZeroDivisionError):
    """A normalizing photon number vanishes."""


@dataclass(frozen=True)
class CorrelationSeries:
    tau: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    kind: CorrelationKind
    normalization: float
    imag_residual: float = 0.0
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "tau", _check_grid(self.tau))
        vals = np.asarray(self.values)
        if vals.shape != self.tau.shape:
            raise ValueError("values and tau grid differ in length")
        object.__setattr__(self, "values", vals)

    @property
    def at_zero(self):
        return self.values[0]


def _require_steady(L: Liouvillian, rho_ss: DensityOperator):
    res = steady_state_residual(L, rho_ss)
    if res > STEADY_TOL:
        raise SolverError(f"rho_ss is not a steady state of L (relative residual {res:.3e})")


def first_order(L: Liouvillian, rho_ss: DensityOperator, op: Operator, tau_grid,
                label: str = "") -> CorrelationSeries:
    """Covariance ``Tr(O^dag e^{L tau}[O rho]) - |<O>|^2``.

    This is ``<O^dag(tau) O(0)>`` with the coherent part removed; its
    conjugate is ``<O^dag(0) O(tau)>``.
    """
    _require_steady(L, rho_ss)
    mean = expectation(rho_ss, op)
    x0 = op.data @ rho_ss.matrix
    raw = evolve_expect(L, x0, tau_grid, [op.dag()])[0]
    return CorrelationSeries(tau_grid, raw - abs(mean) ** 2, CorrelationKind.FIRST_ORDER,
                             normalization=1.0, label=label)


def _photon_number(rho: DensityOperator, op: Operator) -> float:
    n = expectation(rho, op.dag() @ op)
    if abs(n.imag) > IMAG_TOL * max(1.0, abs(n.real)):
        raise SolverError(f"<O^dag O> has imaginary part {n.imag:.3e}")
    if not n.real > 0:
        raise UndefinedCorrelationError(
            f"zero flux in the normalizing channel (<O^dag O> = {n.real:.3e})")
    return n.real


def _real_part(vals: np.ndarray, scale: float) -> tuple[np.ndarray, float]:
    resid = float(np.abs(vals.imag).max()) if vals.size else 0.0
    if resid > IMAG_TOL * max(1.0, scale):
        raise SolverError(f"second-order series has imaginary part {resid:.3e}")
    return vals.real.copy(), resid


def second_order(L: Liouvillian, rho_ss: DensityOperator, op1: Operator, op2: Operator,
                 tau_grid, label: str = "") -> CorrelationSeries:
    """Normalized ``g2_{O1 O2}(tau)``: O1 detected at 0, O2 at ``tau``."""
    _require_steady(L, rho_ss)
    n1 = _photon_number(rho_ss, op1)
    n2 = n1 if op2 is op1 else _photon_number(rho_ss, op2)
    a = op1.data
    x0 = a @ (a.conj() @ rho_ss.matrix.T).T  # O1 rho O1^dag
    raw = evolve_expect(L, x0, tau_grid, [op2.dag() @ op2])[0] / (n1 * n2)
    vals, resid = _real_part(raw, float(np.abs(raw).max(initial=0.0)))
    kind = CorrelationKind.SECOND_ORDER_AUTO if op1 is op2 else CorrelationKind.SECOND_ORDER_CROSS
    return CorrelationSeries(tau_grid, vals, kind, normalization=n1 * n2,
                             imag_residual=resid, label=label)


def first_order_many(L: Liouvillian, rho_ss: DensityOperator, ops: Mapping[str, Operator],
                     tau_grid) -> dict[str, CorrelationSeries]:
    """:func:`first_order` for several operators sharing one propagation."""
    _require_steady(L, rho_ss)
    names = list(ops)
    x0s = [ops[n].data @ rho_ss.matrix for n in names]
    raw = evolve_expect_many(L, x0s, tau_grid, [ops[n].dag() for n in names])
    out = {}
    for j, n in enumerate(names):
        mean = expectation(rho_ss, ops[n])
        out[n] = CorrelationSeries(tau_grid, raw[j, j] - abs(mean) ** 2,
                                   CorrelationKind.FIRST_ORDER, normalization=1.0, label=n)
    return out


def second_order_matrix(L: Liouvillian, rho_ss: DensityOperator, ops: Mapping[str, Operator],
                        tau_grid) -> dict[tuple[str, str], CorrelationSeries]:
    """All ``g2_{O1 O2}(tau)`` for ``O1, O2`` in ``ops`` from one batched propagation.

    Keys are ``(first_detected, second_detected)``.
    """
    _require_steady(L, rho_ss)
    names = list(ops)
    nums = {n: _photon_number(rho_ss, ops[n]) for n in names}
    x0s = []
    for n in names:
        a = ops[n].data
        x0s.append(a @ (a.conj() @ rho_ss.matrix.T).T)
    raw = evolve_expect_many(L, x0s, tau_grid, [ops[n].dag() @ ops[n] for n in names])
    out = {}
    for i, n1 in enumerate(names):
        for j, n2 in enumerate(names):
            norm = nums[n1] * nums[n2]
            vals = raw[i, j] / norm
            vals, resid = _real_part(vals, float(np.abs(vals).max(initial=0.0)))
            kind = (CorrelationKind.SECOND_ORDER_AUTO if i == j
                    else CorrelationKind.SECOND_ORDER_CROSS)
            out[(n1, n2)] = CorrelationSeries(tau_grid, vals, kind, normalization=norm,
                                              imag_residual=resid, label=n1 + n2)
    return out


def g2_zero(rho: DensityOperator, op1: Operator, op2: Operator | None = None) -> float:
    """Equal-time ``<O1^dag O2^dag O2 O1> / (<O1^dag O1><O2^dag O2>)``."""
    op2 = op1 if op2 is None else op2
    n1 = _photon_number(rho, op1)
    n2 = _photon_number(rho, op2)
    num = expectation(rho, op1.dag() @ op2.dag() @ op2 @ op1)
    if abs(num.imag) > IMAG_TOL * max(1.0, abs(num.real)):
        raise SolverError(f"g2 numerator has imaginary part {num.imag:.3e}")
    return num.real / (n1 * n2)


@dataclass
class CauchySchwarzReport:
    """Classical-bound checks; a positive margin is the size of a violation."""

    single_mode: dict[str, float]
    temporal: dict[str, float]
    two_mode: float
    two_mode_bound: float
    tau: np.ndarray = field(repr=False)
    temporal_violation_mask: dict[str, np.ndarray] = field(repr=False)
    two_mode_violation_mask: np.ndarray = field(repr=False)
    tol: float = 1e-9

    @property
    def single_mode_violated(self) -> dict[str, bool]:
        return {k: v > self.tol for k, v in self.single_mode.items()}

    @property
    def temporal_violated(self) -> dict[str, bool]:
        return {k: v > self.tol for k, v in self.temporal.items()}

    @property
    def two_mode_violated(self) -> bool:
        return self.two_mode > self.tol

    @property
    def violations(self) -> list[str]:
        out = [f"single-mode:{k}" for k, v in self.single_mode_violated.items() if v]
        out += [f"temporal:{k}" for k, v in self.temporal_violated.items() if v]
        if self.two_mode_violated:
            out.append("two-mode")
        return out

    def as_dict(self) -> dict:
        return {
            "single_mode_margin": dict(self.single_mode),
            "single_mode_violated": self.single_mode_violated,
            "temporal_margin": dict(self.temporal),
            "temporal_violated": self.temporal_violated,
            "two_mode_margin": self.two_mode,
            "two_mode_bound": self.two_mode_bound,
            "two_mode_violated": self.two_mode_violated,
            "violations": self.violations,
        }


def cauchy_schwarz_report(auto1: CorrelationSeries, auto2: CorrelationSeries,
                          cross: CorrelationSeries, tol: float = 1e-9) -> CauchySchwarzReport:
    """Evaluate ``g2(0) >= 1``, ``g2(0) >= g2(tau)`` and
    ``|g2_12(tau)| <= sqrt(g2_1(0) g2_2(0))``."""
    tau = auto1.tau
    for s in (auto2, cross):
        if s.tau.shape != tau.shape or np.abs(s.tau - tau).max() > 1e-12:
            raise ValueError("correlation series are on different delay grids")
    names = [auto1.label or "auto1", auto2.label or "auto2"]
    if names[0] == names[1]:
        names = [names[0] + "#1", names[1] + "#2"]
    single, temporal, tmask = {}, {}, {}
    for name, s in zip(names, (auto1, auto2)):
        g0 = float(s.values[0])
        single[name] = 1.0 - g0
        excess = np.real(s.values) - g0
        temporal[name] = float(excess.max())
        tmask[name] = excess > tol
    bound = float(np.sqrt(max(auto1.values[0], 0.0) * max(auto2.values[0], 0.0)))
    over = np.abs(cross.values) - bound
    return CauchySchwarzReport(single, temporal, float(over.max()), bound, tau,
                               tmask, over > tol, tol)
