"""
Cesium D2-line hyperfine model driven on the stretched cycling transition.

Ground states ``|F, m>`` and excited states ``|F', m'>`` are laid out in one
``atom`` subsystem: ground manifolds first (ascending F), then excited
manifolds (ascending F'), each with ascending m. Energies are given in the
frame of the drive, relative to F=4 (ground) and F'=5' (excited).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from ..hilbert import DensityOperator, Operator, SpaceLayout, annihilation, embed, expectation
from ..lindblad import CollapseChannel, build_liouvillian
from .angular import clebsch_gordan
from .base import BuiltSystem
from .two_level import TwoLevelParams

__all__ = [
    "LINEWIDTH_MHZ",
    "DEFAULT_MANIFOLDS",
    "ALL_MANIFOLDS",
    "CesiumParams",
    "AtomicBasis",
    "build_cesium",
    "population_confinement",
]

LINEWIDTH_MHZ = 5.2  # gamma / 2 pi

# D2 hyperfine intervals (MHz), standard cesium reference data
_GROUND_HFS_MHZ = 9192.631770
_EXCITED_SPLITTINGS_MHZ = {(5, 4): 251.0916, (4, 3): 201.2871, (3, 2): 151.2247}

ALL_MANIFOLDS = frozenset({"3", "4", "2'", "3'", "4'", "5'"})
DEFAULT_MANIFOLDS = frozenset({"4", "3'", "4'", "5'"})


def _default_excited_detunings() -> dict[int, float]:
    d4 = -_EXCITED_SPLITTINGS_MHZ[(5, 4)]
    d3 = d4 - _EXCITED_SPLITTINGS_MHZ[(4, 3)]
    d2 = d3 - _EXCITED_SPLITTINGS_MHZ[(3, 2)]
    return {2: d2 / LINEWIDTH_MHZ, 3: d3 / LINEWIDTH_MHZ, 4: d4 / LINEWIDTH_MHZ}


def _parse_manifold(label: str) -> tuple[int, bool]:
    excited = label.endswith("'")
    return int(label.rstrip("'")), excited


@dataclass(frozen=True)
class CesiumParams(TwoLevelParams):
    """Two-level parameters plus hyperfine structure (all rates in units of gamma).

    ``g`` is the circular-basis coupling; the horizontal-mode coupling is
    ``sqrt(2) g`` and is always derived.
    """

    ground_splitting: float = -_GROUND_HFS_MHZ / LINEWIDTH_MHZ
    excited_detunings: Mapping[int, float] = field(default_factory=_default_excited_detunings)
    included_manifolds: frozenset = DEFAULT_MANIFOLDS
    drive_polarization: int = -1

    def __post_init__(self):
        super().__post_init__()
        inc = frozenset(str(m) for m in self.included_manifolds)
        object.__setattr__(self, "included_manifolds", inc)
        unknown = inc - ALL_MANIFOLDS
        if unknown:
            raise ValueError(f"unknown manifolds {sorted(unknown)}; choose from {sorted(ALL_MANIFOLDS)}")
        if not {"4", "5'"} <= inc:
            raise ValueError("the cycling manifolds F=4 and F'=5' must be included")
        if self.drive_polarization not in (-1, 1):
            raise ValueError(f"drive_polarization must be -1 or +1, got {self.drive_polarization}")
        det = {int(k): float(v) for k, v in self.excited_detunings.items()}
        det[5] = 0.0
        object.__setattr__(self, "excited_detunings", det)
        for fp in (2, 3, 4):
            if f"{fp}'" in inc and fp not in det:
                raise ValueError(f"missing excited detuning for F'={fp}'")

    @property
    def g_horizontal(self) -> float:
        return float(np.sqrt(2.0) * self.g)

    def suppression_margins(self) -> dict[str, float]:
        """Smallest ``|±delta0 - Delta_{F'5'}|`` for each included off-cycling F'."""
        out = {}
        for fp in (2, 3, 4):
            if f"{fp}'" in self.included_manifolds:
                d = self.excited_detunings[fp]
                out[f"{fp}'"] = min(abs(self.delta0 - d), abs(-self.delta0 - d))
        return out

    def validity_warnings(self) -> list[str]:
        warn = super().validity_warnings()
        for name, margin in self.suppression_margins().items():
            if margin < 5.0 * self.gamma:
                warn.append(f"cavity detuning from F'={name} is only {margin:.2f} gamma")
        return warn


class AtomicBasis:
    """Index bookkeeping for the included hyperfine sublevels."""

    def __init__(self, manifolds):
        ground, excited = [], []
        for label in manifolds:
            F, exc = _parse_manifold(label)
            (excited if exc else ground).append(F)
        self.states: list[tuple[int, int, bool]] = []
        for F in sorted(ground):
            self.states += [(F, m, False) for m in range(-F, F + 1)]
        for F in sorted(excited):
            self.states += [(F, m, True) for m in range(-F, F + 1)]
        self._index = {s: i for i, s in enumerate(self.states)}

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, F: int, m: int, excited: bool) -> int:
        return self._index[(F, m, excited)]

    def has(self, F: int, m: int, excited: bool) -> bool:
        return (F, m, excited) in self._index

    def label(self, i: int) -> str:
        F, m, exc = self.states[i]
        return f"|{F}{chr(39) if exc else ''},{m:+d}>"

    def manifold_projector(self, F: int, excited: bool) -> np.ndarray:
        return np.diag([1.0 if (s[0] == F and s[2] == excited) else 0.0 for s in self.states])

    def dipole(self, q: int) -> sp.csr_matrix:
        """``D_q = sum C(F, F', m, q) |F, m><F', m+q|`` restricted to this basis."""
        rows, cols, vals = [], [], []
        for i, (F, m, exc) in enumerate(self.states):
            if exc:
                continue
            for j, (Fp, mp, exc_p) in enumerate(self.states):
                if exc_p and mp == m + q:
                    c = clebsch_gordan(F, Fp, m, q)
                    if c != 0.0:
                        rows.append(i)
                        cols.append(j)
                        vals.append(c)
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))


def build_cesium(p: CesiumParams) -> BuiltSystem:
    basis = AtomicBasis(p.included_manifolds)
    n = p.n_max + 1
    layout = SpaceLayout([("atom", basis.dim), ("red", n), ("blue", n)])

    h0 = np.zeros(basis.dim)
    for i, (F, m, exc) in enumerate(basis.states):
        if exc:
            h0[i] = p.excited_detunings[F]
        elif F == 3:
            h0[i] = p.ground_splitting
    H0 = embed(sp.diags(h0), layout, "atom")

    D = {q: embed(basis.dipole(q), layout, "atom") for q in (-1, 0, 1)}
    Dh = (D[1] + D[-1]) / np.sqrt(2.0)
    a = annihilation(p.n_max)
    r = embed(a, layout, "red")
    b = embed(a, layout, "blue")
    E = r + b
    Dd = D[p.drive_polarization]
    H = H0 + p.delta0 * (b.dag() @ b - r.dag() @ r) \
        + (0.5 * p.omega_rabi) * (Dd + Dd.dag()) \
        + p.g_horizontal * (E @ Dh.dag() + Dh @ E.dag())

    channels = [CollapseChannel(D[q], p.gamma) for q in (-1, 0, 1)]
    channels += [CollapseChannel(r, 2 * p.kappa), CollapseChannel(b, 2 * p.kappa)]
    L = build_liouvillian(H, channels)

    s = p.drive_polarization
    ig = basis.index(4, 4 * s, False)
    ie = basis.index(5, 5 * s, True)
    pg = sp.csr_matrix(([1.0], ([ig], [ig])), shape=(basis.dim,) * 2)
    pe = sp.csr_matrix(([1.0], ([ie], [ie])), shape=(basis.dim,) * 2)
    ops = {
        "D-1": D[-1], "D0": D[0], "D+1": D[1], "D_h": Dh,
        "r": r, "b": b, "E": E,
        "P_cycle_ground": embed(pg, layout, "atom"),
        "P_cycle_excited": embed(pe, layout, "atom"),
    }
    ops["P_cycle"] = ops["P_cycle_ground"] + ops["P_cycle_excited"]
    for label in sorted(p.included_manifolds):
        F, exc = _parse_manifold(label)
        ops[f"P_{label}"] = embed(basis.manifold_projector(F, exc), layout, "atom")
    extras = {
        "basis": basis,
        "atomic_sources": (("D-1", p.gamma), ("D0", p.gamma), ("D+1", p.gamma)),
        "suppression_margins": p.suppression_margins(),
    }
    return BuiltSystem(layout, L, ops, p, tuple(p.validity_warnings()), extras)


def population_confinement(rho_ss: DensityOperator, system: BuiltSystem) -> float:
    """Steady-state population of the two cycling sublevels."""
    try:
        proj = system.named_operators["P_cycle"]
    except KeyError:
        raise ValueError("system has no cycling-state projectors (not a cesium model)") from None
    val = expectation(rho_ss, proj)
    return float(min(max(val.real, 0.0), 1.0))
