"""
Secular dressed-state model and its closed-form correlation limits.

Valid on the sideband resonance ``omega_rabi == delta0``, in the interaction
picture where both the cavity detunings and the dressed splitting are removed.
"""

from __future__ import annotations

import numpy as np

from ..hilbert import annihilation, embed
from ..lindblad import CollapseChannel, build_liouvillian
from .base import BuiltSystem
from .two_level import TwoLevelParams, two_level_layout

__all__ = [
    "dressed_basis",
    "dressed_operators",
    "build_dressed_secular",
    "dressed_g2_auto",
    "dressed_g2_cross",
]


def dressed_basis() -> tuple[np.ndarray, np.ndarray]:
    """``|+>, |->`` as column vectors in the bare ``(|g>, |e>)`` basis."""
    g = np.array([1.0, 0.0])
    e = np.array([0.0, 1.0])
    return (g + e) / np.sqrt(2), (g - e) / np.sqrt(2)


def dressed_operators() -> dict[str, np.ndarray]:
    """2x2 dressed spin operators plus the bare ladder operators, bare basis."""
    plus, minus = dressed_basis()
    return {
        "sigma_z_D": np.outer(plus, plus) - np.outer(minus, minus),
        "sigma_plus_D": np.outer(plus, minus),
        "sigma_minus_D": np.outer(minus, plus),
        "sigma_plus": np.array([[0.0, 0.0], [1.0, 0.0]]),
        "sigma_minus": np.array([[0.0, 1.0], [0.0, 0.0]]),
    }


def build_dressed_secular(p: TwoLevelParams, atomic_dissipator: str = "secular") -> BuiltSystem:
    """``H = (g/2)[(r - b^dag) s-_D + s+_D (r^dag - b)]`` with cavity loss ``2 kappa``.

    ``atomic_dissipator="secular"`` (default) replaces ``gamma D(sigma_-)`` by
    ``(gamma/4)[D(sz_D) + D(s+_D) + D(s-_D)]``, i.e. drops the terms rotating
    at the dressed splitting. ``"bare"`` keeps ``gamma D(sigma_-)`` unrotated.
    """
    if abs(p.omega_rabi - p.delta0) > 1e-12 * max(1.0, p.delta0):
        raise ValueError(f"dressed secular model requires omega_rabi == delta0 "
                         f"(got {p.omega_rabi} vs {p.delta0})")
    layout = two_level_layout(p.n_max)
    loc = dressed_operators()
    szd, spd, smd = (embed(loc[k], layout, "atom")
                     for k in ("sigma_z_D", "sigma_plus_D", "sigma_minus_D"))
    sm = embed(loc["sigma_minus"], layout, "atom")
    a = annihilation(p.n_max)
    r = embed(a, layout, "red")
    b = embed(a, layout, "blue")
    H = (0.5 * p.g) * ((r - b.dag()) @ smd + spd @ (r.dag() - b))
    if atomic_dissipator == "secular":
        atomic = [CollapseChannel(op, p.gamma / 4) for op in (szd, spd, smd)]
    elif atomic_dissipator == "bare":
        atomic = [CollapseChannel(sm, p.gamma)]
    else:
        raise ValueError(f"unknown atomic_dissipator {atomic_dissipator!r}")
    channels = atomic + [CollapseChannel(r, 2 * p.kappa), CollapseChannel(b, 2 * p.kappa)]
    L = build_liouvillian(H, channels)
    ops = {"sigma_minus": sm, "sigma_z_D": szd, "sigma_plus_D": spd,
           "sigma_minus_D": smd, "r": r, "b": b, "E": r + b}
    return BuiltSystem(layout, L, ops, p, tuple(p.validity_warnings()),
                       {"atomic_dissipator": atomic_dissipator})


def dressed_g2_auto(tau, gamma: float = 1.0):
    """Filtered single-sideband auto-correlation, ``1 - exp(-gamma tau / 2)``."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be >= 0")
    return 1.0 - np.exp(-0.5 * gamma * tau)


def dressed_g2_cross(tau, gamma: float = 1.0, kappa: float = 1.0):
    """Red-then-blue cross-correlation in the dressed, strongly filtered limit."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be >= 0")
    ek = np.exp(-kappa * tau)
    return np.exp(-0.5 * gamma * tau) - 1.0 + 0.5 * (2.0 - ek) ** 2 + 0.5 * ek ** 2
