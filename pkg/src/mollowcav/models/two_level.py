"""Two-level atom driven on resonance, coupled to a red and a blue cavity mode."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..hilbert import SpaceLayout, annihilation, embed, transition
from ..lindblad import CollapseChannel, build_liouvillian
from .base import RESOLVED_RATIO, BuiltSystem

__all__ = ["TwoLevelParams", "build_two_level", "two_level_layout"]


@dataclass(frozen=True)
class TwoLevelParams:
    """Rates in units of the atomic linewidth ``gamma`` (FWHM).

    ``kappa`` is the cavity field halfwidth (energy decay ``2 kappa``),
    ``delta0`` half the mode splitting.
    """

    kappa: float = 1.0
    g: float = 1.0
    omega_rabi: float = 25.0
    delta0: float = 25.0
    gamma: float = 1.0
    n_max: int = 3

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if not self.g >= 0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        if not self.omega_rabi >= 0:
            raise ValueError(f"omega_rabi must be >= 0, got {self.omega_rabi}")
        if not self.delta0 > 0:
            raise ValueError(f"delta0 must be > 0, got {self.delta0}")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be a positive integer, got {self.n_max}")

    @property
    def resolution_ratio(self) -> float:
        return self.delta0 / max(self.g, self.kappa)

    @property
    def resolved_modes(self) -> str:
        """``"valid"`` when the modes are well separated compared to g and kappa."""
        return "valid" if self.resolution_ratio >= RESOLVED_RATIO else "warning"

    def validity_warnings(self) -> list[str]:
        if self.resolved_modes == "valid":
            return []
        return [f"delta0/max(g, kappa) = {self.resolution_ratio:.2f} < {RESOLVED_RATIO}: "
                "independent mode decay is questionable"]


def two_level_layout(n_max: int) -> SpaceLayout:
    return SpaceLayout([("atom", 2), ("red", n_max + 1), ("blue", n_max + 1)])


def build_two_level(p: TwoLevelParams) -> BuiltSystem:
    """Resonantly driven two-level atom with two detuned cavity modes.

    Atomic basis ``(|g>, |e>)``; subsystem order ``(atom, red, blue)``.
    """
    layout = two_level_layout(p.n_max)
    sm = transition(layout, "atom", 1, 0)
    sp_ = sm.dag()
    a = annihilation(p.n_max)
    r = embed(a, layout, "red")
    b = embed(a, layout, "blue")
    E = r + b
    H = (0.5 * p.omega_rabi) * (sm + sp_) \
        + p.delta0 * (b.dag() @ b - r.dag() @ r) \
        + p.g * (E @ sp_ + sm @ E.dag())
    channels = [
        CollapseChannel(sm, p.gamma),
        CollapseChannel(r, 2 * p.kappa),
        CollapseChannel(b, 2 * p.kappa),
    ]
    L = build_liouvillian(H, channels)
    ops = {"sigma_minus": sm, "sigma_plus": sp_, "r": r, "b": b, "E": E}
    return BuiltSystem(layout, L, ops, p, tuple(p.validity_warnings()),
                       {"atomic_sources": (("sigma_minus", p.gamma),)})
