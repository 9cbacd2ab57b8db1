"""
Power spectra and steady-state photon fluxes.

The spectrum of a first-order covariance series ``c(tau)`` is

    P(omega) = (1/pi) Re  int_0^inf c(tau) exp(-i omega tau) d tau,

which is the two-sided transform folded with ``c(-tau) = conj(c(tau))``.
Frequencies are in units of gamma relative to the interaction-picture frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .correlations import CorrelationKind, CorrelationSeries
from .hilbert import DensityOperator, Operator, expectation

__all__ = [
    "Spectrum",
    "TruncatedTailError",
    "power_spectrum",
    "steady_flux",
    "integrated_weight",
    "band_weight",
    "parseval_error",
    "spectral_peaks",
    "weight_fraction",
]

TAIL_TOL = 1e-4


class TruncatedTailError(ValueError):
    """The correlation has not decayed by the end of the delay grid."""


@dataclass(frozen=True)
class Spectrum:
    omega: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    source_label: str = ""
    window_rate: float = 0.0
    imag_residual: float = 0.0

    @property
    def peak(self) -> tuple[float, float]:
        i = int(np.argmax(self.values))
        return float(self.omega[i]), float(self.values[i])

    def value_at(self, omega: float) -> float:
        return float(np.interp(omega, self.omega, self.values))


def _trapezoid_weights(tau: np.ndarray) -> np.ndarray:
    w = np.full(tau.size, tau[1] - tau[0]) if tau.size > 1 else np.zeros(1)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def _window_rate(corr: CorrelationSeries, tail_tol: float) -> float:
    c = np.abs(corr.values)
    peak = c.max()
    tail = c[-1]
    if peak == 0 or tail <= tail_tol * peak:
        return 0.0
    return float(np.log(tail / (tail_tol * peak)) / corr.tau[-1])


def power_spectrum(corr: CorrelationSeries, omega_grid, window: bool = True,
                   tail_tol: float = TAIL_TOL, source_label: str = "",
                   chunk: int = 256) -> Spectrum:
    """Trapezoidal one-sided Fourier quadrature of a first-order series.

    If ``|c(tau_max)|`` exceeds ``tail_tol`` of the peak, an exponential
    window ``exp(-eta tau)`` is applied so that the tail meets the tolerance
    (``window_rate`` records ``eta``); with ``window=False`` that case raises
    :class:`TruncatedTailError` instead.
    """
    if corr.kind != CorrelationKind.FIRST_ORDER:
        raise ValueError(f"power spectra need a first-order series, got {corr.kind}")
    tau = corr.tau
    if tau.size < 2:
        raise TruncatedTailError("need at least two delay points")
    eta = _window_rate(corr, tail_tol)
    if eta > 0 and not window:
        raise TruncatedTailError(
            f"|c(tau_max)|/max|c| = {abs(corr.values[-1]) / np.abs(corr.values).max():.2e} "
            f"exceeds {tail_tol:g}; extend the delay grid or enable windowing")
    c = corr.values.astype(complex) * np.exp(-eta * tau)
    wc = _trapezoid_weights(tau) * c
    omega = np.asarray(omega_grid, dtype=float)
    out = np.empty(omega.size)
    for s in range(0, omega.size, chunk):
        w = omega[s:s + chunk]
        phase = np.exp(-1j * np.outer(w, tau))
        out[s:s + chunk] = (phase @ wc).real / np.pi
    # Hermitian symmetry of the folded integrand requires c(0) real
    resid = float(abs(np.imag(corr.values[0])))
    return Spectrum(omega, out, source_label or corr.label, eta, resid)


def steady_flux(rho_ss: DensityOperator, kappa: float, e_minus: Operator,
                e_plus: Operator, tol: float = 1e-10) -> float:
    """Output photon flux ``2 kappa <E^- E^+>``."""
    if not e_minus.allclose(e_plus.dag(), atol=1e-12):
        raise ValueError("e_minus must be the adjoint of e_plus")
    val = 2.0 * kappa * expectation(rho_ss, e_minus @ e_plus)
    if val.real < -tol:
        raise ValueError(f"negative flux {val.real:.3e}: corrupt steady state")
    return max(val.real, 0.0)


def integrated_weight(spec: Spectrum) -> float:
    return float(np.trapezoid(spec.values, spec.omega))


def weight_fraction(spec: Spectrum, center: float, half_width: float) -> float:
    """Share of the integrated spectrum within ``center ± half_width``."""
    sel = np.abs(spec.omega - center) <= half_width
    total = integrated_weight(spec)
    return float(np.trapezoid(spec.values[sel], spec.omega[sel]) / total) if total else 0.0


def band_weight(corr: CorrelationSeries, half_band: float, center: float = 0.0) -> float:
    """Exact integral of :func:`power_spectrum` over ``center ± half_band``.

    The quadrature spectrum is a finite trigonometric sum, so each term
    integrates in closed form: ``int e^{-i w tau} dw = e^{-i c tau} 2 sin(B tau)/tau``.
    """
    tau = corr.tau
    eta = _window_rate(corr, TAIL_TOL)
    wc = _trapezoid_weights(tau) * corr.values.astype(complex) * np.exp(-eta * tau)
    kernel = 2.0 * half_band * np.sinc(half_band * tau / np.pi) * np.exp(-1j * center * tau)
    return float((wc @ kernel).real / np.pi)


def parseval_error(corr: CorrelationSeries, half_band: float = 400.0,
                   center: float = 0.0) -> float:
    """Relative mismatch between ``int P d omega`` over a wide band and ``c(0)``."""
    ref = float(np.real(corr.values[0]))
    err = abs(band_weight(corr, half_band, center) - ref)
    # a vanishing series (no emission) has a vanishing spectrum
    return err / abs(ref) if ref != 0.0 else err


def spectral_peaks(spec: Spectrum, rel_prominence: float = 1e-2) -> np.ndarray:
    """Frequencies of local maxima whose prominence exceeds a share of the max."""
    vmax = float(np.max(spec.values))
    if vmax <= 0:
        return np.empty(0)
    idx, _ = find_peaks(spec.values, prominence=rel_prominence * vmax)
    return spec.omega[idx]
