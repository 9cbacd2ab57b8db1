
# coding: utf-8

# # Emission spectra and cavity output flux
#
# The atomic fluorescence shows the Mollow triplet; each cavity mode picks out
# one sideband. We look at how the spectra change with the coupling g, and
# scan the drive strength to see where the cavity output peaks.

# In[1]:

from pathlib import Path

import numpy as np

from mollowcav.correlations import first_order_many
from mollowcav.lindblad import uniform_grid
from mollowcav.models import TwoLevelParams, build_two_level
from mollowcav.spectra import parseval_error, power_spectrum, spectral_peaks, steady_flux

OUT = Path("demo_output")
OUT.mkdir(exist_ok=True)

tau = uniform_grid(40.0, 0.005)
omega = np.linspace(-40.0, 40.0, 4001)


# Spectra for three couplings at kappa = 2.5 gamma. A first-order series per
# source, then a quadrature Fourier transform.

# In[2]:

spectra = {}
for g in (0.25, 1.0, 2.5):
    s = build_two_level(TwoLevelParams(kappa=2.5, g=g))
    rho = s.steady_state()
    corr = first_order_many(s.liouvillian, rho, {"atom": s.op("sigma_minus"), "E": s.op("E")}, tau)
    spectra[g] = {k: power_spectrum(c, omega, source_label=k) for k, c in corr.items()}
    print("g = %.2f" % g)
    for k, c in corr.items():
        sp = spectra[g][k]
        print("   %-4s peaks at %s, P(0) = %.4f, Parseval error %.1e"
              % (k, np.round(spectral_peaks(sp), 2), sp.value_at(0.0), parseval_error(c)))


# The central atomic peak shrinks as the cavity channels take over the
# sideband emission.

# In[3]:

print([round(spectra[g]["atom"].value_at(0.0), 4) for g in spectra])


# Output flux 2 kappa <E^dag E> as a function of the drive.

# In[4]:

drives = np.arange(15.0, 35.01, 1.0)
for g in (0.25, 1.0, 2.5):
    flux = []
    for w in drives:
        s = build_two_level(TwoLevelParams(kappa=2.5, g=g, omega_rabi=w, n_max=2))
        E = s.op("E")
        flux.append(steady_flux(s.steady_state(), 2.5, E.dag(), E))
    flux = np.array(flux)
    print("g = %.2f: max flux %.4f at Omega = %.1f" % (g, flux.max(), drives[flux.argmax()]))


# In[5]:

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, axes = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    for g, sp in spectra.items():
        axes[0].plot(omega, sp["atom"].values, label="g = %g" % g)
        axes[1].plot(omega, sp["E"].values, label="g = %g" % g)
    axes[0].set_ylabel("atomic P")
    axes[1].set_ylabel("cavity P")
    axes[1].set_xlabel(r"$\omega/\gamma$")
    axes[0].legend()
    fig.tight_layout()
    fig.savefig(OUT / "spectra.png", dpi=120)
    print("saved", OUT / "spectra.png")
