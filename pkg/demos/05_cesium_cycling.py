
# coding: utf-8

# # A cesium atom on its cycling transition
#
# A sigma-polarized drive holds the atom on |4, -4> <-> |5', -5>. The two
# cavity modes are horizontally polarized, so they also couple to the other
# excited hyperfine levels and can pump population out of the cycle.
#
# One photon per mode keeps this demo fast (a few seconds). The package
# default of three photons per mode gives a Liouville space of 3.3e5 and
# takes about 10 s per steady state.

# In[1]:

import time

from mollowcav.correlations import g2_zero
from mollowcav.models import CesiumParams, build_cesium, population_confinement

N_MAX = 1


# Cycling-state population versus the cavity coupling at kappa = 2.5.

# In[2]:

for g in (0.25, 1.0, 2.5):
    t0 = time.perf_counter()
    s = build_cesium(CesiumParams(kappa=2.5, g=g, n_max=N_MAX))
    rho = s.steady_state()
    print("g = %.2f: confinement %.4f  (%.1f s)"
          % (g, population_confinement(rho, s), time.perf_counter() - t0))


# Zero-delay correlations at g = kappa = 1. With n_max = 1 the values are only
# indicative (a mode cannot hold two photons, so single-mode g2(0) = 0).

# In[3]:

s = build_cesium(CesiumParams(kappa=1.0, g=1.0, n_max=N_MAX))
rho = s.steady_state()
b, r = s.op("b"), s.op("r")
print("g2_b(0)  = %.4f" % g2_zero(rho, b))
print("g2_br(0) = %.4f" % g2_zero(rho, b, r))
print("warnings:", s.warnings or "none")
