
# coding: utf-8

# # Hyperfine dipole couplings of the cesium D2 line
#
# Coupling strengths between ground |F, m> and excited |F', m+q> sublevels
# follow from Wigner 3j and 6j symbols (evaluated exactly by sympy). We
# normalize to the stretched cycling transition |4, +-4> <-> |5', +-5>.

# In[1]:

import numpy as np

from mollowcav.models import AtomicBasis, clebsch_gordan


# Couplings out of the cycling ground state |4, -4> with the wrong
# polarization (q = +1). These set the leak rates out of the cycle.

# In[2]:

for fp in (5, 4, 3):
    print("F' = %d': C = %.4f" % (fp, clebsch_gordan(4, fp, -4, 1)))


# Summing squared couplings over sublevels and polarizations recovers the
# familiar relative line strengths 11/18, 7/24, 7/72 (F = 4) and
# 15/56, 3/8, 5/14 (F = 3), up to a common factor.

# In[3]:

for F, fps in ((4, (5, 4, 3)), (3, (4, 3, 2))):
    s = np.array([sum(clebsch_gordan(F, fp, m, q) ** 2 for m in range(-F, F + 1)
                      for q in (-1, 0, 1) if abs(m + q) <= fp) for fp in fps])
    print("F = %d:" % F, {fp: round(float(x), 4) for fp, x in zip(fps, s / s.sum())})


# Every excited sublevel decays at the same total rate.

# In[4]:

rates = [sum(clebsch_gordan(F, fp, mp - q, q) ** 2 for F in (3, 4) for q in (-1, 0, 1)
             if abs(mp - q) <= F)
         for fp in (2, 3, 4, 5) for mp in range(-fp, fp + 1)]
print("spread of excited-state decay rates: %.1e" % np.ptp(rates))


# The dipole operators in the default basis (F = 4 and F' = 3', 4', 5').

# In[5]:

basis = AtomicBasis({"4", "3'", "4'", "5'"})
print("basis size:", basis.dim)
for q in (-1, 0, 1):
    print("q = %+d: %d nonzero couplings" % (q, basis.dipole(q).nnz))
