
# coding: utf-8

# # The dressed-state picture and its closed forms
#
# On the sideband resonance the atom is best described by its dressed states
# |+> and |->. Dropping terms that rotate at the dressed splitting gives a
# simpler model, and for strong filtering (kappa >> g) closed-form
# correlations. Here we compare three levels of description.

# In[1]:

import numpy as np

from mollowcav.correlations import second_order_matrix
from mollowcav.lindblad import uniform_grid
from mollowcav.models import (TwoLevelParams, build_dressed_secular, build_two_level,
                              dressed_g2_auto, dressed_g2_cross, dressed_operators)


# The bare ladder operators in dressed form. Note the sign pattern.

# In[2]:

o = dressed_operators()
flip = o["sigma_plus_D"] - o["sigma_minus_D"]
print(np.allclose(o["sigma_plus"], 0.5 * o["sigma_z_D"] + 0.5 * flip))
print(np.allclose(o["sigma_minus"], 0.5 * o["sigma_z_D"] - 0.5 * flip))


# Full model, secular dressed model and closed forms at kappa = 2.5, g = 0.25.

# In[3]:

tau = uniform_grid(10.0, 0.01)
p = TwoLevelParams(kappa=2.5, g=0.25)
curves = {}
for name, s in (("full", build_two_level(p)), ("secular", build_dressed_secular(p))):
    g2 = second_order_matrix(s.liouvillian, s.steady_state(), {"r": s.op("r"), "b": s.op("b")}, tau)
    curves[name] = (g2[("r", "r")].values, g2[("r", "b")].values)
curves["closed form"] = (dressed_g2_auto(tau), dressed_g2_cross(tau, 1.0, 2.5))

for name, (auto, cross) in curves.items():
    print("%-12s g2_r(0) = %.3f   g2_rb(0) = %.3f" % (name, auto[0], cross[0]))


# The largest pointwise gaps. The closed forms assume filtering much stronger
# than kappa = 2.5 provides, so the gaps are of order 0.1 here.

# In[4]:

ref_auto, ref_cross = curves["closed form"]
for name in ("full", "secular"):
    auto, cross = curves[name]
    print("%-8s max|auto - closed| = %.3f   max|cross - closed| = %.3f"
          % (name, np.abs(auto - ref_auto).max(), np.abs(cross - ref_cross).max()))


# Stronger filtering shrinks the gap between the secular model and the closed forms.

# In[5]:

for kappa, g in ((2.5, 0.25), (5.0, 0.1), (10.0, 0.05)):
    s = build_dressed_secular(TwoLevelParams(kappa=kappa, g=g, n_max=2))
    g2 = second_order_matrix(s.liouvillian, s.steady_state(), {"r": s.op("r"), "b": s.op("b")},
                             tau[::5])
    dev = np.abs(g2[("r", "b")].values - dressed_g2_cross(tau[::5], 1.0, kappa)).max()
    print("kappa = %4.1f, g = %.2f: max cross deviation %.3f" % (kappa, g, dev))
