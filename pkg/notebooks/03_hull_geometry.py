"""
Moment curves and their hulls
=============================

For a pair of index shifts we either separate the two convex hulls with a
plane or find mixing weights that make them meet.
"""

import math

import numpy as np

from signsat import geometry as geo, links

##############################################################################
# Logistic errors: always separable
# ---------------------------------

logit = links.logistic()
cert = geo.certify_disjoint(logit, 2.0, 1.0)
print(cert.verdict, cert.separator)

##############################################################################
# Periodic log-odds slope
# -----------------------
#
# ``periodic_gdot(a)`` has slope ``a + cos``. Shifts that are whole periods
# apart need a small nudge before the gap check goes through.

wave = links.periodic_gdot(2.0)
pc = links.classify_period(wave)
print(pc.eta, pc.q0)
s, t = 2 * math.pi + 1, 2 * math.pi
eps = geo.find_epsilon(wave, s, t)
print("epsilon", eps)
print(geo.certify_disjoint(wave, s - eps, t + eps).verdict)

##############################################################################
# Probit: the hulls touch
# -----------------------

probit = links.gaussian_tail()
for d, c in geo.delta_scan(probit, 1.0, [0.01, 0.1, 0.3, 0.5]):
    lam, mu = c.intersection_weights if c.intersection_weights else (None, None)
    used = "" if lam is None else f" ({np.count_nonzero(lam)} + {np.count_nonzero(mu)} support points)"
    print(f"delta {d}: {c.verdict}, residual {c.residual}{used}")
