"""
Who can tell two coefficient vectors apart?
===========================================

Two uniform regressors, logistic errors and a normal fixed effect. We
compare the true direction with a few candidates, first with the closed
form and then by brute simulation.
"""

import numpy as np

from signsat import dgp, ident

design = dgp.uniform_example_design(0.5)
print(design.beta)

##############################################################################
# Mismatch probability
# --------------------
#
# ``r_population`` is the chance that the two linear indices disagree in
# sign. A value of zero means the candidate is observationally equivalent
# to the truth.

for cand in [(1.0, 0.7), (1.0, 0.5), (2.0, 1.0), (-1.0, 0.2)]:
    exact, _ = ident.r_population(design, cand)
    approx, se = ident.r_population(design, cand, ident.MONTE_CARLO, draws=200_000, seed=1)
    print(f"{cand}: closed form {exact:.6f}, simulated {approx:.6f} +/- {se:.1e}")

##############################################################################
# A scan over the second coefficient
# ----------------------------------

grid = [(1.0, x) for x in np.linspace(-1.5, 1.5, 13)]
print(ident.scan_to_csv(ident.id_scan(design, grid), design.k))

##############################################################################
# The time-dummy design
# ---------------------
#
# With a period dummy and a bounded covariate, any coefficient on the dummy
# larger than one in absolute value keeps the index on one side of zero.
# Nothing nearby can then be told apart.

for b2 in (0.5, 0.9, 1.1, 1.5):
    cham = dgp.chamberlain_design((1.0, b2))
    rep = ident.identification_verdict(cham, (1.0, b2 + 0.1))
    print(b2, rep.verdict, rep.r_value)
