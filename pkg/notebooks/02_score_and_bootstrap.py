"""
Maximum score and the bootstrap test
====================================

Simulate a panel, look at the score objective over directions and run
the one-sided tests in both directions.
"""

import numpy as np

from signsat import dgp, maxscore, sstest, study
from signsat.sstest import TestConfig

sample = dgp.simulate(dgp.uniform_example_design(0.5), 1000, seed=42)
obj = maxscore.ScoreObjective.from_sample(sample)

##############################################################################
# The objective along the unit circle
# -----------------------------------
#
# It is a step function; the exact optimiser visits every cell of the line
# arrangement once.

angles = np.linspace(-np.pi, np.pi, 9)
for a in angles:
    q = np.array([np.cos(a), np.sin(a)])
    print(f"{a:+.3f}  {maxscore.rho_hat(obj, q):+.4f}")

hi = maxscore.maximize(obj)
lo = maxscore.minimize(obj)
print("sup", hi.value, hi.argq, hi.cells_visited)
print("inf", lo.value, lo.argq)

##############################################################################
# Both one-sided tests
# --------------------

rep = sstest.sign_saturation_check(sample, TestConfig(seed=7))
for side in (rep.upper, rep.lower):
    print(side.direction, round(side.t_n, 4), round(side.c_crit, 4), side.reject)
print(rep.verdict)

##############################################################################
# A small size study
# ------------------
#
# When the index never changes sign the upper test should rarely reject.

null = dgp.chamberlain_design((1.0, -2.0))
res = study.mc_study(null, 500, 40, "upper", TestConfig(b_reps=99), seed=3)
print(res.to_csv())
