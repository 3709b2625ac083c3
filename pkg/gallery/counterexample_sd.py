"""A law in H* but outside V where diversification fails.

The survival of a weighted sum of two iid copies is compared for a balanced
and a concentrated weight vector.  Near x = 1.5 the concentrated portfolio
has the lower tail probability, which breaks the dominance seen for V-laws.
"""

import numpy as np

from htd import check_sd, make_example, make_pareto, survival_weighted_sum

F = make_example("EX_SD_COUNTER")
theta, eta = (0.4, 0.6), (0.25, 0.75)

for x in (1.2, 1.5, 1.6, 2.0, 5.0):
    s_t = survival_weighted_sum(F, theta, x)
    s_e = survival_weighted_sum(F, eta, x)
    print(f"x={x:4.1f}  S_theta={s_t:.6f}  S_eta={s_e:.6f}  margin={s_t - s_e:+.5f}")

v = check_sd(F, theta, eta)
print("default grid:", v.relation.value, "worst x =", v.witness.x)

# the same weights with a Pareto(1/2) summand keep the order everywhere
ok = check_sd(make_pareto(0.5), theta, eta)
print("pareto(0.5):", ok.relation.value, f"min margin {np.min(ok.margins):.2e}")
