"""Value-at-risk of a diversified Pareto(1/2) book versus the sum of parts.

With infinite-mean losses the quantile of the average exceeds the average of
the quantiles, so splitting a position raises VaR.  Comonotone summands give
exact additivity as a control.
"""

from htd import make_pareto, var_additivity_probe

F = make_pareto(0.5)
alphas = (0.9, 0.95, 0.99)

for label, como in (("independent", False), ("comonotone", True)):
    print(label)
    for r in var_additivity_probe([F, F], (0.5, 0.5), alphas, comonotone=como):
        print(f"  alpha={r.alpha:.2f}  VaR(sum)={r.var_sum:10.3f}  sum VaR={r.sum_var:10.3f}  {r.sign}")
