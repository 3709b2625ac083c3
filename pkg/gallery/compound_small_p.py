"""Compound binomial losses: dominance across p and the small-p limit.

For small trigger probability p, P(sum > x) behaves like p times the
survival of the single weighted loss, so the ratio printed below tends to 1.
"""

from htd import MC, check_compound_dominance, make_pareto, small_p_expansion_check

F = make_pareto(0.5)

rep = check_compound_dominance(2, F, "SD", p_list=(0.1, 0.5, 0.9), mc=MC(300_000, seed=1))
for p, v in rep.results:
    print(f"p={p:.1f}  {v.relation.value}")

exp = small_p_expansion_check(2, F, (0.25, 0.75), 2.0, (0.1, 0.03, 0.01), seed=0)
for row in exp.rows:
    print(f"p={row.p:<5}  ratio={row.ratio:.4f} +- {1.96 * row.ratio_se:.4f}")
