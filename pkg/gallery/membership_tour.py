"""Place a handful of laws in the H / V / H* / G lattice."""

from htd import build, classify

LAWS = [
    "pareto(0.5)",
    "frechet(0.8)",
    "lomax(1)",
    "logcauchy()",
    "powcdf(logcauchy(), 0.5)",
    "paper(EX_V_NOT_H)",
    "paper(SQRT_LAMBDA)",
    "sum2(lomax(1))",
    "sum2(pareto(1))",
]

print(f"{'law':28s} " + " ".join(f"{c:>8s}" for c in ("H", "V", "H*", "G")))
for expr in LAWS:
    rep = classify(build(expr))
    cells = []
    for cls in ("H", "V", "Hstar", "G"):
        r = rep[cls]
        cells.append("yes" if r.passed else (r.witness.kind if r.witness else "no"))
    print(f"{expr:28s} " + " ".join(f"{c:>8s}" for c in cells))
