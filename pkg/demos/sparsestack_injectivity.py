"""SparseStack as a subspace embedding.

Parameters come from the injectivity theorem, then the smallest squared
singular value of Phi U is sampled for three test subspaces. Run:
``python demos/sparsestack_injectivity.py``.
"""

from gausscomp.applications import run_experiment, sparsestack_params
from gausscomp.montecarlo import MCConfig

d, alpha, p, n = 20, 0.5, 0.1, 5000
zeta, k, b = sparsestack_params(d, alpha, p)
print(f"d={d} alpha={alpha} p={p}: zeta={zeta}, k={k}, b={b}")
for kind in ("random", "coordinate", "aligned"):
    rep = run_experiment("sparsestack", {"d": d, "alpha": alpha, "p": p, "n": n,
                                         "subspace": kind}, MCConfig(100, seed=3))
    res = rep.mc_results["phi2_min"]
    succ = rep.verdicts["injectivity_probability"].details["success"]
    print(f"{kind:>10}: mean phi2_min {res.mean:.4f}, min {res.values.min():.4f}, "
          f"P(phi2_min > {1 - alpha}) = {succ['p_hat']:.2f}")
