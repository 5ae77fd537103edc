"""Random Pauli Hamiltonians versus the scaled GUE proxy.

With k terms the random Pauli sum shares its second-order statistics with
GUE(N)/sqrt(N). Run: ``python demos/pauli_edge.py``.
"""

from gausscomp.applications import pauli_required_k, run_experiment
from gausscomp.montecarlo import MCConfig

for nq in (4, 6, 8):
    k, feasible = pauli_required_k(nq, 0.8, 0.5)
    rep = run_experiment("pauli", {"n_qubits": nq, "k": k, "proxy_trials": 100},
                         MCConfig(50, seed=2))
    y, z = rep.mc_results["norm_Y"], rep.mc_results["norm_Z"]
    print(f"n={nq} k={k} feasible={feasible}: E||Y|| ~ {y.mean:.4f}, E||Z|| ~ {z.mean:.4f}, "
          f"ratio {y.mean / z.mean:.4f}")
