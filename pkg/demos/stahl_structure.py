"""Derivative structure of t -> Tr exp(A + tH) and the one-step trace-mgf comparison.

Run: ``python demos/stahl_structure.py``.
"""

import numpy as np

from gausscomp import ensembles as en
from gausscomp import tracemgf as tm

rng = np.random.default_rng(0)
a = rng.standard_normal((4, 4))
h = rng.standard_normal((4, 4))
lf = tm.LineFunction((a + a.T) / 2, (h + h.T) / 2)
rep = tm.check_stahl_structure(lf)
print("lambda(H) in", (round(rep.lambda_min_h, 3), round(rep.lambda_max_h, 3)))
for t, f2, f3 in zip(rep.grid, rep.f2, rep.f3):
    print(f"t={t:.2f}  f''={f2:10.4f}  f'''={f3:10.4f}")
print("checks:", rep.checks)

ex = tm.check_exchange(en.wigner_rademacher(3), 0.5, 50_000, rng)
print(f"exchange at theta=0.5: lhs {ex.lhs:.4f} <= rhs {ex.rhs:.4f} (g={ex.g:.4f})")
