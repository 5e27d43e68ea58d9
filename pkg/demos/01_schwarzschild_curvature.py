"""Curvature of the Schwarzschild exterior, checked against closed forms.

Run: python3 demos/01_schwarzschild_curvature.py
"""

import numpy as np

from curvlab.catalog import get_entry
from curvlab.curvature import compute_pack, kretschmann

print(f"{'M':>4} {'r':>6} {'max|Ric|':>10} {'Kretschmann':>14} {'48 M^2 / r^6':>14}")
for mass in (0.5, 1.0, 2.0):
    spec = get_entry("schwarzschild").with_params(M=mass)
    for r in (5.0, 7.5, 10.0):
        p = compute_pack(spec.source(), np.array([0.0, r, 1.2, 0.3]))
        print(f"{mass:4.1f} {r:6.1f} {np.max(np.abs(p.ricci.values)):10.1e} "
              f"{kretschmann(p):14.8e} {48 * mass**2 / r**6:14.8e}")

# Vacuum means Ric = 0, so the projective and conformal Weyl tensors coincide.
p = compute_pack(get_entry("schwarzschild").source(), np.array([0.0, 5.0, 1.2, 0.3]))
print("max|W - C| =", np.max(np.abs(p.w.values - p.c.values)))
