"""Which reading of the Schouten transformation law holds numerically.

The law S - S' = nabla b + 1/2 (projector) b b leaves open the sign and
which connection differentiates b. Each candidate is tried on random
data and only one leaves a zero residual.

Run: python3 demos/03_transformation_law_calibration.py
"""

from curvlab.theorems import RESOLVED_CONVENTION, calibrate_transformation_convention

for kind in ("projective", "conformal"):
    found = calibrate_transformation_convention(kind)
    print(kind)
    for label, residual in sorted(found["residuals"].items()):
        print(f"  {label:12} residual {residual:.3e}")
    print(f"  selected sign {found['sign']:+d}, {found['connection']} connection;"
          f" resolved {RESOLVED_CONVENTION[kind]}")
