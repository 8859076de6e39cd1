"""Where the number of endemic states changes, for the peaked response.

Scans the peak height d at fixed a and prints the equilibrium pattern
(S stable, U unstable, ordered by prevalence) next to the fold values of d.

Run: python3 demos/fold_scan.py
"""

import warnings

import numpy as np

from vaxdyn import ModelParams, NearTangencyWarning, classify_regions, tangency_d_values

# the scan passes right through the folds, where this warning is expected
warnings.simplefilter("ignore", NearTangencyWarning)

params = ModelParams(R0=4.0, v=50.0, h=10.0, epsilon=5e-4)
Sigma, a = 10.0, 0.6

folds = tangency_d_values(params, Sigma, a)
print("fold points: " + ", ".join(f"d={d:.4f} (Y={Y:.3f})" for d, Y in folds))

last = None
for d in np.round(np.arange(0.40, 1.001, 0.01), 2):
    label = classify_regions(params, Sigma, a, float(d)).pattern
    if label != last:
        print(f"d >= {d:.2f}: {label}")
        last = label
