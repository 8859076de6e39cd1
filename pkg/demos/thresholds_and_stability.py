"""Vaccination threshold, endemic states and their stability for one population.

Run: python3 demos/thresholds_and_stability.py
"""

import numpy as np

from vaxdyn import (
    AttitudePolicy,
    ModelParams,
    asymptotic_ede_criteria,
    dfe_stability,
    eigen_verdict,
    find_ede_roots,
    jacobian_ede,
    omega_cr,
    reproduction_number,
)

params = ModelParams(R0=4.0, v=50.0, h=10.0, epsilon=5e-4)

# With fixed attitudes the disease dies out once enough people lean pro-vaccination.
for omega0 in (1.0, 3.0, 5.0):
    pol = AttitudePolicy.constant(Sigma=5.0, omega0=omega0)
    print(f"omega0={omega0:4.1f}  R_v={reproduction_number(params, pol):.3f}  "
          f"omega_cr={omega_cr(params, pol):.3f}  DFE stable={dfe_stability(params, pol).stable}")

# Attitudes that respond to prevalence: a larger exponent a means a quicker response.
print("\nmonotone response, Sigma=5")
for a in np.round(np.geomspace(0.2, 5, 7), 3):
    pol = AttitudePolicy.monotone_exp(5.0, a)
    for root in find_ede_roots(params, pol):
        asym = asymptotic_ede_criteria(params, pol, root.Y)
        eig = eigen_verdict(jacobian_ede(params, pol, root.Y))
        print(f"a={a:6.3f}  Y*={root.Y:.4f}  limit verdict={'stable' if asym.stable else 'unstable':8s}"
              f"  eigenvalues at eps={params.epsilon:g}: {'stable' if eig.stable else 'unstable'}")
