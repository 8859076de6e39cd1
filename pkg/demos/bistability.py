"""Two nearby starting points, two different long-run outcomes.

A peaked attitude response (enthusiasm that fades when prevalence is high)
gives three endemic states here: two unstable and one stable.  One start
settles on the stable state, the other is captured by a limit cycle.

Run: python3 demos/bistability.py
"""

from vaxdyn import (
    AttitudePolicy,
    ModelParams,
    asymptotic_ede_criteria,
    bistability_experiment,
    find_ede_roots,
)

params = ModelParams(R0=4.0, v=50.0, h=10.0, epsilon=5e-4)
pol = AttitudePolicy.peaked(Sigma=10.0, a=0.6, d=0.73)

for root in find_ede_roots(params, pol):
    stable = asymptotic_ede_criteria(params, pol, root.Y).stable
    print(f"equilibrium Y={root.Y:.4f}  {'stable' if stable else 'unstable'}")

upper = (5, 0.05, 0.25, 0.01, 0.75, 0.44)
lower = (4, 0.05, 0.25, 0.01, 0.75, 0.40)
for ic, cls in zip((upper, lower), bistability_experiment(params, pol, upper, lower)):
    if cls.kind == "converged_EDE":
        print(f"start Y={ic[0]}: settles at Y={cls.target_Y:.4f}")
    else:
        print(f"start Y={ic[0]}: {cls.kind}, period {cls.period:.4f}, amplitude {cls.amplitude:.3f}")
