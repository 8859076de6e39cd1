"""Equilibria, stability and simulation of an SIR model with vaccination attitudes."""

from .bifurcation import (
    RegionLabel,
    TangencyPoint,
    classify_regions,
    fold_marginality_check,
    region_map,
    stability_map_monotone,
    tangency_curve,
    tangency_d_values,
    tangency_from_Y,
)
from .equilibria import (
    EquilibriumRecord,
    NearTangencyWarning,
    dfe_state,
    ede_state,
    find_ede_roots,
    omega_cr,
    omega_star,
    omega_star_prime,
    p_of_y,
    polish_equilibrium,
    reproduction_number,
)
from .model import (
    AttitudePolicy,
    DimensionalParams,
    ModelParams,
    ScaledState,
    jacobian,
    nondimensionalize,
    omega,
    omega_prime,
    psi,
    psi_prime,
    rhs_scaled,
)
from .simulate import (
    AttractorClassification,
    IntegrationError,
    SimulationConfig,
    TrajectoryRecord,
    bistability_experiment,
    classify_attractor,
    integrate,
    near_ede_initial,
    simulate_and_classify,
)
from .stability import (
    CharPoly,
    StabilityVerdict,
    asymptotic_ede_criteria,
    charpoly_via_minors,
    dfe_stability,
    eigen_verdict,
    jacobian_dfe,
    jacobian_ede,
    routh_array,
    routh_verdict,
    simplified_criterion,
    upsilon,
)

__all__ = [name for name in dir() if not name.startswith("_")]
