import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import fd_jacobian
from vaxdyn import (
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
from vaxdyn.equilibria import dfe_state, ede_state, find_ede_roots
from vaxdyn.model import grouped

policies = st.one_of(
    st.builds(lambda S, f: AttitudePolicy.constant(S, f * S),
              st.floats(0, 20), st.floats(0, 1)),
    st.builds(AttitudePolicy.monotone_exp, st.floats(0, 20), st.floats(0.01, 20)),
    st.builds(AttitudePolicy.peaked, st.floats(0, 20), st.floats(0.01, 20),
              st.floats(0.01, 1.0)),
)


def test_params_validation():
    for bad in (dict(R0=0), dict(v=-1), dict(h=-0.1), dict(epsilon=0), dict(epsilon=1),
                dict(R0=math.nan)):
        with pytest.raises(ValueError):
            ModelParams(**bad)
    p = ModelParams(R0=4, h=10)
    assert p.r == 3 and p.hbar == 11
    assert p.y_max == pytest.approx(8.25)


def test_nondimensionalize_canonical():
    mu, gamma = 1.0, 1999.0
    p = nondimensionalize(DimensionalParams(beta=4 * (gamma + mu), gamma=gamma, theta=10 * mu,
                                            mu=mu, phi=50 * mu))
    assert (p.R0, p.v, p.h) == pytest.approx((4, 50, 10))
    assert p.epsilon == pytest.approx(5e-4)


def test_nondimensionalize_zero_rates():
    p = nondimensionalize(DimensionalParams(beta=2.0, gamma=2.0, theta=0, mu=0.5, phi=0))
    assert p.R0 == pytest.approx(2 / 2.5) and p.h == 0 and p.v == 0


def test_dimensional_rejects_bad_mu():
    with pytest.raises(ValueError):
        DimensionalParams(1, 1, 0, 0, 0)


def test_omega_examples():
    assert omega(AttitudePolicy.monotone_exp(3, 2), 0.0) == 0
    assert omega(AttitudePolicy.peaked(10, 0.6, 0.5), 1 / 0.6) == pytest.approx(5.0)
    assert abs(omega(AttitudePolicy.monotone_exp(2, 1), 20.0) - 2) < 1e-8
    assert psi(AttitudePolicy.constant(5, 5), 3.0) == 0
    assert psi(AttitudePolicy.monotone_exp(2, 1), 0.0) == 2
    assert abs(psi(AttitudePolicy.peaked(10, 0.6, 1.0), 1 / 0.6)) < 1e-12
    assert omega_prime(AttitudePolicy.constant(5, 1), 2.0) == 0
    assert omega_prime(AttitudePolicy.monotone_exp(2, 1), 0.0) == 2
    assert abs(omega_prime(AttitudePolicy.peaked(7, 0.3, 0.8), 1 / 0.3)) < 1e-12


def test_policy_validation():
    with pytest.raises(ValueError):
        AttitudePolicy.peaked(10, 0.6, 1.2)
    with pytest.raises(ValueError):
        AttitudePolicy.constant(2, 3)
    with pytest.raises(ValueError):
        AttitudePolicy.monotone_exp(2, 0)
    with pytest.raises(ValueError):
        AttitudePolicy.monotone_exp(2, 1).omega(-1e-3)


@given(policies, st.floats(0, 100))
def test_omega_bounds(pol, Y):
    w = omega(pol, Y)
    assert -1e-12 <= w <= pol.Sigma * (1 + 1e-12) + 1e-12
    assert psi(pol, Y) >= -1e-12
    assert psi_prime(pol, Y) == -omega_prime(pol, Y)
    assert pol.sigma_prime(Y) == 0


@given(policies, st.floats(0.01, 30))
def test_omega_prime_matches_fd(pol, Y):
    h = 1e-6 * max(1.0, Y)
    fd = (pol.omega(Y + h) - pol.omega(Y - h)) / (2 * h)
    exact = pol.omega_prime(Y)
    assert abs(fd - exact) <= 1e-6 * max(1.0, abs(exact), pol.Sigma * pol.a)


def test_grouped_definitions(p10):
    pol = AttitudePolicy.monotone_exp(5, 1)
    g = grouped(p10, pol, 0.7)
    w, ps = pol.omega(0.7), pol.psi(0.7)
    assert g.SigmaBar == w + ps + 1
    assert g.zeta == g.SigmaBar + 50
    assert g.eta == g.SigmaBar + 10
    assert g.xi == g.SigmaBar + 10 * (ps + 1)
    assert g.rho == g.SigmaBar * (50 + 3 * 10) + 4 * 10 * 50
    assert g.chi(2.0) == g.zeta + 2.0


def test_rhs_vanishes_at_dfe(p10):
    pol = AttitudePolicy.constant(5, 5)
    assert np.max(np.abs(rhs_scaled(p10, pol, dfe_state(p10, pol).state))) <= 1e-12


@given(policies, st.floats(0, 8), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1),
       st.floats(0, 1), st.floats(0, 1))
def test_population_conservation(pol, Y, zf, S, pf, R, xf):
    p = ModelParams(R0=4, v=50, h=10, epsilon=5e-4)
    u = np.array([Y, zf * Y, S, pf * S, R, xf * R])
    f = rhs_scaled(p, pol, u)
    N = S + p.epsilon * Y + R
    assert abs(f[2] + p.epsilon * f[0] + f[4] - (1 - N)) <= 1e-12 * max(1.0, abs(f).max())


def test_rhs_on_manifold_conserves(p10):
    pol = AttitudePolicy.monotone_exp(2, 1)
    u = np.array([1.3, 0.4, 0.3, 0.1, 1 - 0.3 - 5e-4 * 1.3, 0.2])
    f = rhs_scaled(p10, pol, u)
    assert abs(f[2] + 5e-4 * f[0] + f[4]) <= 1e-12


def test_rhs_deterministic(p10):
    pol = AttitudePolicy.peaked(10, 0.6, 0.73)
    u = ScaledState(5, 0.05, 0.25, 0.01, 0.75, 0.44)
    assert np.array_equal(rhs_scaled(p10, pol, u), rhs_scaled(p10, pol, u))


def test_ede_slow_residuals(p10):
    pol = AttitudePolicy.monotone_exp(2, 1)
    Y = find_ede_roots(p10, pol)[0].Y
    st_ = ede_state(p10, pol, Y)
    f = rhs_scaled(p10, pol, st_)
    assert abs(p10.R0 * st_.S - 1) <= 1e-8
    assert np.max(np.abs(f[2:4])) <= 1e-8
    assert np.max(np.abs(f[4:])) <= 10 * p10.epsilon


@given(policies, st.floats(0.01, 8), st.floats(0, 1), st.floats(0.01, 1), st.floats(0, 1),
       st.floats(0.01, 1), st.floats(0, 1))
def test_jacobian_matches_fd(pol, Y, zf, S, pf, R, xf):
    p = ModelParams(R0=4, v=50, h=10, epsilon=5e-4)
    u = np.array([Y, zf * Y, S, pf * S, R, xf * R])
    J = jacobian(p, pol, u)
    fd = fd_jacobian(lambda x: rhs_scaled(p, pol, x), u)
    assert np.max(np.abs(J - fd)) <= 1e-5 * max(1.0, np.max(np.abs(J)))


def test_scaled_state_helpers():
    s = ScaledState(2.0, 0.5, 0.3, 0.1, 0.699, 0.2)
    assert s.unprotected(1e-3) == pytest.approx(0.2 + 1e-3 * 1.5 + 0.2)
    assert s.population(5e-4) == pytest.approx(1.0)
    assert s.is_valid(5e-4, tol=1e-9)
    assert not ScaledState(1, 2, 0.3, 0.1, 0.7, 0.2).is_valid(5e-4)
    assert ScaledState.from_array(s.as_array()) == s
