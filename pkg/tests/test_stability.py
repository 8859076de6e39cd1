import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import fd_jacobian
from vaxdyn import AttitudePolicy, ModelParams, rhs_scaled
from vaxdyn.equilibria import (
    dfe_state,
    ede_state,
    find_ede_roots,
    kappa,
    omega_star_prime,
    p_of_y,
    reproduction_number,
)
from vaxdyn.stability import (
    CharPoly,
    asymptotic_ede_criteria,
    charpoly_via_minors,
    dfe_cubic,
    dfe_stability,
    ede_coefficients,
    eigen_verdict,
    jacobian_dfe,
    jacobian_ede,
    routh_array,
    routh_verdict,
    simplified_criterion,
    upsilon,
    upsilon2,
    upsilon3,
    w2_of_y,
)


def interp_charpoly(M):
    """Coefficients of det(lam I - M) from its values at the roots of unity."""
    n = M.shape[0]
    lam = np.exp(2j * np.pi * np.arange(n + 1) / (n + 1))
    vals = np.array([np.linalg.det(l * np.eye(n) - M) for l in lam])
    c = np.fft.fft(vals) / (n + 1)  # c[k] multiplies lam^k
    return c.real[::-1]


# -- characteristic polynomial ------------------------------------------------

def test_charpoly_examples():
    assert charpoly_via_minors(np.eye(2)).coefficients == (-2.0, 1.0)
    assert charpoly_via_minors(np.diag([1.0, 2.0, 3.0])).coefficients == pytest.approx(
        (-6, 11, -6))


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_charpoly_matches_interpolation(n, seed):
    M = np.random.default_rng(seed).uniform(-1, 1, (n, n))
    got = charpoly_via_minors(M).as_array()
    ref = interp_charpoly(M)
    assert np.all(np.abs(got - ref) <= 1e-8 * np.maximum(1.0, np.abs(ref)))
    assert np.allclose(got, np.poly(M), rtol=1e-8, atol=1e-10)


def test_charpoly_rejects_large():
    with pytest.raises(ValueError):
        charpoly_via_minors(np.eye(9))


# -- Routh array ---------------------------------------------------------------

def test_routh_examples():
    assert routh_verdict(CharPoly((1.0, 1.0))).stable
    assert not routh_verdict(CharPoly((1.0, 1.0, 2.0))).stable
    assert not np.all(np.roots([1, 1, 1, 2]).real < 0)


def test_routh_zero_pivot_flagged():
    # lam^4 + lam^3 + 2 lam^2 + 2 lam + 1 has a zero in the third row
    v = routh_verdict(CharPoly((1.0, 2.0, 2.0, 1.0)))
    assert v.boundary
    _, patched = routh_array(CharPoly((1.0, 2.0, 2.0, 1.0)))
    assert patched


@st.composite
def poly_from_roots(draw):
    deg = draw(st.integers(1, 6))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    roots = []
    while len(roots) < deg:
        re = rng.uniform(-3, 3)
        if abs(re) < 1e-6:
            continue
        if deg - len(roots) >= 2 and rng.random() < 0.5:
            im = rng.uniform(0.1, 3)
            roots += [complex(re, im), complex(re, -im)]
        else:
            roots.append(re)
    return np.array(roots)


@given(poly_from_roots())
def test_routh_matches_roots(roots):
    coeffs = np.poly(roots).real
    v = routh_verdict(CharPoly(tuple(coeffs[1:])))
    assert v.stable == bool(np.all(roots.real < 0))
    assert v.stable == bool(np.all(np.roots(coeffs).real < 0))


# -- DFE -----------------------------------------------------------------------

def test_dfe_jacobian_top_left(p10):
    for w in (0.0, 3.0, 5.0):
        pol = AttitudePolicy.constant(5, w)
        J = jacobian_dfe(p10, pol)
        Rv = reproduction_number(p10, pol)
        assert J[0, 0] == pytest.approx((Rv - 1) / p10.epsilon, rel=1e-12)


def test_dfe_jacobian_fd(p10):
    pol = AttitudePolicy.monotone_exp(5, 1)
    u = dfe_state(p10, pol).state
    J = jacobian_dfe(p10, pol)
    # one-sided in Y: the policy is undefined for Y < 0
    fd = fd_jacobian(lambda x: rhs_scaled(p10, pol, np.maximum(x, [0, -1, -1, -1, -1, -1])),
                     np.asarray(u) + [1e-7, 0, 0, 0, 0, 0])
    assert np.allclose(J[:, 1:], fd[:, 1:], rtol=1e-6, atol=1e-6 * np.abs(J).max())


def test_dfe_sigma_zero_block(p10):
    pol = AttitudePolicy.constant(0, 0)
    J = jacobian_dfe(p10, pol)
    ev = np.sort(np.linalg.eigvals(J[2:, 2:]).real)
    zeta, eta = 1 + p10.v, 1 + p10.h
    assert ev == pytest.approx(np.sort([-1, -1, -zeta, -eta]))


def test_dfe_stability_examples(p10):
    assert dfe_stability(p10, AttitudePolicy.constant(5, 5)).stable
    v = dfe_stability(p10, AttitudePolicy.monotone_exp(5, 1))
    assert not v.stable and v.detail["R_v"] == 4


@given(st.floats(1.1, 8), st.floats(0, 100), st.floats(0, 20), st.floats(0, 20),
       st.floats(0, 1))
def test_dfe_verdict_matches_eigenvalues(R0, v, h, Sigma, f):
    p = ModelParams(R0=R0, v=v, h=h, epsilon=5e-4)
    pol = AttitudePolicy.constant(Sigma, f * Sigma)
    Rv = reproduction_number(p, pol)
    assume(abs(Rv - 1) > 0.01)
    c1, c2, c3 = dfe_cubic(p, pol)
    assert c1 * c2 > c3
    assert dfe_stability(p, pol).stable == eigen_verdict(jacobian_dfe(p, pol)).stable


# -- EDE -----------------------------------------------------------------------

def test_ede_jacobian_structure(p10):
    pol = AttitudePolicy.monotone_exp(5, 1)
    Y = find_ede_roots(p10, pol)[0].Y
    J = jacobian_ede(p10, pol, Y)
    G = 1 / p10.epsilon
    assert abs(J[0, 0]) < 1e-9 * G
    assert J[0, 2] == pytest.approx(p10.R0 * Y * G)
    chi = pol.Sigma + 1 + p10.v + p10.R0 * Y
    assert J[3, 3] == pytest.approx(-chi)
    s = ede_state(p10, pol, Y)
    assert J[3, 0] == pytest.approx(s.S * pol.omega_prime(Y) - p10.R0 * s.P)


def test_ede_jacobian_fd(bistable):
    p, pol = bistable
    for r in find_ede_roots(p, pol):
        J = jacobian_ede(p, pol, r.Y)
        fd = fd_jacobian(lambda x: rhs_scaled(p, pol, x), r.state)
        assert np.max(np.abs(J - fd)) <= 1e-5 * np.max(np.abs(J))


def test_ede_jacobian_rejects_non_root(p10):
    with pytest.raises(ValueError):
        jacobian_ede(p10, AttitudePolicy.monotone_exp(5, 1), 1.0)


def test_asymptotic_examples(p10):
    pol = AttitudePolicy.constant(5, 2)
    Y = find_ede_roots(p10, pol)[0].Y
    assert asymptotic_ede_criteria(p10, pol, Y).stable
    for Sigma, stable in ((5, False), (2, True)):
        pol = AttitudePolicy.monotone_exp(Sigma, 1)
        Y = find_ede_roots(p10, pol)[0].Y
        v = asymptotic_ede_criteria(p10, pol, Y)
        assert v.stable is stable and v.method == "asymptotic_routh"
        assert v.stable == all(m > 0 for m in v.margins)


def test_simplified_examples(p10, bistable):
    pol = AttitudePolicy.monotone_exp(5, 0.7)
    Y = find_ede_roots(p10, pol)[0].Y
    assert abs(simplified_criterion(p10, 5, pol, Y).min_margin) <= 0.15
    p, pk = bistable
    for r in find_ede_roots(p, pk):
        v = simplified_criterion(p, 10, pk, r.Y)
        if pk.omega_prime(r.Y) < 0:
            assert v.margins[1] > 0
    with pytest.raises(ValueError):
        simplified_criterion(p10, 4, pol, Y)


sigma_scen = st.tuples(st.floats(1.1, 8), st.floats(0.5, 100), st.floats(0, 20),
                       st.floats(0.1, 20), st.floats(0.05, 20))


@given(sigma_scen)
def test_simplified_agrees_with_full_criteria(sc):
    R0, v, h, Sigma, a = sc
    p = ModelParams(R0=R0, v=v, h=h)
    pol = AttitudePolicy.monotone_exp(Sigma, a)
    Y = find_ede_roots(p, pol)[0].Y
    s = simplified_criterion(p, Sigma, pol, Y)
    f = asymptotic_ede_criteria(p, pol, Y)
    assume(min(abs(m) for m in s.margins) > 1e-9)
    assert s.stable == f.stable
    # stab3 => stab2 when Sigma is constant
    if f.margins[2] > 0:
        assert f.margins[1] > 0
    assert ede_coefficients(p, pol, Y).q1 > 0


@given(st.floats(1.1, 8), st.floats(0.1, 100), st.floats(0, 20), st.floats(0, 20),
       st.floats(0, 1))
def test_upsilon_identities(R0, v, h, Sigma, frac):
    p = ModelParams(R0=R0, v=v, h=h)
    y = frac * p.r * p.hbar
    assert upsilon3(p, Sigma, y) <= upsilon2(p, Sigma, y) * (1 + 1e-10) + 1e-12
    Sb = Sigma + 1
    rho = Sb * (v + p.r * h) + R0 * h * v
    rhs = (kappa(p, Sigma) + 2 * rho * y + R0 * h * y * y) / (rho + R0 * h * y)
    assert w2_of_y(p, Sigma, y) == pytest.approx(rhs, rel=1e-10, abs=1e-10)
    # ties the lower bound to omega*': -omega*' = Sb w2 / (rho + R0 h y)
    assert -omega_star_prime(p, Sigma, y) == pytest.approx(
        Sb * w2_of_y(p, Sigma, y) / (rho + R0 * h * y), rel=1e-10)
    assert upsilon(p, Sigma, y) > 0
    assert p_of_y(p, Sigma, y) >= 0


def test_asymptotic_verdict_ignores_epsilon():
    pol = AttitudePolicy.monotone_exp(5, 1)
    verdicts = set()
    for eps in (1e-2, 1e-3, 5e-4):
        p = ModelParams(h=10, epsilon=eps)
        Y = find_ede_roots(p, pol)[0].Y
        verdicts.add(asymptotic_ede_criteria(p, pol, Y).margins)
    assert len(verdicts) == 1


@pytest.mark.parametrize("h,Sigma,a", [(10, 2, 1), (10, 5, 1), (10, 5, 0.5), (0, 1.5, 0.05),
                                       (0, 1.5, 2), (0, 1.5, 40), (10, 5, 0.8),
                                       (0, 1.5, 0.4), (0, 1.5, 7.5)])
def test_eigen_verdict_converges_as_eps_shrinks(h, Sigma, a):
    # once the eigenvalue verdict agrees with the asymptotic one it keeps agreeing,
    # and it does agree by eps = 1e-6
    pol = AttitudePolicy.monotone_exp(Sigma, a)
    agree = []
    for eps in (1e-2, 1e-3, 5e-4, 1e-5, 1e-6):
        p = ModelParams(h=h, epsilon=eps)
        Y = find_ede_roots(p, pol)[0].Y
        agree.append(asymptotic_ede_criteria(p, pol, Y).stable
                     == eigen_verdict(jacobian_ede(p, pol, Y)).stable)
    assert agree[-1]
    first = agree.index(True)
    assert all(agree[first:])


def test_eigen_verdict_examples():
    v = eigen_verdict(-np.eye(6))
    # a sixfold root only comes back to ~eps**(1/6) from the polynomial
    assert v.stable and v.margins == pytest.approx((1.0,), rel=1e-2)
    assert eigen_verdict(np.diag([1e-10, -1, -1])).boundary
    with pytest.raises(ValueError):
        eigen_verdict(np.full((2, 2), np.nan))
