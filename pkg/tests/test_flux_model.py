import math

import numpy as np
import pytest

from oracles import flux_fd_jacobian
from scaled_euler import (DegenerateEigenvectorError, FluxModel, InvalidStateError, State, brio,
                          check_genuine_nonlinearity, eigen, jacobian, quadratic_g, validate_hypotheses)


def test_state_rejects_negative_density():
    with pytest.raises(InvalidStateError):
        State(0.0, -1e-300)
    assert State(1, 0).rho == 0.0


def test_model_rejects_bad_epsilon_and_g():
    with pytest.raises(InvalidStateError):
        brio(0.0)
    with pytest.raises(InvalidStateError):
        FluxModel(lambda r: r, lambda r: 1.0, 0.1, g_kind="cubic")


@pytest.mark.parametrize("eps,state,expected", [
    (1.0, (0.0, 1.0), [[0, 1], [1, -1]]),
    (0.5, (2.0, 0.0), [[2, 0], [0, 1.5]]),
    (0.1, (1.0, 2.0), [[1, 0.2], [2, 0.9]]),
])
def test_jacobian_examples(eps, state, expected):
    np.testing.assert_allclose(jacobian(brio(eps), State(*state)), expected, rtol=0, atol=1e-15)


def test_jacobian_quadratic_entries():
    J = jacobian(quadratic_g(0.3), State(1.0, 2.0))
    np.testing.assert_allclose(J, [[1.0, 0.6], [2.0, 1.0 - 2 * 0.3 * 2.0]], atol=1e-15)


@pytest.mark.parametrize("make", [brio, quadratic_g])
def test_jacobian_matches_finite_differences(make):
    rng = np.random.default_rng(1)
    m = make(0.1)
    for u, r in zip(rng.uniform(-3, 3, 20), rng.uniform(0.1, 5, 20)):
        J = jacobian(m, State(u, r))
        np.testing.assert_allclose(J, flux_fd_jacobian(m.flux, u, r), atol=1e-8)


def test_eigen_example_against_numpy():
    m = brio(1.0)
    ep = eigen(m, State(0.0, 1.0))
    assert ep.lambda1 == pytest.approx(-(1 + math.sqrt(5)) / 2, abs=1e-14)
    assert ep.lambda2 == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-14)
    ref = np.sort(np.linalg.eigvals(jacobian(m, State(0.0, 1.0))).real)
    np.testing.assert_allclose([ep.lambda1, ep.lambda2], ref, atol=1e-14)


def test_eigenvalues_at_zero_density_and_vanishing_eps():
    m = brio(0.3)
    ep = eigen(m, State(2.0, 0.0), vectors=False)
    assert (ep.lambda1, ep.lambda2) == pytest.approx((2.0 - 0.3, 2.0))
    with pytest.raises(DegenerateEigenvectorError):
        eigen(m, State(2.0, 0.0))
    ep = eigen(brio(1e-14), State(3.0, 5.0))
    assert ep.lambda1 == pytest.approx(3.0, abs=1e-6) and ep.lambda2 == pytest.approx(3.0, abs=1e-6)


@pytest.mark.parametrize("make", [brio, quadratic_g])
def test_eigen_residual_and_hyperbolicity(make):
    rng = np.random.default_rng(2)
    for eps in (1e-6, 1e-3, 0.5):
        m = make(eps)
        for u, r in zip(rng.uniform(-5, 5, 50), rng.uniform(1e-3, 10, 50)):
            s = State(u, r)
            A = jacobian(m, s)
            ep = eigen(m, s)
            assert ep.lambda1 < ep.lambda2
            for lam, vec in ((ep.lambda1, ep.r1), (ep.lambda2, ep.r2)):
                assert np.linalg.norm(A @ vec - lam * vec) <= 1e-12 * np.linalg.norm(A) * np.linalg.norm(vec)


def test_linear_g_gap_formula():
    m = brio(0.2)
    for r in (0.0, 0.5, 3.0):
        ep = eigen(m, State(0.0, r), vectors=False)
        assert ep.lambda2 - ep.lambda1 == pytest.approx(math.sqrt(4 * 0.2 * r * r + 0.04), rel=1e-14)


def test_genuine_nonlinearity_reports():
    rep = check_genuine_nonlinearity(brio(1.0), [State(0.0, 1.0)])
    assert rep.ok and rep.grad1_dot_r1[0] < 0 < rep.grad2_dot_r2[0]
    rng = np.random.default_rng(3)
    grid = [State(u, r) for u, r in zip(rng.uniform(-5, 5, 100), rng.uniform(0.1, 10, 100))]
    assert check_genuine_nonlinearity(brio(1e-6), grid).ok
    assert check_genuine_nonlinearity(quadratic_g(0.1), [State(1.0, 1.0)]).ok


def test_validate_hypotheses():
    assert validate_hypotheses(brio(1.0), 100.0, 64).ok
    lin = FluxModel(lambda r: r, lambda r: 1.0, 1.0)
    rep = validate_hypotheses(lin, 10.0, 16)
    assert not rep.ok and rep.first_violation is not None
    quartic = FluxModel(lambda r: r ** 4, lambda r: 4 * r ** 3, 1.0)
    assert validate_hypotheses(quartic, 10.0, 32).ok
    with pytest.raises(InvalidStateError):
        validate_hypotheses(brio(1.0), 1.0, 2)
