import math

import pytest

from scaled_euler import RiemannData
from scaled_euler.limit_analysis import closed_form_limit
from scaled_euler.weak_form import (Bump, MeasureSolution, Piece, bump_battery, from_limit, residual_rho,
                                    residual_u, run_battery, shock_solution, tolerance)

FEW = bump_battery(4, seed=3)


def test_bump_profile_and_derivatives():
    b = Bump(0.2, 0.5, 0.4, 0.3)
    assert b.phi(0.2, 0.5) == pytest.approx(math.exp(-1))
    assert b.phi(0.7, 0.5) == 0.0
    x, t, h = 0.3, 0.6, 1e-6
    _, px, pt = b.grad(x, t)
    assert px == pytest.approx((b.phi(x + h, t) - b.phi(x - h, t)) / (2 * h), rel=1e-6)
    assert pt == pytest.approx((b.phi(x, t + h) - b.phi(x, t - h)) / (2 * h), rel=1e-6)
    assert b.c1_norm() > math.exp(-1)
    assert b.t_range() == (pytest.approx(0.2), pytest.approx(0.8))


def test_measure_solution_validation():
    with pytest.raises(ValueError):
        MeasureSolution((0.0,), (Piece(1.0, 1.0),))
    with pytest.raises(ValueError):
        MeasureSolution((0.5, 0.1), (Piece(1, 1), Piece(1, 1), Piece(1, 1)))
    with pytest.raises(ValueError):
        MeasureSolution((0.0,), (Piece(1, 1), Piece(1, 1)), 0.0, -1.0)


def test_constant_solution_exact():
    data = RiemannData.from_values(0.7, 2.0, 0.7, 2.0)
    sol = MeasureSolution((), (Piece(0.7, 2.0),))
    for b in FEW:
        assert abs(residual_u(sol, data, b)) <= 1e-10
        assert abs(residual_rho(sol, data, b)) <= 1e-10
        assert abs(residual_u(sol, data, b, literal=True)) <= 1e-10


def test_burgers_shock_and_wrong_speed():
    data = RiemannData.from_values(1.0, 0.0, -1.0, 0.0)
    good = shock_solution(1.0, -1.0, 0.0)
    bad = shock_solution(1.0, -1.0, 0.1)
    bumps = bump_battery(6, seed=11)
    worst = 0.0
    for b in bumps:
        assert abs(residual_u(good, data, b)) <= 1e-8
        worst = max(worst, abs(residual_u(bad, data, b)) / b.c1_norm())
    assert worst > 1e-3


def test_literal_form_fails_for_burgers_shock():
    # the literal flux u moves every jump at unit speed, the Burgers shock here is stationary
    data = RiemannData.from_values(1.0, 0.0, -1.0, 0.0)
    sol = shock_solution(1.0, -1.0, 0.0)
    b = Bump(0.1, 0.5, 0.5, 0.4)
    assert abs(residual_u(sol, data, b)) <= tolerance(sol, b)
    assert abs(residual_u(sol, data, b, literal=True)) > 1e3 * tolerance(sol, b)


def test_delta_shock_limit_passes(symmetric):
    sol = from_limit(closed_form_limit(symmetric))
    assert sol.c_slope == 0.0 and sol.weight_slope == 2.0
    rep = run_battery(sol, symmetric, FEW)
    assert rep.passed, (rep.max_ratio_u, rep.max_ratio_rho)


def test_weight_error_proportional(symmetric):
    sol = from_limit(closed_form_limit(symmetric))
    b = Bump(0.1, 0.4, 0.5, 0.5)
    r = []
    for w in (1.9, 1.8):
        mutant = MeasureSolution(sol.edges, sol.pieces, sol.c_slope, w, sol.u_on_line)
        r.append(residual_rho(mutant, symmetric, b))
    assert abs(r[0]) > 10 * tolerance(sol, b)
    assert r[1] == pytest.approx(2 * r[0], rel=1e-6)


def test_skewed_delta_shock_and_mutants(skewed):
    lim = closed_form_limit(skewed)
    sol = from_limit(lim)
    bumps = bump_battery(4, seed=5, c_slope=lim.c_slope)
    assert run_battery(sol, skewed, bumps).passed
    mutants = [
        MeasureSolution((1.05 * sol.c_slope,), sol.pieces, 1.05 * sol.c_slope, sol.weight_slope, sol.u_on_line),
        MeasureSolution(sol.edges, sol.pieces, sol.c_slope, 1.05 * sol.weight_slope, sol.u_on_line),
        MeasureSolution(sol.edges, sol.pieces, sol.c_slope, sol.weight_slope, sol.u_on_line + 0.1),
    ]
    for mt in mutants:
        rep = run_battery(mt, skewed, bumps)
        assert max(rep.max_ratio_u, rep.max_ratio_rho) >= 10.0


@pytest.mark.parametrize("vals", [(-1, 1, 1, 1), (0, 2, 0, 1)])
def test_vacuum_and_contact_limits(vals):
    data = RiemannData.from_values(*vals)
    sol = from_limit(closed_form_limit(data))
    assert run_battery(sol, data, FEW).passed


def test_from_limit_rejects_unknown():
    with pytest.raises(TypeError):
        from_limit(object())


def test_battery_reproducible():
    assert bump_battery(5, seed=9) == bump_battery(5, seed=9)
    assert any(b.t0 - b.rt < 0 for b in bump_battery(20, seed=7))
