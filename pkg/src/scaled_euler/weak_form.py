"""Weak-form residuals of candidate limit solutions against compact bumps.

A candidate is self-similar: the half-plane t > 0 is cut by rays x = xi_j t
into pieces on which u is a constant or the fan value x/t and the density is
a constant. Optionally a Dirac mass of weight w t sits on the ray x = c t,
carrying velocity u_line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .limit_analysis import ContactLimit, DeltaShockLimit, VacuumLimit
from .riemann_solver import RiemannData

QUAD_ABS = 1e-13
QUAD_REL = 1e-12


@dataclass(frozen=True)
class Piece:
    """u = ``u`` (or x/t when ``u`` is None) and constant density on one wedge."""

    u: Optional[float]
    rho: float


@dataclass(frozen=True)
class MeasureSolution:
    edges: tuple
    pieces: tuple
    c_slope: Optional[float] = None
    weight_slope: float = 0.0
    u_on_line: float = 0.0

    def __post_init__(self):
        if len(self.pieces) != len(self.edges) + 1:
            raise ValueError("need one more piece than edges")
        if any(b < a for a, b in zip(self.edges, self.edges[1:])):
            raise ValueError("edges must be nondecreasing")
        if self.weight_slope < 0.0:
            raise ValueError("the line weight must be nonnegative")

    def split_slopes(self):
        s = list(self.edges)
        if self.c_slope is not None:
            s.append(self.c_slope)
        return sorted(set(s))

    def max_scale(self):
        vals = [1.0, abs(self.u_on_line)]
        for p in self.pieces:
            vals.append(p.rho)
            if p.u is not None:
                vals.append(abs(p.u))
        vals += [abs(e) for e in self.edges]
        return max(vals)


def from_limit(limit) -> MeasureSolution:
    """Candidate solution for a closed-form limit object."""
    if isinstance(limit, DeltaShockLimit):
        c = limit.c_slope
        return MeasureSolution((c,), (Piece(limit.u_left, limit.rho_left), Piece(limit.u_right, limit.rho_right)),
                               c, limit.weight_slope, limit.u_on_line)
    if isinstance(limit, ContactLimit):
        return MeasureSolution((limit.c_slope,), (Piece(limit.u, limit.rho_left), Piece(limit.u, limit.rho_right)))
    if isinstance(limit, VacuumLimit):
        return MeasureSolution((limit.u_left, limit.u_right),
                               (Piece(limit.u_left, limit.rho_left), Piece(None, 0.0),
                                Piece(limit.u_right, limit.rho_right)))
    raise TypeError(f"unsupported limit object {type(limit).__name__}")


def shock_solution(u_left, u_right, speed, rho_left=0.0, rho_right=0.0) -> MeasureSolution:
    """Single jump along x = speed t, no singular part."""
    return MeasureSolution((speed,), (Piece(u_left, rho_left), Piece(u_right, rho_right)))


def _slope_of_profile():
    # max over s in (0,1) of exp(-1/(1-s^2)) 2 s / (1-s^2)^2
    g = lambda s: -math.exp(-1.0 / (1.0 - s * s)) * 2.0 * s / (1.0 - s * s) ** 2
    res = minimize_scalar(g, bounds=(0.0, 0.999), method="bounded", options={"xatol": 1e-12})
    return -res.fun


_PROFILE_SLOPE = _slope_of_profile()


@dataclass(frozen=True)
class Bump:
    """exp(-1/(1 - r^2)) with r^2 = ((x-x0)/rx)^2 + ((t-t0)/rt)^2, zero for r >= 1."""

    x0: float
    t0: float
    rx: float
    rt: float

    def _r2(self, x, t):
        X = (x - self.x0) / self.rx
        T = (t - self.t0) / self.rt
        return X, T, X * X + T * T

    def phi(self, x, t):
        _, _, r2 = self._r2(x, t)
        return math.exp(-1.0 / (1.0 - r2)) if r2 < 1.0 else 0.0

    def grad(self, x, t):
        """(phi, phi_x, phi_t)."""
        X, T, r2 = self._r2(x, t)
        if r2 >= 1.0:
            return 0.0, 0.0, 0.0
        om = 1.0 - r2
        p = math.exp(-1.0 / om)
        k = -2.0 * p / (om * om)
        return p, k * X / self.rx, k * T / self.rt

    def c1_norm(self) -> float:
        return math.exp(-1.0) + _PROFILE_SLOPE / self.rx + _PROFILE_SLOPE / self.rt

    def t_range(self):
        return max(0.0, self.t0 - self.rt), self.t0 + self.rt

    def x_range(self, t):
        T = (t - self.t0) / self.rt
        h = self.rx * math.sqrt(max(0.0, 1.0 - T * T))
        return self.x0 - h, self.x0 + h

    def shifted(self, dx):
        return replace(self, x0=self.x0 + dx)


def _pieces_on(sol: MeasureSolution, t: float, a: float, b: float):
    """Sub-intervals of [a, b] with the piece that owns each."""
    cuts = [a] + [s * t for s in sol.split_slopes() if a < s * t < b] + [b]
    for lo, hi in zip(cuts, cuts[1:]):
        mid = 0.5 * (lo + hi) / t
        k = sum(1 for e in sol.edges if mid > e)
        yield lo, hi, sol.pieces[k]


def _bulk(sol: MeasureSolution, phi: Bump, integrand) -> float:
    t_lo, t_hi = phi.t_range()

    def inner(t):
        a, b = phi.x_range(t)
        if b <= a:
            return 0.0
        total = 0.0
        for lo, hi, piece in _pieces_on(sol, t, a, b):
            total += quad(lambda x: integrand(piece, x, t), lo, hi,
                          epsabs=QUAD_ABS, epsrel=QUAD_REL, limit=200)[0]
        return total

    return quad(inner, t_lo, t_hi, epsabs=QUAD_ABS, epsrel=QUAD_REL, limit=200)[0]


def _initial(data: RiemannData, phi: Bump, which: str) -> float:
    if phi.t0 - phi.rt >= 0.0:
        return 0.0
    a, b = phi.x_range(0.0)
    left = getattr(data.left, which)
    right = getattr(data.right, which)
    total = 0.0
    for lo, hi, val in ((a, min(b, 0.0), left), (max(a, 0.0), b, right)):
        if hi > lo:
            total += val * quad(lambda x: phi.phi(x, 0.0), lo, hi, epsabs=QUAD_ABS, epsrel=QUAD_REL)[0]
    return total


def _u_at(piece: Piece, x, t):
    return x / t if piece.u is None else piece.u


def residual_u(sol: MeasureSolution, data: RiemannData, phi: Bump, literal: bool = False) -> float:
    """Velocity identity: int int u phi_t + (u^2/2) phi_x + int u0 phi(x, 0).

    ``literal=True`` replaces the flux u^2/2 by u.
    """
    def integrand(piece, x, t):
        _, px, pt = phi.grad(x, t)
        u = _u_at(piece, x, t)
        flux = u if literal else 0.5 * u * u
        return u * pt + flux * px

    return _bulk(sol, phi, integrand) + _initial(data, phi, "u")


def residual_rho(sol: MeasureSolution, data: RiemannData, phi: Bump) -> float:
    """Density identity including the line mass w t carried at speed u_on_line."""
    def integrand(piece, x, t):
        if piece.rho == 0.0:
            return 0.0
        _, px, pt = phi.grad(x, t)
        return piece.rho * (pt + _u_at(piece, x, t) * px)

    total = _bulk(sol, phi, integrand) + _initial(data, phi, "rho")
    if sol.c_slope is not None and sol.weight_slope != 0.0:
        c, w, ul = sol.c_slope, sol.weight_slope, sol.u_on_line

        def line(t):
            _, px, pt = phi.grad(c * t, t)
            return w * t * (pt + ul * px)

        t_lo, t_hi = phi.t_range()
        total += quad(line, t_lo, t_hi, epsabs=QUAD_ABS, epsrel=QUAD_REL, limit=200)[0]
    return total


def tolerance(sol: MeasureSolution, phi: Bump, base: float = 1e-8) -> float:
    return base * phi.c1_norm() * sol.max_scale() ** 2


def bump_battery(n: int = 20, seed: int = 7, c_slope: float = 0.0, x_spread: float = 1.0) -> list[Bump]:
    """Reproducible bumps, centred near the ray x = c t; some straddle t = 0."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        t0 = rng.uniform(0.05, 1.0)
        rx = rng.uniform(0.2, 0.8)
        rt = rng.uniform(0.2, 0.8)
        x0 = c_slope * t0 + x_spread * rng.uniform(-0.6, 0.6) * rx
        out.append(Bump(float(x0), float(t0), float(rx), float(rt)))
    return out


@dataclass
class BumpResult:
    bump: Bump
    residual_u: float
    residual_u_literal: float
    residual_rho: float
    tol: float

    @property
    def passed(self) -> bool:
        return abs(self.residual_u) <= self.tol and abs(self.residual_rho) <= self.tol


@dataclass
class BatteryReport:
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def max_ratio_u(self) -> float:
        return max(abs(r.residual_u) / r.tol for r in self.results)

    @property
    def max_ratio_rho(self) -> float:
        return max(abs(r.residual_rho) / r.tol for r in self.results)


def run_battery(sol: MeasureSolution, data: RiemannData, bumps: Sequence[Bump]) -> BatteryReport:
    rep = BatteryReport()
    for b in bumps:
        rep.results.append(BumpResult(b, residual_u(sol, data, b), residual_u(sol, data, b, literal=True),
                                      residual_rho(sol, data, b), tolerance(sol, b)))
    return rep
