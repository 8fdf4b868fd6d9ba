"""Exact self-similar Riemann solutions at fixed epsilon.

Three patterns occur for small epsilon, according to the sign of u_l - u_r:
two shocks, a rarefaction against a shock (equal velocities) and two
rarefactions separated by a (near-)vacuum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np
from scipy.optimize import brentq

from .errors import (BracketError, InvalidStateError, NoIntersectionError, OverlapError,
                     WrongCaseError)
from .flux_model import FluxModel, State
from .wave_curves import (RHO_CAP, RarefactionCurve, lax_admissible, locus_du, rh_residual,
                          shock_speed)

# densities below this are not representable; fan parts below it are reported as vacuum
RHO_FLOOR = np.finfo(float).tiny


class Case(str, Enum):
    TWO_SHOCK = "TwoShock"
    RAREFACTION_SHOCK = "RarefactionShock"
    SHOCK_RAREFACTION = "ShockRarefaction"
    TWO_RAREFACTION_VACUUM = "TwoRarefactionVacuum"
    CONSTANT = "Constant"


@dataclass(frozen=True)
class RiemannData:
    left: State
    right: State

    @classmethod
    def from_values(cls, ul, rhol, ur, rhor) -> "RiemannData":
        return cls(State(ul, rhol), State(ur, rhor))


@dataclass(frozen=True)
class IntermediateState:
    """Middle state; ``log_rho_star`` keeps densities that underflow a double."""

    u_star: float
    rho_star: float
    epsilon: float
    log_rho_star: Optional[float] = None


# -- segments ---------------------------------------------------------------

@dataclass(frozen=True)
class ConstantState:
    state: State
    xi_lo: float
    xi_hi: float


@dataclass(frozen=True)
class Shock:
    family: int
    speed: float
    left: State
    right: State

    @property
    def xi_lo(self):
        return self.speed

    @property
    def xi_hi(self):
        return self.speed


@dataclass(frozen=True)
class RarefactionFan:
    """Part of a k-rarefaction between log-densities tau_lo and tau_hi.

    ``anchor`` is the state the curve was integrated from; the fan occupies
    xi_lo <= x/t <= xi_hi.
    """

    family: int
    xi_lo: float
    xi_hi: float
    anchor: State
    curve: RarefactionCurve = field(repr=False, compare=False)
    tau_lo: float = 0.0
    tau_hi: float = 0.0


@dataclass(frozen=True)
class Vacuum:
    xi_lo: float
    xi_hi: float


Segment = Union[ConstantState, Shock, RarefactionFan, Vacuum]


@dataclass(frozen=True)
class WaveFan:
    segments: tuple
    case: Case
    left: State
    right: State
    epsilon: float
    intermediate: Optional[IntermediateState] = None
    # value of the 2-curve at zero density (finite for quadratic g only)
    u2_at_zero: Optional[float] = None

    @property
    def shocks(self):
        return [s for s in self.segments if isinstance(s, Shock)]

    @property
    def fans(self):
        return [s for s in self.segments if isinstance(s, RarefactionFan)]

    @property
    def vacuum(self) -> Optional[Vacuum]:
        v = [s for s in self.segments if isinstance(s, Vacuum)]
        return v[0] if v else None

    def check(self, m: FluxModel, tol: float = 1e-10) -> list[str]:
        """Return the list of violated structural invariants (empty if none)."""
        bad = []
        segs = self.segments
        if not isinstance(segs[0], ConstantState) or segs[0].state != self.left:
            bad.append("leftmost segment is not the left state")
        if not isinstance(segs[-1], ConstantState) or segs[-1].state != self.right:
            bad.append("rightmost segment is not the right state")
        for a, b in zip(segs, segs[1:]):
            if abs(a.xi_hi - b.xi_lo) > tol * max(1.0, abs(a.xi_hi)):
                bad.append(f"gap between {type(a).__name__} and {type(b).__name__}")
            if b.xi_lo < a.xi_lo - tol:
                bad.append("segments out of order")
        for sh in self.shocks:
            if not lax_admissible(m, sh.family, sh.left, sh.right, sh.speed):
                bad.append(f"{sh.family}-shock at speed {sh.speed:.6g} violates the Lax inequalities")
            r1, r2 = rh_residual(m, sh.left, sh.right, sh.speed)
            if max(abs(r1), abs(r2)) > tol * max(1.0, sh.left.rho, sh.right.rho):
                bad.append(f"{sh.family}-shock jump residual ({r1:.3e}, {r2:.3e})")
        return bad


# -- classification ---------------------------------------------------------

def classify(data: RiemannData) -> Case:
    ul, ur = data.left.u, data.right.u
    if ul > ur:
        return Case.TWO_SHOCK
    if ul < ur:
        return Case.TWO_RAREFACTION_VACUUM
    if data.left.rho == data.right.rho:
        return Case.CONSTANT
    if data.right.rho < data.left.rho:
        return Case.RAREFACTION_SHOCK
    return Case.SHOCK_RAREFACTION


def _require_positive(data: RiemannData):
    if not (data.left.rho > 0.0 and data.right.rho > 0.0):
        raise InvalidStateError("Riemann data needs rho_l > 0 and rho_r > 0")


def _fan(m, family, curve, tau_a, tau_b):
    lo, hi = min(tau_a, tau_b), max(tau_a, tau_b)
    x_lo, x_hi = sorted((float(curve.speed_at_tau(tau_a)), float(curve.speed_at_tau(tau_b))))
    return RarefactionFan(family, x_lo, x_hi, curve.anchor, curve, lo, hi)


# -- two shocks -------------------------------------------------------------

def solve_two_shock(m: FluxModel, data: RiemannData, rho_cap: float = RHO_CAP):
    """Intermediate state and fan for u_l > u_r.

    The middle density solves u_l + du_1(rho_l, rho) = u_r + du_2(rho_r, rho)
    on rho >= max(rho_l, rho_r), where the left side falls and the right side
    rises with rho, so the root is unique.
    """
    if classify(data) is not Case.TWO_SHOCK:
        raise WrongCaseError("two-shock solve needs u_l > u_r")
    _require_positive(data)
    L, R = data.left, data.right

    def h(rho):
        return (L.u + locus_du(m, 1, L.rho, rho)) - (R.u + locus_du(m, 2, R.rho, rho))

    lo = max(L.rho, R.rho)
    h_lo = h(lo)
    if h_lo <= 0.0:
        raise NoIntersectionError(
            f"the shock curves do not cross at eps={m.epsilon:g}: "
            f"h(rho={lo:.6g})={h_lo:.6g} <= 0 (need > 0; h -> -inf as rho grows)")
    hi = 2.0 * lo
    while h(hi) > 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > rho_cap:
            raise BracketError(f"middle density exceeds rho_cap={rho_cap:g}")
    rho = brentq(h, lo, hi, xtol=1e-15 * lo, rtol=1e-15, maxiter=400)
    u1 = L.u + locus_du(m, 1, L.rho, rho)
    u2 = R.u + locus_du(m, 2, R.rho, rho)
    M = State(0.5 * (u1 + u2), rho)
    s1 = shock_speed(m, 1, L, M)
    s2 = shock_speed(m, 2, M, R)
    segs = (ConstantState(L, -math.inf, s1), Shock(1, s1, L, M), ConstantState(M, s1, s2),
            Shock(2, s2, M, R), ConstantState(R, s2, math.inf))
    inter = IntermediateState(M.u, M.rho, m.epsilon, math.log(M.rho))
    return inter, WaveFan(segs, Case.TWO_SHOCK, L, R, m.epsilon, inter)


# -- equal velocities -------------------------------------------------------

def solve_equal_u(m: FluxModel, data: RiemannData) -> WaveFan:
    """Fan for u_l = u_r: constant, R1 + S2 (rho_r < rho_l) or S1 + R2 (rho_l < rho_r)."""
    case = classify(data)
    if case not in (Case.CONSTANT, Case.RAREFACTION_SHOCK, Case.SHOCK_RAREFACTION):
        raise WrongCaseError("equal-velocity solve needs u_l = u_r")
    L, R = data.left, data.right
    if case is Case.CONSTANT:
        return WaveFan((ConstantState(L, -math.inf, math.inf),), case, L, R, m.epsilon,
                       IntermediateState(L.u, L.rho, m.epsilon))
    _require_positive(data)
    if case is Case.RAREFACTION_SHOCK:
        curve = RarefactionCurve(m, 1, L)

        def h(tau):
            rho = math.exp(tau)
            return curve.u_at_tau(tau) - (R.u + locus_du(m, 2, R.rho, rho))

        tau = brentq(h, math.log(R.rho), math.log(L.rho), xtol=1e-15, rtol=1e-15, maxiter=400)
        M = State(curve.u_at_tau(tau), math.exp(tau))
        s2 = shock_speed(m, 2, M, R)
        fan = _fan(m, 1, curve, curve.tau_anchor, tau)
        segs = (ConstantState(L, -math.inf, fan.xi_lo), fan, ConstantState(M, fan.xi_hi, s2),
                Shock(2, s2, M, R), ConstantState(R, s2, math.inf))
    else:
        curve = RarefactionCurve(m, 2, R)

        def h(tau):
            rho = math.exp(tau)
            return (L.u + locus_du(m, 1, L.rho, rho)) - curve.u_at_tau(tau)

        tau = brentq(h, math.log(L.rho), math.log(R.rho), xtol=1e-15, rtol=1e-15, maxiter=400)
        M = State(curve.u_at_tau(tau), math.exp(tau))
        s1 = shock_speed(m, 1, L, M)
        fan = _fan(m, 2, curve, tau, curve.tau_anchor)
        segs = (ConstantState(L, -math.inf, s1), Shock(1, s1, L, M), ConstantState(M, s1, fan.xi_lo),
                fan, ConstantState(R, fan.xi_hi, math.inf))
    inter = IntermediateState(M.u, M.rho, m.epsilon, math.log(M.rho))
    return WaveFan(segs, case, L, R, m.epsilon, inter)


# -- two rarefactions -------------------------------------------------------

def solve_two_rarefaction(m: FluxModel, data: RiemannData, require_vacuum: bool = True) -> WaveFan:
    """Fan for u_l < u_r: R1 from the left state, R2 into the right state.

    The two curves meet where u_1(rho) = u_2(rho). For linear g the 2-curve
    falls like eps*ln(rho) as rho -> 0, so they always meet, at a density
    that underflows a double once (u_r - u_l)/eps is large; the meeting point
    is found in log-density. Fan parts whose density is below RHO_FLOOR are
    reported as a Vacuum segment (u = x/t, rho = 0). For quadratic g the
    2-curve has a finite value u_2(0) and a true vacuum opens when
    u_1(0) < u_2(0).

    With ``require_vacuum`` an OverlapError is raised when no vacuum region
    forms (the curves cross at a representable density).
    """
    if classify(data) is not Case.TWO_RAREFACTION_VACUUM:
        raise WrongCaseError("two-rarefaction solve needs u_l < u_r")
    _require_positive(data)
    L, R = data.left, data.right
    c1 = RarefactionCurve(m, 1, L)
    c2 = RarefactionCurve(m, 2, R)
    u1_zero = c1.u_at_zero()
    tau_floor = math.log(RHO_FLOOR)
    tau_top = math.log(min(L.rho, R.rho))

    def h(tau):
        return c1.u_at_tau(tau) - c2.u_at_tau(tau)

    if h(tau_top) > 0.0:
        raise OverlapError(
            f"the 1- and 2-rarefaction curves do not separate at eps={m.epsilon:g}: "
            f"u_1 - u_2 = {h(tau_top):.6g} > 0 at rho = {math.exp(tau_top):.6g}")

    u2_zero = None
    segs: list = [None]
    if m.g_kind == "quadratic":
        u2_zero = c2.u_at_zero()
        if u1_zero < u2_zero:
            # genuine vacuum between the two fans
            t_lo = c1.tau_deep - 800.0
            f1 = _fan(m, 1, c1, t_lo, c1.tau_anchor)
            f2 = _fan(m, 2, c2, t_lo, c2.tau_anchor)
            segs = [ConstantState(L, -math.inf, f1.xi_lo), f1, Vacuum(f1.xi_hi, f2.xi_lo), f2,
                    ConstantState(R, f2.xi_hi, math.inf)]
            inter = IntermediateState(u1_zero, 0.0, m.epsilon, -math.inf)
            return WaveFan(tuple(segs), Case.TWO_RAREFACTION_VACUUM, L, R, m.epsilon, inter, u2_zero)
        if require_vacuum:
            raise OverlapError(f"u_1(0)={u1_zero:.17g} >= u_2(0)={u2_zero:.17g}: no vacuum")

    # meeting point in log-density: step down until u_1 - u_2 changes sign
    lo = tau_top
    step = 1.0
    while h(lo) <= 0.0:
        lo = tau_top - step
        step *= 2.0
        if step > 1e300:
            raise BracketError("rarefaction curves never meet")
    tau_m = brentq(h, lo, tau_top, xtol=1e-15, rtol=1e-15, maxiter=400)
    u_m = float(c1.u_at_tau(tau_m))
    rho_m = math.exp(tau_m)
    M = State(u_m, rho_m)
    if require_vacuum and rho_m >= RHO_FLOOR:
        raise OverlapError(
            f"the rarefaction curves meet at rho={rho_m:.6g} >= {RHO_FLOOR:.3g}: no vacuum at "
            f"eps={m.epsilon:g} (u_1(0)={u1_zero:.17g}, u_2(floor)={c2.u_at_tau(tau_floor):.17g})")
    f1 = _fan(m, 1, c1, tau_m, c1.tau_anchor)
    l1m, l2m = m.speeds(u_m, rho_m)
    segs = [ConstantState(L, -math.inf, f1.xi_lo), f1, ConstantState(M, f1.xi_hi, float(l2m))]
    if tau_m < tau_floor:
        v_hi = float(c2.speed_at_tau(tau_floor))
        segs.append(Vacuum(float(l2m), v_hi))
        f2 = _fan(m, 2, c2, tau_floor, c2.tau_anchor)
    else:
        f2 = _fan(m, 2, c2, tau_m, c2.tau_anchor)
    segs += [f2, ConstantState(R, f2.xi_hi, math.inf)]
    inter = IntermediateState(u_m, rho_m, m.epsilon, tau_m)
    return WaveFan(tuple(segs), Case.TWO_RAREFACTION_VACUUM, L, R, m.epsilon, inter, u2_zero)


def vacuum_edges(fan: WaveFan) -> tuple[float, float]:
    """Edges (u*1, u*2) of the region where the fan's density is zero.

    u*1 is the end velocity of the 1-rarefaction, u*2 the speed at which the
    2-rarefaction leaves zero density (the floor for linear g).
    """
    if fan.case is not Case.TWO_RAREFACTION_VACUUM:
        raise WrongCaseError("vacuum edges exist only for u_l < u_r")
    f1, f2 = fan.fans[0], fan.fans[-1]
    return f1.curve.u_at_tau(f1.tau_lo), f2.xi_lo


def solve(m: FluxModel, data: RiemannData) -> WaveFan:
    """Dispatch on the case tag and return the fan."""
    case = classify(data)
    if case is Case.TWO_SHOCK:
        return solve_two_shock(m, data)[1]
    if case is Case.TWO_RAREFACTION_VACUUM:
        return solve_two_rarefaction(m, data, require_vacuum=False)
    return solve_equal_u(m, data)


# -- sampling ---------------------------------------------------------------

def _locate(fan: WaveFan, xi: float):
    # left-limit convention: a point on an edge belongs to the segment on its left
    for seg in fan.segments:
        if isinstance(seg, Shock):
            continue
        if xi <= seg.xi_hi:
            return seg
    return fan.segments[-1]


def _fan_state(seg: RarefactionFan, m: FluxModel, xi):
    tau = seg.curve.tau_at_speed(xi, seg.tau_lo, seg.tau_hi)
    u = seg.curve.u_at_tau(tau)
    return u, np.exp(tau)


def sample(fan: WaveFan, m: FluxModel, x: float, t: float) -> State:
    """State at (x, t), t > 0."""
    if not t > 0.0:
        raise InvalidStateError("sampling needs t > 0")
    xi = x / t
    seg = _locate(fan, xi)
    if isinstance(seg, ConstantState):
        return seg.state
    if isinstance(seg, Vacuum):
        return State(xi, 0.0)
    u, rho = _fan_state(seg, m, xi)
    return State(float(u[0]), float(rho[0]))


def sample_arrays(fan: WaveFan, m: FluxModel, x, t: float):
    """Vectorised sample: arrays (u, rho) at positions x and time t."""
    if not t > 0.0:
        raise InvalidStateError("sampling needs t > 0")
    xi = np.asarray(x, dtype=float) / t
    flat = xi.ravel()
    u = np.empty_like(flat)
    rho = np.empty_like(flat)
    owner = np.full(flat.shape, -1)
    segs = [s for s in fan.segments if not isinstance(s, Shock)]
    for k in range(len(segs) - 1, -1, -1):
        owner[flat <= segs[k].xi_hi] = k
    owner[owner < 0] = len(segs) - 1
    for k, seg in enumerate(segs):
        sel = owner == k
        if not np.any(sel):
            continue
        if isinstance(seg, ConstantState):
            u[sel], rho[sel] = seg.state.u, seg.state.rho
        elif isinstance(seg, Vacuum):
            u[sel], rho[sel] = flat[sel], 0.0
        else:
            u[sel], rho[sel] = _fan_state(seg, m, flat[sel])
    return u.reshape(xi.shape), rho.reshape(xi.shape)
