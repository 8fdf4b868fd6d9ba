"""Shock loci, rarefaction curves, jump conditions and Lax checks.

Shock loci are written in terms of the densities on the two sides. For a pair
with densities (a, b) the velocity jump is u_b - u_a = (b - a) * v_k(a, b), where

    v_1 = -2 eps F / (eps G + D),   v_2 = (eps G + D) / (a + b),
    F = (f(a) - f(b)) / (a - b),    G = -(g(a) - g(b)) / (a - b),
    D = sqrt(eps**2 G**2 + 2 eps (a + b) F).

Both expressions are symmetric in (a, b), so the same slope serves a locus
anchored on either side. Rarefaction curves are integrated in log-density.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError, ConvergenceError, DomainError, InvalidStateError, OffLocusError
from .flux_model import FluxModel, State

RHO_CAP = 1e12
_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


# ---------------------------------------------------------------------------
# shock loci
# ---------------------------------------------------------------------------

def _check_family(family):
    if family not in (1, 2):
        raise InvalidStateError(f"family must be 1 or 2, got {family!r}")


def _discriminant(m: FluxModel, a, b):
    eps = m.epsilon
    gam = m.g_ratio(a, b)
    root = math.sqrt((eps * gam) ** 2 + 2.0 * eps * (a + b) * m.slope(a, b))
    return gam, root


def locus_slope(m: FluxModel, family: int, a: float, b: float) -> float:
    """Ratio (u_b - u_a) / (b - a) on the family's shock locus."""
    _check_family(family)
    eps = m.epsilon
    gam, root = _discriminant(m, a, b)
    if family == 1:
        return -2.0 * eps * m.slope(a, b) / (eps * gam + root)
    return (eps * gam + root) / (a + b)


def locus_du(m: FluxModel, family: int, a: float, b: float) -> float:
    """u_b - u_a for two states with densities a, b on the same k-shock locus."""
    if a == b:
        return 0.0
    return (b - a) * locus_slope(m, family, a, b)


def _solve_locus(m, family, anchor, u, rho_up, nonnegative, rho_cap):
    if not anchor.rho > 0.0:
        raise InvalidStateError("the shock-locus anchor needs rho > 0")
    du = u - anchor.u
    if du == 0.0:
        return anchor.rho
    rb = anchor.rho

    def resid(rho):
        return locus_du(m, family, rb, rho) - du

    if rho_up:
        lo, hi = rb, 2.0 * rb
        while resid(lo) * resid(hi) > 0.0:
            lo, hi = hi, 2.0 * hi
            if hi > rho_cap:
                raise BracketError(
                    f"no sign change of the family-{family} locus below rho_cap={rho_cap:g} "
                    f"(anchor={anchor}, u={u})")
    else:
        lo, hi = 0.0, rb
        r0 = resid(0.0)
        if r0 * resid(hi) > 0.0:
            if nonnegative != "allow":
                raise DomainError(
                    f"family-{family} locus from {anchor} reaches rho=0 at u={anchor.u + r0 + du:.17g}; "
                    f"u={u} would need negative density")
            # continue the algebraic locus into rho < 0; it diverges as rho -> -anchor.rho
            hi = 0.0
            for k in range(1, 60):
                lo = -rb * (1.0 - 2.0 ** -k)
                if resid(lo) * r0 <= 0.0:
                    break
            else:
                raise BracketError("negative-density continuation of the locus found no root")
    rho = brentq(resid, lo, hi, xtol=1e-15 * max(1.0, rb), rtol=1e-15, maxiter=400)
    if abs(resid(rho)) > 1e-10 * max(1.0, abs(du)):
        raise ConvergenceError(f"locus root residual {resid(rho):.3e} too large")
    return rho


def shock1_rho_given_u(m: FluxModel, anchor: State, u: float, anchor_side: str = "left",
                       nonnegative: str = "strict", rho_cap: float = RHO_CAP) -> float:
    """Density on the admissible 1-shock locus through ``anchor`` at velocity u.

    With the anchor as left state u <= anchor.u and the density grows as u
    falls. With ``anchor_side="right"`` the anchor is the state behind the
    shock, u >= anchor.u and the density drops. Either way rho decreases in u.
    """
    if anchor_side == "left":
        if u > anchor.u:
            raise DomainError("a 1-shock from a left anchor needs u <= anchor.u")
        return _solve_locus(m, 1, anchor, u, True, nonnegative, rho_cap)
    if anchor_side == "right":
        if u < anchor.u:
            raise DomainError("a 1-shock to a right anchor needs u >= anchor.u")
        return _solve_locus(m, 1, anchor, u, False, nonnegative, rho_cap)
    raise InvalidStateError(f"anchor_side must be 'left' or 'right', got {anchor_side!r}")


def shock2_rho_given_u(m: FluxModel, anchor: State, u: float, anchor_side: str = "left",
                       nonnegative: str = "strict", rho_cap: float = RHO_CAP) -> float:
    """Density on the admissible 2-shock locus through ``anchor`` at velocity u.

    Left anchor: u <= anchor.u, density below anchor.rho. Where the locus
    would cross rho = 0 this raises DomainError, unless ``nonnegative="allow"``,
    which continues the algebraic locus to negative density. Right anchor, used
    to build the middle state of a two-shock solution: u >= anchor.u and the
    density exceeds anchor.rho. Either way rho increases with u.
    """
    if anchor_side == "left":
        if u > anchor.u:
            raise DomainError("a 2-shock from a left anchor needs u <= anchor.u")
        return _solve_locus(m, 2, anchor, u, False, nonnegative, rho_cap)
    if anchor_side == "right":
        if u < anchor.u:
            raise DomainError("a 2-shock to a right anchor needs u >= anchor.u")
        return _solve_locus(m, 2, anchor, u, True, nonnegative, rho_cap)
    raise InvalidStateError(f"anchor_side must be 'left' or 'right', got {anchor_side!r}")


def shock_speed(m: FluxModel, family: int, left: State, right: State) -> float:
    """Speed of the k-shock joining left to right.

    The closed form (u_l + u_r)/2 - (eps G -+ D)/2 is cross-checked against
    the mass jump relation; disagreement beyond 1e-8 raises OffLocusError.
    """
    _check_family(family)
    if left.rho == right.rho:
        raise OffLocusError("equal densities: the jump relations do not fix a shock speed")
    eps = m.epsilon
    gam, root = _discriminant(m, left.rho, right.rho)
    sign = 1.0 if family == 1 else -1.0
    s = 0.5 * (left.u + right.u) - 0.5 * (eps * gam + sign * root)
    s_mass = (right.rho * right.u - left.rho * left.u) / (right.rho - left.rho) - eps * gam
    if abs(s - s_mass) > 1e-8 * max(1.0, abs(s)):
        raise OffLocusError(
            f"family-{family} speed {s:.17g} disagrees with mass-jump speed {s_mass:.17g}")
    return s


def rh_residual(m: FluxModel, left: State, right: State, s: float) -> tuple[float, float]:
    """s [U] - [F(U)] with jumps taken left minus right, per component."""
    fl1, fl2 = m.flux(left.u, left.rho)
    fr1, fr2 = m.flux(right.u, right.rho)
    return (s * (left.u - right.u) - (fl1 - fr1),
            s * (left.rho - right.rho) - (fl2 - fr2))


def lax_admissible(m: FluxModel, family: int, left: State, right: State, s: float,
                   tol: Optional[float] = None) -> bool:
    """Lax inequalities, each required to hold with margin tol (default 1e-12 max(1,|s|)).

    family 1: s < lambda1(left) and lambda1(right) < s < lambda2(right)
    family 2: s > lambda2(right) and lambda1(left) < s < lambda2(left)
    """
    _check_family(family)
    d = 1e-12 * max(1.0, abs(s)) if tol is None else tol
    l1l, l2l = m.speeds(left.u, left.rho)
    l1r, l2r = m.speeds(right.u, right.rho)
    if family == 1:
        return bool(s < l1l - d and l1r < s - d and s < l2r - d)
    return bool(s > l2r + d and l1l < s - d and s < l2l - d)


@dataclass(frozen=True)
class ShockLocusPoint:
    left: State
    right: State
    speed: float
    family: int


def shock_point(m: FluxModel, family: int, anchor: State, u: float, anchor_side: str = "left") -> ShockLocusPoint:
    """Build the admissible shock joining ``anchor`` to the locus state at velocity u."""
    solve = shock1_rho_given_u if family == 1 else shock2_rho_given_u
    other = State(u, solve(m, anchor, u, anchor_side))
    left, right = (anchor, other) if anchor_side == "left" else (other, anchor)
    return ShockLocusPoint(left, right, shock_speed(m, family, left, right), family)


def quadratic_g_shock_loci(anchor: State, epsilon: float, u: float, family: int) -> float:
    """Closed-form shock loci for f = rho**2/2, g = -rho**2 from a left anchor.

    rho = anchor.rho + (u - anchor.u) / (eps -+ sqrt(eps**2 + eps)).
    """
    _check_family(family)
    if u > anchor.u:
        raise InvalidStateError("the closed-form loci are parameterised by u <= anchor.u")
    root = math.sqrt(epsilon * epsilon + epsilon)
    k = epsilon - root if family == 1 else epsilon + root
    return anchor.rho + (u - anchor.u) / k


# ---------------------------------------------------------------------------
# rarefaction curves
# ---------------------------------------------------------------------------

def _numerators(m: FluxModel, rho):
    """rho * du/drho on the two integral curves, in cancellation-free form."""
    eps = m.epsilon
    rho = np.asarray(rho, dtype=float)
    a = -eps * np.asarray(m.g_prime(rho), dtype=float)
    b = 4.0 * eps * rho * np.asarray(m.f_prime(rho), dtype=float)
    root = np.sqrt(a * a + b)
    den = a + root
    with np.errstate(invalid="ignore", divide="ignore"):
        n1 = np.where(den > 0.0, -0.5 * b / np.where(den > 0.0, den, 1.0), 0.0)
    n2 = 0.5 * den
    return n1, n2


class RarefactionCurve:
    """Integral curve of a characteristic field through ``anchor``.

    u(rho) = anchor.u + int_{anchor.rho}^{rho} N_k(xi)/xi dxi is tabulated at
    panel edges in tau = ln(rho) (10-point Gauss-Legendre per panel) between a
    deep cut-off and ln(rho_max). Below the cut-off the integrand is replaced
    by its small-density expansion, which for linear g is exact to rounding.
    """

    def __init__(self, m: FluxModel, family: int, anchor: State, rho_max: Optional[float] = None,
                 panel: float = 0.25):
        _check_family(family)
        if not anchor.rho > 0.0:
            raise InvalidStateError("rarefaction curves are anchored at rho > 0")
        self.m, self.family, self.anchor = m, family, anchor
        self.panel = panel
        self.tau_anchor = math.log(anchor.rho)
        self.tau_top = math.log(max(anchor.rho, rho_max or anchor.rho))
        self.tau_deep = self._deep_cutoff()
        down = self._edges(self.tau_anchor, self.tau_deep)
        up = self._edges(self.tau_anchor, self.tau_top)
        self.nodes = np.concatenate([down[::-1], up[1:]])
        k0 = len(down) - 1
        pieces = self._integrate(self.nodes[:-1], self.nodes[1:])
        cum = np.concatenate([[0.0], np.cumsum(pieces)])
        self.cum = cum - cum[k0]
        self._u_deep = float(self.cum[0])

    def _edges(self, start, stop):
        n = max(1, int(math.ceil(abs(stop - start) / self.panel - 1e-9)))
        return np.linspace(start, stop, n + 1)

    def _deep_cutoff(self):
        m = self.m
        if m.g_kind == "quadratic":
            return self.tau_anchor - 80.0
        # 4 rho f'(rho) / eps below 1e-14: the expansion N ~ -rho f'(rho) is then exact
        target = 1e-14 * m.epsilon

        def ratio(tau):
            r = math.exp(tau)
            return 4.0 * r * float(m.f_prime(r)) - target

        if ratio(self.tau_anchor) <= 0.0:
            return self.tau_anchor
        lo = -740.0
        if ratio(lo) > 0.0:
            return lo
        return brentq(ratio, lo, self.tau_anchor, xtol=1e-6)

    def _numerator(self, tau):
        n1, n2 = _numerators(self.m, np.exp(tau))
        return n1 if self.family == 1 else n2

    def _integrate(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        half = 0.5 * (b - a)
        pts = (0.5 * (a + b))[..., None] + half[..., None] * _GL_X
        return half * (self._numerator(pts) @ _GL_W)

    def _tail(self, tau):
        """Integral of N from the cut-off down to tau (tau below the cut-off)."""
        m, td = self.m, self.tau_deep
        rd = math.exp(td)
        r = np.exp(tau)
        if m.g_kind == "linear":
            df = np.asarray(m.f(r), dtype=float) - float(m.f(rd))
            if self.family == 1:
                return -df
            return m.epsilon * (tau - td) + df
        # quadratic g: N vanishes like a power of rho, the tail is below rounding
        return self._numerator(tau) - float(self._numerator(np.array(td)))

    def u_at_tau(self, tau):
        """Velocity on the curve at log-density tau (array or scalar)."""
        tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
        if np.any(tau_arr > self.tau_top + 1e-12):
            raise DomainError(f"rho above the tabulated range (max {math.exp(self.tau_top):.6g})")
        out = np.empty_like(tau_arr)
        deep = tau_arr < self.tau_deep
        if np.any(deep):
            td = tau_arr[deep]
            if self.family == 2 and self.m.g_kind == "linear" and np.any(np.isneginf(td)):
                raise DomainError("the linear-g 2-curve diverges like eps*ln(rho) at rho=0")
            out[deep] = self._u_deep + self._tail(td)
        tab = ~deep
        if np.any(tab):
            tt = np.minimum(tau_arr[tab], self.tau_top)
            idx = np.clip(np.searchsorted(self.nodes, tt, side="right") - 1, 0, len(self.nodes) - 2)
            out[tab] = self.cum[idx] + self._integrate(self.nodes[idx], tt)
        out += self.anchor.u
        return out if np.ndim(tau) else float(out[0])

    def u_of_rho(self, rho):
        rho_arr = np.asarray(rho, dtype=float)
        if np.any(rho_arr < 0.0):
            raise DomainError("negative density")
        with np.errstate(divide="ignore"):
            return self.u_at_tau(np.log(rho_arr))

    def u_at_zero(self) -> float:
        """Limit of u as rho -> 0 (DomainError for the divergent linear-g 2-curve)."""
        return self.u_at_tau(-np.inf)

    def speed_at_tau(self, tau):
        u = self.u_at_tau(tau)
        lam = self.m.speeds(u, np.exp(tau))
        return lam[self.family - 1]

    def tau_at_speed(self, xi, tau_lo: float, tau_hi: float, tol: float = 1e-15):
        """Invert lambda_k(u(tau), e^tau) = xi by vectorised bisection on [tau_lo, tau_hi].

        The characteristic speed is monotone along the curve (genuine
        nonlinearity): decreasing in tau on family 1, increasing on family 2.
        Values outside the attained range clamp to the nearer end.
        """
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        lo = np.full_like(xi, tau_lo)
        hi = np.full_like(xi, tau_hi)
        inc = self.family == 2
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            above = self.speed_at_tau(mid) > xi
            go_hi = above if inc else ~above
            hi = np.where(go_hi, mid, hi)
            lo = np.where(go_hi, lo, mid)
            if np.all(hi - lo <= tol * np.maximum(1.0, np.abs(mid))):
                break
        return 0.5 * (lo + hi)


def rarefaction_u_of_rho(m: FluxModel, family: int, anchor: State, rho: float) -> float:
    """Velocity at density rho on the k-rarefaction curve through anchor."""
    curve = RarefactionCurve(m, family, anchor, rho_max=max(rho, anchor.rho))
    return curve.u_of_rho(rho)
