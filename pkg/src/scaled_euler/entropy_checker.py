"""Convex entropy pair for the Brio flux and the shock entropy-production signs.

    eta(u, rho) = u**2/2 + eps rho**2/2
    q(u, rho)   = u**3/3 + (u - eps/2) eps rho**2
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import NotBrioError
from .flux_model import FluxModel, State, is_brio
from .riemann_solver import IntermediateState, RiemannData
from .wave_curves import shock_speed


@dataclass(frozen=True)
class EntropyPair:
    """Entropy, entropy flux and their gradients, all as functions of (u, rho).

    The gradient callables take (u, rho, eps) and must use plain arithmetic
    only, so that they also evaluate on ``fractions.Fraction`` arguments.
    """

    eta: Callable
    q: Callable
    eta_grad: Callable
    q_grad: Callable
    epsilon: float

    def hessian(self):
        return np.diag([1.0, self.epsilon])


def brio_pair(epsilon: float) -> EntropyPair:
    e = epsilon

    def eta(u, rho):
        return u * u / 2 + e * rho * rho / 2

    def q(u, rho):
        return u ** 3 / 3 + (u - e / 2) * e * rho * rho

    def eta_grad(u, rho, e=e):
        return u, e * rho

    def q_grad(u, rho, e=e):
        return u * u + e * rho * rho, 2 * e * u * rho - e * e * rho

    return EntropyPair(eta, q, eta_grad, q_grad, epsilon)


def entropy_pair(m: FluxModel) -> EntropyPair:
    """The pair for model m; only the Brio flux has one here."""
    if not is_brio(m):
        raise NotBrioError(f"the entropy pair is derived for the Brio flux only, not {m.name!r}")
    return brio_pair(m.epsilon)


def _compat_rhs(eps, u, rho, eta_u, eta_rho):
    # (eta_u, eta_rho) times the Brio flux Jacobian [[u, eps rho], [rho, u - eps]]
    return u * eta_u + rho * eta_rho, eps * rho * eta_u + (u - eps) * eta_rho


@dataclass
class PairReport:
    max_closed_form: float
    max_finite_difference: float
    n_states: int
    step: float


def verify_pair(pair: EntropyPair, grid: Sequence[State], step: float = 1e-5) -> PairReport:
    """Compatibility grad(q) = grad(eta) . DF on each state.

    The closed-form check runs in exact rational arithmetic (the float inputs
    converted exactly), so a correct pair gives residual 0 exactly. The
    finite-difference check uses centred differences of eta and q.
    """
    eps_q = Fraction(pair.epsilon)
    closed = Fraction(0)
    fd = 0.0
    h = step
    for s in grid:
        u, rho = Fraction(s.u), Fraction(s.rho)
        eu, er = pair.eta_grad(u, rho, eps_q)
        qu, qr = pair.q_grad(u, rho, eps_q)
        ru, rr = _compat_rhs(eps_q, u, rho, eu, er)
        closed = max(closed, abs(qu - ru), abs(qr - rr))

        x, y = s.u, s.rho
        eu_fd = (pair.eta(x + h, y) - pair.eta(x - h, y)) / (2 * h)
        er_fd = (pair.eta(x, y + h) - pair.eta(x, y - h)) / (2 * h)
        qu_fd = (pair.q(x + h, y) - pair.q(x - h, y)) / (2 * h)
        qr_fd = (pair.q(x, y + h) - pair.q(x, y - h)) / (2 * h)
        ru, rr = _compat_rhs(pair.epsilon, x, y, eu_fd, er_fd)
        fd = max(fd, abs(qu_fd - ru), abs(qr_fd - rr))
    return PairReport(float(closed), fd, len(grid), step)


@dataclass(frozen=True)
class DeltaCoefficientReport:
    coeff1: float
    coeff2: float
    epsilon: float
    scale: float = 1.0


def delta_coefficients(m: FluxModel, data: RiemannData, inter: IntermediateState,
                       pair: Optional[EntropyPair] = None) -> DeltaCoefficientReport:
    """Entropy production -s [eta] + [q] carried by each shock of a two-shock solution.

    Jumps are right-of-shock minus left-of-shock.
    """
    pair = pair or entropy_pair(m)
    L, R = data.left, data.right
    M = State(inter.u_star, inter.rho_star)
    s1 = shock_speed(m, 1, L, M)
    s2 = shock_speed(m, 2, M, R)
    terms = []
    for s, a, b in ((s1, L, M), (s2, M, R)):
        d_eta = pair.eta(b.u, b.rho) - pair.eta(a.u, a.rho)
        d_q = pair.q(b.u, b.rho) - pair.q(a.u, a.rho)
        terms.append((-s * d_eta, d_q))
    scale = max(1.0, *(abs(x) for t in terms for x in t))
    return DeltaCoefficientReport(sum(terms[0]), sum(terms[1]), m.epsilon, scale)


def admissibility_verdict(report: DeltaCoefficientReport, rel_tol: float = 1e-12) -> bool:
    """True iff both coefficients are <= 0 up to rel_tol * scale."""
    tol = rel_tol * report.scale
    return report.coeff1 <= tol and report.coeff2 <= tol


def coefficient_limit(data: RiemannData) -> float:
    """Common eps -> 0 limit of both coefficients, (u_r - u_l)(u_l - u_r)**2 / 24."""
    du = data.left.u - data.right.u
    return -du ** 3 / 24.0
