"""Scaled flux, Jacobian and eigenstructure of the two-equation system

    u_t   + (u**2/2 + eps*f(rho))_x = 0
    rho_t + (u*rho  + eps*g(rho))_x = 0

with g either linear (g = -rho) or quadratic (g = -rho**2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DegenerateEigenvectorError, InvalidStateError

G_KINDS = ("linear", "quadratic")


@dataclass(frozen=True)
class State:
    """A point (u, rho) of phase space. Density must be non-negative."""

    u: float
    rho: float

    def __post_init__(self):
        u, rho = float(self.u), float(self.rho)
        if not (math.isfinite(u) and math.isfinite(rho)):
            raise InvalidStateError(f"state must be finite, got u={u!r}, rho={rho!r}")
        if rho < 0.0:
            raise InvalidStateError(f"density must be >= 0, got rho={rho!r}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "rho", rho)

    def as_tuple(self) -> tuple[float, float]:
        return (self.u, self.rho)


@dataclass(frozen=True)
class FluxModel:
    """The pair (f, g) together with the scaling parameter.

    ``f`` and ``f_prime`` should accept numpy arrays. ``f_slope(a, b)`` is an
    optional exact divided difference (f(a) - f(b)) / (a - b); without it the
    divided difference is formed numerically, switching to ``f_prime`` at the
    midpoint when the two densities nearly coincide.
    """

    f: Callable
    f_prime: Callable
    epsilon: float
    g_kind: str = "linear"
    f_second: Optional[Callable] = None
    f_slope: Optional[Callable] = None
    name: str = "custom"

    def __post_init__(self):
        eps = float(self.epsilon)
        if not (eps > 0.0 and math.isfinite(eps)):
            raise InvalidStateError(f"epsilon must be a finite positive number, got {self.epsilon!r}")
        if self.g_kind not in G_KINDS:
            raise InvalidStateError(f"g_kind must be one of {G_KINDS}, got {self.g_kind!r}")
        object.__setattr__(self, "epsilon", eps)

    def with_epsilon(self, epsilon: float) -> "FluxModel":
        return replace(self, epsilon=epsilon)

    # g and its derivative ---------------------------------------------------
    def g(self, rho):
        return -rho if self.g_kind == "linear" else -rho * rho

    def g_prime(self, rho):
        if self.g_kind == "linear":
            return -np.ones_like(rho) if isinstance(rho, np.ndarray) else -1.0
        return -2.0 * rho

    def g_ratio(self, a, b):
        """-(g(a) - g(b)) / (a - b), i.e. 1 for linear g and a + b for quadratic g."""
        return 1.0 if self.g_kind == "linear" else a + b

    def slope(self, a: float, b: float) -> float:
        """Divided difference (f(a) - f(b)) / (a - b), with f'(a) on the diagonal."""
        if self.f_slope is not None:
            return self.f_slope(a, b)
        d = a - b
        if abs(d) <= 1e-5 * max(abs(a), abs(b), 1e-300):
            return self.f_prime(0.5 * (a + b))
        return (self.f(a) - self.f(b)) / d

    # flux and characteristic speeds ----------------------------------------
    def flux(self, u, rho):
        """Physical flux (u**2/2 + eps f(rho), u rho + eps g(rho))."""
        eps = self.epsilon
        return 0.5 * u * u + eps * self.f(rho), u * rho + eps * self.g(rho)

    def speeds(self, u, rho):
        """Characteristic speeds (lambda1, lambda2); valid at rho = 0 as well."""
        eps = self.epsilon
        a = -eps * self.g_prime(rho)
        root = np.sqrt(a * a + 4.0 * eps * rho * self.f_prime(rho))
        centre = u - 0.5 * a
        return centre - 0.5 * root, centre + 0.5 * root


def _brio_f(rho):
    return 0.5 * rho * rho


def _brio_fp(rho):
    return rho


def _brio_fpp(rho):
    return np.ones_like(rho) if isinstance(rho, np.ndarray) else 1.0


def _brio_slope(a, b):
    return 0.5 * (a + b)


def brio(epsilon: float) -> FluxModel:
    """Brio flux f = rho**2/2, g = -rho."""
    return FluxModel(_brio_f, _brio_fp, epsilon, "linear", _brio_fpp, _brio_slope, "brio")


def quadratic_g(epsilon: float) -> FluxModel:
    """f = rho**2/2 with the quadratic g = -rho**2."""
    return FluxModel(_brio_f, _brio_fp, epsilon, "quadratic", _brio_fpp, _brio_slope, "quadratic-g")


def is_brio(m: FluxModel) -> bool:
    """True when m is numerically the Brio flux (f = rho**2/2, linear g)."""
    if m.g_kind != "linear":
        return False
    probes = np.array([0.0, 0.25, 1.0, 3.5, 17.0])
    f = np.array([float(m.f(p)) for p in probes])
    fp = np.array([float(m.f_prime(p)) for p in probes])
    return bool(np.allclose(f, 0.5 * probes**2, rtol=1e-14, atol=1e-15)
                and np.allclose(fp, probes, rtol=1e-14, atol=1e-15))


# ---------------------------------------------------------------------------
# Jacobian and eigenstructure
# ---------------------------------------------------------------------------

def jacobian(m: FluxModel, s: State) -> np.ndarray:
    """Flux Jacobian [[u, eps f'], [rho, u + eps g']]."""
    eps = m.epsilon
    return np.array([[s.u, eps * m.f_prime(s.rho)],
                     [s.rho, s.u + eps * m.g_prime(s.rho)]], dtype=float)


@dataclass(frozen=True)
class EigenPair:
    lambda1: float
    lambda2: float
    r1: Optional[np.ndarray] = field(default=None, compare=False)
    r2: Optional[np.ndarray] = field(default=None, compare=False)


def eigenvalues(m: FluxModel, s: State) -> tuple[float, float]:
    lam1, lam2 = m.speeds(s.u, s.rho)
    return float(lam1), float(lam2)


def eigen(m: FluxModel, s: State, vectors: bool = True) -> EigenPair:
    """Eigenvalues and right eigenvectors.

    The eigenvectors are normalised with unit rho-component,
    r_k = ((lambda_k - u - eps g'(rho)) / rho, 1), which for linear g reduces to
    ((eps/2 -+ sqrt(4 eps rho f' + eps**2)/2) / rho, 1).
    """
    lam1, lam2 = eigenvalues(m, s)
    if not vectors:
        return EigenPair(lam1, lam2)
    if s.rho == 0.0:
        raise DegenerateEigenvectorError("eigenvectors are singular at rho = 0")
    shift = s.u + m.epsilon * m.g_prime(s.rho)
    r1 = np.array([(lam1 - shift) / s.rho, 1.0])
    r2 = np.array([(lam2 - shift) / s.rho, 1.0])
    return EigenPair(lam1, lam2, r1, r2)


@dataclass
class NonlinearityReport:
    """Directional derivatives of lambda_k along r_k at each probed state."""

    states: list
    grad1_dot_r1: list
    grad2_dot_r2: list
    flagged: list

    @property
    def ok(self) -> bool:
        return not self.flagged


def check_genuine_nonlinearity(m: FluxModel, grid: Sequence[State], rel_step: float = 1e-4) -> NonlinearityReport:
    """Sign check of grad(lambda_k) . r_k by centred differences along r_k.

    Field 1 must give a negative value, field 2 a positive one.
    """
    d1s, d2s, flagged = [], [], []
    for i, s in enumerate(grid):
        if s.rho <= 0.0:
            raise InvalidStateError("genuine nonlinearity is probed at rho > 0 only")
        ep = eigen(m, s)
        out = []
        for k, r in ((0, ep.r1), (1, ep.r2)):
            h = rel_step * s.rho  # r has unit rho-component, so rho stays positive
            plus = m.speeds(s.u + h * r[0], s.rho + h)[k]
            minus = m.speeds(s.u - h * r[0], s.rho - h)[k]
            out.append(float((plus - minus) / (2.0 * h)))
        d1s.append(out[0])
        d2s.append(out[1])
        if not (out[0] < 0.0 and out[1] > 0.0):
            flagged.append(i)
    return NonlinearityReport(list(grid), d1s, d2s, flagged)


@dataclass
class HypothesisReport:
    ok: bool
    n_samples: int
    first_violation: Optional[tuple[int, float, str]] = None


def validate_hypotheses(m: FluxModel, rho_max: float, n: int) -> HypothesisReport:
    """Sampled check that f' > 0 and f' is strictly increasing on (0, rho_max].

    Samples are log-uniform on [rho_max * 1e-6, rho_max]. Convexity uses
    ``f_second`` when the model supplies it and divided differences of f'
    otherwise. Violations are returned, not raised.
    """
    if not rho_max > 0.0:
        raise InvalidStateError("rho_max must be positive")
    if n < 3:
        raise InvalidStateError("need at least 3 samples")
    rhos = np.geomspace(rho_max * 1e-6, rho_max, n)
    fp = np.array([float(m.f_prime(r)) for r in rhos])
    for i, (r, v) in enumerate(zip(rhos, fp)):
        if not v > 0.0:
            return HypothesisReport(False, n, (i, float(r), "f' is not positive"))
    if m.f_second is not None:
        fpp = np.array([float(m.f_second(r)) for r in rhos])
        for i, (r, v) in enumerate(zip(rhos, fpp)):
            if not v > 0.0:
                return HypothesisReport(False, n, (i, float(r), "f'' is not positive"))
    for i in range(1, n):
        if not fp[i] > fp[i - 1]:
            return HypothesisReport(False, n, (i, float(rhos[i]), "f' is not strictly increasing"))
    return HypothesisReport(True, n)
