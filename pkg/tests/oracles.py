"""Reference computations written independently of the package internals.

Everything here uses the textbook forms directly (no stable rewrites, no
log-density substitution, plain bisection) so that agreement with the
package is a genuine cross-check.
"""
import math

import numpy as np


def bisect(fn, lo, hi, tol=1e-13, maxiter=500):
    flo = fn(lo)
    fhi = fn(hi)
    assert flo * fhi <= 0.0, (lo, hi, flo, fhi)
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def brio_f(r):
    return 0.5 * r * r


def locus_u_naive(eps, anchor_u, anchor_rho, rho, family, f=brio_f):
    """u on the k-shock locus at density rho, linear g, straight from the jump relations."""
    if rho == anchor_rho:
        return anchor_u
    s = rho + anchor_rho
    root = math.sqrt(eps * eps + 2.0 * eps * s * (f(rho) - f(anchor_rho)) / (rho - anchor_rho))
    br = eps - root if family == 1 else eps + root
    return anchor_u + (rho - anchor_rho) / s * br


def shock1_rho_oracle(eps, anchor_u, anchor_rho, u):
    """rho >= anchor_rho on the 1-locus (left anchor), by bisection in rho."""
    g = lambda r: locus_u_naive(eps, anchor_u, anchor_rho, r, 1) - u
    hi = 2.0 * anchor_rho
    while g(hi) > 0.0:
        hi *= 2.0
    return bisect(g, anchor_rho, hi)


def shock2_rho_right_oracle(eps, anchor_u, anchor_rho, u):
    """rho >= anchor_rho on the 2-locus with the anchor as right state."""
    g = lambda r: locus_u_naive(eps, anchor_u, anchor_rho, r, 2) - u
    hi = 2.0 * anchor_rho
    while g(hi) < 0.0:
        hi *= 2.0
    return bisect(g, anchor_rho, hi)


def two_shock_oracle(eps, ul, rhol, ur, rhor):
    """Nested bisection: outer on u in [u_r, u_l] for rho1(u) - rho2(u) = 0."""
    h = lambda u: shock1_rho_oracle(eps, ul, rhol, u) - shock2_rho_right_oracle(eps, ur, rhor, u)
    u = bisect(h, ur, ul, tol=1e-13)
    return u, shock1_rho_oracle(eps, ul, rhol, u)


def rh_speeds(eps, left, right):
    """Speeds from each jump relation separately (linear g, Brio f)."""
    (ul, rl), (ur, rr) = left, right
    s_u = ((0.5 * ul * ul + eps * brio_f(rl)) - (0.5 * ur * ur + eps * brio_f(rr))) / (ul - ur)
    s_rho = ((ul * rl - eps * rl) - (ur * rr - eps * rr)) / (rl - rr)
    return s_u, s_rho


def brio_rarefaction_primitive(xi, eps, family):
    """Antiderivative in rho of (eps -+ sqrt(eps^2 + 4 eps xi^2)) / (2 xi)."""
    S = math.sqrt(eps * eps + 4.0 * eps * xi * xi)
    if family == 1:
        return -0.5 * S + 0.5 * eps * math.log(eps + S)
    return eps * math.log(xi) + 0.5 * S - 0.5 * eps * math.log(eps + S)


def brio_rarefaction_u(eps, anchor_u, anchor_rho, rho, family):
    F = brio_rarefaction_primitive
    return anchor_u + F(rho, eps, family) - F(anchor_rho, eps, family)


def flux_fd_jacobian(flux, u, rho, h=1e-6):
    J = np.zeros((2, 2))
    for j, (du, dr) in enumerate(((h, 0.0), (0.0, h))):
        fp = np.array(flux(u + du, rho + dr))
        fm = np.array(flux(u - du, rho - dr))
        J[:, j] = (fp - fm) / (2 * h)
    return J
