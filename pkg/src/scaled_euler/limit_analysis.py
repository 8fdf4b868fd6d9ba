"""Epsilon sweeps and the vanishing-epsilon limit objects."""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from scipy.optimize import brentq

from .errors import ScaledEulerError, WrongCaseError
from .flux_model import FluxModel
from .riemann_solver import Case, RiemannData, classify, solve_equal_u, solve_two_shock

log = logging.getLogger(__name__)

DEFAULT_EPS = tuple(10.0 ** -k for k in range(1, 8))
SWEEP_COLUMNS = ("epsilon", "u_star", "rho_star", "s1", "s2", "l_estimate", "weight_estimate")


@dataclass(frozen=True)
class SweepRecord:
    epsilon: float
    u_star: float
    rho_star: float
    s1: float
    s2: float
    l_estimate: float
    weight_estimate: float


@dataclass(frozen=True)
class Extrapolation:
    value: float
    order: float
    converged: bool
    last_value: float


@dataclass
class DeltaShockLimit:
    c_slope: float
    u_left: float
    u_right: float
    rho_left: float
    rho_right: float
    weight_slope: float
    l: float
    u_on_line: float
    case: str = Case.TWO_SHOCK.value
    extrapolation: dict = field(default_factory=dict)

    def weight(self, t):
        return self.weight_slope * t

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ContactLimit:
    """u = u_l everywhere, density jumps rho_l -> rho_r across x = u_l t."""

    c_slope: float
    u: float
    rho_left: float
    rho_right: float
    case: str = "Contact"


@dataclass(frozen=True)
class VacuumLimit:
    """u = u_l | x/t | u_r and rho = rho_l | 0 | rho_r, vacuum on (u_l t, u_r t)."""

    u_left: float
    u_right: float
    rho_left: float
    rho_right: float
    case: str = Case.TWO_RAREFACTION_VACUUM.value


def l_value(m: FluxModel, rho_star: float, rho_l: float) -> float:
    """2 eps (f(rho*) - f(rho_l)), in factored form once rho* > 1e10."""
    f_star = float(m.f(rho_star))
    if rho_star > 1e10:
        return 2.0 * m.epsilon * f_star * (1.0 - float(m.f(rho_l)) / f_star)
    return 2.0 * m.epsilon * (f_star - float(m.f(rho_l)))


def sweep(model: FluxModel, data: RiemannData, eps_list: Sequence[float] = DEFAULT_EPS,
          notices: Optional[list] = None) -> list[SweepRecord]:
    """Two-shock solve at each epsilon of a strictly decreasing list.

    Epsilons where the solve fails (too large for the data, say) are skipped
    with a notice appended to ``notices`` and logged; the sweep never aborts.
    """
    if classify(data) is not Case.TWO_SHOCK:
        raise WrongCaseError("sweeps of the delta-shock limit need u_l > u_r")
    eps_list = [float(e) for e in eps_list]
    if any(not e > 0.0 for e in eps_list) or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be positive and strictly decreasing")
    out = []
    for eps in eps_list:
        m = model.with_epsilon(eps)
        try:
            inter, fan = solve_two_shock(m, data)
        except ScaledEulerError as exc:
            msg = f"eps={eps:g} skipped: {type(exc).__name__}: {exc}"
            log.info(msg)
            if notices is not None:
                notices.append(msg)
            continue
        s1, s2 = (sh.speed for sh in fan.shocks)
        out.append(SweepRecord(eps, inter.u_star, inter.rho_star, s1, s2,
                               l_value(m, inter.rho_star, data.left.rho),
                               (s2 - s1) * inter.rho_star))
    return out


def contact_sweep(model: FluxModel, data: RiemannData, eps_list: Sequence[float] = DEFAULT_EPS):
    """(epsilon, u*, rho*) for the equal-velocity cases."""
    out = []
    for eps in eps_list:
        fan = solve_equal_u(model.with_epsilon(eps), data)
        out.append((eps, fan.intermediate.u_star, fan.intermediate.rho_star))
    return out


def _fit_order(e, q):
    """Order p with (q1 - q2)/(q2 - q3) = (e1^p - e2^p)/(e2^p - e3^p)."""
    target = (q[0] - q[1]) / (q[1] - q[2])

    def resid(p):
        return (e[0] ** p - e[1] ** p) / (e[1] ** p - e[2] ** p) - target

    lo, hi = 1e-3, 8.0
    if resid(lo) * resid(hi) > 0.0:
        return math.nan
    return brentq(resid, lo, hi, xtol=1e-12)


def richardson(eps: Sequence[float], values: Sequence[float], contraction: float = 1.2) -> Extrapolation:
    """Extrapolate q(eps) -> eps = 0 from the last three samples.

    The model q = q0 + C eps^p has its order p fitted from the data rather
    than assumed. If the successive differences fail to shrink by at least
    ``contraction`` the result is flagged and the last sample returned.
    """
    if len(values) < 3:
        raise ValueError("need at least 3 sweep records")
    e = [float(x) for x in eps[-3:]]
    q = [float(x) for x in values[-3:]]
    d1, d2 = q[0] - q[1], q[1] - q[2]
    if d2 == 0.0:
        return Extrapolation(q[2], math.inf, True, q[2])
    if d1 == 0.0 or abs(d1) < contraction * abs(d2) or d1 * d2 < 0.0:
        return Extrapolation(q[2], math.nan, False, q[2])
    p = _fit_order(e, q)
    if not math.isfinite(p):
        return Extrapolation(q[2], math.nan, False, q[2])
    c = d2 / (e[1] ** p - e[2] ** p)
    return Extrapolation(q[2] - c * e[2] ** p, p, True, q[2])


def extrapolate_limit(records: Sequence[SweepRecord], data: RiemannData) -> DeltaShockLimit:
    """Limit object assembled from extrapolated sweep columns."""
    if classify(data) is not Case.TWO_SHOCK:
        raise WrongCaseError("the delta-shock limit needs u_l > u_r")
    if len(records) < 3:
        raise ValueError("need at least 3 sweep records")
    eps = [r.epsilon for r in records]
    ex = {name: richardson(eps, [getattr(r, name) for r in records])
          for name in ("u_star", "l_estimate", "weight_estimate", "s1", "s2")}
    L, R = data.left, data.right
    return DeltaShockLimit(
        c_slope=0.5 * (ex["s1"].value + ex["s2"].value),
        u_left=L.u, u_right=R.u, rho_left=L.rho, rho_right=R.rho,
        weight_slope=ex["weight_estimate"].value,
        l=ex["l_estimate"].value,
        u_on_line=ex["u_star"].value,
        extrapolation=ex)


def closed_form_limit(data: RiemannData):
    L, R = data.left, data.right
    case = classify(data)
    if case is Case.TWO_SHOCK:
        du = L.u - R.u
        mid = 0.5 * (L.u + R.u)
        return DeltaShockLimit(mid, L.u, R.u, L.rho, R.rho, 0.5 * du * (L.rho + R.rho),
                               0.25 * du * du, mid)
    if case is Case.TWO_RAREFACTION_VACUUM:
        return VacuumLimit(L.u, R.u, L.rho, R.rho)
    return ContactLimit(L.u, L.u, L.rho, R.rho)


@dataclass(frozen=True)
class SpikeMassEntry:
    epsilon: float
    mass: float
    target: float
    rel_deviation: float


def spike_mass_check(records: Sequence[SweepRecord], data: RiemannData, t: float) -> list[SpikeMassEntry]:
    """Mass (s2 - s1) t rho* between the shocks against (u_l - u_r)(rho_l + rho_r) t / 2."""
    if classify(data) is not Case.TWO_SHOCK:
        raise WrongCaseError("spike mass needs u_l > u_r")
    target = closed_form_limit(data).weight(t)
    out = []
    for r in records:
        mass = (r.s2 - r.s1) * t * r.rho_star
        out.append(SpikeMassEntry(r.epsilon, mass, target, abs(mass - target) / abs(target)))
    return out


def interval_collapse(records: Sequence[SweepRecord], data: RiemannData, t: float):
    """Distances (eps, a, b) of the two shock lines from x = c t, a = c t - s1 t, b = s2 t - c t."""
    c = 0.5 * (data.left.u + data.right.u)
    return [(r.epsilon, (c - r.s1) * t, (r.s2 - c) * t) for r in records]


def fmt(x: float) -> str:
    return format(x, ".17g")


def write_sweep_csv(records: Sequence[SweepRecord], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in records:
        w.writerow([fmt(getattr(r, c)) for c in SWEEP_COLUMNS])
