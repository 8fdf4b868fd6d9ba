"""First-order finite-volume reference solver (global Lax-Friedrichs / Rusanov).

Deliberately independent of the exact solver: it only uses the flux and the
characteristic speeds, evolving the conserved pair (u, rho).
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CFLViolationError, DomainOverflowError, InvalidStateError, WrongCaseError
from .flux_model import FluxModel
from .limit_analysis import closed_form_limit, fmt
from .riemann_solver import (Case, ConstantState, RarefactionFan, RiemannData, Shock, Vacuum, WaveFan,
                             classify, sample_arrays, solve)

log = logging.getLogger(__name__)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_cells: int
    cfl: float = 0.9

    def __post_init__(self):
        if self.n_cells < 16:
            raise InvalidStateError("need at least 16 cells")
        if not 0.0 < self.cfl < 1.0:
            raise InvalidStateError("cfl must lie in (0, 1)")
        if not self.x_max > self.x_min:
            raise InvalidStateError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_cells + 1)

    @property
    def centres(self) -> np.ndarray:
        e = self.edges
        return 0.5 * (e[:-1] + e[1:])

    def with_cells(self, n: int) -> "Grid1D":
        return Grid1D(self.x_min, self.x_max, n, self.cfl)


@dataclass
class FieldSnapshot:
    t: float
    u_cells: np.ndarray
    rho_cells: np.ndarray
    clips: int = 0
    mass_audit: float = 0.0  # largest per-step conservation defect of rho seen so far


def riemann_snapshot(data: RiemannData, grid: Grid1D) -> FieldSnapshot:
    """Exact cell averages of the step initial data."""
    e = grid.edges
    frac_left = np.clip((0.0 - e[:-1]) / grid.dx, 0.0, 1.0)
    u = frac_left * data.left.u + (1.0 - frac_left) * data.right.u
    rho = frac_left * data.left.rho + (1.0 - frac_left) * data.right.rho
    return FieldSnapshot(0.0, u, rho)


def max_speed(m: FluxModel, u, rho) -> float:
    l1, l2 = m.speeds(u, rho)
    return float(max(np.max(np.abs(l1)), np.max(np.abs(l2))))


def step(m: FluxModel, snap: FieldSnapshot, grid: Grid1D, dt: Optional[float] = None) -> FieldSnapshot:
    """One conservative update with outflow (copy) ghost cells.

    dt defaults to cfl * dx / max|lambda|; a supplied dt may only be smaller.
    """
    u, rho = snap.u_cells, snap.rho_cells
    alpha = max_speed(m, u, rho)
    dt_cfl = grid.cfl * grid.dx / alpha if alpha > 0.0 else math.inf
    if dt is None:
        dt = dt_cfl
    elif dt > dt_cfl * (1.0 + 1e-12):
        raise CFLViolationError(f"dt={dt:.6g} exceeds the CFL limit {dt_cfl:.6g}")
    ue = np.concatenate([[u[0]], u, [u[-1]]])
    re = np.concatenate([[rho[0]], rho, [rho[-1]]])
    f1, f2 = m.flux(ue, re)
    h1 = 0.5 * (f1[:-1] + f1[1:]) - 0.5 * alpha * (ue[1:] - ue[:-1])
    h2 = 0.5 * (f2[:-1] + f2[1:]) - 0.5 * alpha * (re[1:] - re[:-1])
    lam = dt / grid.dx
    u_new = u - lam * (h1[1:] - h1[:-1])
    rho_new = rho - lam * (h2[1:] - h2[:-1])
    audit = (rho_new.sum() - rho.sum()) * grid.dx + dt * (h2[-1] - h2[0])
    audit = abs(audit) / max(1e-300, np.abs(rho).sum() * grid.dx)
    neg = rho_new < 0.0
    clips = int(np.count_nonzero(neg))
    if clips:
        worst = float(rho_new.min())
        if worst < -1e-12:
            log.warning("clipped %d negative densities (min %.3e) at t=%.6g", clips, worst, snap.t + dt)
        rho_new = np.where(neg, 0.0, rho_new)
    alpha_new = max_speed(m, u_new, rho_new)
    if alpha_new > 1.05 * alpha:
        raise CFLViolationError(
            f"max speed grew from {alpha:.6g} to {alpha_new:.6g} within one step (dt too large)")
    return FieldSnapshot(snap.t + dt, u_new, rho_new, snap.clips + clips, max(snap.mass_audit, audit))


def run(m: FluxModel, snap: FieldSnapshot, grid: Grid1D, t_end: float) -> FieldSnapshot:
    """Advance to t_end exactly, shortening the final step."""
    while snap.t < t_end * (1.0 - 1e-14):
        alpha = max_speed(m, snap.u_cells, snap.rho_cells)
        dt = grid.cfl * grid.dx / alpha if alpha > 0.0 else t_end - snap.t
        snap = step(m, snap, grid, min(dt, t_end - snap.t))
    return snap


def _wave_edges(fan: WaveFan) -> list[float]:
    xs = []
    for seg in fan.segments:
        if isinstance(seg, Shock):
            xs.append(seg.speed)
        elif isinstance(seg, (RarefactionFan, Vacuum)):
            xs += [seg.xi_lo, seg.xi_hi]
    return sorted(set(xs))


def exact_cell_averages(fan: WaveFan, m: FluxModel, grid: Grid1D, t: float):
    """Cell averages of the exact solution, cells split at every wave edge."""
    e = grid.edges
    cuts = [x * t for x in _wave_edges(fan)]
    lo_list, hi_list, owner = [], [], []
    for i in range(grid.n_cells):
        pts = [e[i]] + [c for c in cuts if e[i] < c < e[i + 1]] + [e[i + 1]]
        for a, b in zip(pts, pts[1:]):
            lo_list.append(a)
            hi_list.append(b)
            owner.append(i)
    lo, hi, owner = np.array(lo_list), np.array(hi_list), np.array(owner)
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (lo + hi))[:, None] + half[:, None] * _GL_X
    u, rho = sample_arrays(fan, m, nodes, t)
    widths = e[1:] - e[:-1]
    single = np.bincount(owner, minlength=grid.n_cells) == 1
    out = []
    for vals in (u, rho):
        # piece averages; constant pieces are taken verbatim so they carry no quadrature round-off
        avg = 0.5 * (vals @ _GL_W)
        flat = np.all(vals == vals[:, :1], axis=1)
        avg[flat] = vals[flat, 0]
        cell = np.bincount(owner, avg * (hi - lo), grid.n_cells) / widths
        first = np.searchsorted(owner, np.arange(grid.n_cells))
        cell[single] = avg[first[single]]
        out.append(cell)
    return out[0], out[1]


def _check_window(fan: WaveFan, grid: Grid1D, t_end: float):
    edges = _wave_edges(fan) or [0.0]
    margin = 4.0 * grid.dx
    if edges[0] * t_end <= grid.x_min + margin or edges[-1] * t_end >= grid.x_max - margin:
        raise DomainOverflowError(
            f"waves span [{edges[0] * t_end:.6g}, {edges[-1] * t_end:.6g}] at t={t_end:g}, "
            f"window is [{grid.x_min:g}, {grid.x_max:g}]")


@dataclass
class CompareEntry:
    n_cells: int
    l1_u: float
    l1_rho: float
    clips: int
    mass_audit: float

    @property
    def l1(self) -> float:
        return self.l1_u + self.l1_rho


@dataclass
class CompareReport:
    case: str
    epsilon: float
    t_end: float
    entries: list = field(default_factory=list)

    def orders(self) -> list[float]:
        """Empirical orders log2(e_coarse / e_fine) between consecutive levels."""
        out = []
        for a, b in zip(self.entries, self.entries[1:]):
            out.append(math.log(a.l1 / b.l1) / math.log(b.n_cells / a.n_cells))
        return out

    def reduction(self) -> float:
        """Ratio of the coarsest to the finest combined L1 distance."""
        return self.entries[0].l1 / self.entries[-1].l1

    def monotone(self) -> bool:
        return all(b.l1 < a.l1 for a, b in zip(self.entries, self.entries[1:]))


def run_compare(m: FluxModel, data: RiemannData, grid: Grid1D, t_end: float,
                levels: Optional[Sequence[int]] = None) -> CompareReport:
    """L1 distances between finite-volume and exact cell averages at t_end.

    ``levels`` lists cell counts to run; by default grid.n_cells and its
    halvings down to a quarter (the refinement pairs).
    """
    fan = solve(m, data)
    _check_window(fan, grid, t_end)
    if levels is None:
        levels = [n for n in (grid.n_cells // 4, grid.n_cells // 2, grid.n_cells) if n >= 16]
    rep = CompareReport(classify(data).value, m.epsilon, t_end)
    for n in sorted(levels):
        g = grid.with_cells(n)
        snap = run(m, riemann_snapshot(data, g), g, t_end)
        ue, re = exact_cell_averages(fan, m, g, t_end)
        rep.entries.append(CompareEntry(n, float(np.abs(snap.u_cells - ue).sum() * g.dx),
                                        float(np.abs(snap.rho_cells - re).sum() * g.dx),
                                        snap.clips, snap.mass_audit))
    return rep


@dataclass
class SpikeReport:
    epsilon: float
    t_end: float
    window: tuple
    window_mass: float
    excess_mass: float
    target: float
    rel_deviation: float
    peak: float
    width: float
    cells_in_gap: float
    clips: int


def spike_probe(m: FluxModel, data: RiemannData, grid: Grid1D, t_end: float) -> SpikeReport:
    """Mass concentrated near the shock line in the finite-volume solution.

    The window has width 10 (s2 - s1) t_end around x = c t_end. The excess
    over the background step (rho_l left of c t, rho_r right of it) is
    compared with the limit weight d(t_end). Width is the full width at half
    maximum of the excess.
    """
    if classify(data) is not Case.TWO_SHOCK:
        raise WrongCaseError("the spike probe needs u_l > u_r")
    fan = solve(m, data)
    s1, s2 = (sh.speed for sh in fan.shocks)
    gap = (s2 - s1) * t_end
    cells = gap / grid.dx
    if cells < 8.0:
        raise InvalidStateError(f"only {cells:.2f} cells across the shock gap; need at least 8")
    _check_window(fan, grid, t_end)
    lim = closed_form_limit(data)
    c = lim.c_slope * t_end
    lo, hi = c - 5.0 * gap, c + 5.0 * gap
    snap = run(m, riemann_snapshot(data, grid), grid, t_end)
    e = grid.edges
    overlap = np.clip(np.minimum(e[1:], hi) - np.maximum(e[:-1], lo), 0.0, None)
    mass = float(np.sum(snap.rho_cells * overlap))
    background = data.left.rho * (c - lo) + data.right.rho * (hi - c)
    excess = mass - background
    target = lim.weight(t_end)
    x = grid.centres
    bg = np.where(x < c, data.left.rho, data.right.rho)
    ex = snap.rho_cells - bg
    peak = float(ex.max())
    width = float(np.count_nonzero(ex >= 0.5 * peak) * grid.dx)
    return SpikeReport(m.epsilon, t_end, (lo, hi), mass, excess, target, abs(excess - target) / target,
                       float(snap.rho_cells.max()), width, cells, snap.clips)


def write_snapshot_csv(snap: FieldSnapshot, grid: Grid1D, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("x", "u", "rho"))
    for x, u, r in zip(grid.centres, snap.u_cells, snap.rho_cells):
        w.writerow((fmt(x), fmt(u), fmt(r)))
