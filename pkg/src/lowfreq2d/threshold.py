"""Zero-energy analysis: nullspace ladder, resonance/eigenvalue classification.

For each angular mode l the regular zero-energy solution connects, outside the
scatterer support, to  g * (r^l or log r) + d * (r^{-l} or 1).  The vanishing
pattern of the growing coefficient g across modes decides everything:

  mode 0, g = 0   -> bounded nonzero solution: s-resonance (state tends to d)
  mode 1, g = 0   -> solution ~ d/r: p-resonance, multiplicity 2 (cos, sin)
  mode l >= 2, g = 0 -> solution ~ d r^{-l} is square integrable: eigenvalue

The report also carries the distinguished solutions and constants used by the
expansion and scattering modules: the bounded state normalized to 1 at
infinity, the log-growing state normalized to log r (whose finite part fixes
the pole shift a and, for obstacles, the logarithmic-capacity constant), the
1/r states with their norm constants alpha_m, and the L2-normalized
eigenfunctions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateScattererError, ValidationError
from .quadrature import PanelGrid
from .radial import Exterior, RadialFunction, inner, norm_sq, with_trig
from .radialsolve import PiecewiseSolution, regular_solution
from .scatterer import CutoffProfile, DiskObstacle, Scatterer, default_cutoff, standard_grid
from .specfun import GAMMA0

ZERO_COEFF_RTOL = 1e-10   # growing coefficient counts as zero below this, relative
DEGENERATE_ATOL = 1e-13


@dataclass
class ThresholdMode:
    """Connection data of the regular zero-energy solution in one mode."""

    mode: int
    growing: complex          # coeff of r^l (log r when l = 0)
    decaying: complex         # coeff of r^{-l} (1 when l = 0)
    regular: RadialFunction
    solution: PiecewiseSolution

    @property
    def growing_is_zero(self) -> bool:
        return abs(self.growing) < ZERO_COEFF_RTOL * abs(self.decaying)


@dataclass
class ThresholdReport:
    scatterer: Scatterer
    cutoff: CutoffProfile
    grid: PanelGrid
    dim_g0_mod_g1: int                      # s-resonance count (0 or 1)
    dim_g1_mod_g2: int                      # p-resonance count M (0 or 2 here)
    eigen_modes: list[tuple[int, RadialFunction]]
    U0: RadialFunction | None
    Ulog: RadialFunction | None
    c0_ulog: complex | None
    a: complex | None                       # pole shift gamma0 + c0(Ulog)
    capacity: float | None                  # obstacles: -Re c0(Ulog)
    Uw: list[RadialFunction] = field(default_factory=list)
    alpha: list[complex] = field(default_factory=list)
    s: list[complex] = field(default_factory=list)
    modes: list[ThresholdMode] = field(default_factory=list)

    @property
    def has_s_resonance(self) -> bool:
        return self.dim_g0_mod_g1 == 1

    @property
    def has_p_resonance(self) -> bool:
        return self.dim_g1_mod_g2 > 0

    @property
    def has_eigenvalue(self) -> bool:
        return len(self.eigen_modes) > 0

    @property
    def has_zero_resonance(self) -> bool:
        return self.has_s_resonance or self.has_p_resonance


def solve_zero_mode(s: Scatterer, l: int, grid: PanelGrid | None = None,
                    cutoff: CutoffProfile | None = None) -> ThresholdMode:
    """Exact transfer-matrix solve of the mode-l equation at zero energy."""
    if cutoff is None:
        cutoff = default_cutoff(s)
    if grid is None:
        grid = standard_grid(s, cutoff)
    sol = regular_solution(s, l, None, grid.rmax)
    c1, c2 = sol.coeffs[-1]
    if l == 0:
        growing, decaying = c2, c1       # exterior basis (1, log r)
    else:
        growing, decaying = c1, c2       # exterior basis (r^l, r^{-l})
    if max(abs(growing), abs(decaying)) < DEGENERATE_ATOL:
        raise DegenerateScattererError(
            f"mode {l}: both exterior connection coefficients vanish"
        )
    vals, ders = sol.eval(grid.nodes)
    if l == 0:
        ext = Exterior(c0=decaying, clog=growing)
    else:
        ext = Exterior(v={l: growing, -l: decaying})
    fn = RadialFunction(l, grid, vals, ders, "cos", ext, s.support_radius)
    return ThresholdMode(l, growing, decaying, fn, sol)


def _snap_exterior(f: RadialFunction, keep: str) -> RadialFunction:
    """Zero out the classified-away exterior coefficient (numerically ~1e-16)."""
    ext = f.exterior
    l = f.mode
    if keep == "decaying":
        new = Exterior(c0=ext.c0, clog=0.0) if l == 0 else Exterior(v={-l: ext.v[-l]})
    else:
        new = Exterior(c0=ext.c0, clog=ext.clog) if l == 0 else Exterior(v=dict(ext.v))
    return RadialFunction(f.mode, f.grid, f.values, f.derivs, f.trig, new, f.exterior_start)


def classify(s: Scatterer, lmax: int = 8, cutoff: CutoffProfile | None = None,
             grid: PanelGrid | None = None) -> ThresholdReport:
    """Classify the zero-energy nullspace and build its distinguished elements."""
    if lmax < 2:
        raise ValidationError("lmax must be at least 2")
    if cutoff is None:
        cutoff = default_cutoff(s)
    if grid is None:
        grid = standard_grid(s, cutoff)
    modes = [solve_zero_mode(s, l, grid, cutoff) for l in range(lmax + 1)]

    m0 = modes[0]
    U0 = Ulog = None
    c0_ulog = a = None
    capacity = None
    dim_s = 0
    if m0.growing_is_zero:
        dim_s = 1
        U0 = _snap_exterior(m0.regular.scaled(1.0 / m0.decaying), "decaying")
    else:
        Ulog = m0.regular.scaled(1.0 / m0.growing)
        c0_ulog = complex(m0.decaying / m0.growing)
        a = GAMMA0 + c0_ulog
        if isinstance(s, DiskObstacle):
            capacity = -c0_ulog.real

    dim_p = 0
    Uw: list[RadialFunction] = []
    alpha: list[complex] = []
    s_shifts: list[complex] = []
    m1 = modes[1]
    if m1.growing_is_zero:
        dim_p = 2   # cos and sin copies of the same radial profile
        prof = _snap_exterior(m1.regular.scaled(1.0 / m1.decaying), "decaying")
        # alpha = lim_{r1 -> inf} ( <U,U>_{|x|<r1} / pi - log r1 ); the profile is
        # exactly 1/r beyond the support, so the limit is reached at the grid end.
        r1 = grid.rmax
        quad = grid.integrate(np.abs(prof.values) ** 2 * grid.nodes).real
        al = quad - math.log(r1)
        for trig in ("cos", "sin"):
            Uw.append(with_trig(prof, trig))
            alpha.append(al)
            s_shifts.append(GAMMA0 + al)

    eigen: list[tuple[int, RadialFunction]] = []
    for m in modes[2:]:
        if m.growing_is_zero:
            raw = _snap_exterior(m.regular.scaled(1.0 / m.decaying), "decaying")
            nrm = math.sqrt(norm_sq(raw, include_tail=True))
            eigen.append((m.mode, raw.scaled(1.0 / nrm)))

    return ThresholdReport(
        scatterer=s, cutoff=cutoff, grid=grid,
        dim_g0_mod_g1=dim_s, dim_g1_mod_g2=dim_p,
        eigen_modes=eigen, U0=U0, Ulog=Ulog, c0_ulog=c0_ulog, a=a,
        capacity=capacity, Uw=Uw, alpha=alpha, s=s_shifts, modes=modes,
    )


def eigen_projection(report: ThresholdReport, f: RadialFunction) -> RadialFunction:
    """Project f onto the zero eigenspace (both trig copies per eigen mode)."""
    out_vals = np.zeros(len(f.grid), dtype=complex)
    hit = None
    f_decaying_tail = (
        f.exterior is not None
        and f.exterior.clog == 0 and f.exterior.c0 == 0
        and all(l < 0 for l in f.exterior.v)
    )
    for l, e in report.eigen_modes:
        for trig in ("cos", "sin"):
            psi = with_trig(e, trig)
            if not f.same_channel(psi):
                continue
            if not f.grid.same(psi.grid):
                raise ValidationError("eigen projection needs f on the report grid")
            out_vals = out_vals + psi.values * inner(f, psi, tail=f_decaying_tail)
            hit = psi
    if hit is None:
        return RadialFunction(f.mode, f.grid, out_vals, np.zeros_like(out_vals), f.trig)
    return RadialFunction(f.mode, f.grid, out_vals, None, f.trig)


def report_to_dict(report: ThresholdReport) -> dict:
    """JSON-ready summary (complex numbers as [re, im])."""
    def c(z):
        return None if z is None else [complex(z).real, complex(z).imag]

    return {
        "kind": report.scatterer.kind,
        "dimG0modG1": report.dim_g0_mod_g1,
        "dimG1modG2": report.dim_g1_mod_g2,
        "eigenModes": [l for l, _ in report.eigen_modes],
        "c0Ulog": c(report.c0_ulog),
        "a": c(report.a),
        "capacity": report.capacity,
        "alpha": [c(x) for x in report.alpha],
        "s": [c(x) for x in report.s],
        "connection": [
            {"mode": m.mode, "growing": c(m.growing), "decaying": c(m.decaying)}
            for m in report.modes
        ],
    }
