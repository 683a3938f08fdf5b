"""Radially symmetric scatterers, the radial cutoff, and config ingestion.

Two concrete models: piecewise-constant compactly supported potentials and
disk obstacles with Dirichlet or Neumann condition.  Piecewise-constant data
is deliberate: interior solutions become explicit Bessel transfer matrices,
so downstream modules get machine-precision oracles instead of ODE steppers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ValidationError
from .quadrature import PanelGrid, graded_inner_edges
from .radial import Exterior, RadialFunction


@dataclass(frozen=True)
class PiecewisePotential:
    """V = values[j] on (breaks[j-1], breaks[j]), with breaks[-1] the support radius."""

    breaks: tuple[float, ...]
    values: tuple[complex, ...]

    def __post_init__(self):
        if len(self.breaks) == 0 or len(self.breaks) != len(self.values):
            raise ValidationError("need one value per break")
        if self.breaks[0] <= 0 or any(b >= c for b, c in zip(self.breaks, self.breaks[1:])):
            raise ValidationError("breakpoints not increasing")

    @property
    def kind(self) -> str:
        return "potential"

    @property
    def support_radius(self) -> float:
        return self.breaks[-1]

    @property
    def inner_radius(self) -> float:
        return 0.0

    @property
    def selfadjoint(self) -> bool:
        return all(abs(complex(v).imag) == 0.0 for v in self.values)

    @property
    def admissible(self) -> bool:
        return all(complex(v).real >= 0.0 for v in self.values)

    def value_on_segment(self, j: int) -> complex:
        return complex(self.values[j])

    def segment_edges(self) -> list[float]:
        return [0.0, *self.breaks]

    def shifted(self, eps: float, bump_values=None) -> "PiecewisePotential":
        """V + eps * V1 with V1 = 1 on the support by default."""
        if bump_values is None:
            bump_values = tuple(1.0 for _ in self.values)
        return PiecewisePotential(
            self.breaks, tuple(complex(v) + eps * complex(b) for v, b in zip(self.values, bump_values))
        )


@dataclass(frozen=True)
class DiskObstacle:
    radius: float
    bc: str  # "dirichlet" | "neumann"

    def __post_init__(self):
        if self.radius <= 0:
            raise ValidationError("radius must be positive")
        if self.bc not in ("dirichlet", "neumann"):
            raise ValidationError(f"unknown boundary condition '{self.bc}'")

    @property
    def kind(self) -> str:
        return "disk"

    @property
    def support_radius(self) -> float:
        return self.radius

    @property
    def inner_radius(self) -> float:
        return self.radius

    @property
    def selfadjoint(self) -> bool:
        return True

    @property
    def admissible(self) -> bool:
        return True


Scatterer = PiecewisePotential | DiskObstacle


# ----------------------------------------------------------------------------
# radial cutoff chi_1: 1 inside r0, 0 beyond r0 + width, smooth bridge between
# ----------------------------------------------------------------------------

def _h(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    pos = t > 1e-3 / 745.0  # exp(-1/t) underflow guard
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _bridge(t: np.ndarray):
    """S, S', S'' for the exp(-1/t) partition bridge; S(0)=1, S(1)=0."""
    t = np.asarray(t, dtype=float)
    A = _h(1.0 - t)
    B = _h(t)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        Ap = np.where(t < 1.0, -A / (1.0 - t) ** 2, 0.0)
        App = np.where(t < 1.0, A * (1.0 - 2.0 * (1.0 - t)) / (1.0 - t) ** 4, 0.0)
        Bp = np.where(t > 0.0, B / t**2, 0.0)
        Bpp = np.where(t > 0.0, B * (1.0 - 2.0 * t) / t**4, 0.0)
    D = A + B
    ok = D > 0
    S = np.where(ok, np.divide(A, D, where=ok), 0.0)
    num = Ap * B - A * Bp
    Sp = np.where(ok, np.divide(num, D * D, where=ok), 0.0)
    Spp = np.where(
        ok,
        np.divide(App * B - A * Bpp, D * D, where=ok)
        - 2.0 * np.divide(num * (Ap + Bp), D * D * D, where=ok),
        0.0,
    )
    return S, Sp, Spp


@dataclass(frozen=True)
class CutoffProfile:
    r0: float
    width: float

    def __post_init__(self):
        if self.r0 <= 0 or self.width <= 0:
            raise ValidationError("cutoff needs r0 > 0 and width > 0")

    @property
    def r_end(self) -> float:
        return self.r0 + self.width

    @property
    def pairing_radius(self) -> float:
        """Radius r1 with chi = 0 for r > r1 - 1."""
        return self.r_end + 1.0

    def chi(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        t = np.clip((r - self.r0) / self.width, 0.0, 1.0)
        S, _, _ = _bridge(t)
        return np.where(r <= self.r0, 1.0, np.where(r >= self.r_end, 0.0, S))

    def dchi(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        inside = (r > self.r0) & (r < self.r_end)
        t = np.clip((r - self.r0) / self.width, 0.0, 1.0)
        _, Sp, _ = _bridge(t)
        return np.where(inside, Sp / self.width, 0.0)

    def d2chi(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        inside = (r > self.r0) & (r < self.r_end)
        t = np.clip((r - self.r0) / self.width, 0.0, 1.0)
        _, _, Spp = _bridge(t)
        return np.where(inside, Spp / self.width**2, 0.0)

    def laplacian_chi(self, r) -> np.ndarray:
        """(chi'' + chi'/r) for the radial Laplacian."""
        r = np.asarray(r, dtype=float)
        return self.d2chi(r) + np.where(r > 0, self.dchi(r) / np.where(r > 0, r, 1.0), 0.0)


def default_cutoff(s: Scatterer) -> CutoffProfile:
    return CutoffProfile(r0=s.support_radius + 0.5, width=1.0)


def commutator_apply(chi: CutoffProfile, u: RadialFunction) -> RadialFunction:
    """[Laplacian, chi] u = (Delta chi) u + 2 chi' u', supported on the bridge."""
    grid = u.grid
    in_bridge = (grid.nodes >= chi.r0) & (grid.nodes <= chi.r_end)
    if int(np.count_nonzero(in_bridge)) < 32:
        raise ValidationError(
            f"grid too coarse: {int(np.count_nonzero(in_bridge))} nodes across the cutoff bridge (need >= 32)"
        )
    if u.derivs is None:
        du = grid.derivative(u.values)
    else:
        du = u.derivs
    vals = chi.laplacian_chi(grid.nodes) * u.values + 2.0 * chi.dchi(grid.nodes) * du
    return RadialFunction(
        u.mode, grid, vals, None, u.trig,
        exterior=Exterior(), exterior_start=chi.r_end,
    )


# ----------------------------------------------------------------------------
# standard grids
# ----------------------------------------------------------------------------

def standard_grid(s: Scatterer, chi: CutoffProfile, nodes_per_panel: int = 32,
                  rmax: float | None = None, extra_edges=()) -> PanelGrid:
    """Panels aligned with potential breakpoints and the cutoff bridge.

    The grid reaches one unit past the pairing radius so circle pairings at r1
    and sources supported outside the cutoff stay on-grid.
    """
    if rmax is None:
        rmax = chi.pairing_radius + 1.0
    # the bridge is C-infinity but not analytic at its endpoints; grading the
    # panels toward both ends keeps its quadratures machine-exact
    ts = (0.0, 0.001, 0.01, 0.04, 0.12, 0.28, 0.5, 0.72, 0.88, 0.96, 0.99, 0.999, 1.0)
    core = {chi.r0 + t * chi.width for t in ts}
    core.update({chi.pairing_radius, rmax})
    core.update(float(e) for e in extra_edges)
    if isinstance(s, DiskObstacle):
        edges = sorted(e for e in core if e > s.radius)
        all_edges = [s.radius, *edges]
    else:
        core.update(s.breaks)
        edges = sorted(e for e in core if e > 0)
        inner = graded_inner_edges(edges[0])
        all_edges = [*inner[:-1], *edges]
    return PanelGrid(np.array(all_edges), nodes_per_panel)


# ----------------------------------------------------------------------------
# config files: line-oriented `key = value`, '#' comments, ';' separators
# ----------------------------------------------------------------------------

_KNOWN_KEYS = {
    "kind", "breaks", "values", "radius", "bc",
    "cutoff.r0", "cutoff.width",
    "grid.argDeg", "grid.min", "grid.max", "grid.count",
    "fit.jmax", "fit.kmax",
}

_GRID_DEFAULTS = dict(argDeg=45.0, min=1e-6, max=1e-2, count=24)
_FIT_DEFAULTS = dict(jmax=1, kmax=2)


@dataclass(frozen=True)
class ScattererConfig:
    scatterer: Scatterer
    cutoff: CutoffProfile
    grid_arg_deg: float
    grid_min: float
    grid_max: float
    grid_count: int
    fit_jmax: int
    fit_kmax: int


def _parse_complex(text: str, line: int, key: str) -> complex:
    t = text.strip().replace(" ", "")
    try:
        return complex(t.replace("i", "j"))
    except ValueError:
        raise ConfigError(f"cannot parse complex number '{text}'", line, key) from None


def _format_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return repr(z.real)
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def parse_config(text: str) -> ScattererConfig:
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines() or [""], start=1):
        line = raw.split("#", 1)[0]
        for piece in line.split(";"):
            piece = piece.strip()
            if not piece:
                continue
            if "=" not in piece:
                raise ConfigError(f"expected key = value, got '{piece}'", lineno)
            key, val = (p.strip() for p in piece.split("=", 1))
            if key not in _KNOWN_KEYS:
                raise ConfigError("unknown key", lineno, key)
            if key in entries:
                raise ConfigError("duplicate key", lineno, key)
            entries[key] = (val, lineno)

    def take(key, default=None):
        if key in entries:
            return entries.pop(key)
        return (default, None)

    kind, kline = take("kind")
    if kind is None:
        raise ConfigError("missing required key 'kind'")
    if kind == "potential":
        breaks_s, bl = take("breaks")
        values_s, vl = take("values")
        if breaks_s is None or values_s is None:
            raise ConfigError("potential needs 'breaks' and 'values'", kline)
        try:
            breaks = tuple(float(b) for b in breaks_s.split(","))
        except ValueError:
            raise ConfigError(f"cannot parse breaks '{breaks_s}'", bl, "breaks") from None
        values = tuple(_parse_complex(v, vl, "values") for v in values_s.split(","))
        if len(breaks) != len(values):
            raise ConfigError("breaks and values must have the same length", vl, "values")
        if breaks[0] <= 0 or any(b >= c for b, c in zip(breaks, breaks[1:])):
            raise ConfigError("breakpoints not increasing", bl, "breaks")
        scatterer: Scatterer = PiecewisePotential(breaks, values)
    elif kind == "disk":
        radius_s, rl = take("radius")
        bc, bcl = take("bc", "dirichlet")
        if radius_s is None:
            raise ConfigError("disk needs 'radius'", kline)
        radius = float(radius_s)
        if radius <= 0:
            raise ConfigError("radius must be positive", rl, "radius")
        if bc not in ("dirichlet", "neumann"):
            raise ConfigError(f"unknown boundary condition '{bc}'", bcl, "bc")
        scatterer = DiskObstacle(radius, bc)
    else:
        raise ConfigError(f"unknown kind '{kind}'", kline, "kind")

    r0_s, r0l = take("cutoff.r0")
    w_s, _ = take("cutoff.width")
    r0 = float(r0_s) if r0_s is not None else scatterer.support_radius + 0.5
    width = float(w_s) if w_s is not None else 1.0
    if r0 < scatterer.support_radius:
        raise ConfigError(
            f"cutoff.r0 = {r0} is inside the scatterer support (radius {scatterer.support_radius})",
            r0l, "cutoff.r0",
        )
    cutoff = CutoffProfile(r0, width)

    g = dict(_GRID_DEFAULTS)
    for name, cast in (("argDeg", float), ("min", float), ("max", float), ("count", int)):
        v, ln = take(f"grid.{name}")
        if v is not None:
            try:
                g[name] = cast(v)
            except ValueError:
                raise ConfigError(f"cannot parse '{v}'", ln, f"grid.{name}") from None
    if not (0 < g["min"] < g["max"]):
        raise ConfigError("need 0 < grid.min < grid.max")
    f = dict(_FIT_DEFAULTS)
    for name in ("jmax", "kmax"):
        v, ln = take(f"fit.{name}")
        if v is not None:
            try:
                f[name] = int(v)
            except ValueError:
                raise ConfigError(f"cannot parse '{v}'", ln, f"fit.{name}") from None

    return ScattererConfig(
        scatterer=scatterer, cutoff=cutoff,
        grid_arg_deg=g["argDeg"], grid_min=g["min"], grid_max=g["max"],
        grid_count=g["count"], fit_jmax=f["jmax"], fit_kmax=f["kmax"],
    )


def serialize_config(cfg: ScattererConfig) -> str:
    lines = []
    s = cfg.scatterer
    if isinstance(s, PiecewisePotential):
        lines.append("kind = potential")
        lines.append("breaks = " + ",".join(repr(b) for b in s.breaks))
        lines.append("values = " + ",".join(_format_complex(v) for v in s.values))
    else:
        lines.append("kind = disk")
        lines.append(f"radius = {s.radius!r}")
        lines.append(f"bc = {s.bc}")
    lines.append(f"cutoff.r0 = {cfg.cutoff.r0!r}")
    lines.append(f"cutoff.width = {cfg.cutoff.width!r}")
    lines.append(f"grid.argDeg = {cfg.grid_arg_deg!r}")
    lines.append(f"grid.min = {cfg.grid_min!r}")
    lines.append(f"grid.max = {cfg.grid_max!r}")
    lines.append(f"grid.count = {cfg.grid_count}")
    lines.append(f"fit.jmax = {cfg.fit_jmax}")
    lines.append(f"fit.kmax = {cfg.fit_kmax}")
    return "\n".join(lines) + "\n"
