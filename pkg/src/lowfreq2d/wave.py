"""Long-time wave evolution through the spectral representation.

The solution of  w_tt + P w = 0,  w(0) = 0,  w_t(0) = f  is

    w(x, t) = (2/pi) integral_0^inf sin(lam t) Im[R(lam + i0) f](x) dlam,

with the imaginary part of the outgoing resolvent sampled once on a composite
panel grid (geometric toward lam = 0, where the integrand varies in log lam,
then uniform until the tail is negligible).  Each panel carries a Legendre
expansion of the integrand, and the oscillatory factor is integrated exactly
against Legendre polynomials via spherical Bessel moments

    integral_{-1}^{1} P_n(x) e^{i w x} dx = 2 i^n j_n(w),

so one set of samples serves every requested time, from t = 0 to 1e6, with
no stationary-phase bookkeeping.

Scatterers with discrete spectrum are refused: a bound state would add an
oscillatory term the spectral integral over the continuum misses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundStateRefusal, ValidationError
from .quadrature import PanelGrid
from .radial import RadialFunction
from .resolvent import mode_green
from .scatterer import Scatterer
from .scattering import imaginary_axis_poles
from .specfun import SpectralPoint
from .util import parallel_map

LAM_FLOOR = 1e-9
LAM_GEOMETRIC_TOP = 0.5
LAM_CAP = 60.0
TAIL_REL = 1e-12


def spherical_jn_all(nmax: int, w: float) -> np.ndarray:
    """j_0..j_nmax at w >= 0; downward recurrence below the oscillatory regime."""
    out = np.zeros(nmax + 1)
    if w == 0.0:
        out[0] = 1.0
        return out
    if w > nmax + 12:
        out[0] = math.sin(w) / w
        if nmax >= 1:
            out[1] = out[0] / w - math.cos(w) / w
        for n in range(1, nmax):
            out[n + 1] = (2 * n + 1) / w * out[n] - out[n - 1]
        return out
    # Miller's downward recurrence j_{n-1} = (2n+1)/w j_n - j_{n+1}, normalized by j0
    N = nmax + 20 + int(w)
    jp = 0.0          # j_{n+1}
    jc = 1e-300       # j_n
    tail = np.zeros(nmax + 1)
    for n in range(N, 0, -1):
        jm = (2 * n + 1) / w * jc - jp
        jp, jc = jc, jm
        if n - 1 <= nmax:
            tail[n - 1] = jc
        if abs(jc) > 1e250:
            jp *= 1e-250
            jc *= 1e-250
            tail *= 1e-250
    j0 = math.sin(w) / w
    return tail * (j0 / jc)


@dataclass
class OscillatoryPanels:
    """Legendre data of a sampled integrand, ready to hit against sin(t lam)."""

    edges: np.ndarray
    coeffs: np.ndarray        # (npanels, n) complex Legendre coefficients

    def sin_integral(self, t: float) -> float:
        """integral G(lam) sin(t lam) dlam over the covered range."""
        half = 0.5 * np.diff(self.edges)
        mid = 0.5 * (self.edges[:-1] + self.edges[1:])
        n = self.coeffs.shape[1]
        total = 0.0 + 0.0j
        for p in range(len(half)):
            w = t * half[p]
            jn = spherical_jn_all(n - 1, w)
            inner = sum(self.coeffs[p, k] * (1j**k) * 2.0 * jn[k] for k in range(n))
            total += half[p] * np.exp(1j * t * mid[p]) * inner
        return float(np.imag(total))

    def endpoint_derivatives(self, m: int = 3) -> list[float]:
        """G, G', ..., G^(m) at the top edge, from the last panel's expansion."""
        from numpy.polynomial import legendre as L
        h = 0.5 * (self.edges[-1] - self.edges[-2])
        c = self.coeffs[-1]
        out = []
        for k in range(m + 1):
            out.append(float(np.real(L.legval(1.0, c))) / h**k)
            c = L.legder(c)
        return out

    def tail_completion(self, t: float) -> float:
        """integral over (top, inf) of G sin(t lam), by endpoint asymptotics.

        Repeated integration by parts gives
            G cos(tL)/t - G' sin(tL)/t^2 - G'' cos(tL)/t^3 + G''' sin(tL)/t^4
        with remainder O(G''''/t^5 scale), assuming G keeps decaying beyond
        the sampled range.
        """
        L = float(self.edges[-1])
        g0, g1, g2, g3 = self.endpoint_derivatives(3)
        c, s = math.cos(t * L), math.sin(t * L)
        return g0 * c / t - g1 * s / t**2 - g2 * c / t**3 + g3 * s / t**4


@dataclass
class WaveQuery:
    scatterer: Scatterer
    f: RadialFunction             # mode-0 smooth compactly supported initial velocity
    x: float                      # observation radius
    times: tuple[float, ...]

    def __post_init__(self):
        if self.f.mode != 0:
            raise ValidationError("initial data must be a mode-0 radial function")
        if any(t < 0 for t in self.times):
            raise ValidationError("times must be nonnegative")


@dataclass
class WaveResult:
    query: WaveQuery
    values: list[complex]
    lam_max: float
    npanels: int
    panels: OscillatoryPanels = field(repr=False, default=None)


class _PointResolvent:
    """Im[R(lam+i0) f](x) evaluated cheaply for x below the source support.

    There u(x) = -phi(x) * integral(psi f r dr) / W, with the quadrature
    restricted to the panels carrying f, and W read off the outgoing
    decomposition of the regular solution (the exterior (J, H1) basis has
    constant mode Wronskian 2i/pi).
    """

    def __init__(self, s: Scatterer, f: RadialFunction, x: float):
        from .radialsolve import outgoing_solution, regular_solution
        self._outgoing = outgoing_solution
        self._regular = regular_solution
        self.s = s
        self.x = float(x)
        g = f.grid
        nz = np.abs(f.values) > 0
        panel_has = nz.reshape(g.npanels, g.n).any(axis=1)
        lo_edge = g.edges[:-1][panel_has].min()
        if not self.x < lo_edge:
            raise ValidationError("fast path needs the observation radius below the source support")
        keep = np.repeat(panel_has, g.n)
        self.nodes = g.nodes[keep]
        self.wf = g.weights[keep] * f.values[keep] * self.nodes
        self.rmax = g.rmax

    def __call__(self, lam: SpectralPoint) -> float:
        phi = self._regular(self.s, 0, lam, self.rmax)
        psi = self._outgoing(self.s, 0, lam, self.rmax)
        W = phi.coeffs[-1][0] * (2j / math.pi)
        psi_v, _ = psi.eval(self.nodes)
        integral = np.sum(psi_v * self.wf)
        if self.x == 0.0:
            phi_x = phi.coeffs[0][0]     # regular member is 1 at the origin (mode 0)
        else:
            phi_x = phi.at(self.x)[0]
        return float((-phi_x * integral / W).imag)


def _integrand_callable(s: Scatterer, f: RadialFunction, x: float):
    try:
        return _PointResolvent(s, f, x)
    except ValidationError:
        def slow(lam: SpectralPoint) -> float:
            u = mode_green(s, lam, 0, f.grid).apply(f)
            return float(u.value_at(x).imag)
        return slow


def evolve(q: WaveQuery, nodes_per_panel: int = 16) -> WaveResult:
    """w(x, t) for each requested time; one resolvent sweep serves all times."""
    poles = imaginary_axis_poles(q.scatterer, 0, 1e-3, 2.0)
    if poles:
        ks = [p.lam.modulus for p in poles]
        raise BoundStateRefusal(
            f"scatterer has bound states (kappa ~ {ks}); the continuum integral "
            "does not represent the evolution"
        )
    G = _integrand_callable(q.scatterer, q.f, q.x)

    def sample_chunk(edges: np.ndarray):
        panel = PanelGrid(edges, nodes_per_panel)
        vals = np.array(parallel_map(
            lambda m: G(SpectralPoint(float(m), 0.0)), [float(v) for v in panel.nodes]
        ))
        return panel, vals

    # base chunk: geometric into the origin, uniform through moderate lam
    base = [LAM_FLOOR]
    while base[-1] * 2.0 < LAM_GEOMETRIC_TOP:
        base.append(base[-1] * 2.0)
    base.append(LAM_GEOMETRIC_TOP)
    lam = LAM_GEOMETRIC_TOP
    while lam < 12.0:
        lam = min(lam + 0.25, 12.0)
        base.append(lam)
    all_edges = np.array(base)
    panel, vals = sample_chunk(all_edges)
    coeff_rows = [panel._coeffs(vals)]
    gmax = float(np.max(np.abs(vals)))
    tmin = min((t for t in q.times if t > 0), default=1.0)
    # the tail beyond the sampled range is completed by endpoint asymptotics
    # with remainder ~ |G(top)| (sigma/t)^4, sigma the source support radius
    nz = np.abs(q.f.values) > 0
    sigma = max(float(q.f.grid.nodes[nz][-1]) if nz.any() else 1.0, 1.0)

    def tail_ok(tail_mag: float) -> bool:
        return tail_mag * min(1.0, (sigma / tmin) ** 4) < TAIL_REL * gmax

    tail = float(np.max(np.abs(vals[panel.nodes > all_edges[-1] - 2.0])))
    while not tail_ok(tail) and all_edges[-1] < LAM_CAP:
        top = all_edges[-1]
        new_top = min(top + 8.0, LAM_CAP)
        chunk_edges = np.arange(top, new_top + 1e-9, 0.25)
        cpanel, cvals = sample_chunk(chunk_edges)
        coeff_rows.append(cpanel._coeffs(cvals))
        all_edges = np.concatenate([all_edges, chunk_edges[1:]])
        gmax = max(gmax, float(np.max(np.abs(cvals))))
        tail = float(np.max(np.abs(cvals[cpanel.nodes > new_top - 2.0])))
    osc = OscillatoryPanels(all_edges, np.vstack(coeff_rows))
    values = [
        complex((2.0 / math.pi) * (osc.sin_integral(float(t)) + osc.tail_completion(float(t))))
        if t > 0 else 0.0j
        for t in q.times
    ]
    return WaveResult(q, values, float(all_edges[-1]), len(all_edges) - 1, osc)


# ----------------------------------------------------------------------------
# decay-law fitting
# ----------------------------------------------------------------------------

@dataclass
class DecayReport:
    law: str                   # "t^-1" | "t^-1 (log t)^-2" | "inconclusive"
    coefficient: float
    residual: float
    residuals: dict[str, float]


def decay_fit(samples) -> DecayReport:
    """Pick between 1/t and 1/(t log^2 t) decay on (t, w) pairs.

    Both models have fixed slope; only the prefactor is fitted, and the law
    with the smaller rms misfit of log|w| wins.  Needs >= 6 times spanning at
    least two decades.
    """
    ts = np.array([float(t) for t, _ in samples])
    ws = np.array([complex(w) for _, w in samples])
    if len(ts) < 6 or np.max(ts) / np.min(ts) < 99.0:
        raise ValidationError("need >= 6 times spanning >= 2 decades")
    logw = np.log(np.abs(ws))
    models = {
        "t^-1": -np.log(ts),
        "t^-1 (log t)^-2": -np.log(ts) - 2.0 * np.log(np.log(ts)),
    }
    fits = {}
    for name, base in models.items():
        c = float(np.mean(logw - base))
        resid = float(np.sqrt(np.mean((logw - base - c) ** 2)))
        fits[name] = (c, resid)
    name = min(fits, key=lambda k: fits[k][1])
    c, resid = fits[name]
    residuals = {k: v[1] for k, v in fits.items()}
    if all(v > 0.1 for v in residuals.values()):
        return DecayReport("inconclusive", math.exp(c), resid, residuals)
    sign = 1.0 if np.median(np.real(ws * ts)) >= 0 else -1.0
    return DecayReport(name, sign * math.exp(c), resid, residuals)
