"""Piecewise-exact solutions of the radial mode equation.

For one angular mode l the equation  u'' + u'/r - l^2 u / r^2 + (lam^2 - V) u = 0
with piecewise-constant V has explicit solutions on every segment:
Bessel pairs J_l(eta r), Y_l(eta r) with eta^2 = lam^2 - V_j, or the harmonic
pair (r^l, r^-l) / (1, log r) when eta vanishes.  Solutions are represented as
per-segment coefficient pairs glued by 2x2 matching at the breakpoints, so
there is no ODE time-stepping anywhere and evaluations are accurate to the
special-function level.

Only the outgoing exterior solution H^(1)_l(lam r) carries log(lam); interior
pieces depend on lam^2 alone, which is what makes continuation of everything
downstream to the Riemann surface of log(lam) automatic.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .scatterer import PiecewisePotential, Scatterer
from .specfun import SpectralPoint, hankel1_with_deriv, jy_with_derivs


@dataclass
class Segment:
    a: float
    b: float
    l: int
    kind: str                 # "power" | "bessel" | "hankel"
    eta: complex = 0.0 + 0.0j
    logeta: complex = 0.0 + 0.0j

    def pair(self, r: np.ndarray):
        """(b1, b2, b1', b2') at radii r."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        l = self.l
        if self.kind == "power":
            if l == 0:
                one = np.ones(len(r), dtype=complex)
                return one, np.log(r) + 0j, np.zeros(len(r), dtype=complex), 1.0 / r + 0j
            return (
                r**l + 0j, r ** (-l) + 0j,
                l * r ** (l - 1) + 0j, -l * r ** (-l - 1) + 0j,
            )
        z = self.eta * r
        logz = self.logeta + np.log(r)
        if self.kind == "hankel":
            # (J, H1): J is tame at small |z| where H1, H2 are nearly parallel,
            # H1 is tame at large Im z where J, Y blow up together, so the
            # matching determinant never suffers cancellation on the unbounded
            # exterior segment.
            J, _, Jd, _ = jy_with_derivs(l, z, logz)
            H, Hd = hankel1_with_deriv(l, z, logz)
            return J, H, self.eta * Jd, self.eta * Hd
        J, Y, Jd, Yd = jy_with_derivs(l, z, logz)
        return J, Y, self.eta * Jd, self.eta * Yd

    def regular_pair(self, r: np.ndarray):
        """The member regular at r = 0 (J_l or r^l) and its derivative."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        l = self.l
        if self.kind == "power":
            if l == 0:
                return np.ones(len(r), dtype=complex), np.zeros(len(r), dtype=complex)
            return r**l + 0j, l * r ** (l - 1) + 0j
        z = self.eta * r
        logz = self.logeta + np.log(r)
        J, _, Jd, _ = jy_with_derivs(l, z, logz)
        return J, self.eta * Jd


def _eta_segment(a: float, b: float, l: int, lam2: complex, V: complex) -> Segment:
    eta2 = lam2 - V
    if eta2 == 0:
        return Segment(a, b, l, "power")
    eta = cmath.sqrt(eta2)
    return Segment(a, b, l, "bessel", eta, cmath.log(eta))


def make_segments(s: Scatterer, l: int, lam: SpectralPoint | None, rmax: float) -> list[Segment]:
    """Segments covering [inner_radius, rmax]; lam=None means zero energy.

    The exterior (V = 0) segment at nonzero energy uses the (H1, H2) basis on
    the log cover of lam itself, so only that segment carries log(lam).
    """
    segs: list[Segment] = []
    if lam is None:
        ext = Segment(0.0, 0.0, l, "power")
        lam2 = 0.0 + 0.0j
    else:
        ext = Segment(0.0, 0.0, l, "hankel", lam.value, lam.log)
        lam2 = lam.value ** 2
    if isinstance(s, PiecewisePotential):
        edges = s.segment_edges()
        for j, (a, b) in enumerate(zip(edges, edges[1:])):
            segs.append(_eta_segment(a, b, l, lam2, complex(s.values[j])))
        segs.append(Segment(edges[-1], rmax, l, ext.kind, ext.eta, ext.logeta))
    else:
        segs.append(Segment(s.inner_radius, rmax, l, ext.kind, ext.eta, ext.logeta))
    return segs


@dataclass
class PiecewiseSolution:
    segments: list[Segment]
    coeffs: list[tuple[complex, complex]]

    def at(self, r: float) -> tuple[complex, complex]:
        u, du = self.eval(np.array([r]))
        return complex(u[0]), complex(du[0])

    def eval(self, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        r = np.asarray(r, dtype=float)
        u = np.empty(len(r), dtype=complex)
        du = np.empty(len(r), dtype=complex)
        done = np.zeros(len(r), dtype=bool)
        for seg, (c1, c2) in zip(self.segments, self.coeffs):
            last = seg is self.segments[-1]
            mask = (~done) & (r >= seg.a - 1e-14) & ((r <= seg.b + 1e-14) if not last else True)
            if not mask.any():
                continue
            b1, b2, b1p, b2p = seg.pair(r[mask])
            u[mask] = c1 * b1 + c2 * b2
            du[mask] = c1 * b1p + c2 * b2p
            done |= mask
        if not done.all():
            raise ValueError("radii outside the segment cover")
        return u, du


def _solve_2x2(seg: Segment, r: float, u: complex, du: complex) -> tuple[complex, complex]:
    b1, b2, b1p, b2p = (x[0] for x in seg.pair(np.array([r])))
    det = b1 * b2p - b1p * b2
    return ( (u * b2p - du * b2) / det, (du * b1 - u * b1p) / det )


def march_outward(segments: list[Segment], c_first: tuple[complex, complex]) -> PiecewiseSolution:
    coeffs = [c_first]
    for prev, seg in zip(segments, segments[1:]):
        r = prev.b
        b1, b2, b1p, b2p = (x[0] for x in prev.pair(np.array([r])))
        c1, c2 = coeffs[-1]
        u, du = c1 * b1 + c2 * b2, c1 * b1p + c2 * b2p
        coeffs.append(_solve_2x2(seg, r, u, du))
    return PiecewiseSolution(segments, coeffs)


def march_inward(segments: list[Segment], c_last: tuple[complex, complex]) -> PiecewiseSolution:
    coeffs = [c_last]
    for nxt, seg in zip(segments[::-1], segments[-2::-1]):
        r = seg.b
        b1, b2, b1p, b2p = (x[0] for x in nxt.pair(np.array([r])))
        c1, c2 = coeffs[0]
        u, du = c1 * b1 + c2 * b2, c1 * b1p + c2 * b2p
        coeffs.insert(0, _solve_2x2(seg, r, u, du))
    return PiecewiseSolution(segments, coeffs)


# ----------------------------------------------------------------------------
# the two distinguished solutions of the resolvent construction
# ----------------------------------------------------------------------------

def regular_solution(s: Scatterer, l: int, lam: SpectralPoint | None, rmax: float) -> PiecewiseSolution:
    """Regular at r = 0 (potential) or satisfying the boundary condition (obstacle)."""
    segs = make_segments(s, l, lam, rmax)
    if isinstance(s, PiecewisePotential):
        return march_outward(segs, (1.0 + 0.0j, 0.0j))
    a0 = s.radius
    u, du = (0.0 + 0.0j, 1.0 + 0.0j) if s.bc == "dirichlet" else (1.0 + 0.0j, 0.0j)
    return PiecewiseSolution(segs, [_solve_2x2(segs[0], a0, u, du)])


def outgoing_solution(s: Scatterer, l: int, lam: SpectralPoint, rmax: float) -> PiecewiseSolution:
    """Matches H^(1)_l(lam r) outside the support, continued inward."""
    segs = make_segments(s, l, lam, rmax)
    return march_inward(segs, (0.0j, 1.0 + 0.0j))


def wronskian(phi: PiecewiseSolution, psi: PiecewiseSolution, r: float) -> complex:
    """r (phi psi' - phi' psi); constant in r for a common mode equation."""
    u1, du1 = phi.at(r)
    u2, du2 = psi.at(r)
    return r * (u1 * du2 - du1 * u2)
