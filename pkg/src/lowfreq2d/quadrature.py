"""Composite Gauss-Legendre panels with spectral partial integrals.

A PanelGrid is a partition of [a, b] into panels with n Gauss-Legendre nodes
each.  Values sampled on the nodes can be integrated, integrated cumulatively
(the key primitive for variation-of-parameters Green functions), evaluated or
differentiated anywhere on the covered interval by way of the per-panel
Legendre expansion.  Everything is exact for piecewise polynomials of degree
< n and spectrally accurate for piecewise-analytic data, which is why panel
edges are always aligned with potential breakpoints and cutoff transitions.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as L


@lru_cache(maxsize=None)
def _reference(n: int):
    """GL nodes/weights on [-1, 1] plus the value->Legendre-coefficient map."""
    x, w = L.leggauss(n)
    # c_k = (2k+1)/2 * sum_i w_i P_k(x_i) v_i  (exact for polynomial v, deg < n)
    V = L.legvander(x, n - 1)              # V[i, k] = P_k(x_i)
    to_coeff = ((2 * np.arange(n) + 1) / 2.0)[:, None] * (V.T * w[None, :])
    return x, w, to_coeff


def _antiderivative_coeffs(c: np.ndarray) -> np.ndarray:
    """Coefficients of x -> integral_{-1}^{x} p, for p given in Legendre coeffs."""
    n = len(c)
    a = np.zeros(n + 1, dtype=complex)
    a[0] += c[0]
    a[1] += c[0]
    for k in range(1, n):
        a[k + 1] += c[k] / (2 * k + 1)
        a[k - 1] -= c[k] / (2 * k + 1)
    return a


class PanelGrid:
    """Gauss-Legendre panels on [edges[0], edges[-1]]."""

    def __init__(self, edges, nodes_per_panel: int = 32):
        edges = np.asarray(edges, dtype=float)
        if edges.ndim != 1 or len(edges) < 2 or not np.all(np.diff(edges) > 0):
            raise ValueError("panel edges must be strictly increasing, >= 2 entries")
        self.edges = edges
        self.n = int(nodes_per_panel)
        x, w, to_coeff = _reference(self.n)
        self._x, self._w, self._to_coeff = x, w, to_coeff
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        self.npanels = len(half)
        self.nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        self.weights = (half[:, None] * w[None, :]).ravel()
        self._half = half
        self._mid = mid

    # -- basic statistics ----------------------------------------------------

    @property
    def rmin(self) -> float:
        return float(self.edges[0])

    @property
    def rmax(self) -> float:
        return float(self.edges[-1])

    def __len__(self) -> int:
        return len(self.nodes)

    def same(self, other: "PanelGrid") -> bool:
        return self is other or (
            self.n == other.n
            and len(self.edges) == len(other.edges)
            and np.array_equal(self.edges, other.edges)
        )

    def refined(self, factor: int = 2) -> "PanelGrid":
        return PanelGrid(self.edges, self.n * factor)

    def with_edges(self, extra_edges) -> "PanelGrid":
        merged = np.unique(np.concatenate([self.edges, np.asarray(extra_edges, float)]))
        return PanelGrid(merged, self.n)

    # -- integration ----------------------------------------------------------

    def integrate(self, vals: np.ndarray) -> complex:
        return complex(np.sum(np.asarray(vals) * self.weights))

    def _coeffs(self, vals: np.ndarray) -> np.ndarray:
        """Per-panel Legendre coefficients, shape (npanels, n)."""
        v = np.asarray(vals, dtype=complex).reshape(self.npanels, self.n)
        return v @ self._to_coeff.T

    def cumulative(self, vals: np.ndarray) -> np.ndarray:
        """integral from rmin to each node, same shape as vals."""
        v = np.asarray(vals, dtype=complex).reshape(self.npanels, self.n)
        panel_totals = v @ self._w * self._half
        prefix = np.concatenate([[0.0], np.cumsum(panel_totals)[:-1]])
        c = self._coeffs(vals)
        out = np.empty_like(v)
        for p in range(self.npanels):
            a = _antiderivative_coeffs(c[p])
            out[p] = prefix[p] + self._half[p] * L.legval(self._x, a)
        return out.ravel()

    def derivative(self, vals: np.ndarray) -> np.ndarray:
        """d/dr of the sampled function at the nodes (per-panel spectral)."""
        c = self._coeffs(vals)
        out = np.empty((self.npanels, self.n), dtype=complex)
        for p in range(self.npanels):
            out[p] = L.legval(self._x, L.legder(c[p])) / self._half[p]
        return out.ravel()

    # -- pointwise evaluation --------------------------------------------------

    def _locate(self, r: float) -> tuple[int, float]:
        if not (self.rmin - 1e-12 <= r <= self.rmax + 1e-12):
            raise ValueError(f"r={r} outside grid [{self.rmin}, {self.rmax}]")
        p = int(np.searchsorted(self.edges, r, side="right") - 1)
        p = min(max(p, 0), self.npanels - 1)
        x = (r - self._mid[p]) / self._half[p]
        return p, float(np.clip(x, -1.0, 1.0))

    def eval_at(self, vals: np.ndarray, r: float) -> complex:
        p, x = self._locate(r)
        c = self._coeffs(vals)
        return complex(L.legval(x, c[p]))

    def eval_deriv_at(self, vals: np.ndarray, r: float) -> complex:
        p, x = self._locate(r)
        c = self._coeffs(vals)
        return complex(L.legval(x, L.legder(c[p])) / self._half[p])

    def eval_many(self, vals: np.ndarray, rs) -> np.ndarray:
        c = self._coeffs(vals)
        out = np.empty(len(rs), dtype=complex)
        for i, r in enumerate(rs):
            p, x = self._locate(float(r))
            out[i] = L.legval(x, c[p])
        return out


def geometric_edges(a: float, b: float, ratio: float = 2.0) -> np.ndarray:
    """Edges from a to b growing geometrically (a > 0)."""
    if not (0 < a < b):
        raise ValueError("need 0 < a < b")
    edges = [a]
    while edges[-1] * ratio < b:
        edges.append(edges[-1] * ratio)
    edges.append(b)
    return np.array(edges)


def graded_inner_edges(r_first: float, nsub: int = 8, ratio: float = 5.0) -> np.ndarray:
    """Edges grading [0, r_first] toward 0 (mild log singularities at the origin)."""
    pts = [r_first]
    for _ in range(nsub - 1):
        pts.append(pts[-1] / ratio)
    pts.append(0.0)
    return np.array(sorted(pts))
