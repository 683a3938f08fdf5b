"""Low-frequency structure of cutoff-resolvent matrix elements.

Matrix elements m(lam) = <R(lam) f, g> are sampled on rays into the origin
and fitted against the bases

    lam^{2j} (log lam)^k           (regular terms, k of either sign)
    lam^{2j} (log lam - a)^{-k}    (shifted-pole terms, k >= 1)

with the shift found by variable projection: linear least squares inside a
small Gauss-Newton iteration on the complex shift.  Rows are weighted by
1/|sample| so the fit controls relative error across the (potentially 1e12)
dynamic range, and columns are normalized to unit max before solving.

Closed-form predictions of the leading coefficients come from the threshold
report: the zero-eigenspace projection at lam^-2, the 1/r states at
lam^-2 (log lam - s_m)^-1, the bounded state (plus an exact quadrupole-tail
correction from the zero eigenspace) at log lam, and the log-growing state at
(log lam - a)^-1 with its geometric ladder in unshifted negative powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IllConditionedFitError, ShapeMismatchError, ValidationError
from .radial import RadialFunction, inner, with_trig
from .resolvent import mode_green
from .scatterer import Scatterer
from .specfun import SpectralPoint
from .threshold import ThresholdReport
from .util import parallel_map

CONDITION_LIMIT = 1e12


# ----------------------------------------------------------------------------
# sampling grids
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpansionGrid:
    points: tuple[SpectralPoint, ...]
    held_out: tuple[bool, ...]

    @property
    def train_idx(self):
        return [i for i, h in enumerate(self.held_out) if not h]

    @property
    def test_idx(self):
        return [i for i, h in enumerate(self.held_out) if h]


def expansion_grid(count: int = 24, modmin: float = 1e-6, modmax: float = 1e-2,
                   arg: float = math.pi / 4, extra_arg: float | None = math.pi / 3,
                   extra_count: int = 8) -> ExpansionGrid:
    """Log-spaced moduli on a main ray (every third point held out) plus a
    secondary ray for robustness across log-branch mistakes."""
    mods = np.exp(np.linspace(math.log(modmin), math.log(modmax), count))
    pts = [SpectralPoint(float(m), arg) for m in mods]
    held = [(i % 3 == 2) for i in range(count)]
    if extra_arg is not None and extra_count > 0:
        mods2 = np.exp(np.linspace(math.log(modmin), math.log(modmax), extra_count))
        pts += [SpectralPoint(float(m), extra_arg) for m in mods2]
        held += [False] * extra_count
    return ExpansionGrid(tuple(pts), tuple(held))


def sample_matrix_element(s: Scatterer, f: RadialFunction, g: RadialFunction,
                          pts) -> np.ndarray:
    """<R(lam) f, g> per spectral point (pole-guarded)."""
    if not f.same_channel(g):
        return np.zeros(len(pts), dtype=complex)

    def one(lam: SpectralPoint) -> complex:
        u = mode_green(s, lam, f.mode, f.grid).apply(f)
        return inner(u, g)

    return np.array(parallel_map(one, list(pts)))


# ----------------------------------------------------------------------------
# term bookkeeping
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class FitTerm:
    j: int            # power lam^{2j}
    k: int            # log power; pole terms use (log lam - shift)^{-k}, k >= 1
    pole: bool = False

    def label(self) -> str:
        parts = []
        if self.j != 0:
            parts.append(f"lam^{2*self.j}")
        if self.pole:
            parts.append(f"(log-a)^-{self.k}")
        elif self.k != 0:
            parts.append(f"log^{self.k}")
        return "*".join(parts) if parts else "1"

    def evaluate(self, pts, shift: complex | None) -> np.ndarray:
        vals = np.empty(len(pts), dtype=complex)
        for i, p in enumerate(pts):
            base = p.value ** (2 * self.j) if self.j != 0 else 1.0
            if self.pole:
                if shift is None:
                    raise ValidationError("pole term without a shift")
                vals[i] = base * (p.log - shift) ** (-self.k)
            else:
                vals[i] = base * p.log**self.k if self.k != 0 else base
        return vals


def resonant_terms(jmax: int, kmax: int) -> list[FitTerm]:
    """lam^{2j}(log)^k, 0 <= k <= min(2j+1, kmax); the zero-resonance shape."""
    return [FitTerm(j, k) for j in range(jmax + 1) for k in range(min(2 * j + 1, kmax) + 1)]


def nonresonant_terms(jmax: int, kmax: int) -> list[FitTerm]:
    """Regular k <= min(j, kmax) plus shifted poles k <= min(j+1, kmax+1)."""
    terms = [FitTerm(j, k) for j in range(jmax + 1) for k in range(min(j, kmax) + 1)]
    terms += [
        FitTerm(j, k, pole=True)
        for j in range(jmax + 1)
        for k in range(1, min(j + 1, kmax + 1) + 1)
    ]
    return terms


def general_terms(jmax: int, kmax: int, kneg: int = 0, lam_m2: bool = False,
                  lam_m2_pole: bool = False, pole_kmax: dict[int, int] | None = None,
                  full_k: bool = False) -> list[FitTerm]:
    """Free-form shape: optional lam^-2 (regular and single shifted pole),
    regular terms with negative log powers down to -kneg, and shifted poles
    per power given as pole_kmax = {j: max k}.  full_k lifts the k <= 2j+1
    shape cap, letting tests verify that coefficients outside the structural
    shape fit to ~0."""
    terms: list[FitTerm] = []
    if lam_m2:
        terms.append(FitTerm(-1, 0))
    if lam_m2_pole:
        terms.append(FitTerm(-1, 1, pole=True))
    for j in range(jmax + 1):
        kcap = kmax if full_k else min(2 * j + 1, kmax)
        for k in range(-kneg, kcap + 1):
            terms.append(FitTerm(j, k))
    for j, kc in (pole_kmax or {}).items():
        for k in range(1, kc + 1):
            terms.append(FitTerm(j, k, pole=True))
    return terms


# ----------------------------------------------------------------------------
# series container
# ----------------------------------------------------------------------------

@dataclass
class LogLaurentSeries:
    regular: dict[tuple[int, int], complex] = field(default_factory=dict)
    poles: dict[tuple[int, int], complex] = field(default_factory=dict)
    shift: complex | None = None

    def evaluate(self, pts) -> np.ndarray:
        out = np.zeros(len(pts), dtype=complex)
        for (j, k), c in self.regular.items():
            out += c * FitTerm(j, k).evaluate(pts, None)
        for (j, k), c in self.poles.items():
            out += c * FitTerm(j, k, pole=True).evaluate(pts, self.shift)
        return out

    def coefficient(self, term: FitTerm) -> complex:
        table = self.poles if term.pole else self.regular
        return table.get((term.j, term.k), 0.0)


@dataclass
class FitReport:
    series: LogLaurentSeries
    terms: list[FitTerm]
    shift_estimate: complex | None
    residual: float              # max relative error on held-out points
    conditioning: float
    predicted: dict[str, complex] = field(default_factory=dict)
    discrepancies: dict[str, float] = field(default_factory=dict)

    def coefficient(self, term: FitTerm) -> complex:
        return self.series.coefficient(term)

    def to_dict(self) -> dict:
        def c(z):
            return [complex(z).real, complex(z).imag]

        return {
            "terms": [
                {
                    "j": t.j, "k": t.k, "pole": t.pole, "label": t.label(),
                    "fitted": c(self.series.coefficient(t)),
                    "predicted": c(self.predicted[t.label()]) if t.label() in self.predicted else None,
                    "relError": self.discrepancies.get(t.label()),
                }
                for t in self.terms
            ],
            "shift": c(self.shift_estimate) if self.shift_estimate is not None else None,
            "residualHeldOut": self.residual,
            "conditioning": self.conditioning,
        }


# ----------------------------------------------------------------------------
# the fit
# ----------------------------------------------------------------------------

def _design(terms, pts, shift):
    return np.column_stack([t.evaluate(pts, shift) for t in terms])


def _weighted_lstsq(A, y, w):
    Aw = A * w[:, None]
    yw = y * w
    scale = np.max(np.abs(Aw), axis=0)
    scale[scale == 0] = 1.0
    As = Aw / scale[None, :]
    coef, *_ = np.linalg.lstsq(As, yw, rcond=None)
    resid = As @ coef - yw
    cond = np.linalg.cond(As)
    return coef / scale, float(np.linalg.norm(resid)), cond


def fit_log_laurent(samples: np.ndarray, grid: ExpansionGrid, terms: list[FitTerm],
                    shift0: complex | None = None, optimize_shift: bool = True,
                    max_iter: int = 40) -> FitReport:
    """Least-squares fit of the term set; Gauss-Newton on the pole shift."""
    samples = np.asarray(samples, dtype=complex)
    pts = list(grid.points)
    tr = grid.train_idx
    te = grid.test_idx
    if len(tr) < 2 * len(terms):
        raise ValidationError(
            f"{len(tr)} training samples for {len(terms)} terms; need at least 2x"
        )
    pts_tr = [pts[i] for i in tr]
    y_tr = samples[tr]
    w = 1.0 / np.maximum(np.abs(y_tr), 1e-14 * np.max(np.abs(y_tr)))

    has_pole = any(t.pole for t in terms)
    shift = shift0 if shift0 is not None else complex(SpectralPoint(1.0, 0.0).log)  # 0

    def solve(sh):
        A = _design(terms, pts_tr, sh)
        return _weighted_lstsq(A, y_tr, w)

    if has_pole and shift0 is None:
        raise ValidationError("pole terms need an initial shift (threshold a or gamma0)")

    coef, rnorm, cond = solve(shift)
    if has_pole and optimize_shift:
        x = np.array([shift.real, shift.imag])
        for _ in range(max_iter):
            def rvec(xv):
                A = _design(terms, pts_tr, complex(xv[0], xv[1]))
                Aw = A * w[:, None]
                scale = np.max(np.abs(Aw), axis=0)
                scale[scale == 0] = 1.0
                cf, *_ = np.linalg.lstsq(Aw / scale, y_tr * w, rcond=None)
                r = (Aw / scale) @ cf - y_tr * w
                return np.concatenate([r.real, r.imag])

            r0 = rvec(x)
            h = 1e-7 * (1.0 + np.abs(x))
            J = np.column_stack([
                (rvec(x + np.array([h[0], 0.0])) - r0) / h[0],
                (rvec(x + np.array([0.0, h[1]])) - r0) / h[1],
            ])
            step, *_ = np.linalg.lstsq(J, -r0, rcond=None)
            if not np.all(np.isfinite(step)):
                break
            # backtrack
            t = 1.0
            base = np.linalg.norm(r0)
            while t > 1e-4:
                if np.linalg.norm(rvec(x + t * step)) < base:
                    break
                t *= 0.5
            x = x + t * step
            if np.linalg.norm(t * step) < 1e-12 * (1.0 + np.linalg.norm(x)):
                break
        shift = complex(x[0], x[1])
        coef, rnorm, cond = solve(shift)

    if cond > CONDITION_LIMIT:
        raise IllConditionedFitError(cond)

    series = LogLaurentSeries(shift=shift if has_pole else None)
    for t, c in zip(terms, coef):
        if t.pole:
            series.poles[(t.j, t.k)] = complex(c)
        else:
            series.regular[(t.j, t.k)] = complex(c)

    if te:
        pts_te = [pts[i] for i in te]
        model = series.evaluate(pts_te)
        rel = np.abs(model - samples[te]) / np.maximum(np.abs(samples[te]), 1e-300)
        residual = float(np.max(rel))
    else:
        residual = float("nan")
    return FitReport(series, terms, shift if has_pole else None, residual, float(cond))


# ----------------------------------------------------------------------------
# closed-form predictions from threshold data
# ----------------------------------------------------------------------------

PREDICTION_PROVENANCE = {
    "lam^-2": "zero-eigenspace projection coefficient",
    "lam^-2*(log-a)^-1": "1/r-state pole ladder, resummed",
    "log^1": "bounded-state rank-one term plus quadrupole-tail correction",
    "(log-a)^-1": "log-state rank-one pole term",
    "log^-1": "unshifted ladder k = 1",
    "log^-2": "unshifted ladder k = 2 (= a x k=1)",
}


def predict_leading_terms(report: ThresholdReport, f: RadialFunction,
                          g: RadialFunction, want: list[str] | None = None) -> dict[str, complex]:
    """Leading expansion coefficients of <R(lam)f, g> from threshold data.

    Raises ShapeMismatchError if an explicitly requested term's hypothesis
    fails (e.g. the shifted-pole term while a bounded zero-energy state
    exists).
    """
    out: dict[str, complex] = {}

    # lam^-2: minus the zero-eigenspace projection
    val = 0.0 + 0.0j
    for l, e in report.eigen_modes:
        for trig in ("cos", "sin"):
            psi = with_trig(e, trig)
            if f.same_channel(psi):
                val += -inner(f, psi) * inner(psi, g)
    out["lam^-2"] = val

    # lam^-2 (log - s_m)^-1 for the 1/r states; the combined channel-filtered
    # value doubles as the prediction for a fitted lam^-2 pole term
    pole_total = 0.0 + 0.0j
    for m, (uw, sm) in enumerate(zip(report.Uw, report.s), start=1):
        coeff = inner(f, uw) * inner(uw, g) / math.pi
        out[f"lam^-2*(log-s{m})^-1"] = coeff
        pole_total += coeff
    if report.Uw:
        out["lam^-2*(log-a)^-1"] = pole_total

    # log lam: bounded state plus exact quadrupole-tail correction
    logc = 0.0 + 0.0j
    if report.U0 is not None and f.same_channel(report.U0):
        logc += -inner(f, report.U0) * inner(report.U0, g) / (2.0 * math.pi)
    for l, e in report.eigen_modes:
        if l != 2:
            continue
        d = e.exterior.v[-2]
        for trig in ("cos", "sin"):
            psi = with_trig(e, trig)
            if f.same_channel(psi):
                logc += -(math.pi / 4.0) * abs(d) ** 2 * inner(f, psi) * np.conj(inner(g, psi))
    out["log^1"] = logc

    # shifted pole at a (needs no bounded state and no 1/r state)
    no_resonance = not report.has_s_resonance and not report.has_p_resonance
    if report.Ulog is not None and no_resonance:
        base = inner(f, report.Ulog) * inner(report.Ulog, g) / (2.0 * math.pi)
        out["(log-a)^-1"] = base
        out["log^-1"] = base
        out["log^-2"] = report.a * base

    if want is not None:
        missing = [k for k in want if k not in out]
        if missing:
            raise ShapeMismatchError(
                f"terms {missing} not defined for this scatterer "
                f"(s-res={report.has_s_resonance}, p-res={report.has_p_resonance}, "
                f"eig={report.has_eigenvalue})"
            )
        out = {k: out[k] for k in want}
    return out


def attach_predictions(fit: FitReport, predictions: dict[str, complex]) -> FitReport:
    """Record predictions and relative discrepancies on a fit report."""
    fit.predicted = dict(predictions)
    for t in fit.terms:
        lab = t.label()
        if lab in predictions and predictions[lab] != 0:
            fitted = fit.series.coefficient(t)
            fit.discrepancies[lab] = float(
                abs(fitted - predictions[lab]) / abs(predictions[lab])
            )
    return fit
