"""Command-line surface: reproducible runs with manifests.

Every subcommand reads one config file, writes lossless CSV/JSON outputs into
--out, and records a manifest (command, config hash, tool version, grid
parameters, wall time, output list).  Outputs are bit-reproducible across
runs on the same config; the wall-time field is the only varying entry.

Exit codes: 0 success, 2 validation error, 3 numerical failure, 64 usage.
Errors are mirrored as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import LowfreqError, NumericalError, ValidationError
from .expansion import (attach_predictions, expansion_grid, fit_log_laurent,
                        general_terms, nonresonant_terms, predict_leading_terms,
                        resonant_terms, sample_matrix_element)
from .radial import RadialFunction, bump, bump_edges
from .resolvent import (one_sided_identity_residual, pairing_identity_residual,
                        two_parameter_identity_residual)
from .scatterer import (PiecewisePotential, ScattererConfig, parse_config,
                        standard_grid)
from .scattering import (find_pole_in_disk, imaginary_axis_poles,
                         phase_shift_sweep, sigma_asymptotic)
from .specfun import SpectralPoint
from .threshold import classify, report_to_dict
from .wave import WaveQuery, decay_fit, evolve

USAGE_EXIT = 64
VALIDATION_EXIT = 2
NUMERICAL_EXIT = 3

_COMMANDS = ("classify", "capacity", "expand", "phase", "resonance", "perturb", "wave", "verify")

_DEFAULT_EPSILONS = (-1e-2, -1e-3, 1e-3, 1e-2)
_DEFAULT_TIMES = tuple(float(t) for t in np.exp(np.linspace(math.log(1e2), math.log(1e6), 9)))


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


class _Run:
    """Gathers outputs and writes the manifest."""

    def __init__(self, command: str, cfg_text: str, cfg: ScattererConfig, outdir: Path):
        self.command = command
        self.cfg = cfg
        self.outdir = outdir
        self.outputs: list[str] = []
        self.t0 = time.monotonic()
        self.config_sha = hashlib.sha256(cfg_text.encode()).hexdigest()
        outdir.mkdir(parents=True, exist_ok=True)

    def write_csv(self, name: str, header: list[str], rows) -> None:
        path = self.outdir / name
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        self.outputs.append(name)

    def write_json(self, name: str, payload: dict) -> None:
        path = self.outdir / name
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self.outputs.append(name)

    def finish(self) -> None:
        manifest = {
            "command": self.command,
            "configSha256": self.config_sha,
            "toolVersion": __version__,
            "grid": {
                "argDeg": self.cfg.grid_arg_deg,
                "min": self.cfg.grid_min,
                "max": self.cfg.grid_max,
                "count": self.cfg.grid_count,
            },
            "fit": {"jmax": self.cfg.fit_jmax, "kmax": self.cfg.fit_kmax},
            "outputs": sorted(self.outputs),
            "wallTimeSeconds": time.monotonic() - self.t0,
        }
        (self.outdir / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


def canonical_source(cfg: ScattererConfig, grid, mode: int = 0) -> RadialFunction:
    """The documented default test function: a bump centered in the annulus
    between scatterer support (or obstacle boundary) and the cutoff start."""
    s = cfg.scatterer
    inner = s.inner_radius
    center = 0.5 * (inner + cfg.cutoff.r0)
    half = 0.8 * 0.5 * (cfg.cutoff.r0 - inner)
    return bump(grid, center, half, mode)


def _source_edges(cfg: ScattererConfig) -> list[float]:
    s = cfg.scatterer
    inner = s.inner_radius
    center = 0.5 * (inner + cfg.cutoff.r0)
    half = 0.8 * 0.5 * (cfg.cutoff.r0 - inner)
    return bump_edges(center, half)


def _lambda_grid(cfg: ScattererConfig):
    return expansion_grid(cfg.grid_count, cfg.grid_min, cfg.grid_max,
                          math.radians(cfg.grid_arg_deg))


def _tuned_mode(report) -> int:
    if report.dim_g1_mod_g2:
        return 1
    if report.eigen_modes:
        return report.eigen_modes[0][0]
    return 0


# ----------------------------------------------------------------------------
# command handlers
# ----------------------------------------------------------------------------

def _cmd_classify(run: _Run) -> None:
    cfg = run.cfg
    grid = standard_grid(cfg.scatterer, cfg.cutoff)
    report = classify(cfg.scatterer, cutoff=cfg.cutoff, grid=grid)
    run.write_json("classify.json", report_to_dict(report))


def _cmd_capacity(run: _Run) -> None:
    cfg = run.cfg
    report = classify(cfg.scatterer, cutoff=cfg.cutoff)
    if report.c0_ulog is None:
        raise ValidationError(
            "capacity/pole-shift undefined: scatterer has a bounded zero-energy state"
        )
    run.write_json("capacity.json", {
        "capacity": report.capacity,
        "a": [report.a.real, report.a.imag],
        "c0Ulog": [complex(report.c0_ulog).real, complex(report.c0_ulog).imag],
    })


def _cmd_expand(run: _Run) -> None:
    cfg = run.cfg
    grid = standard_grid(cfg.scatterer, cfg.cutoff, extra_edges=_source_edges(cfg))
    report = classify(cfg.scatterer, cutoff=cfg.cutoff, grid=grid)
    f = canonical_source(cfg, grid)
    eg = _lambda_grid(cfg)
    samples = sample_matrix_element(cfg.scatterer, f, f, eg.points)
    run.write_csv(
        "samples.csv", ["modulus", "arg", "re", "im"],
        [(p.modulus, p.arg, v.real, v.imag) for p, v in zip(eg.points, samples)],
    )
    if report.has_s_resonance and not report.has_p_resonance and not report.has_eigenvalue:
        terms = resonant_terms(cfg.fit_jmax, cfg.fit_kmax)
        fit = fit_log_laurent(samples, eg, terms, optimize_shift=False)
    elif not report.has_zero_resonance and not report.has_eigenvalue:
        terms = nonresonant_terms(cfg.fit_jmax, cfg.fit_kmax)
        fit = fit_log_laurent(samples, eg, terms, shift0=report.a)
    else:
        terms = general_terms(cfg.fit_jmax, cfg.fit_kmax, lam_m2=True,
                              lam_m2_pole=report.has_p_resonance,
                              pole_kmax={0: 2} if report.has_p_resonance else None)
        shift0 = report.s[0] if report.s else report.a
        fit = fit_log_laurent(samples, eg, terms, shift0=shift0,
                              optimize_shift=False)
    attach_predictions(fit, predict_leading_terms(report, f, f))
    run.write_json("fit.json", fit.to_dict())


def _cmd_phase(run: _Run) -> None:
    cfg = run.cfg
    report = classify(cfg.scatterer, cutoff=cfg.cutoff)
    lams = np.exp(np.linspace(math.log(cfg.grid_min), math.log(cfg.grid_max), cfg.grid_count))
    tables = phase_shift_sweep(cfg.scatterer, lams)
    rows = []
    for t in tables:
        try:
            sa = sigma_asymptotic(report, t.lam)
        except LowfreqError:
            sa = complex(float("nan"), float("nan"))
        rows.append((t.lam, t.sigma.real, t.sigma.imag, sa.real, sa.imag))
    run.write_csv("phase.csv", ["lambda", "sigma_re", "sigma_im", "sigma_asym_re", "sigma_asym_im"], rows)


def _cmd_resonance(run: _Run) -> None:
    cfg = run.cfg
    poles = []
    for mode in (0, 1, 2):
        pole = find_pole_in_disk(cfg.scatterer, mode, 0.45)
        if pole is not None:
            poles.append({
                "mode": mode, "kind": pole.kind,
                "re": pole.lam.value.real, "im": pole.lam.value.imag,
                "modulus": pole.lam.modulus, "arg": pole.lam.arg,
                "residual": pole.residual,
            })
        axis = imaginary_axis_poles(cfg.scatterer, mode)
        for p in axis:
            poles.append({
                "mode": mode, "kind": p.kind,
                "re": p.lam.value.real, "im": p.lam.value.imag,
                "modulus": p.lam.modulus, "arg": p.lam.arg,
                "residual": p.residual,
            })
    run.write_json("resonance.json", {"poles": poles})


def _cmd_perturb(run: _Run) -> None:
    cfg = run.cfg
    if not isinstance(cfg.scatterer, PiecewisePotential):
        raise ValidationError("perturb needs a potential scatterer")
    report = classify(cfg.scatterer, cutoff=cfg.cutoff)
    mode = _tuned_mode(report)
    rows = []
    poles = []
    for eps in _DEFAULT_EPSILONS:
        s_eps = cfg.scatterer.shifted(eps)
        if eps < 0:
            found = imaginary_axis_poles(s_eps, mode)
            pole = found[-1] if found else None
        else:
            pole = find_pole_in_disk(s_eps, mode, 0.3)
        if pole is not None:
            pole.epsilon = eps
            poles.append({
                "eps": eps, "mode": mode, "kind": pole.kind,
                "re": pole.lam.value.real, "im": pole.lam.value.imag,
            })
        lams = np.exp(np.linspace(math.log(cfg.grid_min), math.log(cfg.grid_max), cfg.grid_count))
        for t in phase_shift_sweep(s_eps, lams):
            rows.append((eps, t.lam, t.sigma.real, t.sigma.imag))
    run.write_csv("perturb.csv", ["eps", "lambda", "sigma_re", "sigma_im"], rows)
    run.write_json("perturb_poles.json", {"poles": poles})


def _cmd_wave(run: _Run) -> None:
    cfg = run.cfg
    grid = standard_grid(cfg.scatterer, cfg.cutoff, extra_edges=_source_edges(cfg))
    f = canonical_source(cfg, grid)
    s = cfg.scatterer
    x_obs = 0.0 if isinstance(s, PiecewisePotential) else 0.5 * (s.inner_radius + _source_edges(cfg)[0])
    q = WaveQuery(s, f, x_obs, _DEFAULT_TIMES)
    res = evolve(q)
    run.write_csv("wave.csv", ["t", "w_re", "w_im"],
                  [(t, w.real, w.imag) for t, w in zip(q.times, res.values)])
    law = decay_fit(list(zip(q.times, res.values)))
    run.write_json("decay.json", {
        "law": law.law, "coefficient": law.coefficient,
        "residual": law.residual, "residuals": law.residuals,
        "lamMax": res.lam_max,
    })


def _cmd_verify(run: _Run) -> None:
    cfg = run.cfg
    s = cfg.scatterer
    chi = cfg.cutoff
    gc, gh = chi.r_end + 0.7, 0.5
    grid = standard_grid(s, chi, rmax=chi.pairing_radius + 2.0,
                         extra_edges=_source_edges(cfg) + bump_edges(gc, gh))
    f = canonical_source(cfg, grid)
    gfun = bump(grid, gc, gh, 0)
    lam = SpectralPoint(0.01, math.pi / 4)
    z = SpectralPoint(0.02, math.pi / 2)
    lam_b = SpectralPoint(0.4, math.pi / 2)
    outer = bump(grid, chi.pairing_radius + 0.9, 0.5, 0)
    rows = [
        ("two-parameter", lam.modulus, lam.arg, z.modulus, z.arg,
         two_parameter_identity_residual(s, lam, z, chi, f)),
        ("one-sided", lam.modulus, lam.arg, float("nan"), float("nan"),
         one_sided_identity_residual(s, lam, chi, gfun)),
        ("boundary-pairing", lam_b.modulus, lam_b.arg, float("nan"), float("nan"),
         pairing_identity_residual(s, lam_b, outer, chi.pairing_radius)),
    ]
    out = [(name, lm, la, zm, za, r, "pass" if r < 1e-6 else "fail")
           for (name, lm, la, zm, za, r) in rows]
    run.write_csv("verify.csv",
                  ["identity", "lambda_mod", "lambda_arg", "z_mod", "z_arg", "residual", "status"],
                  out)
    if any(r[5] == "fail" for r in out):
        raise NumericalError("identity suite produced residuals above 1e-6")


_HANDLERS = {
    "classify": _cmd_classify,
    "capacity": _cmd_capacity,
    "expand": _cmd_expand,
    "phase": _cmd_phase,
    "resonance": _cmd_resonance,
    "perturb": _cmd_perturb,
    "wave": _cmd_wave,
    "verify": _cmd_verify,
}


def dispatch(argv) -> int:
    parser = _Parser(prog="lowfreq2d", description=__doc__)
    parser.add_argument("command", choices=_COMMANDS)
    parser.add_argument("--config", required=True, help="path to a scatterer config file")
    parser.add_argument("--out", required=True, help="output directory")
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(parser.format_usage(), file=sys.stderr)
        print(json.dumps({"error": "usage", "message": str(e)}), file=sys.stderr)
        return USAGE_EXIT

    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as e:
        print(json.dumps({"error": "ValidationError", "message": str(e)}), file=sys.stderr)
        return VALIDATION_EXIT

    try:
        cfg = parse_config(text)
        run = _Run(args.command, text, cfg, Path(args.out))
        _HANDLERS[args.command](run)
        run.finish()
        return 0
    except ValidationError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return VALIDATION_EXIT
    except NumericalError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return NUMERICAL_EXIT


def main(argv=None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
