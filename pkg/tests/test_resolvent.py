"""Free kernel, per-mode resolvent application, pairings, operator identities."""

import math

import numpy as np
import pytest

from lowfreq2d import (FreeCoeffKernel, SpectralPoint, apply_resolvent_mode,
                       boundary_pairing, bump, bump_edges, free_kernel, free_scatterer,
                       hankel0, inner, mode_green, one_sided_identity_residual,
                       pairing_identity_residual, standard_grid,
                       two_parameter_identity_residual)
from lowfreq2d.errors import AtPoleError, DomainError
from lowfreq2d.radial import Exterior, from_callable
from lowfreq2d.resolvent import free_truncation_error

from oracles import circle_pairing


def test_kernel_symmetry():
    lam = SpectralPoint(0.3, 0.7)
    rng = np.random.default_rng(3)
    for _ in range(8):
        x = (float(rng.uniform(0.1, 3.0)), float(rng.uniform(0, 2 * math.pi)))
        y = (float(rng.uniform(0.1, 3.0)), float(rng.uniform(0, 2 * math.pi)))
        if abs(x[0] - y[0]) < 1e-3:
            continue
        a = free_kernel(lam, x, y)
        b = free_kernel(lam, y, x)
        assert abs(a - b) < 1e-14 * max(1.0, abs(a))


def test_kernel_diagonal_rejected():
    with pytest.raises(DomainError):
        free_kernel(SpectralPoint(1.0, 0.0), (1.0, 0.3), (1.0, 0.3))


def test_kernel_decay_on_upper_axis():
    lam = SpectralPoint(1.0, math.pi / 2)         # lam = i
    k10 = free_kernel(lam, (10.0, 0.0), (0.0, 0.0))
    k20 = free_kernel(lam, (20.0, 0.0), (0.0, 0.0))
    # |H0(i d)| ~ sqrt(2/(pi d)) e^{-d}: the ratio carries e^{-10} sqrt(1/2)
    ratio = abs(k20 / k10)
    assert abs(ratio * math.sqrt(2.0) / math.exp(-10.0) - 1.0) < 0.1


def test_kernel_coefficient_extraction():
    x, y = (0.7, 0.4), (1.3, 2.0)
    r00 = FreeCoeffKernel(0, 0).evaluate(x, y)
    assert FreeCoeffKernel(0, 1).evaluate(x, y) == -1.0 / (2.0 * math.pi)
    vals = []
    for mod in (1e-3, 1e-4, 1e-5):
        lam = SpectralPoint(mod, 0.0)
        vals.append(free_kernel(lam, x, y) - (0.25j) * (2j / math.pi) * lam.log)
    assert abs(vals[-1] - r00) < 1e-8
    assert abs(vals[-1] - r00) < abs(vals[0] - r00)


def test_expansion_order_halving():
    # separations of a few units keep the lam^4 log lam term well above the
    # double-precision floor of the O(1) kernels through n = 15
    pairs = [((2.0, 0.0), (8.5, 2.0)), ((3.0, 1.0), (7.0, -0.5)), ((6.0, 3.0), (4.0, 0.3))]
    errs = []
    for n in range(8, 16):
        lam = SpectralPoint(2.0**-n, math.pi / 4)
        errs.append(free_truncation_error(lam, pairs))
    ratios = [errs[i] / errs[i + 1] for i in range(7)]
    assert all(8.0 <= r <= 40.0 for r in ratios), ratios


@pytest.fixture(scope="module")
def free_setup():
    s = free_scatterer()
    from lowfreq2d import default_cutoff
    chi = default_cutoff(s)
    grid = standard_grid(s, chi, extra_edges=bump_edges(1.0, 0.35))
    return s, chi, grid


def test_free_apply_matches_kernel_quadrature(free_setup):
    s, chi, grid = free_setup
    lam = SpectralPoint(0.37, math.pi / 4)
    f = bump(grid, 1.0, 0.35, 0)
    u = apply_resolvent_mode(s, lam, 0, f)
    # oracle: direct angular quadrature of the kernel against f
    for robs in (0.4, 1.9, 3.2):
        th = np.linspace(0, 2 * math.pi, 481)[:-1]
        acc = np.zeros(len(grid.nodes), dtype=complex)
        for i, ry in enumerate(grid.nodes):
            if abs(f.values[i]) == 0.0:
                continue
            d = np.sqrt(robs**2 + ry**2 - 2 * robs * ry * np.cos(th))
            ker = np.array([0.25j * hankel0(lam.scale(float(dd))) for dd in d])
            acc[i] = f.values[i] * np.mean(ker) * 2 * math.pi
        oracle = grid.integrate(acc * grid.nodes)
        assert abs(u.value_at(robs) - oracle) < 1e-7 * abs(oracle)


def test_selfadjoint_symmetry(generic_well_fx):
    fx = generic_well_fx
    lam = SpectralPoint(0.5, math.pi / 2)
    f = bump(fx.grid, 0.8, 0.25, 0)
    g = bump(fx.grid, 1.6, 0.3, 0)
    green = mode_green(fx.scatterer, lam, 0, fx.grid)
    a = inner(green.apply(f), g)
    b = inner(f, green.apply(g))
    assert abs(a - b) < 1e-9 * abs(a)


def test_dirichlet_boundary_value(dirichlet_fx):
    fx = dirichlet_fx
    u = apply_resolvent_mode(fx.scatterer, SpectralPoint(0.3, 0.1), 0, fx.f)
    assert abs(u.value_at(1.0)) < 1e-10


def test_wronskian_spread_and_green_residual(free_fx, generic_well_fx, dirichlet_fx):
    for fx in (free_fx, generic_well_fx, dirichlet_fx):
        for lam in (SpectralPoint(0.37, math.pi / 4), SpectralPoint(0.02, math.pi / 2)):
            green = mode_green(fx.scatterer, lam, 0, fx.grid)
            assert green.wronskian_spread < 1e-9
            u = green.apply(fx.f)
            assert green.ode_residual(fx.f, u) < 1e-8


def test_at_pole_error(p_well_fx):
    from lowfreq2d import imaginary_axis_poles
    s = p_well_fx.scatterer.shifted(-1e-2)
    pole = imaginary_axis_poles(s, 1)[0]
    with pytest.raises(AtPoleError):
        green = mode_green(s, pole.lam, 1, p_well_fx.grid)
        # fall through only if the guard failed
        green.apply(p_well_fx.source(1))


# -- boundary pairing ------------------------------------------------------------

def test_pairing_log_against_one(free_fx):
    grid = free_fx.grid
    u = from_callable(grid, lambda r: math.log(r) if r > 0 else 0.0,
                      lambda r: 1.0 / r if r > 0 else 0.0,
                      exterior=Exterior(clog=1.0), exterior_start=grid.rmin)
    one = from_callable(grid, lambda r: 1.0, lambda r: 0.0,
                        exterior=Exterior(c0=1.0), exterior_start=grid.rmin)
    r1 = free_fx.chi.pairing_radius
    assert abs(boundary_pairing(u, one, r1, "fourier") + 2.0 * math.pi) < 1e-12
    assert abs(boundary_pairing(u, one, r1, "samples") + 2.0 * math.pi) < 1e-10


def test_pairing_antisymmetry_real(free_fx):
    u = from_callable(free_fx.grid, lambda r: 1.0 + r * r, lambda r: 2.0 * r)
    r1 = free_fx.chi.pairing_radius
    assert abs(boundary_pairing(u, u, r1, "samples")) < 1e-12


def test_pairing_mode1_both_routes(free_fx):
    grid = free_fx.grid
    u = from_callable(grid, lambda r: r, lambda r: 1.0, mode=1,
                      exterior=Exterior(v={1: 1.0}), exterior_start=grid.rmin)
    v = from_callable(grid, lambda r: 1.0 / r, lambda r: -1.0 / r**2, mode=1,
                      exterior=Exterior(v={-1: 1.0}), exterior_start=grid.rmin)
    r1 = free_fx.chi.pairing_radius
    fourier = boundary_pairing(u, v, r1, "fourier")
    samples = boundary_pairing(u, v, r1, "samples")
    oracle = circle_pairing(r1, 1.0, 1.0 / r1, -1.0 / r1**2, r1, 1, 1)
    assert abs(fourier - samples) < 1e-10
    assert abs(fourier - oracle) < 1e-9
    assert abs(fourier + 2.0 * math.pi) < 1e-12      # = -2 pi for (r, 1/r)


def test_pairing_channel_orthogonality(free_fx):
    u = from_callable(free_fx.grid, lambda r: r, None, mode=1, trig="cos")
    v = from_callable(free_fx.grid, lambda r: 1.0 / r, None, mode=1, trig="sin")
    assert boundary_pairing(u, v, free_fx.chi.pairing_radius, "samples") == 0.0


def test_pairing_requires_exterior(free_fx):
    u = from_callable(free_fx.grid, lambda r: r, None, mode=1)
    from lowfreq2d.errors import ValidationError
    with pytest.raises(ValidationError):
        boundary_pairing(u, u, free_fx.chi.pairing_radius, "fourier")


# -- operator identities ----------------------------------------------------------

@pytest.mark.parametrize("case", ["free", "well", "dirichlet", "neumann"])
def test_identity_suite(case, free_fx, generic_well_fx, dirichlet_fx, neumann_fx):
    fx = {"free": free_fx, "well": generic_well_fx,
          "dirichlet": dirichlet_fx, "neumann": neumann_fx}[case]
    s, chi = fx.scatterer, fx.chi
    gc, gh = chi.r_end + 0.7, 0.5
    grid = standard_grid(s, chi, rmax=chi.pairing_radius + 2.0,
                         extra_edges=bump_edges(fx.f_center, fx.f_half) + bump_edges(gc, gh))
    f = bump(grid, fx.f_center, fx.f_half, 0)
    gfun = bump(grid, gc, gh, 0)
    lam = SpectralPoint(0.01, math.pi / 4)
    z = SpectralPoint(0.02, math.pi / 2)
    assert two_parameter_identity_residual(s, lam, z, chi, f) < 1e-6
    assert one_sided_identity_residual(s, lam, chi, gfun) < 1e-7
    outer = bump(grid, chi.pairing_radius + 0.9, 0.5, 0)
    assert pairing_identity_residual(s, SpectralPoint(0.4, math.pi / 2), outer,
                                     chi.pairing_radius) < 1e-7


def test_two_parameter_identity_free_is_sharp(free_fx):
    # with V = 0 the identity is algebraic; the residual is essentially machine
    fx = free_fx
    lam = SpectralPoint(0.05, math.pi / 3)
    z = SpectralPoint(0.02, math.pi / 2)
    assert two_parameter_identity_residual(fx.scatterer, lam, z, fx.chi, fx.f) < 1e-10


def test_two_parameter_identity_lambda_equals_z(free_fx, generic_well_fx):
    # both sides vanish identically at lam = z: check the raw difference
    fx = generic_well_fx
    lam = SpectralPoint(0.02, math.pi / 2)
    green = mode_green(fx.scatterer, lam, 0, fx.grid)
    lhs = green.apply(fx.f).values - green.apply(fx.f).values
    assert np.max(np.abs(lhs)) == 0.0


def test_mode_mismatch_rejected(free_fx):
    green = mode_green(free_fx.scatterer, SpectralPoint(0.3, 0.0), 0, free_fx.grid)
    from lowfreq2d.errors import ValidationError
    with pytest.raises(ValidationError):
        green.apply(free_fx.source(1))


def test_solution_wronskian_free():
    # regular against outgoing for the free operator: r(J H' - J' H) = 2i/pi
    from lowfreq2d.radialsolve import outgoing_solution, regular_solution, wronskian
    lam = SpectralPoint(0.8, 0.6)
    phi = regular_solution(free_scatterer(), 0, lam, 5.0)
    psi = outgoing_solution(free_scatterer(), 0, lam, 5.0)
    for r in (0.3, 1.4, 4.2):
        assert abs(wronskian(phi, psi, r) - 2j / math.pi) < 1e-13


def test_lam4_log_coefficient_kernel():
    # extract the lam^4 log(lam) coefficient of the free kernel numerically and
    # compare with the tabulated quadrupole-order kernel
    x, y = (1.3, 0.4), (2.1, 2.2)
    base = [FreeCoeffKernel(j, k).evaluate(x, y) for j, k in ((0, 1), (0, 0), (1, 1), (1, 0))]

    def remainder(lam):
        trunc = base[0] * lam.log + base[1] + base[2] * lam.value**2 * lam.log \
            + base[3] * lam.value**2
        return free_kernel(lam, x, y) - trunc

    # two moduli, two args: solve for the lam^4 log and lam^4 coefficients
    import numpy.linalg as la
    pts = [SpectralPoint(m, a) for m in (2.0**-8, 2.0**-9) for a in (0.3, 1.1)]
    A = np.array([[p.value**4 * p.log, p.value**4] for p in pts])
    b = np.array([remainder(p) for p in pts])
    coef, *_ = la.lstsq(A, b, rcond=None)
    r41 = FreeCoeffKernel(2, 1).evaluate(x, y)
    assert abs(coef[0] - r41) < 1e-4 * abs(r41)


@pytest.mark.parametrize("mode", [1, 2])
def test_identity_suite_higher_modes(generic_well_fx, mode):
    fx = generic_well_fx
    s, chi = fx.scatterer, fx.chi
    grid = standard_grid(s, chi, extra_edges=bump_edges(fx.f_center, fx.f_half))
    f = bump(grid, fx.f_center, fx.f_half, mode)
    lam = SpectralPoint(0.01, math.pi / 4)
    z = SpectralPoint(0.02, math.pi / 2)
    assert two_parameter_identity_residual(s, lam, z, chi, f) < 1e-6
