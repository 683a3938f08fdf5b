"""Special functions on the log cover: series, asymptotics, sheet structure."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowfreq2d import EULER, GAMMA0, GammaConstants, SpectralPoint, bessel_jy, hankel0, hankel1
from lowfreq2d.errors import DomainError
from lowfreq2d.specfun import _jy_big, _jy_series

from oracles import EULER_ORACLE, j0_series, j0_prime, y0_series, y0_prime


def test_gamma_constants():
    gc = GammaConstants()
    assert abs(gc.euler - EULER_ORACLE) < 1e-15
    assert gc.gamma0 == complex(math.log(2.0) - EULER, math.pi / 2.0)
    seq = gc.gamma_seq(5)
    for m in range(1, 5):
        assert abs(seq[m] - seq[m - 1] - 1.0 / m) < 1e-15
        assert seq[m].imag == pytest.approx(math.pi / 2.0)


def test_modulus_zero_rejected():
    with pytest.raises(DomainError):
        SpectralPoint(0.0, 0.0)


def test_hankel0_against_independent_series_oracle():
    # oracle sanity first: the classical Wronskian for the oracle itself
    for x in (0.5, 1.0, 2.0):
        w = j0_series(x) * y0_prime(x) - j0_prime(x) * y0_series(x)
        assert abs(w - 2.0 / (math.pi * x)) < 1e-9
    # frozen from the oracle: J0(1) + i Y0(1)
    expected = complex(j0_series(1.0), y0_series(1.0))
    assert abs(expected - complex(0.76519769, 0.08825696)) < 1e-7
    got = hankel0(SpectralPoint(1.0, 0.0))
    assert abs(got - expected) < 1e-8


def test_hankel0_small_argument_leading_term():
    s = SpectralPoint(1e-5, 0.0)
    lead = 2j / math.pi * (s.log - GAMMA0)
    assert abs(hankel0(s) - lead) < 5e-10 * abs(lead)


def test_sheet_shift_identity_seeded():
    rng = np.random.default_rng(42)
    for _ in range(20):
        rho = float(np.exp(rng.uniform(np.log(0.01), np.log(5.0))))
        th = float(rng.uniform(-6.0, 6.0))
        a = hankel0(SpectralPoint(rho, th + 2.0 * math.pi))
        b = hankel0(SpectralPoint(rho, th))
        J0 = bessel_jy(0, SpectralPoint(rho, th))[0]
        assert abs(a - b + 4.0 * J0) < 1e-10 * max(1.0, abs(b))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.02, 4.0), st.floats(-6.0, 6.0))
def test_sheet_shift_identity_property(rho, th):
    a = hankel0(SpectralPoint(rho, th + 2.0 * math.pi))
    b = hankel0(SpectralPoint(rho, th))
    J0 = bessel_jy(0, SpectralPoint(rho, th))[0]
    assert abs(a - b + 4.0 * J0) < 1e-10 * max(1.0, abs(b))


@pytest.mark.parametrize("l", range(11))
def test_wronskian_identity(l):
    for mod in np.exp(np.linspace(math.log(1e-4), math.log(10.0), 9)):
        s = SpectralPoint(float(mod), 0.0)
        J, Y, Jd, Yd = bessel_jy(l, s)
        target = 2.0 / (math.pi * s.value)
        assert abs(J * Yd - Jd * Y - target) < 1e-9 * abs(target)


def test_wronskian_identity_triple_at_half():
    for l in (0, 1, 2):
        s = SpectralPoint(0.5, 0.0)
        J, Y, Jd, Yd = bessel_jy(l, s)
        assert abs(J * Yd - Jd * Y - 2.0 / (math.pi * 0.5)) < 1e-12


def test_series_leading_terms():
    s = SpectralPoint(1e-8, 0.0)
    J, Y, _, _ = bessel_jy(0, s)
    assert abs(J - 1.0) < 1e-14
    lead = 2.0 / math.pi * (math.log(1e-8 / 2.0) + EULER)
    assert abs(Y - lead) < 1e-12 * abs(lead)


def test_hankel_derivative_relation():
    # fourth-order finite-difference oracle on hankel0
    h = 3e-4
    vals = [hankel0(SpectralPoint(0.3 + k * h, 0.0)) for k in (-2, -1, 1, 2)]
    fd = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
    H1, _ = hankel1(1, SpectralPoint(0.3, 0.0))
    assert abs(fd + H1) < 1e-10


@pytest.mark.parametrize("l", [0, 1, 2, 3])
def test_series_asymptotic_crossover(l):
    worst = 0.0
    for mod in (11.1, 11.7, 12.3, 12.9):
        for th in (0.0, 0.7, math.pi / 2, 2.6, -2.8):
            z = np.array([mod * np.exp(1j * th)])
            lz = np.array([math.log(mod) + 1j * th])
            Js, Ys = _jy_series(l, z, lz)
            Jb, Yb = _jy_big(l, z, lz)
            scale = abs(Js[0]) + abs(Ys[0])
            worst = max(worst, (abs(Js[0] - Jb[0]) + abs(Ys[0] - Yb[0])) / scale)
    assert worst < 1e-8


def test_hankel1_consistent_with_jy():
    for mod, th in ((0.4, 0.3), (3.0, -1.0), (9.0, 2.0)):
        s = SpectralPoint(mod, th)
        J, Y, Jd, Yd = bessel_jy(2, s)
        H, Hd = hankel1(2, s)
        assert abs(H - (J + 1j * Y)) < 1e-12 * abs(H)
        assert abs(Hd - (Jd + 1j * Yd)) < 1e-12 * max(abs(Hd), 1.0)


def test_hankel_decay_upper_imaginary_axis():
    # |H0(i x)| ~ sqrt(2/(pi x)) e^{-x}
    for x in (2.0, 8.0, 20.0):
        H = hankel1(0, SpectralPoint(x, math.pi / 2.0))[0]
        model = math.sqrt(2.0 / (math.pi * x)) * math.exp(-x)
        assert 0.8 < abs(H) / model < 1.2
