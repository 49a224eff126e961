"""Special functions against mpmath references and closed-form anchors.

Reference values were computed with mpmath at 40+ decimal digits; the
digits frozen here are exact to double precision.
"""

import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from wavedsm.specfun import (ComplexFrequency, EULER_GAMMA, _i0_asymptotic,
                             _i0_series, fundamental_from_distance,
                             fundamental_solution, hankel0_first,
                             mod_bessel_I0, mod_sph_bessel_i0, sph_bessel_j0)


def test_hankel_known_point_complex():
    got = hankel0_first(2.5 + 0.5j)
    want = -0.0006939641947324021 + 0.2983103839469944j
    assert abs(got - want) <= 1e-13 * abs(want)


def test_hankel_known_point_real():
    got = hankel0_first(1.0)
    want = 0.7651976865579664 + 0.08825696421567697j
    assert abs(got - want) <= 1e-13


def test_hankel_large_argument_envelope():
    # Leading asymptotic magnitude sqrt(2 / (pi x)).
    got = abs(hankel0_first(100.0))
    want = math.sqrt(2.0 / (100.0 * math.pi))
    assert abs(got - want) / want < 1e-2


# Rays through the upper half plane.  Accuracy degrades towards the
# imaginary axis where e^{2 Im z} amplifies cancellation in the
# reference itself, hence the per-ray tolerances and magnitude caps.
@pytest.mark.parametrize("angle,tol", [
    (0.0, 1e-10),
    (0.05 * math.pi, 1e-10),
    (0.15 * math.pi, 1e-7),
    (0.5 * math.pi, 1e-6),
    (math.pi, 1e-10),
])
def test_hankel_against_mpmath_ray(angle, tol):
    s = abs(math.sin(angle))
    cap = 1e4 if s < 1e-12 else min(1e4, 60.0 / s)
    worst = 0.0
    for r in np.geomspace(1e-3, cap, 50):
        z = complex(r * math.cos(angle), r * math.sin(angle))
        if z.imag < 0.0:
            z = complex(z.real, 0.0)
        with mp.workdps(40 + 2 * int(abs(z.imag)) + 2):
            ref = complex(mp.hankel1(0, mp.mpc(z.real, z.imag)))
        got = hankel0_first(z)
        worst = max(worst, abs(got - ref) / abs(ref))
    assert worst < tol


def test_i0_against_mpmath():
    worst = 0.0
    for x in np.geomspace(1e-3, 700.0, 80):
        with mp.workdps(40):
            ref = float(mp.besseli(0, x))
        worst = max(worst, abs(mod_bessel_I0(x) - ref) / ref)
    assert worst < 1e-12


def test_i0_known_point():
    assert abs(mod_bessel_I0(1.0) - 1.2660658777520082) <= 1e-15
    assert mod_bessel_I0(0.0) == 1.0


def test_i0_branch_agreement():
    # Series and asymptotic branches must agree across the crossover.
    xs = np.linspace(14.0, 16.0, 81)
    a = _i0_series(xs)
    b = _i0_asymptotic(xs)
    assert np.max(np.abs(a - b) / a) < 1e-9


def test_spherical_j0_i0_relation():
    # j0(-ix) = i0(x): the imaginary rotation maps sinc onto sinh x / x.
    for x in np.linspace(0.0, 30.0, 301):
        lhs = sph_bessel_j0(complex(0.0, -x))
        rhs = mod_sph_bessel_i0(x)
        assert abs(lhs.real - rhs) <= 1e-12 * max(1.0, rhs)
        assert lhs.imag == 0.0


def test_spherical_j0_values():
    assert sph_bessel_j0(0.0) == 1.0 + 0.0j
    got = sph_bessel_j0(2.0)
    assert abs(got.real - 0.45464871341284085) <= 1e-15
    assert got.imag == 0.0


def test_fundamental_2d_value():
    got = fundamental_from_distance(2, 1.0, ComplexFrequency(2.0), 4.0)
    want = 0.11112968337667663 + 0.23461745181020321j
    assert abs(got - want) <= 1e-13 * abs(want)


def test_fundamental_3d_value():
    got = fundamental_from_distance(3, 2.0, ComplexFrequency(1.0, 0.5), 1.0)
    want = -0.006091331792303393 + 0.01330980278653515j
    assert abs(got - want) <= 1e-13 * abs(want)


def test_fundamental_solution_matches_distance_form():
    x = np.array([0.3, -0.2, 0.1])
    y = np.array([-0.5, 0.4, 0.0])
    r = float(np.linalg.norm(x - y))
    a = fundamental_solution(3, x, y, ComplexFrequency(3.0, 0.1), 2.0)
    b = fundamental_from_distance(3, r, ComplexFrequency(3.0, 0.1), 2.0)
    assert a == b


def test_hankel_satisfies_bessel_ode():
    # u'' + u'/x + u = 0, central differences at h = 1e-3.
    h = 1e-3
    worst = 0.0
    for x in np.linspace(1.0, 50.0, 120):
        um = hankel0_first(x - h)
        u0 = hankel0_first(x)
        up = hankel0_first(x + h)
        d2 = (up - 2.0 * u0 + um) / h ** 2
        d1 = (up - um) / (2.0 * h)
        worst = max(worst, abs(d2 + d1 / x + u0))
    assert worst < 1e-5


def test_hankel_numpy_scalar_consistency():
    # numpy complex scalars may take different arithmetic paths than
    # python complex; results agree to rounding, not bitwise.
    zs = [0.5 + 0.1j, 11.9, 12.1, 30.0 + 5.0j]
    for z in zs:
        a = hankel0_first(z)
        b = hankel0_first(np.complex128(z))
        assert abs(a - b) <= 1e-12 * abs(a)


def test_euler_gamma_digits():
    assert abs(EULER_GAMMA - 0.5772156649015329) <= 1e-16


@pytest.mark.parametrize("bad", [0.0, 0.0 + 0.0j])
def test_hankel_rejects_origin(bad):
    with pytest.raises(ValueError):
        hankel0_first(bad)


def test_hankel_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        hankel0_first(1.0 - 0.5j)


def test_hankel_negative_zero_imag_is_upper():
    z = complex(2.0, -0.0)
    got = hankel0_first(z)
    assert got == hankel0_first(2.0)


def test_i0_rejects_negative():
    with pytest.raises(ValueError):
        mod_bessel_I0(-1.0)


def test_complex_frequency_validation():
    with pytest.raises(ValueError):
        ComplexFrequency(1.0, -0.1)
    with pytest.raises(ValueError):
        ComplexFrequency(math.nan)
    w = ComplexFrequency(2.0, 0.5)
    assert complex(w) == 2.0 + 0.5j


def test_fundamental_domain_errors():
    with pytest.raises(ValueError):
        fundamental_from_distance(2, 0.0, ComplexFrequency(1.0), 1.0)
    with pytest.raises(ValueError):
        fundamental_from_distance(2, -1.0, ComplexFrequency(1.0), 1.0)
    with pytest.raises(ValueError):
        fundamental_from_distance(4, 1.0, ComplexFrequency(1.0), 1.0)
    with pytest.raises(ValueError):
        # Purely damped 2-D argument sits on the Hankel branch cut.
        fundamental_from_distance(2, 1.0, ComplexFrequency(0.0, 1.0), 1.0)
