"""Probing signals and the damped-contour transform pair.

The smoothed-sawtooth reference values come from an independent
trapezoid quadrature of the mollified series (400001 nodes, error
well under 1e-6); the other pulses have closed forms.
"""

import cmath

import numpy as np
import pytest

from wavedsm.signals import (SignalSpec, TimeGrid, default_band,
                             default_xi_grid, eval_signal, forward_laplace,
                             inverse_laplace)


def test_time_grid_layout():
    tg = TimeGrid(0.02, 300)
    assert tg.times[0] == 0.02
    assert tg.times[-1] == pytest.approx(6.0, abs=1e-12)
    assert tg.times.size == 300
    assert tg.duration == pytest.approx(6.0, abs=1e-12)


@pytest.mark.parametrize("dt,n", [(0.0, 10), (-0.1, 10), (0.02, 0)])
def test_time_grid_validation(dt, n):
    with pytest.raises(ValueError):
        TimeGrid(dt, n)


def test_gauss_mod_sine_point():
    # sin(omega0 t) e^{-3 (t-2)^2} at t = 2: the envelope is exactly 1.
    spec = SignalSpec("gauss_mod_sine", 20.0)
    got = float(eval_signal(spec, np.array([2.0]))[0])
    assert got == np.sin(40.0)
    assert got == pytest.approx(0.7451131604793488, abs=1e-16)


def test_tempered_sine_point():
    spec = SignalSpec("tempered_sine")
    got = float(eval_signal(spec, np.array([0.5]))[0])
    assert got == pytest.approx(-0.13600527772234244, abs=1e-15)


def test_signals_vanish_before_start():
    for kind, cf in (("gauss_mod_sine", 20.0), ("smooth_sawtooth", None),
                     ("tempered_sine", None)):
        spec = SignalSpec(kind, cf)
        out = eval_signal(spec, np.array([-1.0, 0.0]))
        assert np.all(out == 0.0)


@pytest.mark.parametrize("t,want", [
    (0.08, 0.254647762956587),
    (0.3, -0.0450703156096598),
    (1.0, 0.183098756866755),
])
def test_smooth_sawtooth_against_quadrature(t, want):
    spec = SignalSpec("smooth_sawtooth")
    got = float(eval_signal(spec, np.array([t]))[0])
    assert abs(got - want) < 1e-6


def test_signal_spec_validation():
    with pytest.raises(ValueError):
        SignalSpec("square_wave")
    with pytest.raises(ValueError):
        SignalSpec("gauss_mod_sine")           # needs a carrier
    with pytest.raises(ValueError):
        SignalSpec("gauss_mod_sine", -3.0)
    with pytest.raises(ValueError):
        SignalSpec("smooth_sawtooth", 10.0)    # fixed shape, no carrier


def test_recommended_sigma_defaults():
    assert SignalSpec("gauss_mod_sine", 20.0).recommended_sigma == 0.0
    assert SignalSpec("smooth_sawtooth").recommended_sigma == 0.2
    assert SignalSpec("tempered_sine").recommended_sigma == 3.0
    assert SignalSpec("tempered_sine", recommended_sigma=1.5).recommended_sigma == 1.5


def test_default_band():
    assert default_band(SignalSpec("gauss_mod_sine", 20.0)) == 80.0
    assert default_band(SignalSpec("smooth_sawtooth")) == 120.0
    assert default_band(SignalSpec("tempered_sine")) == 120.0


def test_default_xi_grid_layout():
    xi = default_xi_grid(80.0, 6.0)
    assert xi.size == 612
    dxi = xi[1] - xi[0]
    assert dxi == pytest.approx(2.0 * np.pi / 24.0, rel=1e-14)
    # Half-offset nodes: no zero frequency, symmetric about it.
    assert np.min(xi[xi > 0]) == pytest.approx(0.5 * dxi, rel=1e-14)
    assert np.max(np.abs(xi + xi[::-1])) == 0.0
    assert np.max(xi) < 80.0
    with pytest.raises(ValueError):
        default_xi_grid(0.01, 6.0)


def test_forward_weight_identity():
    # Transforming e^{-i xi* t} at xi = xi* exposes the bare quadrature
    # weights: sum w_n = T - dt/2 (half weight at the last node, zero
    # value at the virtual t = 0 node).
    tg = TimeGrid(0.02, 300)
    xs = np.array([7.3])
    c = forward_laplace(np.cos(7.3 * tg.times), tg, 0.0, xs)
    s = forward_laplace(np.sin(7.3 * tg.times), tg, 0.0, xs)
    tot = c[0] - 1j * s[0]
    assert abs(tot - (tg.duration - tg.dt / 2)) < 1e-12


def test_forward_single_spike():
    # One nonzero sample isolates a single kernel entry exactly.
    tg = TimeGrid(0.02, 300)
    xi = default_xi_grid(80.0, tg.duration)
    sp = np.zeros(300)
    sp[-1] = 1.0
    got = forward_laplace(sp, tg, 0.3, xi)
    k = int(np.argmin(np.abs(xi - 5.0)))
    want = 0.5 * tg.dt * cmath.exp(1j * (xi[k] + 0.3j) * 6.0)
    assert abs(got[k] - want) <= 1e-15 * abs(want)


def test_round_trip_band_limited():
    tg = TimeGrid(0.02, 300)
    v = eval_signal(SignalSpec("gauss_mod_sine", 20.0), tg.times)
    xi = default_xi_grid(80.0, tg.duration)
    F = forward_laplace(v, tg, 0.0, xi)
    back = inverse_laplace(F, xi, 0.0, tg)
    assert back.dtype == np.float64
    assert np.linalg.norm(back - v) / np.linalg.norm(v) < 1e-6


def test_damping_consistency():
    # Transforming on the damped contour equals transforming the
    # exponentially weighted samples on the real line.
    tg = TimeGrid(0.02, 300)
    v = eval_signal(SignalSpec("gauss_mod_sine", 20.0), tg.times)
    xi = default_xi_grid(80.0, tg.duration)
    a = forward_laplace(v, tg, 0.7, xi)
    b = forward_laplace(v * np.exp(-0.7 * tg.times), tg, 0.0, xi)
    assert np.max(np.abs(a - b)) / np.max(np.abs(b)) < 1e-12


def test_undamped_energy_identity():
    # Discrete Parseval on the half-offset grid; holds to rounding when
    # the pulse is band-limited within the grid.
    tg = TimeGrid(0.02, 300)
    v = eval_signal(SignalSpec("gauss_mod_sine", 20.0), tg.times)
    xi = default_xi_grid(80.0, tg.duration)
    F = forward_laplace(v, tg, 0.0, xi)
    w = np.full(tg.n_steps, tg.dt)
    w[-1] *= 0.5
    tside = float(np.sum(w * v * v))
    fside = (xi[1] - xi[0]) / (2.0 * np.pi) * float(np.sum(np.abs(F) ** 2))
    assert abs(tside - fside) / tside < 1e-6


def test_forward_oversampling_agreement():
    # The trapezoid rule is already converged at dt = 0.02 for this
    # band; an 8x finer sampling moves nothing above 1e-6.
    tg = TimeGrid(0.02, 300)
    tg8 = TimeGrid(0.0025, 2400)
    spec = SignalSpec("gauss_mod_sine", 20.0)
    xi = default_xi_grid(80.0, tg.duration)
    F = forward_laplace(eval_signal(spec, tg.times), tg, 0.0, xi)
    F8 = forward_laplace(eval_signal(spec, tg8.times), tg8, 0.0, xi)
    assert np.max(np.abs(F8 - F)) / np.max(np.abs(F8)) < 1e-6


def test_inverse_asymmetric_grid_is_complex():
    tg = TimeGrid(0.02, 50)
    xi = default_xi_grid(20.0, tg.duration)
    half = xi[xi > 0]
    F = forward_laplace(eval_signal(SignalSpec("gauss_mod_sine", 5.0), tg.times),
                        tg, 0.0, half)
    back = inverse_laplace(F, half, 0.0, tg)
    assert back.dtype == np.complex128


def test_transform_validation():
    tg = TimeGrid(0.02, 50)
    v = np.zeros(50)
    xi = np.array([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        forward_laplace(v, tg, -0.1, xi)
    with pytest.raises(ValueError):
        forward_laplace(v, tg, 0.0, np.array([]))
    with pytest.raises(ValueError):
        forward_laplace(v, tg, 0.0, np.array([1.0, 1.0, 2.0]))
    with pytest.raises(ValueError):
        forward_laplace(np.zeros(49), tg, 0.0, xi)
    with pytest.raises(ValueError):
        inverse_laplace(np.zeros(3, dtype=complex), np.array([1.0, 2.0, 4.0]), 0.0, tg)
    with pytest.raises(ValueError):
        inverse_laplace(np.zeros(4, dtype=complex), xi, 0.0, tg)
