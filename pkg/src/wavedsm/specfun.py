"""Hand-rolled special functions for the Helmholtz kernels.

Everything here is dual-branch (ascending series / asymptotic expansion)
in plain float64; accuracy targets are 1e-10 relative for the Hankel
function and 1e-12 for the modified Bessel function, verified against
high-precision references in the test suite.
"""

import math
from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.5772156649015328606

# Series/asymptotic crossovers.  The asymptotic expansion truncated at its
# smallest term reaches ~6e-12 at |z| = 12 but only ~3.6e-10 at |z| = 10,
# so the series must carry the range up to 12.
_H0_CROSSOVER = 12.0
_H0_SERIES_TERMS = 46
_I0_CROSSOVER = 15.0
_I0_SERIES_TERMS = 56
_ASYMPTOTIC_CAP = 30
_CHUNK = 16384

# 1/(k!)^2 with the factorial squared formed exactly in integer arithmetic,
# so each coefficient carries a single rounding.
_INV_FACT_SQ = np.array(
    [1.0 / float(math.factorial(k) ** 2) for k in range(max(_H0_SERIES_TERMS, _I0_SERIES_TERMS))]
)
_HARMONIC = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1.0, _H0_SERIES_TERMS))])


@dataclass(frozen=True)
class ComplexFrequency:
    """A point omega = re + i*im on the damped contour.

    Invariants: im >= 0 always; re must be nonzero whenever the frequency
    feeds the two-dimensional kernel (enforced at the kernel, not here,
    since the same object may legally feed the 3-D kernel).
    """

    re: float
    im: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError("ComplexFrequency: components must be finite")
        if self.im < 0.0:
            raise ValueError("ComplexFrequency: im must be >= 0 (damped contour)")

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def __complex__(self) -> complex:
        return self.value


def _as_omega(omega) -> complex:
    """Accept a ComplexFrequency or plain number; reject Im < 0."""
    w = complex(omega)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise ValueError("frequency must be finite")
    if w.imag < 0.0:
        raise ValueError("frequency must satisfy Im omega >= 0")
    return w


def _h0_series(z):
    # Ascending series for J0 and Y0.  Terms are built as w^k / (k!)^2 with
    # np.power (binary exponentiation for integer k) and pairwise-summed
    # along the term axis; this keeps the cancellation roundoff near the
    # crossover at ~1e-11 relative, which the recurrence form does not.
    w = 0.25 * z * z
    k = np.arange(_H0_SERIES_TERMS)
    terms = np.power(w[None, :], k[:, None]) * _INV_FACT_SQ[k, None]  # (K, n)
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    j0 = np.sum(signs[:, None] * terms, axis=0)
    ysum = np.sum((-signs * _HARMONIC[k])[:, None] * terms, axis=0)
    y0 = (2.0 / np.pi) * ((np.log(0.5 * z) + EULER_GAMMA) * j0 + ysum)
    return j0 + 1j * y0


def _h0_asymptotic(z):
    # sqrt(2/(pi z)) e^{i(z - pi/4)} sum_k t_k, truncated adaptively at the
    # smallest term (the expansion is divergent; stopping there bounds the
    # error by that term).
    pref = np.sqrt(2.0 / (np.pi * z)) * np.exp(1j * (z - 0.25 * np.pi))
    term = np.ones_like(z)
    total = np.ones_like(z)
    active = np.ones(z.shape, dtype=bool)
    for k in range(_ASYMPTOTIC_CAP):
        nxt = term * (-1j) * (2 * k + 1) ** 2 / (8.0 * (k + 1) * z)
        grow = np.abs(nxt) >= np.abs(term)
        active = active & ~grow & (np.abs(term) > 1e-17 * np.abs(total))
        total = np.where(active, total + nxt, total)
        term = nxt
        if not active.any():
            break
    return pref * total


def hankel0_first(z):
    """Hankel function of the first kind, order zero, for Im z >= 0.

    Parameters
    ----------
    z : complex scalar or array
        Argument; z = 0 and Im z < 0 are outside the domain.

    Returns
    -------
    complex scalar or ndarray matching the input shape.
    """
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel().copy()
    if np.any(flat == 0):
        raise ValueError("hankel0_first: z = 0 is outside the domain")
    if np.any(flat.imag < 0):
        raise ValueError("hankel0_first: requires Im z >= 0")
    # Pin Im z = -0.0 to +0.0 so the principal log lands on the correct
    # side of the branch cut for negative real arguments.
    on_axis = flat.imag == 0
    flat[on_axis] = flat[on_axis].real + 0.0j

    out = np.empty_like(flat)
    for start in range(0, flat.size, _CHUNK):
        part = flat[start:start + _CHUNK]
        small = np.abs(part) <= _H0_CROSSOVER
        res = np.empty_like(part)
        if small.any():
            res[small] = _h0_series(part[small])
        if (~small).any():
            res[~small] = _h0_asymptotic(part[~small])
        out[start:start + _CHUNK] = res
    out = out.reshape(arr.shape)
    return complex(out[()]) if scalar else out


def _i0_series(x):
    w = 0.25 * x * x
    k = np.arange(_I0_SERIES_TERMS)
    terms = np.power(w[None, :], k[:, None]) * _INV_FACT_SQ[k, None]
    return np.sum(terms, axis=0)


def _i0_asymptotic(x):
    # e^x / sqrt(2 pi x) * sum_k [(2k-1)!!]^2 / (k! (8x)^k), all terms
    # positive, truncated at the smallest.
    pref = np.exp(x) / np.sqrt(2.0 * np.pi * x)
    term = np.ones_like(x)
    total = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(_ASYMPTOTIC_CAP):
        nxt = term * (2 * k + 1) ** 2 / (8.0 * (k + 1) * x)
        grow = nxt >= term
        active = active & ~grow & (term > 1e-17 * total)
        total = np.where(active, total + nxt, total)
        term = nxt
        if not active.any():
            break
    return pref * total


def mod_bessel_I0(x):
    """Modified Bessel function I0 for real x >= 0."""
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel()
    if np.any(flat < 0):
        raise ValueError("mod_bessel_I0: requires x >= 0")
    small = flat <= _I0_CROSSOVER
    out = np.empty_like(flat)
    if small.any():
        out[small] = _i0_series(flat[small])
    if (~small).any():
        out[~small] = _i0_asymptotic(flat[~small])
    out = out.reshape(arr.shape)
    return float(out[()]) if scalar else out


def mod_sph_bessel_i0(x):
    """Modified spherical Bessel function i0(x) = sinh(x)/x (even; i0(0) = 1)."""
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel()
    small = np.abs(flat) < 1e-4
    xs = np.where(small, 1.0, flat)  # dummy argument avoids 0/0
    out = np.where(small, 1.0 + flat * flat / 6.0 + flat ** 4 / 120.0, np.sinh(xs) / xs)
    out = out.reshape(arr.shape)
    return float(out[()]) if scalar else out


def sph_bessel_j0(z):
    """Spherical Bessel function j0(z) = sin(z)/z for complex z (j0(0) = 1)."""
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel()
    small = np.abs(flat) < 1e-4
    zs = np.where(small, 1.0, flat)
    w = flat * flat
    out = np.where(small, 1.0 - w / 6.0 + w * w / 120.0, np.sin(zs) / zs)
    out = out.reshape(arr.shape)
    return complex(out[()]) if scalar else out


def fundamental_from_distance(dim, r, omega, c0):
    """Free-space Helmholtz kernel as a function of source-target distance.

    dim 2: (i/4) H0^(1)(omega r / c0);  dim 3: e^{i omega r / c0} / (4 pi r).
    Distances must be strictly positive.
    """
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    if not (c0 > 0):
        raise ValueError("background speed must be positive")
    w = _as_omega(omega)
    rr = np.asarray(r, dtype=float)
    if np.any(rr <= 0):
        raise ValueError("fundamental solution: coincident or invalid points (r <= 0)")
    if dim == 2:
        if w.real == 0.0:
            raise ValueError("2-D kernel needs Re omega != 0")
        return 0.25j * hankel0_first(w * rr / c0)
    return np.exp(1j * w * rr / c0) / (4.0 * np.pi * rr)


def fundamental_solution(dim, x, y, omega, c0):
    """Outgoing fundamental solution of the Helmholtz operator at speed c0.

    Parameters
    ----------
    dim : int
        Spatial dimension, 2 or 3.
    x, y : array-like, shape (..., dim)
        Evaluation and source points (broadcastable against each other).
    omega : complex or ComplexFrequency
        Contour frequency with Im omega >= 0; Re omega != 0 when dim == 2.
    c0 : float
        Background sound speed.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape[-1] != dim or ya.shape[-1] != dim:
        raise ValueError("points must have trailing length dim")
    r = np.sqrt(np.sum((xa - ya) ** 2, axis=-1))
    return fundamental_from_distance(dim, r, omega, c0)
