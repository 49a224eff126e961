"""Causal source waveforms and the damped-contour transform pair.

Time series live on uniform grids t_n = n*dt, n = 1..N (the sample at
t = 0 is identically zero by causality and is never stored).  Spectra
live on uniform frequency grids xi_k along the contour omega = xi + i*sigma.
"""

from dataclasses import dataclass, field

import numpy as np

SIGNAL_KINDS = ("gauss_mod_sine", "smooth_sawtooth", "tempered_sine")

# Default contour damping per waveform; config may override.
_RECOMMENDED_SIGMA = {"gauss_mod_sine": 0.0, "smooth_sawtooth": 0.2, "tempered_sine": 3.0}


@dataclass(frozen=True)
class SignalSpec:
    """One of the three causal waveforms.

    kind : 'gauss_mod_sine' | 'smooth_sawtooth' | 'tempered_sine'
    center_frequency : rad/s, required for gauss_mod_sine, None otherwise
    recommended_sigma : default contour damping for imaging (1/s)
    """

    kind: str
    center_frequency: float | None = None
    recommended_sigma: float | None = None

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise ValueError(f"unknown signal kind {self.kind!r}")
        if self.kind == "gauss_mod_sine":
            if self.center_frequency is None or not self.center_frequency > 0:
                raise ValueError("gauss_mod_sine needs center_frequency > 0")
        elif self.center_frequency is not None:
            raise ValueError(f"{self.kind} takes no center_frequency")
        if self.recommended_sigma is None:
            object.__setattr__(self, "recommended_sigma", _RECOMMENDED_SIGMA[self.kind])
        elif self.recommended_sigma < 0:
            raise ValueError("recommended_sigma must be >= 0")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform recording grid t_n = n*dt, n = 1..n_steps."""

    dt: float
    n_steps: int

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")

    @property
    def t_start(self) -> float:
        return self.dt

    @property
    def duration(self) -> float:
        return self.n_steps * self.dt

    @property
    def times(self):
        return self.dt * np.arange(1, self.n_steps + 1)


def _sawtooth(x):
    # Period pi/10 sawtooth in [-1/2, 1/2) with a rising zero crossing at 0.
    v = (20.0 * x + np.pi) / (2.0 * np.pi)
    return v - np.floor(v) - 0.5


_GL_NODES = 201
_gl_cache = None


def _sawtooth_kernel():
    # Fixed Gauss-Legendre rule for the smoothing convolution; the Gaussian
    # factor depends only on the scaled node, so it folds into the weights.
    global _gl_cache
    if _gl_cache is None:
        u, w = np.polynomial.legendre.leggauss(_GL_NODES)
        s_g = 1.0 / np.sqrt(6000.0)
        half = 5.0 * s_g
        coeff = np.sqrt(3000.0 / np.pi) * np.exp(-3000.0 * (half * u) ** 2) * (half * w)
        _gl_cache = (half * u, coeff)
    return _gl_cache


def eval_signal(spec: SignalSpec, t):
    """Evaluate the waveform at times t (scalar or array); 0 for t <= 0."""
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    tt = np.atleast_1d(arr)
    if spec.kind == "gauss_mod_sine":
        w0 = spec.center_frequency
        out = np.sin(w0 * tt) * np.exp(-3.0 * (tt - 2.0) ** 2)
    elif spec.kind == "tempered_sine":
        out = tt * tt * np.sin(20.0 * tt)
    else:
        offsets, coeff = _sawtooth_kernel()
        out = _sawtooth(tt[..., None] + offsets) @ coeff
    out = np.where(tt > 0.0, out, 0.0)
    out = out.reshape(arr.shape)
    return float(out[()]) if scalar else out


def default_band(spec: SignalSpec) -> float:
    """Half-width of the default frequency band for this waveform (rad/s)."""
    if spec.kind == "gauss_mod_sine":
        return 4.0 * spec.center_frequency
    return 120.0


def default_xi_grid(band: float, duration: float):
    """Uniform symmetric frequency grid covering [-band, band].

    Spacing is dxi = 2*pi/(4*T); nodes sit at +/-(k + 1/2)*dxi so the grid
    is symmetric about 0 without containing 0 itself (omega = 0 is outside
    the 2-D kernel's domain on the undamped contour).
    """
    if not (band > 0 and duration > 0):
        raise ValueError("band and duration must be positive")
    dxi = 2.0 * np.pi / (4.0 * duration)
    k_max = int(np.floor(band / dxi - 0.5))
    if k_max < 0:
        raise ValueError("band too narrow for the frequency resolution")
    positive = (np.arange(k_max + 1) + 0.5) * dxi
    return np.concatenate([-positive[::-1], positive])


def forward_laplace(values, grid: TimeGrid, sigma: float, xi_grid):
    """Transform sampled values to the contour Im omega = sigma.

    Parameters
    ----------
    values : array, shape (..., n_steps)
        Samples on the grid (value at t = 0 is implicitly zero).
    grid : TimeGrid
    sigma : float, >= 0
    xi_grid : array of strictly increasing real frequencies

    Returns
    -------
    Complex array, shape (..., n_xi): sum_n e^{i(xi+i sigma) t_n} f(t_n) w_n
    with trapezoid weights (the virtual t = 0 node carries f = 0).
    """
    vals = np.asarray(values, dtype=float)
    xi = np.asarray(xi_grid, dtype=float)
    if vals.shape[-1] != grid.n_steps or grid.n_steps == 0:
        raise ValueError("series length must match the time grid")
    if xi.size == 0:
        raise ValueError("empty frequency grid")
    if np.any(np.diff(xi) <= 0):
        raise ValueError("xi_grid must be strictly increasing")
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    t = grid.times
    w = np.full(grid.n_steps, grid.dt)
    w[-1] = 0.5 * grid.dt
    kernel = np.exp(1j * (xi[None, :] + 1j * sigma) * t[:, None]) * w[:, None]  # (N, K)
    return vals @ kernel


def inverse_laplace(values, xi_grid, sigma: float, grid: TimeGrid, return_complex=False):
    """Invert a contour spectrum back to samples on the time grid.

    values has shape (..., n_xi) on the uniform grid xi_grid (rejected if
    non-uniform).  Returns real samples when the spectrum is conjugate
    symmetric (consistent with a real damped signal), complex otherwise;
    return_complex=True skips the symmetry shortcut so the caller can
    inspect the imaginary residue itself.
    """
    vals = np.asarray(values, dtype=complex)
    xi = np.asarray(xi_grid, dtype=float)
    if vals.shape[-1] != xi.size or xi.size == 0:
        raise ValueError("spectrum shape must match the frequency grid")
    if xi.size > 1:
        d = np.diff(xi)
        if np.any(d <= 0) or np.max(np.abs(d - d[0])) > 1e-9 * abs(d[0]):
            raise ValueError("inverse transform needs a uniform xi grid")
        dxi = d[0]
    else:
        dxi = 1.0
    t = grid.times
    w = np.full(xi.size, dxi)
    if xi.size > 1:
        w[0] = w[-1] = 0.5 * dxi
    kernel = np.exp(-1j * (xi[:, None] + 1j * sigma) * t[None, :]) * w[:, None]  # (K, N)
    out = vals @ kernel / (2.0 * np.pi)
    if return_complex:
        return out

    symmetric_nodes = xi.size > 1 and np.max(np.abs(xi + xi[::-1])) <= 1e-9 * np.max(np.abs(xi))
    if symmetric_nodes:
        flipped = np.conj(vals[..., ::-1])
        scale = np.max(np.abs(vals))
        if scale == 0 or np.max(np.abs(vals - flipped)) <= 1e-8 * scale:
            return out.real
    return out
