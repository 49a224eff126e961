"""Time-domain direct sampling indicators and their frequency-domain
counterparts.

The time path shifts each trace by the receiver-to-sampling-point travel
time, weights it with the damped test function, and accumulates the
squared receiver sum over the recording window.  The frequency path
evaluates the same functional from the contour spectrum; the two agree
to within the transform truncation error.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .forward import Spectrum, TimeSeries
from .scene import MeasurementSetup, SamplingGrid
from .specfun import fundamental_from_distance


@dataclass(frozen=True)
class ImagingConfig:
    """Indicator parameters: contour damping, time window, dimension, and
    background speed (needed for travel times and kernel amplitudes)."""

    sigma: float
    terminal_time: float
    dim: int
    c0: float
    interpolation: str = "linear"

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if not self.terminal_time > 0:
            raise ValueError("terminal_time must be positive")
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if not self.c0 > 0:
            raise ValueError("c0 must be positive")
        if self.interpolation != "linear":
            raise ValueError("only linear interpolation is supported")


@dataclass(frozen=True)
class ImagingGrid:
    """Indicator values over a SamplingGrid, in grid point order."""

    grid: SamplingGrid
    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.grid.n_points,):
            raise ValueError("values must match the grid point count")
        if np.any(vals < 0):
            raise ValueError("indicator values must be >= 0")
        if self.normalized and (vals.max() != 1.0 or np.any(vals > 1.0)):
            raise ValueError("normalized grid must have max exactly 1")


def test_function(dim, x, t, z, sigma, c0):
    """Damped test function of the sampling method.

    dim 2: e^{-sigma (t + tau)} / sqrt(8 pi tau), tau = |x-z|/c0;
    dim 3: e^{-sigma (t + tau)} / (4 pi |x-z|).
    """
    xa = np.asarray(x, dtype=float)
    za = np.asarray(z, dtype=float)
    dist = np.sqrt(np.sum((xa - za) ** 2, axis=-1))
    if np.any(dist == 0):
        raise ValueError("test function undefined at x = z")
    tau = dist / c0
    if dim == 2:
        amp = 1.0 / np.sqrt(8.0 * np.pi * tau)
    elif dim == 3:
        amp = 1.0 / (4.0 * np.pi * dist)
    else:
        raise ValueError("dim must be 2 or 3")
    return np.exp(-sigma * (np.asarray(t, float) + tau)) * amp


def shifted_sample(ts: TimeSeries, m, t, source=0):
    """Trace m linearly interpolated at query time t.

    Returns 0 for t <= 0 (causality, with a virtual zero sample at t = 0)
    and for t >= the record length (truncation).
    """
    tq = np.asarray(t, dtype=float)
    scalar = tq.ndim == 0
    tq = np.atleast_1d(tq)
    dt, n = ts.grid.dt, ts.grid.n_steps
    padded = np.concatenate([[0.0], ts.values[source, m], [0.0]])
    pos = tq / dt
    idx = np.clip(np.floor(pos).astype(int), 0, n)
    frac = pos - idx
    val = (1.0 - frac) * padded[idx] + frac * padded[idx + 1]
    val = np.where((tq > 0.0) & (tq < n * dt), val, 0.0)
    return float(val[0]) if scalar else val


def _window_length(grid, terminal_time):
    # Outer time sum runs over t_n <= cfg.terminal_time, capped by the data.
    n = int(np.floor(terminal_time / grid.dt + 1e-9))
    return min(max(n, 1), grid.n_steps)


def _chunk_time_indicator(z_chunk, ts, setup, cfg):
    # Vectorized inner sums for a block of sampling points.  Shapes:
    #   tau (Z, M), query times (Z, M, N), interpolated traces (Z, M, N).
    dt, n_data = ts.grid.dt, ts.grid.n_steps
    n_use = _window_length(ts.grid, cfg.terminal_time)
    t_n = dt * np.arange(1, n_use + 1)
    dist = np.sqrt(np.sum((setup.receivers[None, :, :] - z_chunk[:, None, :]) ** 2, axis=-1))
    if np.any(dist == 0):
        raise ValueError("sampling point coincides with a receiver")
    tau = dist / cfg.c0
    if cfg.dim == 2:
        amp = 1.0 / np.sqrt(8.0 * np.pi * tau)
    else:
        amp = 1.0 / (4.0 * np.pi * dist)
    coef = setup.receiver_weights[None, :] * np.exp(-cfg.sigma * tau) * amp  # (Z, M)

    tq = tau[:, :, None] + t_n[None, None, :]
    pos = tq / dt
    idx = np.clip(np.floor(pos).astype(np.int64), 0, n_data)
    frac = pos - idx
    valid = tq < n_data * dt  # query > 0 always (tau > 0, t_n > 0)

    damp2 = np.exp(-2.0 * cfg.sigma * t_n)
    total = np.zeros(len(z_chunk))
    for s in range(ts.n_sources):
        padded = np.concatenate([np.zeros((ts.n_receivers, 1)), ts.values[s],
                                 np.zeros((ts.n_receivers, 1))], axis=1)
        m_idx = np.arange(ts.n_receivers)[None, :, None]
        traces = (1.0 - frac) * padded[m_idx, idx] + frac * padded[m_idx, idx + 1]
        traces = np.where(valid, traces, 0.0)
        inner = np.einsum("zm,zmn->zn", coef, traces)
        total += setup.source_weights[s] * (dt * np.einsum("n,zn->z", damp2, inner * inner))
    return total


def indicator_point(z, ts: TimeSeries, setup: MeasurementSetup, cfg: ImagingConfig):
    """Time-domain indicator at a single sampling point (source-weighted)."""
    z_arr = np.asarray(z, dtype=float).reshape(1, -1)
    return float(_chunk_time_indicator(z_arr, ts, setup, cfg)[0])


def _sweep(points, worker, n_threads):
    chunks = np.array_split(np.arange(len(points)), max(1, (len(points) + 63) // 64))
    out = np.empty(len(points))
    if n_threads and n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            for sl, res in zip(chunks, pool.map(lambda s: worker(points[s]), chunks)):
                out[sl] = res
    else:
        for sl in chunks:
            out[sl] = worker(points[sl])
    return out


def indicator_grid(grid: SamplingGrid, ts: TimeSeries, setup: MeasurementSetup,
                   cfg: ImagingConfig, n_threads=1):
    """Time-domain indicator swept over a sampling grid."""
    values = _sweep(grid.points(), lambda zc: _chunk_time_indicator(zc, ts, setup, cfg),
                    n_threads)
    return ImagingGrid(grid, values)


def normalize(g: ImagingGrid) -> ImagingGrid:
    """Scale so the maximum is exactly 1."""
    peak = g.values.max() if g.values.size else 0.0
    if peak <= 0.0:
        raise ValueError("cannot normalize an all-zero indicator grid")
    if g.normalized:
        return g
    return ImagingGrid(g.grid, g.values / peak, normalized=True)


def _freq_weights(xi):
    d = np.diff(xi)
    if xi.size < 2 or np.any(d <= 0) or np.max(np.abs(d - d[0])) > 1e-9 * abs(d[0]):
        raise ValueError("indicator_freq needs a uniform increasing xi grid")
    return d[0]


def _chunk_freq_indicator(z_chunk, spectrum, setup, cfg):
    dxi = _freq_weights(spectrum.xi_grid)
    xi = spectrum.xi_grid
    dist = np.sqrt(np.sum((setup.receivers[None, :, :] - z_chunk[:, None, :]) ** 2, axis=-1))
    if np.any(dist == 0):
        raise ValueError("sampling point coincides with a receiver")
    tau = dist / cfg.c0
    if cfg.dim == 2:
        amp = 1.0 / np.sqrt(8.0 * np.pi * tau)
    else:
        amp = 1.0 / (4.0 * np.pi * dist)
    kernel = np.exp(-1j * tau[:, :, None] * xi[None, None, :]) * amp[:, :, None]  # (Z, M, K)
    weighted = setup.receiver_weights[:, None] * spectrum.values  # (S, M, K) via broadcast
    total = np.zeros(len(z_chunk))
    for s in range(spectrum.values.shape[0]):
        inner = np.einsum("mk,zmk->zk", weighted[s], kernel)
        total += setup.source_weights[s] * np.sum(np.abs(inner) ** 2, axis=1) * dxi
    return total / (2.0 * np.pi)


def indicator_freq(z, spectrum: Spectrum, setup: MeasurementSetup, cfg: ImagingConfig):
    """Frequency-domain indicator at one sampling point.

    The spectrum must live on the contour Im omega = cfg.sigma; the kernel
    phase uses only the real frequency (the contour damping of the data
    and of the test function cancel analytically).
    """
    if spectrum.sigma != cfg.sigma:
        raise ValueError("contour mismatch: spectrum sigma differs from imaging sigma")
    z_arr = np.asarray(z, dtype=float).reshape(1, -1)
    return float(_chunk_freq_indicator(z_arr, spectrum, setup, cfg)[0])


def indicator_freq_grid(grid: SamplingGrid, spectrum: Spectrum, setup: MeasurementSetup,
                        cfg: ImagingConfig, n_threads=1):
    """Frequency-domain indicator swept over a sampling grid."""
    if spectrum.sigma != cfg.sigma:
        raise ValueError("contour mismatch: spectrum sigma differs from imaging sigma")
    values = _sweep(grid.points(), lambda zc: _chunk_freq_indicator(zc, spectrum, setup, cfg),
                    n_threads)
    return ImagingGrid(grid, values)


def classic_dsm(z, slice_values, xi, setup: MeasurementSetup, dim, c0):
    """Single-frequency sampling indicator |sum_m w_m p-hat_m conj(Phi(x_m, z))|."""
    if xi == 0.0:
        raise ValueError("classic sampling indicator needs xi != 0")
    z_arr = np.asarray(z, dtype=float)
    vals = np.asarray(slice_values, dtype=complex)
    dist = np.sqrt(np.sum((setup.receivers - z_arr[None, :]) ** 2, axis=-1))
    if np.any(dist == 0):
        raise ValueError("sampling point coincides with a receiver")
    phi = fundamental_from_distance(dim, dist, complex(xi), c0)
    return float(np.abs(np.sum(setup.receiver_weights * vals * np.conj(phi))))


def save_grid_csv(path, g: ImagingGrid):
    """Point-per-row CSV in grid order, 17 significant digits."""
    pts = g.grid.points()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join("xyz"[: g.grid.dim]) + ",value\n")
        for p, v in zip(pts, g.values):
            fh.write(",".join(f"{c:.17g}" for c in p) + f",{v:.17g}\n")


def save_grid_meta(path, g: ImagingGrid, config_echo=None, extra=None):
    pts = g.grid.points()
    arg = int(np.argmax(g.values))
    meta = {
        "normalized": g.normalized,
        "min": float(g.values.min()),
        "max": float(g.values.max()),
        "argmax": [float(c) for c in pts[arg]],
        "n_per_axis": g.grid.n_per_axis,
        "box": [[lo, hi] for lo, hi in g.grid.box],
    }
    if config_echo is not None:
        meta["config"] = config_echo
    if extra:
        meta.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return meta


def save_grid_pgm(path, g: ImagingGrid):
    """8-bit P5 heatmap; row 0 is the maximum-y row (image convention)."""
    if g.grid.dim != 2:
        raise ValueError("PGM export is 2-D only")
    peak = g.values.max()
    scaled = g.values / peak if (not g.normalized and peak > 0) else g.values
    n = g.grid.n_per_axis
    img = np.rint(255.0 * scaled.reshape(n, n)[::-1, :]).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{n} {n}\n255\n".encode("ascii"))
        fh.write(img.tobytes())
