"""Scatterer configurations, measurement geometry, sampling grids, and
config-file ingestion.

All objects are immutable after construction and validated eagerly; the
JSON loader reports the offending key path in every error message.
"""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np


class ConfigError(ValueError):
    """Configuration document violates the schema or an invariant."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class PointScatterer:
    """Weighted point scatterer: center, interior speed, and measure.

    measure is the area (2-D) or volume (3-D) of the small domain the
    point stands for; bounding_radius pads geometry validation for the
    original extended shape.
    """

    center: tuple
    interior_speed: float
    measure: float
    bounding_radius: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not all(np.isfinite(self.center)):
            raise ValueError("scatterer center must be finite")
        if not self.interior_speed > 0:
            raise ValueError("interior_speed must be positive")
        if not self.measure > 0:
            raise ValueError("measure must be positive")
        if self.bounding_radius < 0:
            raise ValueError("bounding_radius must be >= 0")


def scatterer_weight(s: PointScatterer, c0: float) -> float:
    """Reflectivity weight (c_j^-2 - c0^-2) * measure."""
    return (s.interior_speed ** -2 - c0 ** -2) * s.measure


@dataclass(frozen=True)
class Scene:
    """Background medium plus point scatterers."""

    dim: int
    background_speed: float
    scatterers: tuple

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if not self.background_speed > 0:
            raise ValueError("background_speed must be positive")
        object.__setattr__(self, "scatterers", tuple(self.scatterers))
        for s in self.scatterers:
            if len(s.center) != self.dim:
                raise ValueError("scatterer center dimension mismatch")
        c = self.centers()
        if len(self.scatterers) >= 2:
            d2 = np.sum((c[:, None, :] - c[None, :, :]) ** 2, axis=-1)
            iu = np.triu_indices(len(self.scatterers), k=1)
            if np.min(d2[iu]) == 0.0:
                raise ValueError("scatterer centers must be pairwise distinct")
        if any(scatterer_weight(s, self.background_speed) == 0.0 for s in self.scatterers):
            warnings.warn("scatterer with interior speed equal to background is invisible")

    def centers(self):
        if not self.scatterers:
            return np.zeros((0, self.dim))
        return np.array([s.center for s in self.scatterers])

    def weights(self):
        return np.array([scatterer_weight(s, self.background_speed) for s in self.scatterers])

    def separation(self):
        """Min pairwise center distance; None when fewer than 2 scatterers."""
        if len(self.scatterers) < 2:
            return None
        c = self.centers()
        d2 = np.sum((c[:, None, :] - c[None, :, :]) ** 2, axis=-1)
        iu = np.triu_indices(len(self.scatterers), k=1)
        return float(np.sqrt(np.min(d2[iu])))


@dataclass(frozen=True)
class MeasurementSetup:
    """Receiver and source layout with arc-length quadrature weights.

    source_weights default to 1 per source (free-coordinate sources carry
    unit measure); the multi-source indicator is invariant under a common
    rescaling once normalized.
    """

    receivers: np.ndarray
    receiver_weights: np.ndarray
    sources: np.ndarray
    source_weights: np.ndarray = None
    geometry_tag: str = "custom"
    geometry_params: dict = field(default_factory=dict)

    def __post_init__(self):
        rec = np.atleast_2d(np.asarray(self.receivers, dtype=float))
        w = np.asarray(self.receiver_weights, dtype=float)
        src = np.atleast_2d(np.asarray(self.sources, dtype=float))
        sw = self.source_weights
        sw = np.ones(len(src)) if sw is None else np.asarray(sw, dtype=float)
        object.__setattr__(self, "receivers", rec)
        object.__setattr__(self, "receiver_weights", w)
        object.__setattr__(self, "sources", src)
        object.__setattr__(self, "source_weights", sw)
        if rec.ndim != 2 or w.shape != (rec.shape[0],):
            raise ValueError("receiver weights must match receivers")
        if src.ndim != 2 or sw.shape != (src.shape[0],):
            raise ValueError("source weights must match sources")
        if src.shape[1] != rec.shape[1]:
            raise ValueError("sources and receivers must share a dimension")
        if np.any(w <= 0) or np.any(sw <= 0):
            raise ValueError("quadrature weights must be positive")
        if not (np.all(np.isfinite(rec)) and np.all(np.isfinite(src))):
            raise ValueError("positions must be finite")

    @property
    def n_receivers(self):
        return self.receivers.shape[0]

    @property
    def n_sources(self):
        return self.sources.shape[0]

    def restrict_sources(self, count):
        """Setup with only the first `count` sources (multi-source sweeps)."""
        if not 1 <= count <= self.n_sources:
            raise ValueError("source count out of range")
        return MeasurementSetup(self.receivers, self.receiver_weights,
                                self.sources[:count], self.source_weights[:count],
                                self.geometry_tag, dict(self.geometry_params))


def circle_receivers(n, radius, center=(0.0, 0.0)):
    """n points at angles 2*pi*k/n counterclockwise from 0, weight 2*pi*r/n."""
    if n < 1:
        raise ValueError("need at least one receiver")
    if not radius > 0:
        raise ValueError("radius must be positive")
    th = 2.0 * np.pi * np.arange(n) / n
    pts = np.stack([center[0] + radius * np.cos(th), center[1] + radius * np.sin(th)], axis=1)
    return pts, np.full(n, 2.0 * np.pi * radius / n)


def arc_receivers(n, radius, theta_min, theta_max, center=(0.0, 0.0)):
    """n points on the arc, equispaced from theta_min (left endpoints),
    weight r*(theta_max-theta_min)/n; the full aperture (0, 2*pi) matches
    circle_receivers exactly."""
    if n < 1:
        raise ValueError("need at least one receiver")
    if not radius > 0:
        raise ValueError("radius must be positive")
    if not theta_max > theta_min:
        raise ValueError("degenerate aperture")
    th = theta_min + (theta_max - theta_min) * np.arange(n) / n
    pts = np.stack([center[0] + radius * np.cos(th), center[1] + radius * np.sin(th)], axis=1)
    return pts, np.full(n, radius * (theta_max - theta_min) / n)


def square_receivers(n, side, center=(0.0, 0.0)):
    """n points on the square boundary by the perimeter midpoint rule.

    Arc length is measured counterclockwise from the corner
    (-side/2, -side/2); point k sits at s_k = (k + 1/2) * perimeter / n,
    so no point lands on a corner and n = 4 gives the four edge midpoints.
    """
    if n < 1 or n % 4 != 0:
        raise ValueError("receiver count must be a positive multiple of 4")
    if not side > 0:
        raise ValueError("side must be positive")
    h = 0.5 * side
    s = (np.arange(n) + 0.5) * (4.0 * side / n)
    edge = np.floor_divide(s, side).astype(int)
    u = s - edge * side
    x = np.choose(edge, [-h + u, np.full(n, h), h - u, np.full(n, -h)])
    y = np.choose(edge, [np.full(n, -h), -h + u, np.full(n, h), h - u])
    pts = np.stack([center[0] + x, center[1] + y], axis=1)
    return pts, np.full(n, 4.0 * side / n)


def kite_curve(theta):
    """Kite-shaped boundary curve."""
    th = np.asarray(theta, dtype=float)
    return np.stack([np.cos(th) + 0.65 * np.cos(2.0 * th) - 0.65, 1.5 * np.sin(th)], axis=-1)


def pear_curve(theta):
    """Pear-shaped boundary curve."""
    th = np.asarray(theta, dtype=float)
    rho = 1.6 + 0.24 * np.cos(3.0 * th)
    return np.stack([rho * np.cos(th), rho * np.sin(th)], axis=-1)


def curve_polygon(curve_fn, n=4096):
    """Closed polygon approximation of a parametric curve on [0, 2*pi)."""
    return curve_fn(2.0 * np.pi * np.arange(n) / n)


def polygon_area(vertices):
    """Shoelace area of a simple closed polygon (positive for CCW order)."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def points_in_polygon(points, vertices):
    """Even-odd ray-crossing test, vectorized over points."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    v = np.asarray(vertices, dtype=float)
    a, b = v, np.roll(v, -1, axis=0)
    px = p[:, 0][:, None]
    py = p[:, 1][:, None]
    cond = (a[None, :, 1] > py) != (b[None, :, 1] > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = a[None, :, 0] + (py - a[None, :, 1]) / (b[None, :, 1] - a[None, :, 1]) * (
            b[None, :, 0] - a[None, :, 0])
    hits = cond & (px < x_cross)
    return np.sum(hits, axis=1) % 2 == 1


def curve_cloud(curve_fn, n_points, interior_speed):
    """Represent an extended scatterer by n boundary points, each carrying
    an equal share of the enclosed area as its measure."""
    if n_points < 3:
        raise ValueError("need at least 3 boundary points")
    area = abs(polygon_area(curve_polygon(curve_fn)))
    pts = curve_fn(2.0 * np.pi * np.arange(n_points) / n_points)
    return [PointScatterer(tuple(p), interior_speed, area / n_points) for p in pts]


def _convex_hull(points):
    # Andrew monotone chain; returns CCW hull vertices (may be 1 or 2 points).
    pts = sorted({(float(x), float(y)) for x, y in points})
    if len(pts) <= 2:
        return np.array(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _dist_to_hull(p, hull):
    # Distance from p to the convex region (0 when inside).
    if len(hull) == 1:
        return float(np.hypot(*(p - hull[0])))
    a = hull
    b = np.roll(hull, -1, axis=0)
    ab = b - a
    t = np.clip(np.sum((p - a) * ab, axis=1) / np.maximum(np.sum(ab * ab, axis=1), 1e-300), 0, 1)
    proj = a + t[:, None] * ab
    edge_dist = np.min(np.sqrt(np.sum((p - proj) ** 2, axis=1)))
    if len(hull) >= 3:
        inside = np.all(ab[:, 0] * (p[1] - a[:, 1]) - ab[:, 1] * (p[0] - a[:, 0]) >= 0)
        if inside:
            return 0.0
    return float(edge_dist)


def validate_setup_against_scene(setup: MeasurementSetup, scene: Scene):
    """Receivers and sources must lie strictly outside the convex hull of
    scatterer centers padded by their bounding radii."""
    if not scene.scatterers:
        return
    centers = scene.centers()
    pad = max(s.bounding_radius for s in scene.scatterers)
    probes = np.vstack([setup.receivers, setup.sources])
    if scene.dim == 3:
        # No hulls in 3-D; per-scatterer clearance only.
        for s in scene.scatterers:
            d = np.sqrt(np.sum((probes - np.array(s.center)) ** 2, axis=1))
            if np.any(d <= s.bounding_radius):
                raise ValueError("receiver or source inside a scatterer")
        return
    hull = _convex_hull(centers)
    for p in probes:
        if _dist_to_hull(p, hull) <= pad:
            raise ValueError("receiver or source inside the padded scatterer hull")


@dataclass(frozen=True)
class SamplingGrid:
    """Uniform lattice over an axis-aligned box, grid edges on the box
    boundary (spacing = side/(n-1)).

    Point enumeration is row-major with the first coordinate fastest:
    index = (... * n + iy) * n + ix, i.e. 2-D rows are constant-y lines
    with y ascending.
    """

    box: tuple
    n_per_axis: int

    def __post_init__(self):
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        object.__setattr__(self, "box", box)
        if self.n_per_axis < 2:
            raise ValueError("need at least 2 points per axis")
        for lo, hi in box:
            if not hi > lo:
                raise ValueError("degenerate box")
        if len(box) not in (2, 3):
            raise ValueError("box must be 2-D or 3-D")

    @property
    def dim(self):
        return len(self.box)

    def axes(self):
        return [np.linspace(lo, hi, self.n_per_axis) for lo, hi in self.box]

    def points(self):
        axes = self.axes()
        mesh = np.meshgrid(*axes, indexing="ij")
        # Reverse so the first coordinate varies fastest in the flat order.
        stacked = np.stack([m.transpose(*reversed(range(self.dim))) for m in mesh], axis=-1)
        return stacked.reshape(-1, self.dim)

    @property
    def n_points(self):
        return self.n_per_axis ** self.dim

    def contains(self, pts):
        p = np.atleast_2d(pts)
        ok = np.ones(len(p), dtype=bool)
        for axis, (lo, hi) in enumerate(self.box):
            ok &= (p[:, axis] >= lo) & (p[:, axis] <= hi)
        return ok


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs, parsed and validated from one document."""

    scene: Scene
    setup: MeasurementSetup
    grid: SamplingGrid
    signal: object
    time_grid: object
    sigma: float
    noise_delta: float | None
    noise_seed: int | None
    output_dir: str
    source_counts: tuple | None
    sigma_sweep: tuple | None
    raw: dict


def _need(doc, key, path):
    if not isinstance(doc, dict) or key not in doc:
        raise ConfigError(f"{path}.{key}", "missing required key")
    return doc[key]


def _number(value, path, positive=False, nonnegative=False):
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not np.isfinite(value):
        raise ConfigError(path, "expected a finite number")
    if positive and not value > 0:
        raise ConfigError(path, "must be positive")
    if nonnegative and value < 0:
        raise ConfigError(path, "must be >= 0")
    return float(value)


def _point(value, dim, path):
    if not isinstance(value, (list, tuple)) or len(value) != dim:
        raise ConfigError(path, f"expected a point with {dim} coordinates")
    return tuple(_number(v, f"{path}[{i}]", ) for i, v in enumerate(value))


_EXTENDED_SHAPES = {"kite": kite_curve, "pear": pear_curve}


def _build_scatterers(entries, dim, path):
    out = []
    for i, entry in enumerate(entries):
        p = f"{path}[{i}]"
        shape = _need(entry, "shape", p)
        kind = _need(shape, "kind", f"{p}.shape")
        speed = _number(_need(entry, "speed", p), f"{p}.speed", positive=True)
        if kind in _EXTENDED_SHAPES:
            if dim != 2:
                raise ConfigError(f"{p}.shape.kind", "extended shapes are 2-D only")
            n_pts = int(shape.get("n_points", 64))
            cloud = curve_cloud(_EXTENDED_SHAPES[kind], n_pts, speed)
            offset = np.array(_point(entry.get("center", [0.0] * dim), dim, f"{p}.center"))
            out.extend(PointScatterer(tuple(np.array(s.center) + offset), speed, s.measure)
                       for s in cloud)
            continue
        center = _point(_need(entry, "center", p), dim, f"{p}.center")
        if kind == "disk" or kind == "ball":
            r = _number(_need(shape, "radius", f"{p}.shape"), f"{p}.shape.radius", positive=True)
            measure = np.pi * r * r if kind == "disk" else 4.0 / 3.0 * np.pi * r ** 3
            out.append(PointScatterer(center, speed, measure, bounding_radius=r))
        elif kind == "square":
            side = _number(_need(shape, "side", f"{p}.shape"), f"{p}.shape.side", positive=True)
            out.append(PointScatterer(center, speed, side * side,
                                      bounding_radius=side * np.sqrt(2.0) / 2.0))
        elif kind == "ellipse":
            ax = _need(shape, "semi_axes", f"{p}.shape")
            a, b = (_number(v, f"{p}.shape.semi_axes[{i}]", positive=True)
                    for i, v in enumerate(ax))
            out.append(PointScatterer(center, speed, np.pi * a * b, bounding_radius=max(a, b)))
        elif kind == "point":
            m = _number(_need(shape, "measure", f"{p}.shape"), f"{p}.shape.measure", positive=True)
            out.append(PointScatterer(center, speed, m))
        else:
            raise ConfigError(f"{p}.shape.kind", f"unknown shape kind {kind!r}")
    return out


def _build_geometry(meas, dim, path):
    tag = _need(meas, "geometry_tag", path)
    params = meas.get("params", {})
    n = _need(meas, "n_receivers", path)
    if not isinstance(n, int) or n < 1:
        raise ConfigError(f"{path}.n_receivers", "expected a positive integer")
    if dim != 2:
        raise ConfigError(f"{path}.geometry_tag", "receiver geometries are 2-D")
    if tag == "circle":
        r = _number(_need(params, "radius", f"{path}.params"), f"{path}.params.radius", positive=True)
        pts, w = circle_receivers(n, r)
    elif tag == "arc":
        r = _number(_need(params, "radius", f"{path}.params"), f"{path}.params.radius", positive=True)
        tmin = _number(_need(params, "theta_min", f"{path}.params"), f"{path}.params.theta_min")
        tmax = _number(_need(params, "theta_max", f"{path}.params"), f"{path}.params.theta_max")
        if not tmax > tmin:
            raise ConfigError(f"{path}.params", "degenerate aperture")
        pts, w = arc_receivers(n, r, tmin, tmax)
    elif tag == "square":
        side = _number(_need(params, "side", f"{path}.params"), f"{path}.params.side", positive=True)
        if n % 4 != 0:
            raise ConfigError(f"{path}.n_receivers", "square geometry needs n divisible by 4")
        pts, w = square_receivers(n, side)
    else:
        raise ConfigError(f"{path}.geometry_tag", f"unknown geometry {tag!r}")
    return tag, dict(params), pts, w


def load_scene(source):
    """Parse and validate a configuration document (path or dict).

    Returns a RunConfig; every invariant is checked here so downstream
    code can assume consistency.
    """
    from .signals import SignalSpec, TimeGrid  # local import avoids a cycle at module load

    if isinstance(source, (str, bytes)):
        with open(source, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as e:
                raise ConfigError(str(source), f"invalid JSON ({e})") from e
    else:
        doc = source
    if not isinstance(doc, dict):
        raise ConfigError("$", "top level must be an object")

    sc = _need(doc, "scene", "$")
    dim = _need(sc, "dim", "$.scene")
    if dim not in (2, 3):
        raise ConfigError("$.scene.dim", "dim must be 2 or 3")
    c0 = _number(_need(sc, "c0", "$.scene"), "$.scene.c0", positive=True)
    entries = _need(sc, "scatterers", "$.scene")
    if not isinstance(entries, list):
        raise ConfigError("$.scene.scatterers", "expected a list")
    try:
        scatterers = _build_scatterers(entries, dim, "$.scene.scatterers")
        scene = Scene(dim, c0, tuple(scatterers))
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError("$.scene", str(e)) from e

    meas = _need(doc, "measurement", "$")
    tag, params, pts, w = _build_geometry(meas, dim, "$.measurement")
    src_list = _need(meas, "sources", "$.measurement")
    if not isinstance(src_list, list) or not src_list:
        raise ConfigError("$.measurement.sources", "expected a non-empty list of points")
    sources = np.array([_point(s, dim, f"$.measurement.sources[{i}]")
                        for i, s in enumerate(src_list)])
    sw = meas.get("source_weights")
    if sw is not None:
        if not isinstance(sw, list) or len(sw) != len(sources):
            raise ConfigError("$.measurement.source_weights", "length must match sources")
        sw = np.array([_number(v, f"$.measurement.source_weights[{i}]", positive=True)
                       for i, v in enumerate(sw)])
    try:
        setup = MeasurementSetup(pts, w, sources, sw, tag, params)
        validate_setup_against_scene(setup, scene)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError("$.measurement", str(e)) from e

    sig = _need(doc, "signal", "$")
    kind = _need(sig, "kind", "$.signal")
    omega0 = sig.get("omega0")
    if omega0 is not None:
        omega0 = _number(omega0, "$.signal.omega0", positive=True)
    try:
        signal = SignalSpec(kind, omega0, sig.get("recommended_sigma"))
    except ValueError as e:
        raise ConfigError("$.signal", str(e)) from e

    im = _need(doc, "imaging", "$")
    sigma = _number(_need(im, "sigma", "$.imaging"), "$.imaging.sigma", nonnegative=True)
    T = _number(_need(im, "T", "$.imaging"), "$.imaging.T", positive=True)
    dt = _number(_need(im, "dt", "$.imaging"), "$.imaging.dt", positive=True)
    n_steps = int(round(T / dt))
    if abs(n_steps * dt - T) > 1e-9 * T or n_steps < 1:
        raise ConfigError("$.imaging.dt", "T must be an integer number of steps")
    time_grid = TimeGrid(dt, n_steps)
    g = _need(im, "grid", "$.imaging")
    box = _need(g, "box", "$.imaging.grid")
    if not isinstance(box, list) or len(box) != dim:
        raise ConfigError("$.imaging.grid.box", f"expected {dim} axis ranges")
    box_t = []
    for i, rng in enumerate(box):
        if not isinstance(rng, list) or len(rng) != 2:
            raise ConfigError(f"$.imaging.grid.box[{i}]", "expected [lo, hi]")
        lo = _number(rng[0], f"$.imaging.grid.box[{i}][0]")
        hi = _number(rng[1], f"$.imaging.grid.box[{i}][1]")
        if not hi > lo:
            raise ConfigError(f"$.imaging.grid.box[{i}]", "empty range")
        box_t.append((lo, hi))
    n_grid = _need(g, "n", "$.imaging.grid")
    if not isinstance(n_grid, int) or n_grid < 2:
        raise ConfigError("$.imaging.grid.n", "expected an integer >= 2")
    grid = SamplingGrid(tuple(box_t), n_grid)
    if scene.scatterers and not np.all(grid.contains(scene.centers())):
        raise ConfigError("$.scene.scatterers", "scatterer outside the sampling region")

    counts = im.get("source_counts")
    if counts is not None:
        if (not isinstance(counts, list) or not counts
                or any(not isinstance(k, int) or not 1 <= k <= setup.n_sources for k in counts)):
            raise ConfigError("$.imaging.source_counts", "expected source counts within range")
        counts = tuple(counts)
    sweep = im.get("sigma_sweep")
    if sweep is not None:
        if not isinstance(sweep, list) or not sweep:
            raise ConfigError("$.imaging.sigma_sweep", "expected a non-empty list")
        sweep = tuple(_number(s, f"$.imaging.sigma_sweep[{i}]", nonnegative=True)
                      for i, s in enumerate(sweep))

    noise = doc.get("noise")
    delta = seed = None
    if noise is not None:
        delta = _number(_need(noise, "delta", "$.noise"), "$.noise.delta", nonnegative=True)
        seed = _need(noise, "seed", "$.noise")
        if not isinstance(seed, int):
            raise ConfigError("$.noise.seed", "expected an integer")

    out = doc.get("output", {})
    out_dir = out if isinstance(out, str) else out.get("directory", "out")

    return RunConfig(scene, setup, grid, signal, time_grid, sigma, delta, seed,
                     out_dir, counts, sweep, doc)
