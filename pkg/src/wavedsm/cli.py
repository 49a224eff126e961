"""Config-driven command line: synthesis, imaging, verification suites,
and full pipelines with reproducible manifests.

Exit codes: 2 config error, 3 synthesis failure, 4 geometry mismatch
between data and config, 5 verification out of tolerance.
"""

import argparse
import hashlib
import json
import os
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (g3_closed_form, g_integral_numeric, grid_local_maxima,
                       lemma_sweep, theorem_suite)
from .forward import (TimeSeries, add_noise, default_synth_sigma,
                      load_timeseries, save_timeseries, save_timeseries_csv,
                      spectrum_from_timeseries, synthesize_timeseries)
from .imaging import (ImagingConfig, indicator_freq_grid, indicator_grid,
                      normalize, save_grid_csv, save_grid_meta, save_grid_pgm)
from .scene import ConfigError, load_scene
from .signals import default_band, default_xi_grid

EXIT_CONFIG = 2
EXIT_SYNTHESIS = 3
EXIT_GEOMETRY = 4
EXIT_VERIFY = 5

CSV_EXPORT_LIMIT = 100_000


class GeometryMismatch(RuntimeError):
    pass


class VerifyFailure(RuntimeError):
    pass


def _config_hash(raw):
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


class Manifest:
    """Run record: config hash, artifact list, per-stage timings.

    A failing stage leaves its name in `failed_stage` so partial output
    is never mistaken for a complete run.
    """

    def __init__(self, out_dir, config_hash):
        self.out_dir = Path(out_dir)
        self.doc = {
            "tool_version": __version__,
            "config_hash": config_hash,
            "artifacts": [],
            "timings": {},
            "failed_stage": None,
        }

    def add(self, path):
        self.doc["artifacts"].append(os.path.relpath(path, self.out_dir))
        return path

    @contextmanager
    def stage(self, name):
        self.doc["failed_stage"] = name
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.doc["timings"][name] = time.perf_counter() - t0
        self.doc["failed_stage"] = None

    def write(self):
        for rel in self.doc["artifacts"]:
            if not (self.out_dir / rel).exists():
                raise RuntimeError(f"manifest lists missing artifact {rel}")
        path = self.out_dir / "manifest.json"
        _write_json(path, self.doc)
        return path


def _resolve_threads(flag_value):
    if flag_value is None:
        env = os.environ.get("WAVEDSM_THREADS")
        flag_value = int(env) if env else 1
    if flag_value == 0:
        return os.cpu_count() or 1
    if flag_value < 0:
        raise ConfigError("--threads", "must be >= 0")
    return flag_value


def _out_dir(cfg, flag_value):
    out = Path(flag_value) if flag_value else Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _imaging_config(cfg, sigma=None):
    return ImagingConfig(cfg.sigma if sigma is None else sigma,
                         cfg.time_grid.duration, cfg.scene.dim,
                         cfg.scene.background_speed)


def _sidecar_doc(cfg, kind, config_hash):
    return {
        "kind": kind,
        "dim": cfg.scene.dim,
        "geometry_tag": cfg.setup.geometry_tag,
        "geometry_params": cfg.setup.geometry_params,
        "n_receivers": cfg.setup.n_receivers,
        "sources": [[float(c) for c in s] for s in cfg.setup.sources],
        "dt": cfg.time_grid.dt,
        "n_steps": cfg.time_grid.n_steps,
        "config_hash": config_hash,
    }


def _save_dataset(out, stem, ts, cfg, kind, config_hash, manifest):
    path = out / f"{stem}.tdsm"
    save_timeseries(path, ts)
    manifest.add(path)
    meta = Path(str(path) + ".meta.json")
    _write_json(meta, _sidecar_doc(cfg, kind, config_hash))
    manifest.add(meta)
    if cfg.setup.n_receivers * cfg.time_grid.n_steps <= CSV_EXPORT_LIMIT:
        csv = out / f"{stem}.csv"
        save_timeseries_csv(csv, ts)
        manifest.add(csv)
    return path


def _synthesize(cfg, seed_override=None):
    """Clean (and, when configured, noisy) data for one config."""
    ts = synthesize_timeseries(cfg.setup, cfg.scene, cfg.signal, cfg.time_grid,
                               default_synth_sigma(cfg.signal))
    noisy = None
    if cfg.noise_delta is not None:
        seed = cfg.noise_seed if seed_override is None else seed_override
        noisy = add_noise(ts, cfg.noise_delta, seed)
    return ts, noisy


def cmd_simulate(config_path, out_flag, seed_override):
    cfg = load_scene(config_path)
    out = _out_dir(cfg, out_flag)
    h = _config_hash(cfg.raw)
    manifest = Manifest(out, h)
    try:
        with manifest.stage("simulate"):
            if not cfg.scene.scatterers:
                print("warning: no scatterers in scene; dataset is identically zero",
                      file=sys.stderr)
            ts, noisy = _synthesize(cfg, seed_override)
            _save_dataset(out, "data_clean", ts, cfg, "clean", h, manifest)
            if noisy is not None:
                _save_dataset(out, "data_noisy", noisy, cfg, "noisy", h, manifest)
    except ValueError as e:
        print(f"synthesis failed: {e}", file=sys.stderr)
        manifest.write()
        return EXIT_SYNTHESIS
    manifest.write()
    return 0


def _check_geometry(cfg, data_path):
    meta_path = Path(str(data_path) + ".meta.json")
    if not meta_path.exists():
        raise GeometryMismatch(f"{meta_path}: sidecar not found; cannot validate geometry")
    with open(meta_path, "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    expected = _sidecar_doc(cfg, meta.get("kind", ""), meta.get("config_hash", ""))
    for key in ("dim", "geometry_tag", "n_receivers", "sources", "dt", "n_steps"):
        if meta.get(key) != expected[key]:
            raise GeometryMismatch(
                f"{data_path}: sidecar {key} = {meta.get(key)!r} does not match "
                f"config {key} = {expected[key]!r}")
    return meta


def _emit_grid(out, stem, normalized, cfg, manifest, top=8):
    csv = out / f"{stem}.csv"
    save_grid_csv(csv, normalized)
    manifest.add(csv)
    extra = None
    if cfg.scene.dim == 2:
        pgm = out / f"{stem}.pgm"
        save_grid_pgm(pgm, normalized)
        manifest.add(pgm)
        extra = {"local_maxima": [{"point": list(p), "value": v}
                                  for p, v in grid_local_maxima(normalized, top=top)]}
    meta = out / f"{stem}.meta.json"
    save_grid_meta(meta, normalized, config_echo=cfg.raw, extra=extra)
    manifest.add(meta)


def cmd_image(config_path, data_path, out_flag, threads_flag):
    cfg = load_scene(config_path)
    threads = _resolve_threads(threads_flag)
    out = _out_dir(cfg, out_flag)
    manifest = Manifest(out, _config_hash(cfg.raw))
    try:
        with manifest.stage("validate"):
            meta = _check_geometry(cfg, data_path)
        with manifest.stage("image"):
            ts = load_timeseries(data_path, provenance={"kind": meta.get("kind", "unknown")})
            grid = indicator_grid(cfg.grid, ts, cfg.setup, _imaging_config(cfg),
                                  n_threads=threads)
            _emit_grid(out, "grid", normalize(grid), cfg, manifest)
    except GeometryMismatch as e:
        print(f"geometry mismatch: {e}", file=sys.stderr)
        manifest.write()
        return EXIT_GEOMETRY
    except ValueError as e:
        print(f"imaging failed: {e}", file=sys.stderr)
        manifest.write()
        return 1
    manifest.write()
    return 0


def _equivalence_report(cfg, ts, threads):
    icfg = _imaging_config(cfg)
    xi = default_xi_grid(default_band(cfg.signal), cfg.time_grid.duration)
    g_time = indicator_grid(cfg.grid, ts, cfg.setup, icfg, n_threads=threads)
    spectrum = spectrum_from_timeseries(ts, cfg.sigma, xi)
    g_freq = indicator_freq_grid(cfg.grid, spectrum, cfg.setup, icfg, n_threads=threads)
    diff = np.abs(g_time.values - g_freq.values)
    denom = np.abs(g_freq.values)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(denom > 0, diff / denom, np.where(diff > 0, np.inf, 0.0))
    worst = int(np.argmax(rel))
    tol = 0.02
    return {
        "check": "equivalence",
        "tolerance": tol,
        "max_relative_discrepancy": float(rel[worst]),
        "worst_node": [float(c) for c in cfg.grid.points()[worst]],
        "n_nodes": int(rel.size),
        "n_frequencies": int(xi.size),
        "passed": bool(np.all(rel <= tol)),
    }


def _lemma_report():
    radii = (50.0, 200.0, 500.0)
    reports = lemma_sweep(radii=radii, n_tuples=20)
    rows, ok_all = [], True
    coincident_ok = True
    for rep in reports:
        limit = 1.0 + 5.0 / rep.radius
        ok = rep.ratio <= limit
        at_peak = rep.z == rep.y
        if at_peak and rep.radius == 500.0 and abs(rep.ratio - 1.0) > 0.02:
            coincident_ok = False
        ok_all &= ok
        rows.append({
            "dim": rep.dim, "z": list(rep.z), "y": list(rep.y),
            "xi": rep.omega.re, "sigma": rep.omega.im, "radius": rep.radius,
            "numeric_abs": abs(rep.numeric_value), "bound": rep.bound,
            "ratio": rep.ratio, "limit": limit, "coincident": at_peak, "ok": ok,
        })
    return {
        "check": "lemma",
        "radii": list(radii),
        "rows": rows,
        "dominance_ok": bool(ok_all),
        "coincident_within_2pct_at_500": bool(coincident_ok),
        "passed": bool(ok_all and coincident_ok),
    }


def _closed_form_report():
    y = (0.3, -0.2, 0.5)
    radius, n_quad, tol = 500.0, 64, 1e-2
    rows, ok_all = [], True
    for k in (0.0, 0.1, 1.0):
        for xi, sigma in ((2.0, 0.3), (4.0, 0.0)):
            omega = complex(xi, sigma)
            z = tuple((1.0 + k) * c for c in y)
            numeric = g_integral_numeric(3, z, y, omega, radius, n_quad)
            closed = g3_closed_form(k, y, omega, sigma, radius, 1.0)
            err = abs(numeric - closed) / abs(closed)
            ok = err < tol
            ok_all &= ok
            rows.append({"k": k, "xi": xi, "sigma": sigma,
                         "numeric_abs": abs(numeric), "closed_abs": abs(closed),
                         "relative_error": float(err), "ok": ok})
    return {"check": "closed-form", "radius": radius, "n_quad": n_quad,
            "tolerance": tol, "rows": rows, "passed": bool(ok_all)}


def _theorem_report(cfg, ts, threads):
    reports, peaks, band_ratio = theorem_suite(
        cfg.scene, cfg.setup, cfg.signal, cfg.time_grid, _imaging_config(cfg),
        cfg.grid, n_threads=threads, timeseries=ts)
    cell_tol = 2.0
    loc_ok = peaks.complete and all(e.cell_distance <= cell_tol for e in peaks.entries)
    # The global maximum must sit inside one of the scatterer balls; with a
    # normalized grid that is equivalent to the outside-ball maximum being < 1.
    argmax_in_ball = peaks.off_peak_max < 1.0
    mj_ok = all(np.isfinite(r.m_j) and r.m_j > 0 for r in reports)
    # Per-scatterer peak-vs-background only holds when the lowest band
    # frequency is far above 2*c0/L; weak scatterers lose to the strong ones'
    # background at moderate band_ratio, so contrast is reported, not gating.
    contrast = [bool(r.peak_value >= r.off_peak_max) for r in reports]
    return {
        "check": "theorem",
        "cell_tolerance": cell_tol,
        "localization": [{"scatterer": e.scatterer_index,
                          "cell_distance": e.cell_distance,
                          "peak_point": list(e.peak_point),
                          "peak_value": e.peak_value} for e in peaks.entries],
        "off_peak_max": peaks.off_peak_max,
        "separation": peaks.separation,
        "constants": [{"scatterer": r.scatterer_index, "m_j": r.m_j,
                       "peak_value": r.peak_value, "off_peak_max": r.off_peak_max,
                       "contrast": c, "lowest_band_frequency": r.lowest_band_frequency}
                      for r, c in zip(reports, contrast)],
        "band_ratio": band_ratio,
        "passed": bool(loc_ok and argmax_in_ball and mj_ok),
    }


def _run_verify(which, cfg, ts, threads):
    if which == "equivalence":
        return _equivalence_report(cfg, ts, threads)
    if which == "lemma":
        return _lemma_report()
    if which == "closed-form":
        return _closed_form_report()
    if which == "theorem":
        return _theorem_report(cfg, ts, threads)
    raise ValueError(f"unknown verification {which!r}")


def cmd_verify(which, config_path, out_flag, threads_flag):
    cfg = load_scene(config_path)
    threads = _resolve_threads(threads_flag)
    out = _out_dir(cfg, out_flag)
    manifest = Manifest(out, _config_hash(cfg.raw))
    try:
        with manifest.stage(f"verify_{which}"):
            ts = None
            if which in ("equivalence", "theorem"):
                ts, _ = _synthesize(cfg)
            report = _run_verify(which, cfg, ts, threads)
            path = out / f"verify_{which.replace('-', '_')}.json"
            _write_json(path, report)
            manifest.add(path)
            if not report["passed"]:
                raise VerifyFailure(f"{which} verification out of tolerance; see {path}")
    except VerifyFailure as e:
        print(str(e), file=sys.stderr)
        manifest.write()
        return EXIT_VERIFY
    except ValueError as e:
        print(f"verification could not run: {e}", file=sys.stderr)
        manifest.write()
        return EXIT_SYNTHESIS
    manifest.write()
    return 0


def cmd_pipeline(config_path, out_flag, seed_override, threads_flag):
    cfg = load_scene(config_path)
    threads = _resolve_threads(threads_flag)
    out = _out_dir(cfg, out_flag)
    h = _config_hash(cfg.raw)
    manifest = Manifest(out, h)

    def fail(code, msg):
        print(msg, file=sys.stderr)
        manifest.write()
        return code

    try:
        with manifest.stage("simulate"):
            if not cfg.scene.scatterers:
                print("warning: no scatterers in scene; dataset is identically zero",
                      file=sys.stderr)
            ts, noisy = _synthesize(cfg, seed_override)
            _save_dataset(out, "data_clean", ts, cfg, "clean", h, manifest)
            if noisy is not None:
                _save_dataset(out, "data_noisy", noisy, cfg, "noisy", h, manifest)
    except ValueError as e:
        return fail(EXIT_SYNTHESIS, f"synthesis failed: {e}")

    imaged = noisy if noisy is not None else ts
    try:
        with manifest.stage("image"):
            grid = indicator_grid(cfg.grid, imaged, cfg.setup, _imaging_config(cfg),
                                  n_threads=threads)
            _emit_grid(out, "grid", normalize(grid), cfg, manifest)
        if cfg.source_counts:
            with manifest.stage("image_sources"):
                for count in cfg.source_counts:
                    sub_setup = cfg.setup.restrict_sources(count)
                    sub_ts = TimeSeries(imaged.values[:count], imaged.grid,
                                        imaged.dim, imaged.provenance)
                    g = indicator_grid(cfg.grid, sub_ts, sub_setup,
                                       _imaging_config(cfg), n_threads=threads)
                    _emit_grid(out, f"grid_sources{count}", normalize(g), cfg, manifest)
        if cfg.sigma_sweep:
            with manifest.stage("image_sigma"):
                for sigma in cfg.sigma_sweep:
                    g = indicator_grid(cfg.grid, imaged, cfg.setup,
                                       _imaging_config(cfg, sigma=sigma),
                                       n_threads=threads)
                    _emit_grid(out, f"grid_sigma{sigma:g}", normalize(g), cfg, manifest)
    except ValueError as e:
        return fail(1, f"imaging failed: {e}")

    for which in ("equivalence", "lemma", "closed-form", "theorem"):
        try:
            with manifest.stage(f"verify_{which}"):
                report = _run_verify(which, cfg, ts, threads)
                path = out / f"verify_{which.replace('-', '_')}.json"
                _write_json(path, report)
                manifest.add(path)
                if not report["passed"]:
                    raise VerifyFailure(
                        f"{which} verification out of tolerance; see {path}")
        except VerifyFailure as e:
            return fail(EXIT_VERIFY, str(e))
        except ValueError as e:
            return fail(EXIT_SYNTHESIS, f"verification could not run: {e}")

    manifest.write()
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wavedsm",
        description="Time-domain direct sampling: simulate scattered data, "
                    "image scatterers, verify the method's bounds.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=False, seed=False):
        p.add_argument("--config", required=True, help="JSON configuration path")
        p.add_argument("--out", default=None, help="output directory (default: config's)")
        if data:
            p.add_argument("--data", required=True, help="recorded dataset (.tdsm)")
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help="noise seed override")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads; 0 = all cores "
                            "(default: WAVEDSM_THREADS or 1)")

    common(sub.add_parser("simulate", help="synthesize scattered datasets"), seed=True)
    common(sub.add_parser("image", help="compute the indicator over the grid"), data=True)
    v = sub.add_parser("verify", help="run one verification suite")
    v.add_argument("which", choices=["equivalence", "lemma", "closed-form", "theorem"])
    common(v)
    common(sub.add_parser("pipeline", help="simulate, image, verify in sequence"),
           seed=True)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args.config, args.out, args.seed)
        if args.command == "image":
            return cmd_image(args.config, args.data, args.out, args.threads)
        if args.command == "verify":
            return cmd_verify(args.which, args.config, args.out, args.threads)
        return cmd_pipeline(args.config, args.out, args.seed, args.threads)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
