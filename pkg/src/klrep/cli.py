"""Command-line runners for the DNA and image experiments and the check suite.

    klrep dna-timeseries  [--config fig2.yaml] [--out DIR] [--set alpha=0.02 ...]
    klrep dna-landscape   [--config fig3.yaml] [--grid-size 101]
    klrep image-replicate [--config fig1.yaml] [--mode both]
    klrep verify          [--seed 0] [--trials 1000]

Configs are YAML mappings whose keys mirror the dataclasses below; unknown
keys are an error. ``--set KEY=VALUE`` and the dedicated flags override the
file. Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import checks, dna_model, image_model
from . import io as kio
from .kl_potential import cumulative_production, to_physical_units

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class DnaTimeseriesConfig:
    preset: str = "fig2"
    params: dict = field(default_factory=dict)
    p0: tuple[float, ...] = dna_model.FIG2_P0
    steps: int = 50
    temperature: float = 300.0
    base: str = "nats"
    out: str = "results/dna-timeseries"


@dataclass
class DnaLandscapeConfig:
    preset: str = "fig3"
    params: dict = field(default_factory=dict)
    weights: tuple[float, float] = (0.5, 0.5)
    grid_size: int = 101
    heatmap: bool = True
    out: str = "results/dna-landscape"


@dataclass
class ImageRunConfig:
    width: int = 256
    height: int = 256
    sigma: float = 1.5
    steps: int = 50
    blocks: tuple[int, int] = (4, 4)
    p_even: float = 0.8
    p_odd: float = 0.2
    seed: int = 7
    mode: str = "both"  # ergodic, blockwise or both
    snapshots: tuple[int, ...] = (0, 10, 20, 30, 40, 50)
    truncate: float = 4.0
    base: str = "bits"
    out: str = "results/image-replicate"


@dataclass
class VerifyConfig:
    seed: int = 0
    trials: int = 1000
    out: str | None = None


CONFIGS = {
    "dna-timeseries": DnaTimeseriesConfig,
    "dna-landscape": DnaLandscapeConfig,
    "image-replicate": ImageRunConfig,
    "verify": VerifyConfig,
}

_DNA_FIELDS = set(dna_model.DnaParams.field_names())


def _parse_set(items: list[str]) -> dict:
    out: dict = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, raw = item.split("=", 1)
        value = yaml.safe_load(raw)
        node = out
        parts = key.strip().split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return out


def load_config(experiment: str, path: str | None = None, overrides: dict | None = None):
    """Build the run config: dataclass defaults < YAML file < overrides."""
    cls = CONFIGS[experiment]
    data: dict = {}
    if path is not None:
        try:
            loaded = yaml.safe_load(Path(path).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"config {path} must be a mapping")
        named = loaded.pop("experiment", experiment)
        if named != experiment:
            raise ConfigError(f"config {path} is for {named!r}, not {experiment!r}")
        data.update(loaded)
    for key, value in (overrides or {}).items():
        if key in _DNA_FIELDS and "params" in {f.name for f in dataclasses.fields(cls)}:
            data.setdefault("params", {})[key] = value
        elif key == "params" and isinstance(value, dict):
            data.setdefault("params", {}).update(value)
        else:
            data[key] = value
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) for {experiment}: {', '.join(unknown)}")
    bad = sorted(set(data.get("params", {})) - _DNA_FIELDS)
    if bad:
        raise ConfigError(f"unknown DNA parameter(s): {', '.join(bad)}")
    cfg = cls(**data)
    if getattr(cfg, "base", "nats") not in ("nats", "bits"):
        raise ConfigError(f"base must be 'nats' or 'bits', got {cfg.base!r}")
    return cfg


def _dna_params(preset: str, params: dict) -> dna_model.DnaParams:
    if preset not in dna_model.PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(dna_model.PRESETS)}")
    return dna_model.PRESETS[preset].with_updates(**params)


def run_dna_timeseries(cfg: DnaTimeseriesConfig) -> int:
    params = _dna_params(cfg.preset, cfg.params)
    rec = dna_model.simulate_timeseries(params, cfg.p0, int(cfg.steps), cfg.base)
    out = Path(cfg.out)
    kio.write_dna_trace(rec, out / "dna_timeseries.csv")
    rows = []
    for n, (e_at, e_gc) in enumerate(rec.error_rates):
        w = rec.masses[n]
        chan = dna_model.CoarseChannel(e_at, e_gc, (float(w[0]), float(w[1])))
        rows.append((n, e_at, e_gc, dna_model.coarse_mutual_information(chan)))
    kio.write_coarse_channel(rows, out / "dna_coarse_channel.csv")

    pi1, pi2 = rec.meta["pi1"], rec.meta["pi2"]
    total = cumulative_production(rec)
    total_nats = total * (math.log(2.0) if cfg.base == "bits" else 1.0)
    print(f"effective rates: {' '.join(f'{r:.6g}' for r in rec.meta['effective_rates'])}")
    print(f"pi1* = ({pi1[0]:.4f}, {pi1[1]:.4f})  pi2* = ({pi2[0]:.4f}, {pi2[1]:.4f})")
    print(f"V(p_0) = {rec.V[0]:.10g} {cfg.base}  V(p_{rec.steps}) = {rec.V[-1]:.10g} {cfg.base}")
    print(f"cumulative S = {total:.10g} {cfg.base}"
          f" = {to_physical_units(total_nats, cfg.temperature):.6e} J at {cfg.temperature:g} K")
    print(f"trace written to {out / 'dna_timeseries.csv'}")
    return EXIT_OK


def run_dna_landscape(cfg: DnaLandscapeConfig) -> int:
    params = _dna_params(cfg.preset, cfg.params)
    grid = dna_model.potential_landscape(params, tuple(cfg.weights), int(cfg.grid_size))
    out = Path(cfg.out)
    kio.write_landscape(grid, out / "dna_landscape.csv")
    if cfg.heatmap:
        gray, vmax = kio.to_gray(grid.values)
        # row 0 of the image is the top, so flip to put y = 0 at the bottom
        kio.write_pgm(out / "dna_landscape.pgm", np.flipud(gray))
        (out / "dna_landscape_scale.txt").write_text(f"max_V_nats {kio.fmt(vmax)}\n")
    print(f"minimum (x*, y*) = ({grid.x_star:.6f}, {grid.y_star:.6f})")
    if grid.grid_size >= 5:
        try:
            cx, cy = dna_model.curvature_coefficients(grid)
            print(f"curvature coefficients: x {cx:.4f}  y {cy:.4f} nats")
        except ValueError:
            pass
    print(f"grid written to {out / 'dna_landscape.csv'}")
    return EXIT_OK


def run_image_replicate(cfg: ImageRunConfig) -> int:
    modes = ("ergodic", "blockwise") if cfg.mode == "both" else (cfg.mode,)
    out = Path(cfg.out)
    fields_ = {f.name for f in dataclasses.fields(image_model.ImageConfig)}
    kw = {k: v for k, v in dataclasses.asdict(cfg).items() if k in fields_ and k != "mode"}
    for mode in modes:
        icfg = image_model.ImageConfig(mode=mode, **kw)
        run = image_model.simulate_image(icfg)
        rec = run.record.converted(cfg.base)
        kio.write_image_trace(rec, out / f"image_{mode}.csv")
        kio.write_tile_masses(rec, out / f"image_{mode}_tiles.csv")
        lines = []
        for n in sorted(run.snapshots):
            gray, vmax = kio.to_gray(run.snapshots[n])
            kio.write_pgm(out / "snapshots" / f"{mode}_n{n:03d}.pgm", gray)
            lines.append(f"{n} {kio.fmt(vmax)}\n")
        (out / f"image_{mode}_scale.txt").write_text("".join(lines))
        drift = np.abs(np.array(rec.masses) - rec.masses[0]).max()
        print(f"[{mode}] V: {rec.V[0]:.6g} -> {rec.V[-1]:.6g} {cfg.base}; max tile-mass drift {drift:.3e}")
    print(f"outputs written to {out}")
    return EXIT_OK


def run_verify(cfg: VerifyConfig, leak: float = 0.0) -> int:
    results = checks.run_checks(int(cfg.seed), int(cfg.trials), leak)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{status}  {r.name:<{width}}  max_violation={r.max_violation:.3e}  tol={r.tol:.0e}"
        print(line + (f"  ({r.detail})" if r.detail else ""))
    ok = all(r.passed for r in results)
    if cfg.out:
        rows = [(r.name, r.max_violation, r.tol, int(r.passed)) for r in results]
        path = Path(cfg.out) / "verify_report.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="ascii") as fh:
            fh.write("check,max_violation,tol,passed\n")
            for name, v, t, p in rows:
                fh.write(f"{name},{kio.fmt(v)},{kio.fmt(t)},{p}\n")
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="generator seed (image init, verify)")
    common.add_argument("--base", choices=("nats", "bits"), help="log base of reported metrics")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key; DNA rates may be given bare (alpha=0.02)")

    ap = argparse.ArgumentParser(prog="klrep", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dna-timeseries", parents=[common], help="DNA time series")
    p.add_argument("--steps", type=int)
    p.add_argument("--preset", choices=sorted(dna_model.PRESETS))

    p = sub.add_parser("dna-landscape", parents=[common], help="potential landscape on [0,1]^2")
    p.add_argument("--grid-size", type=int, dest="grid_size")
    p.add_argument("--preset", choices=sorted(dna_model.PRESETS))
    p.add_argument("--no-heatmap", action="store_false", dest="heatmap", default=None)

    p = sub.add_parser("image-replicate", parents=[common], help="Gaussian image copying")
    p.add_argument("--mode", choices=("ergodic", "blockwise", "both"))
    p.add_argument("--sigma", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--blocks", type=int, nargs=2, metavar=("BX", "BY"))

    p = sub.add_parser("verify", parents=[common], help="run the invariant checks")
    p.add_argument("--trials", type=int)
    p.add_argument("--inject-leak", type=float, default=0.0, dest="inject_leak",
                   help=argparse.SUPPRESS)
    return ap


_FLAG_KEYS = ("out", "seed", "base", "steps", "preset", "grid_size", "heatmap",
              "mode", "sigma", "blocks", "trials")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = _parse_set(args.set)
        for key in _FLAG_KEYS:
            value = getattr(args, key, None)
            if value is None:
                continue
            if key in ("seed", "base") and args.command in ("dna-timeseries", "dna-landscape"):
                if key == "base" and args.command == "dna-timeseries":
                    overrides[key] = value
                continue
            if key == "base" and args.command == "verify":
                continue
            overrides[key] = value
        cfg = load_config(args.command, args.config, overrides)
        if args.command == "dna-timeseries":
            return run_dna_timeseries(cfg)
        if args.command == "dna-landscape":
            return run_dna_landscape(cfg)
        if args.command == "image-replicate":
            return run_image_replicate(cfg)
        return run_verify(cfg, args.inject_leak)
    except (ValueError, TypeError) as exc:
        print(f"klrep: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
