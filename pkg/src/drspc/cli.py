"""Batch command-line front end.

Commands: tables, ber, threshold, sweep, instrument. Every command writes its
CSV artifacts plus a JSON run manifest capturing the fully resolved
configuration, so runs can be reproduced exactly. Config precedence: CLI flags
override config-file values override defaults.

Exit codes: 0 success, 1 configuration error, 2 runtime/search failure.
"""

import dataclasses
import json
import platform
import re
import sys
import time
from pathlib import Path
from types import SimpleNamespace

import click
import yaml

from . import __version__
from .eae import success_table
from .sim import (
    DECODERS,
    ExperimentConfig,
    SearchError,
    estimate_ber,
    grid_search_thresholds,
    instrumented_run,
    noise_threshold,
)

FLOAT_FMT = "%.9g"

_CODE_RE = re.compile(r"^bch(127|255|511)t([2-4])(even)?$")
_NU_BY_N = {127: 7, 255: 8, 511: 9}


class ConfigError(click.ClickException):
    exit_code = 1


def parse_code(name: str):
    """'bch255t2even' -> (nu, t, even_weight)."""
    m = _CODE_RE.match(name.strip().lower())
    if not m:
        raise ConfigError(
            f"bad --code {name!r}: expected bch{{127|255|511}}t{{2|3|4}}[even]")
    return _NU_BY_N[int(m.group(1))], int(m.group(2)), m.group(3) is not None


def parse_grid(spec: str, what: str = "--ebn0"):
    """'start:stop:step' -> inclusive grid (within half-step); 'x' -> [x]."""
    parts = spec.split(":")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"bad {what} {spec!r}: not numeric")
    if len(vals) == 1:
        return vals
    if len(vals) == 2:
        return vals  # interpreted as bounds by threshold-style commands
    if len(vals) != 3:
        raise ConfigError(f"bad {what} {spec!r}: use value, lo:hi, or start:stop:step")
    start, stop, step = vals
    if step <= 0 or stop < start:
        raise ConfigError(f"bad {what} {spec!r}: need stop >= start and step > 0")
    grid = []
    x = start
    while x <= stop + step / 2:
        grid.append(round(x, 12))
        x += step
    return grid


def parse_int_range(spec: str, what: str):
    """'lo:hi' -> list(range(lo, hi + 1)); 'x' -> [x]."""
    try:
        parts = [int(p) for p in spec.split(":")]
    except ValueError:
        raise ConfigError(f"bad {what} {spec!r}: not an integer range")
    if len(parts) == 1:
        return parts
    if len(parts) != 2 or parts[1] < parts[0]:
        raise ConfigError(f"bad {what} {spec!r}: use lo:hi with lo <= hi")
    return list(range(parts[0], parts[1] + 1))


_CONFIG_KEYS = {f.name for f in dataclasses.fields(ExperimentConfig)} | {"code"}


def build_config(config_file, **flags):
    """Merge defaults <- YAML file <- explicitly passed flags."""
    values = {}
    if config_file:
        try:
            loaded = yaml.safe_load(Path(config_file).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config file {config_file}: {exc}")
        if not isinstance(loaded, dict):
            raise ConfigError(f"config file {config_file} must be a mapping")
        for key in loaded:
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r} in {config_file}")
        values.update(loaded)
    values.update({k: v for k, v in flags.items() if v is not None})
    if "code" in values:
        nu, t, even = parse_code(values.pop("code"))
        values.update(nu=nu, t=t, even_weight=even)
    try:
        return ExperimentConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))


def write_csv(path: Path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = []
            for v in row:
                if v is None:
                    cells.append("")
                elif isinstance(v, float):
                    cells.append(FLOAT_FMT % v)
                else:
                    cells.append(str(v))
            fh.write(",".join(cells) + "\n")


def write_manifest(out_dir: Path, command: str, cfg, extra=None, started=None):
    manifest = {
        "command": command,
        "version": __version__,
        "host": platform.node(),
        "wall_clock_s": None if started is None else round(time.time() - started, 3),
    }
    if cfg is not None:
        manifest["config"] = dataclasses.asdict(cfg)
        manifest["master_seed"] = cfg.master_seed
        code = cfg.code()
        manifest["code"] = {
            "name": code.name, "n": code.n, "k": code.k, "t": code.t,
            "d_des": code.d_des, "even_weight": code.even_weight,
        }
        manifest["resolved_erasure_T"] = cfg.resolved_erasure_T
    if extra:
        manifest.update(extra)
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_dir(out):
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


_shared = [
    click.option("--code", default=None, help="component code, e.g. bch255t2even"),
    click.option("--decoder", default=None, type=click.Choice(DECODERS)),
    click.option("--iters", default=None, type=int),
    click.option("--erasure-T", "erasure_T", default=None, type=float),
    click.option("--anchor-Ta", "anchor_T0", default=None, type=int),
    click.option("--anchor-Ta-star", "anchor_T_star", default=None, type=int),
    click.option("--drs-levels", "drs_levels", default=None, type=int),
    click.option("--drs-init-range", "drs_init_range", default=None,
                 help="initial score range lo:hi"),
    click.option("--deterministic-fill", "deterministic_fill",
                 default=None, is_flag=True, flag_value=True),
    click.option("--seed", "master_seed", default=None, type=int),
    click.option("--min-block-errors", "min_block_errors", default=None, type=int),
    click.option("--min-bit-errors", "min_bit_errors", default=None, type=int),
    click.option("--max-blocks", "max_blocks", default=None, type=int),
    click.option("--target-ber", "target_ber", default=None, type=float),
    click.option("--workers", default=None, type=int),
    click.option("--config", "config_file", default=None,
                 type=click.Path(exists=False), help="YAML config file"),
    click.option("--out", default="out", help="output directory"),
]


def shared_options(fn):
    for opt in reversed(_shared):
        fn = opt(fn)
    return fn


def _experiment(config_file, drs_init_range=None, **flags):
    if drs_init_range is not None:
        lohi = parse_int_range(drs_init_range, "--drs-init-range")
        if len(lohi) == 1:
            raise ConfigError("--drs-init-range needs lo:hi")
        flags["init_lo"], flags["init_hi"] = lohi[0], lohi[-1]
    return build_config(config_file, **flags)


@click.group()
def cli():
    """Product-code decoding experiments."""


@cli.command()
@click.option("--t", default=2, type=int, help="error-correcting radius")
@click.option("--d-des", "d_des", default=6, type=int, help="designed distance")
@click.option("--d-max", "d_max", default=2, type=int)
@click.option("--e-max", "e_max", default=5, type=int)
@click.option("--trials", default=5, type=int, help="attempts for the iterated table")
@click.option("--out", default="out")
def tables(t, d_des, d_max, e_max, trials, out):
    """Closed-form component-decoder success tables (CSV)."""
    if t < 1 or d_des < 2 * t + 1:
        raise ConfigError(f"need t >= 1 and d_des >= 2t+1, got t={t}, d_des={d_des}")
    out_dir = _out_dir(out)
    started = time.time()
    code = SimpleNamespace(t=t, d_des=d_des)
    header = ("D", "E", "Ps")
    write_csv(out_dir / "table_eaed.csv", header,
              success_table(code, d_max, e_max, rule="eaed"))
    write_csv(out_dir / "table_onestep.csv", header,
              success_table(code, d_max, e_max, rule="forney"))
    write_csv(out_dir / "table_iterated.csv", header,
              success_table(code, d_max, e_max, rule="eaed", trials=trials))
    write_manifest(out_dir, "tables", None, started=started,
                   extra={"t": t, "d_des": d_des, "d_max": d_max,
                          "e_max": e_max, "trials": trials})
    click.echo(f"wrote 3 tables to {out_dir}")


@cli.command()
@shared_options
@click.option("--ebn0", required=True, help="Eb/N0 grid in dB: start:stop:step")
def ber(ebn0, out, config_file, **flags):
    """BER over an SNR grid -> ber_curve.csv."""
    cfg = _experiment(config_file, **flags)
    grid = parse_grid(ebn0)
    out_dir = _out_dir(out)
    started = time.time()
    rows = []
    for snr in grid:
        est = estimate_ber(cfg, snr)
        click.echo(str(est))
        rows.append((est.ebn0_db, est.ber, est.ci_lo, est.ci_hi,
                     est.blocks, est.bit_errors))
    write_csv(out_dir / "ber_curve.csv",
              ("ebn0_db", "ber", "ci_lo", "ci_hi", "blocks", "bit_errors"), rows)
    write_manifest(out_dir, "ber", cfg, started=started, extra={"ebn0_grid": grid})


@cli.command()
@shared_options
@click.option("--ebn0", required=True, help="search bracket in dB: lo:hi")
@click.option("--resolution", default=0.02, type=float)
def threshold(ebn0, resolution, out, config_file, **flags):
    """Noise threshold by bisection -> thresholds.csv."""
    cfg = _experiment(config_file, **flags)
    bounds = parse_grid(ebn0)
    if len(bounds) != 2:
        raise ConfigError(f"--ebn0 must be a lo:hi bracket, got {ebn0!r}")
    out_dir = _out_dir(out)
    started = time.time()
    result = noise_threshold(cfg, bounds[0], bounds[1], resolution=resolution)
    ta = cfg.anchor_T0
    if ta is None and cfg.decoder in ("drsd", "drsd_plus"):
        ta = cfg.drsd_config().anchor_T0
    write_csv(out_dir / "thresholds.csv", ("T", "Ta", "threshold_db"),
              [(cfg.resolved_erasure_T, ta, result.threshold_db)])
    write_manifest(out_dir, "threshold", cfg, started=started,
                   extra={"bracket": list(result.bracket),
                          "threshold_db": result.threshold_db})
    click.echo(f"threshold {result.threshold_db:.3f} dB "
               f"(bracket [{result.bracket[0]:.3f}, {result.bracket[1]:.3f}])")


@cli.command()
@shared_options
@click.option("--ebn0", required=True, help="search bracket in dB: lo:hi")
@click.option("--T", "T_spec", required=True, help="erasure-threshold grid start:stop:step")
@click.option("--Ta", "Ta_spec", default=None, help="anchor-threshold grid lo:hi")
@click.option("--resolution", default=0.02, type=float)
def sweep(ebn0, T_spec, Ta_spec, resolution, out, config_file, **flags):
    """Threshold map over a (T, Ta) grid -> thresholds.csv."""
    cfg = _experiment(config_file, **flags)
    bounds = parse_grid(ebn0)
    if len(bounds) != 2:
        raise ConfigError(f"--ebn0 must be a lo:hi bracket, got {ebn0!r}")
    T_grid = parse_grid(T_spec, "--T")
    Ta_grid = parse_int_range(Ta_spec, "--Ta") if Ta_spec else [None]
    out_dir = _out_dir(out)
    started = time.time()
    T_opt, Ta_opt, rows = grid_search_thresholds(
        cfg, T_grid, Ta_grid, bounds[0], bounds[1], resolution=resolution)
    write_csv(out_dir / "thresholds.csv", ("T", "Ta", "threshold_db"), rows)
    write_manifest(out_dir, "sweep", cfg, started=started,
                   extra={"T_opt": T_opt, "Ta_opt": Ta_opt})
    click.echo(f"optimum T={T_opt} Ta={Ta_opt}")


@cli.command()
@shared_options
@click.option("--ebn0", required=True, type=float, help="single Eb/N0 point in dB")
@click.option("--blocks", default=100, type=int)
@click.option("--l-ref", "l_ref", default=10, type=int,
              help="reference iteration count for BDD-step normalization")
def instrument(ebn0, blocks, l_ref, out, config_file, **flags):
    """Per-half-iteration decoder metrics -> metrics.csv."""
    cfg = _experiment(config_file, **flags)
    out_dir = _out_dir(out)
    started = time.time()
    result = instrumented_run(cfg, ebn0, blocks, l_ref=l_ref)
    write_csv(out_dir / "metrics.csv",
              ("half_iter", "anchors", "err_anchors", "miscorrections",
               "bdd_steps_norm"),
              [(r.half_iter, r.anchors, r.err_anchors, r.miscorrections,
                r.bdd_steps_norm) for r in result.rows])
    write_manifest(out_dir, "instrument", cfg, started=started,
                   extra={"blocks": blocks, "l_ref": l_ref,
                          "total_steps_norm": result.total_steps_norm,
                          "ber": result.estimate.ber})
    click.echo(str(result.estimate))
    click.echo(f"total normalized BDD steps per block: {result.total_steps_norm:.3f}")


def main():
    try:
        cli.main(standalone_mode=False)
    except ConfigError as exc:
        click.echo(f"config error: {exc.format_message()}", err=True)
        sys.exit(1)
    except (click.UsageError, click.ClickException) as exc:
        click.echo(f"config error: {exc.format_message()}", err=True)
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    except SearchError as exc:
        click.echo(f"search error: {exc}", err=True)
        sys.exit(2)
    except Exception as exc:  # pragma: no cover - defensive
        click.echo(f"runtime error: {exc}", err=True)
        sys.exit(2)
    sys.exit(0)


if __name__ == "__main__":
    main()
