"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 configuration error, 4 numerical
failure. Human-readable tables go to stdout; machine-readable results only
to the files named by ``--out``.
"""
from __future__ import annotations

import json
import sys
import warnings
from datetime import datetime, timezone
from functools import wraps
from pathlib import Path

import click
import numpy as np

from . import datestamp as ds
from . import mc_critical as mc
from .adf_core import AdfSpec
from .errors import ConfigError, RtadfError
from .manifest import build_manifest, file_digest, timestamps, write_files
from .recursive import TestConfig, all_statistics, psy_min_window
from .series import csv_text, load_csv, to_log
from . import synth

LEVEL_CHOICES = ("90", "95", "99")


class _Cli(click.Group):
    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.UsageError as e:
            e.show()
            sys.exit(3)
        except click.ClickException as e:
            e.show()
            sys.exit(e.exit_code)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(1)
        except RtadfError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(e.exit_code)
        sys.exit(rv if isinstance(rv, int) else 0)


def _argv(ctx: click.Context) -> list[str]:
    """Flags that reproduce this invocation, from the parsed parameters.

    ``--workers`` is left out: it never changes a result, and recording it
    would make otherwise identical reports differ.
    """
    out = ["rtadf", ctx.info_name]
    for p in ctx.command.params:
        if p.name == "workers":
            continue
        v = ctx.params.get(p.name)
        if isinstance(p, click.Argument):
            out.append(str(v))
            continue
        if v is None or v is False and not p.secondary_opts:
            continue
        if p.is_flag:
            if p.secondary_opts:
                out.append(p.opts[0] if v else p.secondary_opts[0])
            elif v:
                out.append(p.opts[0])
            continue
        out.extend([p.opts[0], str(v)])
    return out


def _levels(text: str) -> tuple[float, ...]:
    try:
        pcts = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--levels expects comma-separated percentages, got {text!r}") from None
    if not pcts or any(str(p) not in LEVEL_CHOICES for p in pcts):
        raise ConfigError(f"--levels must be drawn from 90,95,99, got {text!r}")
    return tuple(sorted({p / 100 for p in pcts}))


def config_options(f):
    opts = [
        click.option("--lags", type=int, default=0, show_default=True,
                      help="Lagged differences in the ADF regression."),
        click.option("--lag-bic-max", type=int, default=None,
                      help="Choose the lag order by BIC up to this maximum (overrides --lags)."),
        click.option("--min-window", type=int, default=None,
                      help="Smallest window in observations [default: floor(T(0.01 + 1.8/sqrt T))]."),
        click.option("--rolling-width", type=int, default=None, help="RADF window width."),
        click.option("--deterministic", type=click.Choice(["constant", "constant_and_trend"]),
                      default="constant", show_default=True),
        click.option("--tail", type=click.Choice(["right", "left"]), default="right", show_default=True),
        click.option("--drift-scale", type=float, default=1.0, show_default=True,
                      help="Null drift d in d*T^-eta."),
        click.option("--drift-exponent", type=float, default=1.0, show_default=True),
        click.option("--innovation-sd", type=float, default=1.0, show_default=True),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def mc_options(f):
    opts = [
        click.option("--replications", type=int, default=10_000, show_default=True),
        click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True),
        click.option("--workers", type=click.IntRange(1), default=None,
                     help="Worker processes [default: CPU count]. Results do not depend on it."),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def input_options(f):
    opts = [
        click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False)),
        click.option("--date-col", default="date", show_default=True),
        click.option("--value-col", default="close", show_default=True),
        click.option("--date-format", default="%Y-%m-%d", show_default=True),
        click.option("--log/--no-log", "use_log", default=True, show_default=True,
                     help="Test log prices."),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def _config(p: dict) -> tuple[TestConfig, mc.NullSpec]:
    if p["lag_bic_max"] is not None:
        adf = AdfSpec(lags=p["lag_bic_max"], lag_policy="bic",
                      deterministic=p["deterministic"], tail=p["tail"])
    else:
        adf = AdfSpec(lags=p["lags"], deterministic=p["deterministic"], tail=p["tail"])
    cfg = TestConfig(adf=adf, min_window=p["min_window"], rolling_width=p["rolling_width"])
    null = mc.NullSpec(p["drift_scale"], p["drift_exponent"], p["innovation_sd"])
    return cfg, null


def _load(p: dict):
    s = load_csv(p["input_path"], p["date_col"], p["value_col"], p["date_format"])
    return to_log(s) if p["use_log"] else s


def _workers(p: dict) -> int:
    return p["workers"] or mc.default_workers()


def _reports_errors(f):
    @wraps(f)
    def wrapper(*args, **kwargs):
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, *a, **k: click.echo(f"warning: {msg}", err=True)
            return f(*args, **kwargs)
    return wrapper


@click.group(cls=_Cli)
@click.version_option(package_name="artifact", prog_name="rtadf")
def cli():
    """Right-tail ADF bubble tests and date-stamping."""


@cli.command("test")
@input_options
@click.option("--test", "test_name", type=click.Choice(mc.TESTS + ("all",)), default="all",
              show_default=True)
@click.option("--all", "all_tests", is_flag=True, help="Same as --test all.")
@config_options
@click.option("--levels", default="90,95,99", show_default=True)
@mc_options
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="JSON report path.")
@click.pass_context
@_reports_errors
def cmd_test(ctx, **p):
    """Test statistics with Monte Carlo critical values and p-values."""
    started = datetime.now(timezone.utc)
    cfg, null = _config(p)
    levels = _levels(p["levels"])
    tests = mc.TESTS if (p["all_tests"] or p["test_name"] == "all") else (p["test_name"],)
    s = _load(p)
    T = len(s)
    w0 = cfg.resolve_min_window(T)
    if "radf" in tests and cfg.rolling_width is None:
        if len(tests) == 1:
            raise ConfigError("RADF needs --rolling-width")
        # --test all without a width rolls at the minimum window
        cfg = TestConfig(adf=cfg.adf, min_window=cfg.min_window, rolling_width=w0)

    obs = all_statistics(s, cfg)
    draws = mc.simulate_null(T, cfg, null, p["replications"], p["seed"], tests,
                             workers=_workers(p))
    results = {}
    rows = []
    for t in tests:
        stat = getattr(obs, t)
        cv = draws.critical_values(t, levels)
        pv = draws.p_value(t, stat) if np.isfinite(stat) else None
        results[t] = {
            "statistic": stat if np.isfinite(stat) else None,
            "p_value": pv,
            "critical_values": {f"{round(lv * 100)}": cv[lv] for lv in levels},
            "reject": {f"{round(lv * 100)}": bool(np.isfinite(stat) and cfg.adf.reject(stat, cv[lv]))
                       for lv in levels},
            "missing_replications": cv.missing,
        }
        rows.append((t.upper(), pv, stat, [cv[lv] for lv in sorted(levels, reverse=True)]))

    manifest = build_manifest(
        _argv(ctx),
        input={"path": str(p["input_path"]), "sha256": file_digest(p["input_path"])},
        test_config=cfg.to_dict(),
        null=null.to_dict(),
        seed=p["seed"],
        replications=p["replications"],
        config_digest=mc.config_digest(cfg, null),
    )
    report = {
        "manifest": manifest,
        "series": {
            "label": s.label, "n_obs": T, "transform": s.transform,
            "first_date": str(s.dates[0]), "last_date": str(s.dates[-1]),
        },
        "resolved": {"min_window": w0, "rolling_width": cfg.rolling_width, "tail": cfg.adf.tail},
        "results": results,
    }

    header = ["Test", "P-Value", "Statistic"] + [
        f"CV {round(lv * 100)}%" for lv in sorted(levels, reverse=True)
    ]
    click.echo("  ".join(f"{h:>10}" for h in header))
    for name, pv, stat, cvs in rows:
        cells = [name, "nan" if pv is None else f"{pv:.3f}", f"{stat:.4f}"] + [f"{c:.4f}" for c in cvs]
        click.echo("  ".join(f"{c:>10}" for c in cells))

    if p["out"]:
        out = Path(p["out"])
        write_files({
            out: json.dumps(report, indent=2, sort_keys=True) + "\n",
            out.with_name(out.stem + ".manifest.json"):
                json.dumps({**manifest, **timestamps(started)}, indent=2, sort_keys=True) + "\n",
        })


def _cv_mismatch(doc, expected: dict) -> list[str]:
    diffs = []
    for key, want in expected.items():
        have = getattr(doc, key)
        if have != want:
            diffs.append(f"  {key}: cache={have!r} current={want!r}")
    return diffs


@cli.command("datestamp")
@input_options
@config_options
@click.option("--level", type=click.Choice(LEVEL_CHOICES), default="95", show_default=True)
@click.option("--cv-cache", type=click.Path(dir_okay=False), default=None,
              help="BSADF critical-value file; created by simulation if absent.")
@click.option("--min-duration", type=int, default=None,
              help="Shortest episode in observations [default: floor(ln T)].")
@mc_options
@click.option("--out", type=click.Path(file_okay=False), required=True, help="Output directory.")
@click.pass_context
@_reports_errors
def cmd_datestamp(ctx, **p):
    """Date-stamp bubble episodes from the BSADF sequence."""
    started = datetime.now(timezone.utc)
    cfg, null = _config(p)
    level = int(p["level"]) / 100
    s = _load(p)
    T = len(s)
    min_duration = ds.default_min_duration(T) if p["min_duration"] is None else p["min_duration"]
    if min_duration < 1:
        raise ConfigError("--min-duration must be at least 1")

    obs = all_statistics(s, TestConfig(adf=cfg.adf, min_window=cfg.min_window))
    digest = mc.config_digest(cfg, null)
    cache = Path(p["cv_cache"]) if p["cv_cache"] else None
    outputs = {}
    if cache is not None and cache.exists():
        try:
            seq = mc.load(cache)
        except (ValueError, KeyError, TypeError) as e:
            raise ConfigError(f"{cache}: unreadable critical-value file ({e})") from None
        if not isinstance(seq, mc.CvSequence):
            raise ConfigError(f"{cache}: holds scalar critical values, not a BSADF sequence")
        diffs = _cv_mismatch(seq, {"config_digest": digest, "T": T, "level": level})
        if diffs:
            raise ConfigError(f"{cache} does not match the current configuration:\n" + "\n".join(diffs))
    else:
        seq = mc.bsadf_cv_sequence(level, T, cfg, null, p["replications"], p["seed"], _workers(p))
        if cache is not None:
            outputs[cache] = seq.to_json()

    episodes = ds.stamp_episodes(obs.bsadf, seq, min_duration, series=s)
    T_eff = len(obs.bsadf)
    coverage = ds.episode_coverage(episodes, T_eff)
    peak = ds.peak_episode(episodes)

    manifest = build_manifest(
        _argv(ctx),
        input={"path": str(p["input_path"]), "sha256": file_digest(p["input_path"])},
        test_config=cfg.to_dict(),
        null=null.to_dict(),
        seed=seq.seed,
        replications=seq.replications,
        config_digest=digest,
    )
    coverage_line = (
        f"bubbles in {coverage:.0%} of the period "
        f"({sum(e.duration for e in episodes)} of {T_eff} observations)"
    )
    report = {
        "manifest": manifest,
        "level": level,
        "min_duration": min_duration,
        "effective_sample": T_eff,
        "coverage": coverage,
        "coverage_line": coverage_line,
        "peak_episode": None if peak is None else peak.origin_index,
        "episodes": [e.to_dict() for e in episodes],
    }

    plot = ["date,bsadf_stat,cv,value"]
    offset = int(obs.bsadf.end_indices[0])
    for i in range(T):
        j = i - offset
        stat = cv = ""
        if j >= 0:
            if not np.isnan(obs.bsadf.stats[j]):
                stat = format(obs.bsadf.stats[j], ".17g")
            cv = format(seq.values[j], ".17g")
        plot.append(f"{s.dates[i]},{stat},{cv},{format(s.values[i], '.17g')}")

    out = Path(p["out"])
    outputs.update({
        out / "episodes.json": json.dumps(report, indent=2, sort_keys=True) + "\n",
        out / "episodes.csv": ds.episodes_to_csv(episodes),
        out / "plot.csv": "\n".join(plot) + "\n",
        out / "manifest.json":
            json.dumps({**manifest, **timestamps(started)}, indent=2, sort_keys=True) + "\n",
    })
    write_files(outputs)

    click.echo(f"{len(episodes)} episode(s) at the {p['level']}% level")
    for e in episodes:
        end = e.end_date if e.end_date is not None else "ongoing"
        click.echo(f"  {e.origin_date} -> {end}  peak {e.peak_date} ({e.peak_stat:.3f}), "
                   f"{e.duration} obs")
    click.echo(coverage_line)


@cli.command("cv")
@click.option("--T", "T", type=click.IntRange(2), required=True, help="Sample size.")
@click.option("--test", "test_name", type=click.Choice(mc.TESTS + ("bsadf",)), default="gsadf",
              show_default=True)
@click.option("--levels", default="90,95,99", show_default=True)
@click.option("--level", type=click.Choice(LEVEL_CHOICES), default="95", show_default=True,
              help="Quantile of the BSADF sequence (--test bsadf only).")
@config_options
@mc_options
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.pass_context
@_reports_errors
def cmd_cv(ctx, **p):
    """Simulate critical values and write the cache document."""
    cfg, null = _config(p)
    T, test = p["T"], p["test_name"]
    if test == "radf" and cfg.rolling_width is None:
        raise ConfigError("RADF needs --rolling-width")
    if test == "bsadf":
        doc = mc.bsadf_cv_sequence(int(p["level"]) / 100, T, cfg, null, p["replications"],
                                   p["seed"], _workers(p))
        click.echo(f"BSADF {p['level']}% critical values, T={T}, {len(doc)} end indices: "
                   f"min {doc.values.min():.4f}, max {doc.values.max():.4f}")
    else:
        doc = mc.critical_values(test, T, cfg, null, p["replications"], p["seed"],
                                 _levels(p["levels"]), _workers(p))
        click.echo(f"{'level':>8}  {test.upper():>10}")
        for lv in sorted(doc.quantiles):
            click.echo(f"{round(lv * 100):>7}%  {doc.quantiles[lv]:>10.4f}")
    write_files({Path(p["out"]): doc.to_json()})


@cli.command("simulate")
@click.argument("generator", type=click.Choice(["rw", "ar1", "evans"]))
@click.option("--T", "T", type=click.IntRange(2), default=400, show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--drift-scale", type=float, default=0.0, show_default=True, help="rw only.")
@click.option("--drift-exponent", type=float, default=1.0, show_default=True, help="rw only.")
@click.option("--sigma", type=float, default=1.0, show_default=True, help="rw / ar1 innovation sd.")
@click.option("--rho", type=float, default=1.05, show_default=True, help="ar1 only.")
@click.option("--regime-start", type=int, default=None, help="ar1 only [default: 3T/4].")
@click.option("--r", "r", type=float, default=0.05, show_default=True, help="evans only.")
@click.option("--b-threshold", type=float, default=1.0, show_default=True)
@click.option("--delta", type=float, default=0.5, show_default=True)
@click.option("--pi", type=float, default=0.85, show_default=True)
@click.option("--tau", type=float, default=0.05, show_default=True)
@click.option("--B0", "B0", type=float, default=None)
@click.option("--fundamental", type=float, default=0.0, show_default=True,
              help="Constant fundamental added to every value.")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="CSV path.")
@click.pass_context
@_reports_errors
def cmd_simulate(ctx, generator, **p):
    """Generate a synthetic series (CSV) and a JSON sidecar with its ground truth."""
    T, seed = p["T"], p["seed"]
    if generator == "rw":
        null = mc.NullSpec(p["drift_scale"], p["drift_exponent"], p["sigma"])
        s = synth.gen_random_walk(T, null, seed)
        spec, mask = null.to_dict(), None
    elif generator == "ar1":
        start = 3 * T // 4 if p["regime_start"] is None else p["regime_start"]
        s = synth.gen_explosive_ar1(T, p["rho"], p["sigma"], start, seed)
        spec = {"rho": p["rho"], "sigma": p["sigma"], "burn_regime_start": start}
        mask = (np.arange(T) >= start).tolist()
    else:
        es = synth.EvansSpec(T=T, r=p["r"], b_threshold=p["b_threshold"], delta=p["delta"],
                             pi=p["pi"], tau=p["tau"], B0=p["B0"])
        s, m = synth.gen_evans_bubble(es, seed)
        spec, mask = es.to_dict(), m.tolist()
    if p["fundamental"]:
        s = type(s)(s.dates, s.values + p["fundamental"], label=s.label)

    out = Path(p["out"])
    sidecar = {
        "manifest": build_manifest(_argv(ctx)),
        "generator": generator,
        "spec": spec,
        "seed": seed,
        "fundamental": p["fundamental"],
        "regime_mask": mask,
    }
    write_files({
        out: csv_text(s),
        out.with_suffix(".json"): json.dumps(sidecar, indent=2, sort_keys=True) + "\n",
    })
    click.echo(f"wrote {T} observations to {out}")


def main():
    cli()


if __name__ == "__main__":
    main()
