"""Finite-sample critical values by simulating the unit-root null.

Null paths follow ``y_t = d*T**(-eta) + y_{t-1} + sigma*e_t`` with
``y_0 = sigma*e_0``. Replication ``i`` draws from its own stream
``SeedSequence(seed, spawn_key=(i,))``, so output depends only on
``(seed, replications, T, configs)`` and never on how replications are
split across worker processes.
"""
from __future__ import annotations

import hashlib
import json
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

from . import _kernels
from .errors import ConfigError, MonteCarloError
from .recursive import TestConfig, _resolve
from .series import TimeSeries

TestName = Literal["adf", "radf", "sadf", "gsadf"]
TESTS: tuple[str, ...] = ("adf", "radf", "sadf", "gsadf")
DEFAULT_LEVELS = (0.90, 0.95, 0.99)
MISSING_BUDGET = 0.01


@dataclass(frozen=True)
class NullSpec:
    drift_scale: float = 1.0
    drift_exponent: float = 1.0
    innovation_sd: float = 1.0

    def __post_init__(self):
        if not self.innovation_sd > 0:
            raise ConfigError(f"innovation_sd must be positive, got {self.innovation_sd}")
        if not self.drift_exponent >= 0:
            raise ConfigError(f"drift_exponent must be >= 0, got {self.drift_exponent}")

    def drift(self, T: int) -> float:
        return self.drift_scale * float(T) ** (-self.drift_exponent)

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}


def replication_stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def null_values(T: int, spec: NullSpec, stream: np.random.Generator) -> np.ndarray:
    if T < 2:
        raise ConfigError(f"T must be at least 2, got {T}")
    inc = spec.innovation_sd * stream.standard_normal(T)
    inc[1:] += spec.drift(T)
    return np.cumsum(inc)


def simulate_null_path(T: int, spec: NullSpec, stream: np.random.Generator) -> TimeSeries:
    """One null path; dates are consecutive days from the epoch."""
    return TimeSeries.from_values(null_values(T, spec, stream), label="null")


# -- canonical serialisation -------------------------------------------------

def _canon(obj):
    if isinstance(obj, float):
        return format(obj, ".17g")
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    return obj


def canonical_json(obj) -> str:
    """Sorted keys, no whitespace, floats at 17 significant digits."""
    return json.dumps(_canon(obj), sort_keys=True, separators=(",", ":"))


def config_digest(cfg: TestConfig, null: NullSpec) -> str:
    payload = {"test_config": cfg.to_dict(), "null": null.to_dict()}
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


# -- simulation ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NullDraws:
    """Statistics of every replication, NaN where a replication was degenerate."""

    T: int
    replications: int
    seed: int
    cfg: TestConfig
    null: NullSpec
    stats: dict  # test name -> (replications,) array
    bsadf: np.ndarray | None  # (replications, T - w0 + 1)
    end_indices: np.ndarray | None

    @property
    def digest(self) -> str:
        return config_digest(self.cfg, self.null)

    def _clean(self, test: str) -> np.ndarray:
        x = self.stats[test]
        miss = int(np.isnan(x).sum())
        if miss > MISSING_BUDGET * x.size:
            raise MonteCarloError(
                f"{miss} of {x.size} {test} replications degenerate (budget {MISSING_BUDGET:.0%})"
            )
        return x[~np.isnan(x)]

    def critical_values(self, test: str, levels: Sequence[float] = DEFAULT_LEVELS) -> "CriticalValues":
        x = self._clean(test)
        tail = self.cfg.adf.tail
        probs = [lv if tail == "right" else 1.0 - lv for lv in levels]
        q = np.quantile(x, probs, method="linear")
        return CriticalValues(
            test=test,
            quantiles={float(lv): float(v) for lv, v in zip(levels, q)},
            T=self.T,
            replications=self.replications,
            seed=self.seed,
            config_digest=self.digest,
            tail=tail,
            missing=int(self.stats[test].size - x.size),
            test_config=self.cfg.to_dict(),
            null=self.null.to_dict(),
        )

    def p_value(self, test: str, observed: float) -> float:
        """Share of null replications at least as extreme as ``observed``."""
        x = self._clean(test)
        if self.cfg.adf.tail == "right":
            return float(np.mean(x >= observed))
        return float(np.mean(x <= observed))

    def cv_sequence(self, level: float) -> "CvSequence":
        if self.bsadf is None:
            raise ValueError("draws were simulated without the BSADF sequence")
        miss = np.isnan(self.bsadf).sum(axis=0)
        if np.any(miss > MISSING_BUDGET * self.replications):
            raise MonteCarloError("too many degenerate BSADF replications at some end index")
        values = np.nanquantile(self.bsadf, level, axis=0, method="linear")
        return CvSequence(
            end_indices=self.end_indices,
            values=values,
            level=float(level),
            T=self.T,
            replications=self.replications,
            seed=self.seed,
            config_digest=self.digest,
            test_config=self.cfg.to_dict(),
            null=self.null.to_dict(),
        )


def _needs(tests: Iterable[str]) -> tuple[bool, bool, bool]:
    tests = set(tests)
    unknown = tests - set(TESTS) - {"bsadf"}
    if unknown:
        raise ConfigError(f"unknown test(s): {', '.join(sorted(unknown))}")
    back = bool(tests & {"gsadf", "bsadf"})
    fwd = bool(tests & {"adf", "sadf"})
    roll = "radf" in tests
    return back, fwd, roll


def _chunk(args) -> tuple[dict, np.ndarray | None]:
    T, cfg, null, seed, start, stop, tests, keep_bsadf = args
    back, fwd, roll = _needs(tests)
    out = {t: np.full(stop - start, np.nan) for t in tests if t != "bsadf"}
    rows = None
    for j, i in enumerate(range(start, stop)):
        y = null_values(T, null, replication_stream(seed, i))
        r = _resolve(y, cfg)
        width = cfg.resolve_rolling_width(T, r.w0) if roll else 0
        # the full-sample ADF alone needs only the last end index
        t_lo = r.w0 - 1 if (back or roll or "sadf" in tests) else T - 1
        b, f, ro = _kernels.sweep(r.y, r.k, r.trend, r.w0, width, t_lo, T - 1, back, fwd, roll)
        if keep_bsadf:
            if rows is None:
                rows = np.full((stop - start, b.size), np.nan)
            rows[j] = b
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            if "adf" in out:
                out["adf"][j] = f[-1]
            if "sadf" in out and not np.all(np.isnan(f)):
                out["sadf"][j] = np.nanmax(f)
            if "gsadf" in out and not np.all(np.isnan(b)):
                out["gsadf"][j] = np.nanmax(b)
            if "radf" in out and not np.all(np.isnan(ro)):
                out["radf"][j] = np.nanmax(ro)
    return out, rows


def _check_replications(replications: int) -> None:
    if replications < 1:
        raise ConfigError(f"replications must be at least 1, got {replications}")
    if replications < 100:
        warnings.warn(
            f"{replications} replications cannot support 90/95/99% quantiles", stacklevel=3
        )
    elif replications < 1000:
        warnings.warn(f"only {replications} replications; quantiles will be noisy", stacklevel=3)


def default_workers() -> int:
    return os.cpu_count() or 1


def simulate_null(
    T: int,
    cfg: TestConfig,
    null: NullSpec = NullSpec(),
    replications: int = 10_000,
    seed: int = 0,
    tests: Sequence[str] = TESTS,
    keep_bsadf: bool = False,
    workers: int | None = 1,
) -> NullDraws:
    """Run ``tests`` on ``replications`` independent null paths of length ``T``.

    ``workers=None`` uses every CPU. The result does not depend on it.
    """
    _check_replications(replications)
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    tests = tuple(dict.fromkeys(tests))
    if keep_bsadf and "bsadf" not in tests:
        tests = tests + ("bsadf",)
    if "radf" in tests and cfg.rolling_width is None:
        raise ConfigError("RADF needs a rolling width")
    # fail fast on window problems before spawning anything
    w0 = cfg.resolve_min_window(T)

    workers = max(1, min(int(workers or default_workers()), replications))
    n_chunks = workers if workers == 1 else workers * 4
    bounds = np.linspace(0, replications, n_chunks + 1).astype(int)
    jobs = [
        (T, cfg, null, seed, int(a), int(b), tests, keep_bsadf)
        for a, b in zip(bounds[:-1], bounds[1:])
        if b > a
    ]
    if workers == 1:
        parts = [_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_chunk, jobs))

    stats = {t: np.concatenate([p[0][t] for p in parts]) for t in tests if t != "bsadf"}
    bsadf = ends = None
    if keep_bsadf:
        bsadf = np.vstack([p[1] for p in parts])
        ends = np.arange(T - bsadf.shape[1], T)
    return NullDraws(T, replications, seed, cfg, null, stats, bsadf, ends)


def critical_values(
    test: str,
    T: int,
    cfg: TestConfig = TestConfig(),
    null: NullSpec = NullSpec(),
    replications: int = 10_000,
    seed: int = 0,
    levels: Sequence[float] = DEFAULT_LEVELS,
    workers: int = 1,
) -> "CriticalValues":
    if test not in TESTS:
        raise ConfigError(f"unknown test {test!r}")
    draws = simulate_null(T, cfg, null, replications, seed, (test,), workers=workers)
    return draws.critical_values(test, levels)


def bsadf_cv_sequence(
    level: float,
    T: int,
    cfg: TestConfig = TestConfig(),
    null: NullSpec = NullSpec(),
    replications: int = 10_000,
    seed: int = 0,
    workers: int = 1,
) -> "CvSequence":
    if level not in DEFAULT_LEVELS:
        raise ConfigError(f"level must be one of {DEFAULT_LEVELS}, got {level}")
    draws = simulate_null(T, cfg, null, replications, seed, ("bsadf",), keep_bsadf=True, workers=workers)
    return draws.cv_sequence(level)


# -- results and cache documents ---------------------------------------------

def _dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


@dataclass(frozen=True)
class CriticalValues:
    test: str
    quantiles: dict
    T: int
    replications: int
    seed: int
    config_digest: str
    tail: str = "right"
    missing: int = 0
    test_config: dict = field(default_factory=dict)
    null: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")

    def __getitem__(self, level: float) -> float:
        return self.quantiles[float(level)]

    def is_monotone(self) -> bool:
        """Right tail: q90 <= q95 <= q99. Left tail: the reverse."""
        q = [self.quantiles[lv] for lv in sorted(self.quantiles)]
        pairs = zip(q[:-1], q[1:])
        if self.tail == "right":
            return all(a <= b for a, b in pairs)
        return all(a >= b for a, b in pairs)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = "critical_values"
        d["quantiles"] = {repr(k): v for k, v in sorted(self.quantiles.items())}
        return d

    def to_json(self) -> str:
        return _dump(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "CriticalValues":
        d = dict(d)
        d.pop("kind", None)
        d["quantiles"] = {float(k): float(v) for k, v in d["quantiles"].items()}
        return cls(**d)


@dataclass(frozen=True, eq=False)
class CvSequence:
    end_indices: np.ndarray
    values: np.ndarray
    level: float
    T: int
    replications: int
    seed: int
    config_digest: str
    test_config: dict = field(default_factory=dict)
    null: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.values.size

    def to_dict(self) -> dict:
        return {
            "kind": "cv_sequence",
            "end_indices": self.end_indices.tolist(),
            "values": self.values.tolist(),
            "level": self.level,
            "T": self.T,
            "replications": self.replications,
            "seed": self.seed,
            "config_digest": self.config_digest,
            "test_config": self.test_config,
            "null": self.null,
        }

    def to_json(self) -> str:
        return _dump(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "CvSequence":
        d = dict(d)
        d.pop("kind", None)
        d["end_indices"] = np.asarray(d["end_indices"], dtype=np.int64)
        d["values"] = np.asarray(d["values"], dtype=np.float64)
        return cls(**d)


def write_atomic(path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def save(path, doc: CriticalValues | CvSequence) -> None:
    write_atomic(path, doc.to_json())


def load(path) -> CriticalValues | CvSequence:
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    kind = d.get("kind")
    if kind == "critical_values":
        return CriticalValues.from_dict(d)
    if kind == "cv_sequence":
        return CvSequence.from_dict(d)
    raise ValueError(f"{path}: not a critical-value document")


class CvCache:
    """Directory of critical-value documents keyed by configuration digest."""

    def __init__(self, directory):
        self.directory = Path(directory)

    def path(self, name: str, T: int, cfg: TestConfig, null: NullSpec, replications: int, seed: int) -> Path:
        return self.directory / (
            f"{name}-T{T}-n{replications}-s{seed}-{config_digest(cfg, null)[:16]}.json"
        )

    def critical_values(self, test, T, cfg, null=NullSpec(), replications=10_000, seed=0,
                        levels=DEFAULT_LEVELS, workers=1) -> CriticalValues:
        p = self.path(test, T, cfg, null, replications, seed)
        if p.exists():
            cv = load(p)
            if set(cv.quantiles) >= {float(lv) for lv in levels}:
                return cv
        cv = critical_values(test, T, cfg, null, replications, seed, levels, workers)
        self.directory.mkdir(parents=True, exist_ok=True)
        save(p, cv)
        return cv

    def cv_sequence(self, level, T, cfg, null=NullSpec(), replications=10_000, seed=0,
                    workers=1) -> CvSequence:
        p = self.path(f"bsadf{int(round(level * 100))}", T, cfg, null, replications, seed)
        if p.exists():
            return load(p)
        seq = bsadf_cv_sequence(level, T, cfg, null, replications, seed, workers)
        self.directory.mkdir(parents=True, exist_ok=True)
        save(p, seq)
        return seq
