"""Price series container and CSV I/O."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from .errors import SeriesError

Transform = Literal["raw", "log"]

DEFAULT_DATE_FORMAT = "%Y-%m-%d"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Ordered observations of a price index.

    ``dates`` is a ``datetime64[D]`` array; statistics only ever look at
    ``values`` and observation indices.
    """

    dates: np.ndarray
    values: np.ndarray
    label: str = ""
    transform: Transform = "raw"

    def __post_init__(self):
        dates = np.asarray(self.dates).astype("datetime64[D]")
        values = np.asarray(self.values, dtype=np.float64)
        if dates.ndim != 1 or values.ndim != 1:
            raise SeriesError("dates and values must be one-dimensional")
        if dates.shape != values.shape:
            raise SeriesError(
                f"dates ({dates.size}) and values ({values.size}) differ in length"
            )
        if values.size < 2:
            raise SeriesError("a series needs at least 2 observations")
        steps = np.diff(dates)
        if np.any(steps == np.timedelta64(0, "D")):
            dup = dates[1:][steps == np.timedelta64(0, "D")][0]
            raise SeriesError(f"duplicate date {dup}")
        if np.any(steps < np.timedelta64(0, "D")):
            raise SeriesError("dates must be strictly increasing")
        if not np.all(np.isfinite(values)):
            bad = dates[~np.isfinite(values)][0]
            raise SeriesError(f"non-finite value at {bad}")
        if self.transform not in ("raw", "log"):
            raise SeriesError(f"unknown transform {self.transform!r}")
        object.__setattr__(self, "dates", _frozen(dates))
        object.__setattr__(self, "values", _frozen(values))

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.label == other.label
            and self.transform == other.transform
            and np.array_equal(self.dates, other.dates)
            and np.array_equal(self.values, other.values)
        )

    def slice(self, start_index: int, end_index: int) -> "TimeSeries":
        return slice_series(self, start_index, end_index)

    @classmethod
    def from_values(
        cls,
        values: Sequence[float],
        label: str = "",
        transform: Transform = "raw",
        start: str = "1970-01-01",
    ) -> "TimeSeries":
        """Wrap a bare array, with consecutive daily dates from ``start``."""
        values = np.asarray(values, dtype=np.float64)
        dates = np.datetime64(start, "D") + np.arange(values.size)
        return cls(dates, values, label=label, transform=transform)


def load_csv(
    path,
    date_column: str = "date",
    value_column: str = "close",
    date_format: str = DEFAULT_DATE_FORMAT,
    label: str | None = None,
) -> TimeSeries:
    """Read a header-ful CSV into a :class:`TimeSeries`, sorted by date.

    Rows whose value does not parse as a finite float raise instead of being
    dropped; interpolating gaps would bias the unit-root statistics.
    """
    path = Path(path)
    if not path.is_file():
        raise SeriesError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SeriesError(f"{path}: empty file")
        for col in (date_column, value_column):
            if col not in reader.fieldnames:
                raise SeriesError(
                    f"{path}: missing column {col!r} (have {', '.join(reader.fieldnames)})"
                )
        dates, values = [], []
        for lineno, row in enumerate(reader, start=2):
            raw_date, raw_value = row[date_column], row[value_column]
            try:
                d = datetime.strptime(raw_date.strip(), date_format).date()
            except (ValueError, AttributeError):
                raise SeriesError(
                    f"{path}:{lineno}: date {raw_date!r} does not match {date_format!r}"
                ) from None
            try:
                v = float(raw_value)
            except (TypeError, ValueError):
                raise SeriesError(f"{path}:{lineno}: unparseable value {raw_value!r}") from None
            if not math.isfinite(v):
                raise SeriesError(f"{path}:{lineno}: non-finite value {raw_value!r}")
            dates.append(d)
            values.append(v)
    if not values:
        raise SeriesError(f"{path}: no data rows")

    dates = np.array(dates, dtype="datetime64[D]")
    order = np.argsort(dates, kind="stable")
    return TimeSeries(
        dates[order],
        np.array(values)[order],
        label=label if label is not None else path.stem,
    )


def csv_text(
    s: TimeSeries,
    date_column: str = "date",
    value_column: str = "close",
    date_format: str = DEFAULT_DATE_FORMAT,
) -> str:
    # 17 significant digits round-trip every float64 exactly
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([date_column, value_column])
    for d, v in zip(s.dates.tolist(), s.values.tolist()):
        w.writerow([d.strftime(date_format), format(v, ".17g")])
    return buf.getvalue()


def write_csv(path, s: TimeSeries, **columns) -> None:
    Path(path).write_text(csv_text(s, **columns), encoding="utf-8")


def to_log(s: TimeSeries) -> TimeSeries:
    if s.transform == "log":
        raise SeriesError(f"series {s.label!r} is already log-transformed")
    bad = s.values <= 0
    if np.any(bad):
        i = int(np.argmax(bad))
        raise SeriesError(
            f"cannot take log of non-positive value {s.values[i]!r} at {s.dates[i]}"
        )
    return TimeSeries(s.dates, np.log(s.values), label=s.label, transform="log")


def slice_series(s: TimeSeries, start_index: int, end_index: int) -> TimeSeries:
    """Half-open sub-series ``[start_index, end_index)``."""
    n = len(s)
    if not (0 <= start_index <= n and 0 <= end_index <= n):
        raise SeriesError(f"slice [{start_index}, {end_index}) out of range for length {n}")
    if end_index <= start_index:
        raise SeriesError(f"empty slice [{start_index}, {end_index})")
    return TimeSeries(
        s.dates[start_index:end_index],
        s.values[start_index:end_index],
        label=s.label,
        transform=s.transform,
    )
