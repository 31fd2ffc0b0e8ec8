import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from rtadf.errors import SeriesError
from rtadf.series import TimeSeries, load_csv, slice_series, to_log, write_csv


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_load_three_rows(tmp_path):
    p = _write(tmp_path / "a.csv", "date,close\n2020-01-01,100\n2020-01-02,101\n2020-01-03,102\n")
    s = load_csv(p)
    assert len(s) == 3
    assert s.transform == "raw"
    assert s.values.tolist() == [100.0, 101.0, 102.0]
    assert str(s.dates[0]) == "2020-01-01"


def test_load_sorts_rows(tmp_path):
    p = _write(tmp_path / "a.csv", "date,close\n2020-01-03,102\n2020-01-01,100\n2020-01-02,101\n")
    q = _write(tmp_path / "b.csv", "date,close\n2020-01-01,100\n2020-01-02,101\n2020-01-03,102\n")
    a, b = load_csv(p, label="x"), load_csv(q, label="x")
    assert a == b


def test_duplicate_date(tmp_path):
    p = _write(tmp_path / "a.csv", "date,close\n2020-01-01,100\n2020-01-01,101\n2020-01-03,102\n")
    with pytest.raises(SeriesError, match="duplicate date"):
        load_csv(p)


@pytest.mark.parametrize(
    "text, match",
    [
        ("date,price\n2020-01-01,1\n2020-01-02,2\n", "missing column"),
        ("", "empty file"),
        ("date,close\n", "no data rows"),
        ("date,close\n2020-01-01,1\n2020-01-02,abc\n", "unparseable value"),
        ("date,close\n2020-01-01,1\n2020-01-02,\n", "unparseable value"),
        ("date,close\n2020-01-01,1\n2020-01-02,nan\n", "non-finite"),
        ("date,close\n01/02/2020,1\n2020-01-02,2\n", "does not match"),
    ],
)
def test_load_rejects(tmp_path, text, match):
    p = _write(tmp_path / "bad.csv", text)
    with pytest.raises(SeriesError, match=match):
        load_csv(p)


def test_custom_columns_and_format(tmp_path):
    p = _write(tmp_path / "a.csv", "Day,Close,Volume\n02/01/2020,5,1\n03/01/2020,6,1\n")
    s = load_csv(p, date_column="Day", value_column="Close", date_format="%d/%m/%Y")
    assert [str(d) for d in s.dates] == ["2020-01-02", "2020-01-03"]


def test_non_positive_prices_load_fine(tmp_path):
    # only to_log cares about the sign
    p = _write(tmp_path / "a.csv", "date,close\n2020-01-01,-1\n2020-01-02,0\n")
    assert load_csv(p).values.tolist() == [-1.0, 0.0]


def test_to_log_identities():
    s = TimeSeries.from_values([1.0, math.e, math.e**2])
    out = to_log(s)
    np.testing.assert_allclose(out.values, [0.0, 1.0, 2.0], atol=1e-15)
    assert out.transform == "log"
    assert np.array_equal(out.dates, s.dates)


def test_to_log_zero_names_date():
    s = TimeSeries.from_values([1.0, 0.0, 2.0], start="2021-03-01")
    with pytest.raises(SeriesError, match="2021-03-02"):
        to_log(s)


def test_double_log():
    with pytest.raises(SeriesError, match="already"):
        to_log(to_log(TimeSeries.from_values([1.0, 2.0])))


def test_to_log_matches_scalar_log(rng):
    v = rng.lognormal(3.0, 1.0, 200)
    out = to_log(TimeSeries.from_values(v))
    assert out.values.tolist() == [math.log(x) for x in v]


@given(
    arrays(np.float64, st.integers(2, 40), elements=st.floats(1e-3, 1e6)),
    st.floats(1e-3, 1e3),
)
def test_log_of_scaled_series_shifts(values, a):
    s = TimeSeries.from_values(values)
    scaled = TimeSeries.from_values(values * a)
    np.testing.assert_allclose(
        to_log(scaled).values, to_log(s).values + math.log(a), rtol=0, atol=1e-12
    )
    assert np.array_equal(to_log(scaled).dates, s.dates)


def test_slices():
    s = TimeSeries.from_values(np.arange(10.0), label="L", start="2020-01-01")
    assert slice_series(s, 0, 10) == s
    sub = s.slice(2, 5)
    assert len(sub) == 3
    assert np.array_equal(sub.dates, s.dates[2:5])
    assert sub.label == "L"
    with pytest.raises(SeriesError, match="empty"):
        slice_series(s, 5, 5)
    with pytest.raises(SeriesError, match="out of range"):
        slice_series(s, 0, 11)


@given(st.data())
def test_slice_composition(data):
    n = data.draw(st.integers(6, 30))
    s = TimeSeries.from_values(np.arange(float(n)))
    i = data.draw(st.integers(0, n - 4))
    j = data.draw(st.integers(i + 4, n))
    k = data.draw(st.integers(0, j - i - 2))
    l = data.draw(st.integers(k + 2, j - i))
    assert slice_series(slice_series(s, i, j), k, l) == slice_series(s, i + k, i + l)


@given(arrays(np.float64, st.integers(2, 50), elements=st.floats(-1e12, 1e12)))
def test_csv_round_trip(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("rt") / "s.csv"
    s = TimeSeries.from_values(values, label="s", start="2019-12-30")
    write_csv(path, s)
    assert load_csv(path, label="s") == s


def test_invariants_enforced():
    with pytest.raises(SeriesError):
        TimeSeries.from_values([1.0])
    with pytest.raises(SeriesError, match="non-finite"):
        TimeSeries.from_values([1.0, np.inf])
    d = np.array(["2020-01-02", "2020-01-01"], dtype="datetime64[D]")
    with pytest.raises(SeriesError, match="increasing"):
        TimeSeries(d, [1.0, 2.0])


def test_immutable():
    s = TimeSeries.from_values([1.0, 2.0])
    with pytest.raises(ValueError):
        s.values[0] = 3.0
