import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnarx.errors import DataFormatError, DegenerateScaleError, DimensionError, ParseError, ValidationError
from gnarx.panel import (
    CalendarStamp,
    Panel,
    difference,
    load_panel_csv,
    month_range,
    save_panel_csv,
    standardize,
    zero_fill_before,
)


def _panel(values, start=CalendarStamp(2020, 1), nodes=None):
    values = np.atleast_2d(np.asarray(values, dtype=float))
    nodes = nodes or tuple(f"n{i}" for i in range(values.shape[0]))
    return Panel(tuple(nodes), month_range(start, values.shape[1]), values, np.isfinite(values))


def test_calendar_ordering_and_shift():
    a = CalendarStamp(2019, 12)
    assert a.shift(1) == CalendarStamp(2020, 1)
    assert a < CalendarStamp(2020, 1) < CalendarStamp(2020, 2)
    assert str(CalendarStamp.parse("2020-7")) == "2020-07"
    with pytest.raises(ValidationError):
        CalendarStamp(2020, 13)


def test_single_cell_file(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("date,UK\n2020-01,50.0\n")
    p = load_panel_csv(f)
    assert (p.N, p.T) == (1, 1)
    assert p.observed.all()


def test_empty_cell_is_missing(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("date,A,B\n2020-01,1,2\n2020-02,,4\n2020-03,5,6\n")
    p = load_panel_csv(f)
    assert not p.observed[0, 1]
    assert p.observed.sum() == 5
    np.testing.assert_array_equal(p.values[1], [2, 4, 6])


def test_late_starting_node(tmp_path):
    f = tmp_path / "p.csv"
    rows = ["date,A,B"] + [f"{t},{k},{'' if k < 5 else k}" for k, t in enumerate(month_range(CalendarStamp(1998, 1), 12))]
    f.write_text("\n".join(rows) + "\n")
    p = load_panel_csv(f, ["B", "A"])
    assert p.nodes == ("B", "A")
    assert p.observed[0].tolist() == [False] * 5 + [True] * 7


def test_column_mapping_renames(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("date,uk_pmi,us_pmi\n2020-01,1,2\n")
    p = load_panel_csv(f, {"us_pmi": "US"})
    assert p.nodes == ("US",)


@pytest.mark.parametrize(
    "body, error, fragment",
    [
        ("date,A\n2020-01,1\n2020/02,2\n", ParseError, "row 3"),
        ("date,A\n2020-01,abc\n", ParseError, "row 2"),
        ("date,A\n2020-01,1\n2020-01,2\n", DataFormatError, "duplicated"),
        ("date,A,B\n2020-01,1\n", DataFormatError, "row 2"),
        ("when,A\n2020-01,1\n", DataFormatError, "header"),
    ],
)
def test_malformed_files(tmp_path, body, error, fragment):
    f = tmp_path / "p.csv"
    f.write_text(body)
    with pytest.raises(error, match=fragment):
        load_panel_csv(f)


def test_round_trip_bit_identical(tmp_path):
    rng = np.random.default_rng(3)
    v = rng.standard_normal((3, 20)) * 1e3
    v[1, 4] = np.nan
    p = _panel(v)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    save_panel_csv(p, a)
    q = load_panel_csv(a)
    save_panel_csv(q, b)
    assert a.read_bytes() == b.read_bytes()
    np.testing.assert_array_equal(q.filled, p.filled)
    np.testing.assert_array_equal(q.observed, p.observed)


def test_non_consecutive_times_rejected():
    with pytest.raises(DataFormatError, match="consecutive"):
        Panel(("a",), (CalendarStamp(2020, 1), CalendarStamp(2020, 3)), np.zeros((1, 2)), np.ones((1, 2), bool))


def test_difference_examples():
    d = difference(_panel([[0, 0, 67.9, 67.9]]))
    np.testing.assert_allclose(d.values[0], [0, 67.9, 0])
    assert d.times[0] == CalendarStamp(2020, 2)
    np.testing.assert_array_equal(difference(_panel([[4.0, 4.0, 4.0]])).values[0], [0, 0])
    gap = difference(_panel([[1, np.nan, 3]]))
    assert not gap.observed.any()
    with pytest.raises(DimensionError):
        difference(_panel([[1.0]]))


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=40))
def test_difference_cumsum_reconstructs(xs):
    p = _panel([xs])
    d = difference(p)
    rebuilt = xs[0] + np.concatenate([[0.0], np.cumsum(d.values[0])])
    np.testing.assert_allclose(rebuilt, xs, atol=1e-10 * max(1.0, np.max(np.abs(xs))) * len(xs))


def test_standardize_example():
    z, sc = standardize(_panel([[1.0, 2.0, 3.0]]))
    np.testing.assert_allclose(z.values[0], [-1, 0, 1])
    assert sc.mean[0] == 2 and sc.sd[0] == 1


def test_standardize_fixed_point_and_mask():
    p = _panel([[-1.0, np.nan, 0.0, 1.0]])
    z, _ = standardize(p)
    np.testing.assert_allclose(z.values[0, z.observed[0]], [-1, 0, 1], atol=1e-12)
    np.testing.assert_array_equal(z.observed, p.observed)


def test_standardize_zero_variance_names_node():
    with pytest.raises(DegenerateScaleError, match="flat"):
        standardize(_panel([[5.0, 5.0, 5.0]], nodes=("flat",)))


@settings(max_examples=50)
@given(st.lists(st.floats(-1e4, 1e4), min_size=3, max_size=30).filter(lambda v: np.std(v) > 1e-3))
def test_standardize_inverts(xs):
    p = _panel([xs])
    z, sc = standardize(p)
    np.testing.assert_allclose(sc.invert(z).values, p.values, atol=1e-10 * max(1.0, np.max(np.abs(xs))))


def test_zero_fill_before():
    p = _panel([[np.nan, np.nan, 30.0, 67.9]], start=CalendarStamp(2019, 12))
    out = zero_fill_before(p, CalendarStamp(2020, 2))
    assert out.values[0].tolist() == [0.0, 0.0, 30.0, 67.9]
    assert out.observed.all()
    same = zero_fill_before(p, CalendarStamp(2000, 1))
    np.testing.assert_array_equal(same.observed, p.observed)
    late = zero_fill_before(p, CalendarStamp(2030, 1))
    assert late.observed.all() and not late.values.any()


def test_window_and_reindex():
    p = _panel([[1.0, 2.0, 3.0, 4.0]])
    w = p.window(CalendarStamp(2020, 2), CalendarStamp(2020, 3))
    assert w.values[0].tolist() == [2.0, 3.0]
    r = p.reindex(month_range(CalendarStamp(2019, 12), 3))
    assert r.observed[0].tolist() == [False, True, True]
