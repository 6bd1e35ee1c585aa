import csv

import numpy as np
import pytest

from streamnorm.core import ConfigError, DataError
from streamnorm.datagen import (
    DEFAULT_SEGMENTS,
    CsvIngestSpec,
    SyntheticSpec,
    generate_synthetic,
    generate_synthetic_multi,
    load_csv,
    parse_segments,
    write_synthetic_csv,
)


def test_default_spec_layout(synthetic_160k):
    spec = SyntheticSpec()
    assert spec.total_size == 160_000
    assert spec.segments == ((1, 5), (1, 10), (30, 50), (30, 60))
    assert spec.segment_sizes() == [40_000] * 4
    assert len(synthetic_160k) == 160_000
    assert [s.ordinal for s in synthetic_160k[:3]] == [0, 1, 2]


def test_segments_stay_in_range(synthetic_160k):
    vals = np.array([s.values[0] for s in synthetic_160k]).reshape(4, -1)
    for seg, (lo, hi) in zip(vals, DEFAULT_SEGMENTS):
        assert lo <= seg.min() and seg.max() <= hi
    # third segment explicitly
    assert vals[2].min() >= 30 and vals[2].max() <= 50


def test_same_seed_same_stream():
    spec = SyntheticSpec(1000, seed=42)
    assert list(generate_synthetic(spec)) == list(generate_synthetic(spec))
    assert list(generate_synthetic(spec)) != list(generate_synthetic(SyntheticSpec(1000, seed=43)))


def test_last_segment_absorbs_remainder():
    spec = SyntheticSpec(10, segments=((0, 1), (5, 6), (10, 11)), seed=1)
    assert spec.segment_sizes() == [3, 3, 4]
    vals = [s.values[0] for s in generate_synthetic(spec)]
    assert len(vals) == 10
    assert all(10 <= v <= 11 for v in vals[6:])


@pytest.mark.parametrize(
    "kwargs",
    [dict(total_size=0), dict(segments=((5, 1),)), dict(segments=((1, 1),)), dict(segments=())],
)
def test_invalid_synthetic_spec(kwargs):
    with pytest.raises(ConfigError):
        SyntheticSpec(**kwargs)


def test_parse_segments():
    assert parse_segments("1:5,30:60") == ((1.0, 5.0), (30.0, 60.0))
    with pytest.raises(ConfigError):
        parse_segments("1-5")


def test_multi_attribute_columns_are_seeded_streams():
    spec = SyntheticSpec(200, seed=7)
    multi = list(generate_synthetic_multi(spec, 3))
    assert multi[0].arity == 3
    col2 = [s.values[2] for s in multi]
    assert col2 == [s.values[0] for s in generate_synthetic(SyntheticSpec(200, seed=9))]


def test_minimal_csv(tmp_path):
    path = tmp_path / "a.csv"
    path.write_text("1.0\n2.0\n3.0")
    samples = list(load_csv(CsvIngestSpec(path)))
    assert [s.values for s in samples] == [(1.0,), (2.0,), (3.0,)]
    assert [s.ordinal for s in samples] == [0, 1, 2]


def test_bad_cell_names_row_and_column(tmp_path):
    path = tmp_path / "a.csv"
    path.write_text("1,2\n3,abc\n")
    with pytest.raises(DataError, match=r"data row 2, column 1"):
        list(load_csv(CsvIngestSpec(path)))


def test_unkept_bad_column_is_ignored(tmp_path):
    path = tmp_path / "a.csv"
    path.write_text("1,UP\n3,DOWN\n")
    samples = list(load_csv(CsvIngestSpec(path, keep_columns=(0,))))
    assert [s.values for s in samples] == [(1.0,), (3.0,)]


def test_ragged_rows(tmp_path):
    path = tmp_path / "a.csv"
    path.write_text("1,2\n3\n")
    with pytest.raises(DataError, match="expected 2 columns"):
        list(load_csv(CsvIngestSpec(path)))


def test_missing_file(tmp_path):
    with pytest.raises(DataError):
        list(load_csv(CsvIngestSpec(tmp_path / "missing.csv")))


def test_header_and_named_columns(tmp_path):
    path = tmp_path / "elec.csv"
    path.write_text(
        "date,period,nswprice,nswdemand,class\n"
        "0,0,0.056443,0.439155,UP\n"
        "0,0.021277,0.051699,0.415055,UP\n"
    )
    spec = CsvIngestSpec(path, keep_columns=("nswdemand", "nswprice"), has_header=True)
    samples = list(load_csv(spec))
    assert samples[1].values == (0.415055, 0.051699)
    with pytest.raises(DataError):
        list(load_csv(CsvIngestSpec(path, keep_columns=("nope",), has_header=True)))
    with pytest.raises(ConfigError):
        list(load_csv(CsvIngestSpec(path, keep_columns=("nswprice",))))


def test_csv_round_trip(tmp_path):
    spec = SyntheticSpec(500, seed=5)
    path = tmp_path / "s.csv"
    assert write_synthetic_csv(spec, path) == 500
    first = path.read_text().splitlines()[0]
    assert first.startswith("# seed=5 segments=1:5,1:10,30:50,30:60")
    loaded = list(load_csv(CsvIngestSpec(path)))
    assert loaded == list(generate_synthetic(spec))


def test_multi_column_round_trip(tmp_path):
    rows = [(1.5, -2.25, 1e-7), (3.0, 4.0, 5.0)]
    path = tmp_path / "m.csv"
    with open(path, "w", newline="") as fh:
        csv.writer(fh).writerows(rows)
    assert [s.values for s in load_csv(CsvIngestSpec(path))] == rows
