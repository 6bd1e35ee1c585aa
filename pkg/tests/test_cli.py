import csv
import io
import json

import pytest

from streamnorm.cli import main


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_gen_writes_rows(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["gen", "--size", "20000", "--seed", "1", "-o", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# seed=1 ")
    assert len(lines) == 20001


def test_gen_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["gen", "--size", "500", "--seed", "9", "-o", str(a)])
    main(["gen", "--size", "500", "--seed", "9", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_gen_rejects_zero_size(capsys):
    assert main(["gen", "--size", "0"]) == 1
    assert "size" in capsys.readouterr().err


def test_gen_unwritable_path(tmp_path):
    assert main(["gen", "--size", "5", "-o", str(tmp_path / "no" / "such" / "dir.csv")]) == 2


def test_unknown_flag_is_usage_error():
    assert main(["gen", "--bogus"]) == 1
    assert main([]) == 1


@pytest.fixture
def illustration_csv(tmp_path):
    path = tmp_path / "ill.csv"
    path.write_text("\n".join(str(v) for v in [20, 25, 30, 35, 40, 80, 85, 90, 95, 100]) + "\n")
    return path


def test_normalize_golden(tmp_path, illustration_csv):
    out = tmp_path / "out.csv"
    rc = main(["normalize", "-i", str(illustration_csv), "-m", "5", "-n", "5",
               "-d", "0.5", "-o", str(out)])
    assert rc == 0
    got = [float(x) for x in out.read_text().split()]
    assert got == [0.0, 0.25, 0.5, 0.75, 1.0] * 2
    events = [json.loads(x) for x in (tmp_path / "out.csv.events.jsonl").read_text().splitlines()]
    assert events == [{
        "window_id": 2, "attribute": 0, "kind": "replace",
        "old_min": 20.0, "old_max": 40.0, "new_min": 80.0, "new_max": 100.0,
        "observed_change": 2.0,
    }]


def test_normalize_method1_needs_range(illustration_csv):
    assert main(["normalize", "-i", str(illustration_csv), "-m", "1"]) == 1


def test_normalize_method1_with_range(tmp_path, illustration_csv):
    out = tmp_path / "o.csv"
    rc = main(["normalize", "-i", str(illustration_csv), "-m", "1",
               "--known-min", "20", "--known-max", "100", "-o", str(out)])
    assert rc == 0
    assert [float(x) for x in out.read_text().split()][:2] == [0.0, 0.0625]


def test_normalize_window_larger_than_stream(tmp_path, illustration_csv):
    out = tmp_path / "o.csv"
    assert main(["normalize", "-i", str(illustration_csv), "-n", "1000", "-o", str(out)]) == 0
    got = [float(x) for x in out.read_text().split()]
    assert got == [(x - 20) / 80 for x in [20, 25, 30, 35, 40, 80, 85, 90, 95, 100]]


def test_normalize_bad_cell(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("1\n2\nxyz\n")
    assert main(["normalize", "-i", str(path), "-o", str(tmp_path / "o.csv")]) == 2
    assert "data row 3" in capsys.readouterr().err


def test_compare_constant_stream(tmp_path, capsys):
    path = tmp_path / "c.csv"
    path.write_text("3.5\n" * 40)
    assert main(["compare", "-i", str(path), "-n", "10", "-d", "0.5"]) == 0
    (row,) = read_csv(capsys.readouterr().out)
    assert [float(row[f"1vs{k}"]) for k in (2, 3, 4, 5)] == [0.0] * 4


def test_compare_sweep_csv(capsys):
    rc = main(["compare", "--size", "4000", "--seed", "1", "--window-size", "10,25,50,100"])
    assert rc == 0
    rows = read_csv(capsys.readouterr().out)
    assert len(rows) == 16
    assert {r["window_size"] for r in rows} == {"10", "25", "50", "100"}
    assert {r["method"] for r in rows} == {"2", "3", "4", "5"}


def test_compare_json_embeds_config(capsys):
    assert main(["compare", "--size", "2000", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["config"]["threshold"] == 0.5
    assert doc["config"]["seed"] == 0
    assert doc["reports"][0]["known_range"] == [[1.0, 60.0]]


def test_bench_rows(capsys):
    rc = main(["bench", "--size", "2000", "-p", "1,2", "--duration-seconds", "0.5"])
    assert rc == 0
    rows = read_csv(capsys.readouterr().out)
    assert [r["parallelism"] for r in rows] == ["1", "2"]
    assert float(rows[0]["throughput_pps"]) > 0


def test_bench_zero_duration():
    assert main(["bench", "--duration-seconds", "0"]) == 1


def test_scaling_single_size(capsys):
    assert main(["scaling", "--sizes", "1000", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["rows"]) == 1 and doc["rows"][0]["size"] == 1000
    assert doc["config"]["method"] == 5


def test_scaling_repeats(capsys):
    assert main(["scaling", "--sizes", "0,500,1000", "--repeats", "3"]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert [int(r["size"]) for r in rows] == [0, 500, 1000]
    assert all(r["repeats"] == "3" for r in rows)
