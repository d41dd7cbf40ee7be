import csv
import json

import pytest

from hsara.cli import main
from hsara.instance import read_instance


def test_generate_writes_valid_instance(tmp_path):
    out = tmp_path / "inst.json"
    assert main(["generate", "--n", "6", "--seed", "4", "--out", str(out)]) == 0
    inst = read_instance(out)
    assert inst.n == 6


def test_generate_deterministic(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    main(["generate", "--n", "10", "--seed", "1", "--out", str(a)])
    main(["generate", "--n", "10", "--seed", "1", "--out", str(b)])
    assert a.read_text() == b.read_text()


def test_usage_error_exit_code_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve"])  # missing --instance
    assert exc.value.code == 1


def test_unknown_instance_file_exit_code_1(tmp_path):
    assert main(["solve", "--instance", str(tmp_path / "missing.json")]) == 1


def test_solve_is_tmax_zero_equivalence(tmp_path):
    inst_path = tmp_path / "inst.json"
    main(["generate", "--n", "6", "--seed", "2", "--out", str(inst_path)])
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    assert main(["solve", "--instance", str(inst_path), "--method", "is",
                 "--replicas", "30", "--out", str(out_a)]) == 0
    assert main(["solve", "--instance", str(inst_path), "--method", "hm",
                 "--tmax", "0", "--replicas", "30", "--out", str(out_b)]) == 0
    a = json.loads(out_a.read_text())
    b = json.loads(out_b.read_text())
    assert a["objective"] == pytest.approx(b["objective"])
    assert a["routes"] == b["routes"]


def test_solve_output_schema(tmp_path):
    inst_path = tmp_path / "inst.json"
    main(["generate", "--n", "5", "--seed", "3", "--out", str(inst_path)])
    out = tmp_path / "sol.json"
    assert main(["solve", "--instance", str(inst_path), "--method", "hm",
                 "--replicas", "40", "--alpha", "0.5", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    for key in ("routes", "objective", "lower_bound", "gap_percent", "method",
                "wall_time_s", "schedules", "cost_breakdown", "schema_version"):
        assert key in doc
    for sched in doc["schedules"]:
        assert set(sched) == {"route_id", "appointments", "on_time_rate",
                              "cost_breakdown"}
        for entry in sched["appointments"]:
            assert set(entry) == {"customer", "w"}


def test_bench_row_count_and_schema(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--sizes", "5", "--runs", "2",
                 "--methods", "is,hm", "--seed", "1", "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert set(rows[0]) == {"n", "method", "run", "objective", "lower_bound",
                            "gap_percent", "cpu_seconds", "routes"}
    for row in rows:
        assert float(row["objective"]) > 0
        assert row["method"] in ("is", "hm")


def test_bench_em_records_bound_and_gap(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--sizes", "4", "--runs", "1",
                 "--methods", "is,hm,em", "--seed", "2", "--out", str(out)]) == 0
    with open(out) as fh:
        rows = {r["method"]: r for r in csv.DictReader(fh)}
    assert float(rows["em"]["lower_bound"]) > 0
    for method in ("is", "hm", "em"):
        assert rows[method]["gap_percent"] != ""
        assert float(rows[method]["gap_percent"]) >= -1e-9


def test_bench_rejects_unknown_method(tmp_path):
    assert main(["bench", "--sizes", "4", "--runs", "1", "--methods", "zz",
                 "--out", str(tmp_path / "x.csv")]) == 1
