import csv
import json

import pytest

from emsched.cli import main, sweep_rows

from conftest import DIAMOND, make_instance


@pytest.fixture
def files(tmp_path):
    zero = make_instance(4, DIAMOND, m=2, E=16.0)
    delayed = make_instance(4, [(0, 1, 0.3), (0, 2, 0.3), (1, 3, 0.2), (2, 3, 0.2)], m=2, E=16.0, rho=1.0, R=1.0)
    paths = {"zero": tmp_path / "zero.json", "delayed": tmp_path / "delayed.json"}
    paths["zero"].write_text(zero.dumps())
    paths["delayed"].write_text(delayed.dumps())
    return tmp_path, paths


@pytest.mark.parametrize(
    "algorithm, which",
    [
        ("unlimited", "zero"),
        ("list", "zero"),
        ("two-proc", "zero"),
        ("small-delay", "delayed"),
        ("small-delay-m", "delayed"),
        ("large-delay", "delayed"),
    ],
)
def test_solve_then_validate(files, capsys, algorithm, which):
    tmp, paths = files
    out = tmp / f"{algorithm}.json"
    assert main(["solve", "-a", algorithm, str(paths[which]), "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["certificate"]["algorithm"] == algorithm.replace("-", "_")
    printed = capsys.readouterr().out
    assert printed.startswith("makespan ")
    assert main(["validate", str(paths[which]), str(out)]) == 0
    assert "feasible: yes" in capsys.readouterr().out


def test_validate_reports_violation(files, capsys):
    tmp, paths = files
    bad = tmp / "bad.json"
    bad.write_text(json.dumps({"segments": [
        {"task": 0, "processor": 0, "start": 0.0, "end": 1.0},
        {"task": 1, "processor": 0, "start": 0.5, "end": 1.5},
        {"task": 2, "processor": 1, "start": 1.0, "end": 2.0},
        {"task": 3, "processor": 1, "start": 2.0, "end": 3.0},
    ]}))
    assert main(["validate", str(paths["zero"]), str(bad)]) == 1
    text = capsys.readouterr().out
    assert "co-occurrence" in text and "precedence" in text


def test_sweep_is_non_increasing(files, capsys):
    tmp, paths = files
    out = tmp / "sweep.csv"
    assert main(["sweep", str(paths["zero"]), "--e-min", "1", "--e-max", "50", "--steps", "6", "--log",
                 "-o", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == ["energy_budget", "makespan", "energy_used", "lower_bound", "certified_factor"]
    spans = [float(r["makespan"]) for r in rows]
    assert all(b <= a + 1e-6 for a, b in zip(spans, spans[1:]))
    assert float(rows[0]["energy_budget"]) == 1.0 and float(rows[-1]["energy_budget"]) == 50.0


def test_sweep_rows_helper():
    rows = sweep_rows(make_instance(2, [(0, 1)], E=1.0), [2.0, 8.0])
    assert rows[0]["makespan"] == pytest.approx(2.0, rel=1e-5)
    assert rows[1]["makespan"] == pytest.approx(1.0, rel=1e-5)


def test_oracle_command(files, capsys):
    tmp, paths = files
    assert main(["oracle", str(paths["delayed"])]) == 0
    text = capsys.readouterr().out
    assert "with delays" in text and "grid optimum" in text
    d = tmp / "d.json"
    d.write_text(json.dumps({"durations": [1, 1, 1, 1]}))
    assert main(["oracle", str(paths["zero"]), "--fixed-d", str(d)]) == 0
    assert "optimal makespan, m=2, with delays: 3" in capsys.readouterr().out
    d.write_text("[1, 1]")
    assert main(["oracle", str(paths["zero"]), "--fixed-d", str(d)]) == 2


def test_gantt_command(files, capsys):
    tmp, paths = files
    sched = tmp / "s.json"
    main(["solve", "-a", "list", str(paths["zero"]), "-o", str(sched)])
    a, b = tmp / "a.svg", tmp / "b.svg"
    assert main(["gantt", str(sched), "--instance", str(paths["zero"]), "-o", str(a)]) == 0
    assert main(["gantt", str(sched), "-o", str(b)]) == 0
    n_segments = len(json.loads(sched.read_text())["segments"])
    assert a.read_text().count("<rect") == n_segments
    main(["gantt", str(sched), "--instance", str(paths["zero"]), "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_error_exit_codes(files, capsys):
    tmp, paths = files
    assert main(["solve", "-a", "list", str(tmp / "missing.json")]) == 2
    assert capsys.readouterr().err.startswith("emsched: io: ")
    broken = tmp / "broken.json"
    broken.write_text('{"tasks": [')
    assert main(["solve", "-a", "list", str(broken)]) == 2
    err = capsys.readouterr().err
    assert err.startswith("emsched: ") and "syntax error" in err and err.count("\n") == 1
    # list scheduling refuses instances with delays
    assert main(["solve", "-a", "list", str(paths["delayed"])]) == 2
    assert main(["sweep", str(paths["zero"]), "--e-min", "5", "--e-max", "1", "--steps", "3"]) == 2
    assert "emsched: usage: " in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        main(["solve", "-a", "nope", str(paths["zero"])])
    assert exc.value.code == 2


def test_infeasible_energy_exit_code(tmp_path, capsys):
    from emsched import Constant, Instance, Task

    inst = Instance((Task(0, Constant(5.0)),), (), 1, 1.0)
    p = tmp_path / "c.json"
    p.write_text(inst.dumps())
    code = main(["solve", "-a", "unlimited", str(p)])
    assert code == 1
    assert capsys.readouterr().err.startswith("emsched: ")
