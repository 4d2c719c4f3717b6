import csv
import io
import json
import math
import subprocess
import sys

import pytest

from pinchflow import __version__
from pinchflow.cli import RunRecord, format_number, parse_grid, run_command, worker_count
from pinchflow.errors import EmptySeries, ValidationError
from pinchflow.svg import PlotSpec, Series, emit_plot, render_plot

SIM_COLUMNS = "t,min_star_omega,max_star_omega,max_lambda,max_II2,det_drift"


def run(argv):
    buf = io.StringIO()
    code = run_command(argv, stdout=buf)
    return code, buf.getvalue()


def csv_body(text):
    lines = text.split("\n")
    assert lines[0].startswith(f"# pinchflow {__version__} config: ")
    return list(csv.reader(lines[1:-1])), json.loads(lines[0].split("config: ", 1)[1])


# --- helpers ----------------------------------------------------------------------


def test_parse_grid():
    assert parse_grid("1:4:0.5") == [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]
    assert parse_grid("0.05, 0.1") == [0.05, 0.1]
    for bad in ("1:4", "4:1:0.5", "1:2:0", "a,b", ""):
        with pytest.raises(ValidationError):
            parse_grid(bad)


def test_format_number():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(3) == "3"
    assert format_number(True) == "true"
    assert float(format_number(math.pi)) == math.pi


def test_run_record_round_trip():
    rec = RunRecord({"command": "x", "grid": (1, 2)}, {"value": 0.1, "inf": math.inf, "nested": {"a": [1.5]}},
                    ["careful"], wall_time=0.25)
    back = RunRecord.from_json(rec.to_json())
    assert back == rec
    assert back.to_json() == rec.to_json()
    with pytest.raises(ValidationError):
        RunRecord({}, {"version": 1})
    with pytest.raises(ValidationError):
        RunRecord.from_json('{"value": 1}')


def test_worker_count(monkeypatch):
    monkeypatch.setenv("PINCHFLOW_THREADS", "2")
    assert worker_count(10) == 2
    assert worker_count(1) == 1
    monkeypatch.setenv("PINCHFLOW_THREADS", "zero")
    with pytest.raises(ValidationError):
        worker_count(3)
    monkeypatch.setenv("PINCHFLOW_THREADS", "0")
    with pytest.raises(ValidationError):
        worker_count(3)


# --- commands -----------------------------------------------------------------------


def test_constants_csv():
    code, text = run(["constants", "--N", "1", "--mode", "symplectic", "--Lambda-grid", "1:4:0.5"])
    assert code == 0
    rows, cfg = csv_body(text)
    assert rows[0] == ["Lambda", "delta_Lambda"]
    vals = [float(r[1]) for r in rows[1:]]
    assert [float(r[0]) for r in rows[1:]] == [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    assert cfg["command"] == "constants" and cfg["N"] == 1


def test_appendix_json():
    code, text = run(["appendix"])
    assert code == 0
    body = json.loads(text)
    assert body["alpha0"] == pytest.approx(1.238756, abs=1e-5)
    assert body["g0"] == pytest.approx(0.141446, abs=1e-5)
    assert body["x_star"] == pytest.approx(0.8895436175241, abs=1e-12)
    assert body["version"] == __version__ and body["config"]["command"] == "appendix"
    RunRecord.from_json(text)


def test_curvature_json():
    code, text = run(["curvature", "--space", "grassmann", "--n", "1", "--m", "2", "--samples", "200",
                      "--condition-samples", "3"])
    assert code == 0
    body = json.loads(text)
    assert body["gap_is_4delta"] is True


def test_simulate_csv_and_repeatability(tmp_path):
    out = tmp_path / "run.csv"
    argv = ["simulate", "--kind", "shears", "--eps", "0.1", "--L", "32", "--t-end", "0.05",
            "--record-every", "50", "--out", str(out)]
    assert run_command(argv) == 0
    first = out.read_bytes()
    assert run_command(argv) == 0
    assert out.read_bytes() == first
    assert b"\r" not in first
    rows, _ = csv_body(first.decode())
    assert ",".join(rows[0]) == SIM_COLUMNS
    assert float(rows[-1][0]) == 0.05
    # 17 significant digits survive the text round trip
    assert all(float(format_number(float(v))) == float(v) for v in rows[1])


def test_simulate_json_and_svg(tmp_path):
    code, text = run(["simulate", "--kind", "identity", "--L", "32", "--t-end", "0.01", "--format", "json"])
    assert code == 0
    body = RunRecord.from_json(text).result
    assert all(r["max_II2"] == 0.0 for r in body["records"])
    svg = tmp_path / "id.svg"
    assert run_command(["simulate", "--kind", "identity", "--L", "32", "--t-end", "0.01", "--out", str(svg)]) == 0
    doc = svg.read_text()
    assert doc.startswith("<svg") and "<metadata>" in doc


def test_simulate_riccati_json():
    code, text = run(["simulate", "--kind", "shears", "--eps", "0.1", "--L", "32", "--t-end", "0.2",
                      "--record-every", "200", "--riccati", "--format", "json"])
    assert code == 0
    rep = json.loads(text)["riccati"]
    assert rep["K1"] < 0 and rep["bound_holds"]


def test_exit_codes(capsys):
    assert run(["simulate", "--dt-factor", "0.3", "--L", "32"])[0] == 2
    assert run(["simulate", "--kind", "linear", "--A", "2,0,0,1", "--L", "32"])[0] == 1
    assert run(["constants", "--Lambda-grid", "nope"])[0] == 1
    assert run(["bogus"])[0] == 1
    assert run(["simulate", "--L", "33"])[0] == 1
    err = capsys.readouterr().err
    assert "usage:" in err


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"eps": 0.05, "t_end": 5.0, "L": 32, "record_every": 100}))
    code, text = run(["simulate", "--config", str(cfg), "--t-end", "0.02"])
    assert code == 0
    rows, echo = csv_body(text)
    assert echo["eps"] == 0.05 and echo["t_end"] == 0.02 and echo["L"] == 32
    assert float(rows[-1][0]) == 0.02
    cfg.write_text(json.dumps({"not_an_option": 1}))
    assert run(["simulate", "--config", str(cfg)])[0] == 1
    cfg.write_text("[1, 2]")
    assert run(["simulate", "--config", str(cfg)])[0] == 1


def test_sweep_sorted_and_thread_cap(monkeypatch):
    argv = ["sweep", "--eps-list", "0.1,0.05", "--harmonics-list", "2,1", "--L-list", "32", "--t-end", "0.01",
            "--record-every", "100"]
    monkeypatch.setenv("PINCHFLOW_THREADS", "1")
    code, one = run(argv)
    monkeypatch.setenv("PINCHFLOW_THREADS", "4")
    code4, four = run(argv)
    assert code == code4 == 0
    assert one == four
    rows, _ = csv_body(one)
    keys = [(float(r[0]), int(r[1])) for r in rows[1:]]
    assert keys == sorted(keys) and len(keys) == 4
    assert all(r[3] == "ok" for r in rows[1:])


def test_sweep_failure_exit_code():
    assert run(["sweep", "--eps-list", "0.1", "--L-list", "32", "--t-end", "0.01", "--dt-factor", "0.3"])[0] == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "pinchflow", "appendix"], capture_output=True, text=True)
    assert out.returncode == 0 and '"x_star"' in out.stdout


# --- svg ------------------------------------------------------------------------


def test_svg_deterministic(tmp_path):
    series = [Series("a", [0, 1, 2], [1e-1, 1e-3, 1e-6]), Series("b", [0, 1, 2], [1, 1e-2, 0.0], dashed=True)]
    spec = PlotSpec("decay", ylabel="|II|^2", log_y=True, metadata="cfg <x>")
    a, b = render_plot(series, spec), render_plot(series, spec)
    assert a == b
    assert "cfg &lt;x&gt;" in a and "stroke-dasharray" in a
    path = emit_plot(series, spec, tmp_path / "p.svg")
    assert path.read_bytes() == a.encode()


def test_svg_flat_lines():
    doc = render_plot([Series("flat", [0, 1], [0.5, 0.5])], PlotSpec())
    assert doc.count("<polyline") == 1


def test_svg_empty():
    with pytest.raises(EmptySeries):
        render_plot([], PlotSpec())
    with pytest.raises(EmptySeries):
        render_plot([Series("zeros", [0, 1], [0.0, 0.0])], PlotSpec(log_y=True))
