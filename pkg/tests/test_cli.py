import io
import json
import subprocess
import sys

import pytest

from rassign.cli import main, verify_schedule
from rassign.instance import parse_instance

I2_TEXT = (
    '{"machines":2,"jobs":[{"p":"1","allowed":[0,1]},'
    '{"p":"1/2","allowed":[0]},{"p":"1/2","allowed":[1]}]}'
)


def call(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


@pytest.fixture
def i2_file(tmp_path):
    path = tmp_path / "i2.json"
    path.write_text(I2_TEXT)
    return path


def test_gen_deterministic():
    a = call("gen", "--machines", 3, "--jobs", 6, "--seed", 4, "--density", "1/2")
    b = call("gen", "--machines", 3, "--jobs", 6, "--seed", 4, "--density", "1/2")
    assert a == b and a[0] == 0
    inst = parse_instance(a[1])
    assert inst.machine_count == 3 and inst.n == 6


def test_gen_custom_sizes():
    code, out = call("gen", "--machines", 2, "--jobs", 5, "--seed", 1, "--sizes", "1/2,1")
    assert code == 0
    assert {j["p"] for j in json.loads(out)["jobs"]} <= {"1/2", "1"}


def test_lp_opt_star(i2_file):
    code, out = call("lp", "--input", i2_file)
    doc = json.loads(out)
    assert code == 0 and doc["opt_star"] == "3/2" and doc["feasible"]


def test_lp_at_T(i2_file):
    code, out = call("lp", "--input", i2_file, "--T", 1)
    assert code == 0 and json.loads(out)["feasible"] is False


def test_lp_guard(tmp_path):
    path = tmp_path / "wide.json"
    path.write_text(json.dumps({"machines": 1, "jobs": [{"p": "1/100", "allowed": [0]}] * 25}))
    code, _ = call("lp", "--input", path, "--T", 1, "--limit", 20)
    assert code == 4


def test_schedule_and_verify(i2_file, tmp_path):
    code, out = call("schedule", "--input", i2_file, "--T", "3/2", "--debug-invariants")
    assert code == 0
    doc = json.loads(out)
    assert doc["makespan"] == "3/2" and doc["ratio_bound"] == "11/6"
    sched = tmp_path / "s.json"
    sched.write_text(out)
    code, out = call("verify", "--input", i2_file, "--schedule", sched, "--exact")
    report = json.loads(out)
    assert code == 0 and report["ok"] and report["opt"] == "3/2"


def test_schedule_stuck_exit_2(i2_file):
    code, out = call("schedule", "--input", i2_file, "--T", "1/2")
    cert = json.loads(out)
    assert code == 2
    assert cert["claim1"] and cert["claim2"]
    assert cert["objective"].startswith("-")


def test_schedule_trace(i2_file, tmp_path):
    trace = tmp_path / "trace.jsonl"
    code, _ = call("schedule", "--input", i2_file, "--T", "3/2", "--trace", trace)
    assert code == 0
    events = [json.loads(line) for line in trace.read_text().splitlines()]
    assert events and {e["event"] for e in events} <= {"add_blocker", "perform_move", "stuck"}


def test_estimate(i2_file):
    code, out = call("estimate", "--input", i2_file)
    doc = json.loads(out)
    assert code == 0
    assert doc["schedule"]["makespan"] == "3/2"
    assert doc["estimate"] == "11/6" and doc["T_hi"] == "1"


def test_verify_offending_job(i2_file, tmp_path):
    sched = tmp_path / "bad.json"
    sched.write_text(json.dumps({"assignment": [0, 1, 1], "makespan": "3/2"}))
    code, out = call("verify", "--input", i2_file, "--schedule", sched)
    report = json.loads(out)
    assert code == 3 and not report["ok"]
    assert report["violations"][0]["job"] == 1


def test_verify_wrong_makespan(I2):
    report = verify_schedule(I2, {"assignment": [0, 0, 1], "makespan": "1"})
    assert not report["ok"] and report["makespan"] == "3/2"


def test_invalid_input_exit_3(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"machines":1,"jobs":[{"p":"0","allowed":[0]}]}')
    assert call("lp", "--input", path)[0] == 3
    assert call("schedule", "--input", tmp_path / "missing.json", "--T", 1)[0] == 3


def test_bench(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    for seed in range(3):
        (corpus / f"g{seed}.json").write_text(
            call("gen", "--machines", 3, "--jobs", 6, "--seed", seed)[1]
        )
    code, serial = call("bench", "--corpus", corpus)
    assert code == 0
    assert serial.splitlines()[0].startswith("instance_path,machines,jobs,opt_star")
    assert len(serial.splitlines()) == 4
    code, parallel = call("bench", "--corpus", corpus, "--parallel", 2)
    assert code == 0 and parallel == serial


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "rassign.cli", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "schedule" in proc.stdout
