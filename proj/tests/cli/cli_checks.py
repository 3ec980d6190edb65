#!/usr/bin/env python3
"""End-to-end checks of the nonstop command line.

usage: cli_checks.py <nonstop binary> <configs dir> <schema> <case>
"""

import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

BIN, CONFIGS, SCHEMA, CASE = sys.argv[1:5]
REPRO = str(Path(CONFIGS) / "reproduction.yaml")
SHORT = ["--override", "timing.duration=1.0"]


def nonstop(*args, env=None):
    proc = subprocess.run([BIN, *args], capture_output=True, text=True, env=env, timeout=600)
    return proc.returncode, proc.stdout + proc.stderr


def expect(cond, msg):
    if not cond:
        print("FAIL:", msg)
        sys.exit(1)


def validate(path):
    schema = json.loads(Path(SCHEMA).read_text())
    doc = json.loads(Path(path).read_text())
    jsonschema.validate(doc, schema)
    return doc


def case_seed_check(tmp):
    out = tmp / "run"
    code, log = nonstop("run", REPRO, "--out", str(out), "--seed-check", *SHORT)
    expect(code == 0, f"exit {code}: {log}")
    expect("seed-check: PASS" in log, log)
    expect((out / "trace.csv").stat().st_size > 0, "empty trace")


def case_outputs(tmp):
    out = tmp / "run"
    code, log = nonstop("run", REPRO, "--out", str(out), *SHORT)
    expect(code == 0, f"exit {code}: {log}")
    doc = validate(out / "summary.json")
    expect(doc["status"] == "completed", doc["status"])
    expect(doc["metrics"]["ticks"] == 201, doc["metrics"]["ticks"])
    lines = (out / "trace.csv").read_text().splitlines()
    expect(len(lines) == 202, len(lines))
    expect(len(lines[0].split(",")) == 44 + 18 * 4, "column count")
    for name in ["desired_trajectory", "load_position", "carrier_paths", "carrier_speeds",
                 "tracking_errors", "tensions", "oscillation"]:
        expect((out / "plotdata" / f"{name}.csv").exists(), name)


def case_all_configs(tmp):
    for cfg in sorted(Path(CONFIGS).glob("*.yaml")):
        out = tmp / cfg.stem
        code, log = nonstop("run", str(cfg), "--out", str(out), *SHORT)
        expect(code == 0, f"{cfg.name}: exit {code}: {log}")
        validate(out / "summary.json")


def case_invalid_config(tmp):
    bad = tmp / "bad.yaml"
    bad.write_text("geometry:\n  carriers: 2\n")
    code, log = nonstop("run", str(bad), "--out", str(tmp / "x"))
    expect(code == 2, f"carriers 2: exit {code}")
    expect("carriers" in log, log)
    bad.write_text("cable:\n  stiffness: 500\n  stifness: 1\n")
    code, log = nonstop("run", str(bad), "--out", str(tmp / "x"))
    expect(code == 2, f"unknown key: exit {code}")
    expect("bad.yaml:3:" in log and "cable.stifness" in log, log)
    code, log = nonstop("run", REPRO, "--out", str(tmp / "x"), "--override", "cable.stiffness=-5")
    expect(code == 2, f"negative stiffness override: exit {code}")
    code, log = nonstop("run", str(tmp / "missing.yaml"), "--out", str(tmp / "x"))
    expect(code == 2, f"missing file: exit {code}")
    expect(not (tmp / "x").exists(), "no output for an invalid config")


def case_abort(tmp):
    out = tmp / "run"
    code, log = nonstop("run", REPRO, "--out", str(out), *SHORT, "--override", "controller.tension_floor=3.0")
    expect(code == 3, f"exit {code}: {log}")
    doc = validate(out / "summary.json")
    expect(doc["status"] == "aborted" and doc["exit_code"] == 3, doc["status"])
    expect(doc["abort"]["code"] == "low_tension", doc["abort"])


def case_fallback_budget(tmp):
    out = tmp / "run"
    code, log = nonstop("run", REPRO, "--out", str(out), *SHORT, "--override", "epsilon=50",
                        "--override", "optimizer.max_fallbacks=2")
    expect(code == 4, f"exit {code}: {log}")
    doc = validate(out / "summary.json")
    expect(doc["exit_code"] == 4 and doc["metrics"]["fallback_count"] == 3, doc["metrics"]["fallback_count"])


def case_compare(tmp):
    out = tmp / "cmp"
    code, log = nonstop("compare", REPRO, "--out", str(out), *SHORT)
    expect(code == 0, f"exit {code}: {log}")
    expect("optimizer off" in log and "optimizer on" in log, log)
    doc = json.loads((out / "comparison.json").read_text())
    expect(set(doc) >= {"off", "on", "delta"}, sorted(doc))
    expect((out / "comparison.txt").exists(), "comparison.txt")
    off = validate(out / "off" / "summary.json")
    on = validate(out / "on" / "summary.json")
    expect(not off["optimizer_enabled"] and on["optimizer_enabled"], "optimizer flags")


def case_output_root(tmp):
    env = dict(os.environ, NONSTOP_OUTPUT_ROOT=str(tmp / "root"))
    code, log = nonstop("run", REPRO, *SHORT, env=env)
    expect(code == 0, f"exit {code}: {log}")
    validate(tmp / "root" / "reproduction" / "summary.json")


def main():
    cases = {name[5:]: fn for name, fn in globals().items() if name.startswith("case_")}
    if CASE not in cases:
        print("unknown case", CASE, "choose from", sorted(cases))
        return 2
    with tempfile.TemporaryDirectory(prefix="nonstop_cli_") as d:
        cases[CASE](Path(d))
    print("ok:", CASE)
    return 0


if __name__ == "__main__":
    sys.exit(main())
