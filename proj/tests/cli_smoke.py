#!/usr/bin/env python3
import csv
import json
import subprocess
import sys
import tempfile
import xml.etree.ElementTree as ET
from pathlib import Path

RHAM = sys.argv[1]
failures = []


def check(cond, what):
    if not cond:
        failures.append(what)
        print("FAIL:", what)


def run(*args, expect=0):
    p = subprocess.run([RHAM, *args], capture_output=True, text=True)
    check(p.returncode == expect, f"{' '.join(args)} exited {p.returncode}, wanted {expect}: {p.stderr.strip()}")
    return p


CHEAP = ["--set", "spatial_max=4"]

CASES = {
    "sample-field": (["--plot"], ["field.csv", "field_t0.svg"]),
    "flow": (["--samples", "2", "--plot"], ["curves.jsonl", "curves.svg"]),
    "diffusion": (["--samples", "2", "--set", "points=200", "--set", "times=0,0.5,1"],
                  ["diffusion.csv", "diffusion_grid.csv"]),
    "intersections": (["--samples", "3", "--set", "lagrangians=L1,L4", "--plot"],
                      ["intersections.csv", "intersections.jsonl", "curves.svg"]),
    "random-walk": (["--samples", "2", "--set", "walk_steps=3"], ["walks.csv"]),
    "rkhs-norm": (["--samples", "5"], ["rkhs.csv"]),
    "tails": (["--samples", "1000", "--set", "osc_spatial_grid=16", "--set", "osc_time_grid=3", "--plot"],
              ["tails.csv", "osc.jsonl"]),
    "concentration": (["--samples", "5", "--regularity", "0.2", "--regularity", "0.5"],
                      ["concentration.csv"]),
    "inversion": (["--samples", "30", "--plot"], ["inversion.csv"]),
}

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    for cmd, (extra, files) in CASES.items():
        out = tmp / cmd
        p = run(cmd, *CHEAP, *extra, "--seed", "5", "--out", str(out))
        check((out / "config.txt").is_file(), f"{cmd}: config.txt missing")
        for f in files:
            check((out / f).is_file(), f"{cmd}: {f} missing")
        for svg in out.glob("*.svg"):
            try:
                root = ET.parse(svg).getroot()
                check(root.tag.endswith("svg"), f"{svg.name}: root is {root.tag}")
            except ET.ParseError as e:
                check(False, f"{cmd}/{svg.name}: {e}")
        for js in out.glob("*.jsonl"):
            for line in js.read_text().splitlines():
                json.loads(line)
        for table in out.glob("*.csv"):
            with open(table) as fh:
                rows = list(csv.reader(fh))
            check(len(rows) >= 2, f"{cmd}/{table.name}: no data rows")

        # the echoed configuration reproduces the run exactly
        again = tmp / (cmd + "-again")
        q = run(cmd, "--config", str(out / "config.txt"), "--out", str(again))
        check(p.stdout == q.stdout, f"{cmd}: rerun from config.txt changed the summary")
        for f in files:
            if f.endswith(".csv") or f.endswith(".jsonl"):
                check((out / f).read_bytes() == (again / f).read_bytes(), f"{cmd}: rerun changed {f}")

    bad = tmp / "bad.txt"
    bad.write_text("samples = 3\nsamples = 4\n")
    p = run("flow", "--config", str(bad), expect=3)
    check("line 2" in p.stderr, "repeated key error names the line")
    run("flow", "--set", "no_such_key=1", expect=3)
    run("flow", "--set", "regularity=-0.5", expect=4)
    run("tails", "--samples", "10", expect=4)

if failures:
    print(f"{len(failures)} CLI check(s) failed")
    sys.exit(1)
print("CLI smoke: all checks passed")
