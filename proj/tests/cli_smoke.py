#!/usr/bin/env python3
"""End-to-end checks of the permdiv command line tool.

Usage: cli_smoke.py <permdiv binary> <runrecord schema>
"""
import json
import os
import subprocess
import sys
import tempfile

import jsonschema

BIN, SCHEMA_PATH = sys.argv[1], sys.argv[2]
with open(SCHEMA_PATH) as fh:
    VALIDATOR = jsonschema.Draft202012Validator(json.load(fh))

failures = []


def run(*args, expect=0, env=None):
    full_env = dict(os.environ)
    full_env.pop("PERMDIV_BUDGET", None)
    full_env.pop("PERMDIV_PRECISION_CAP", None)
    full_env.update(env or {})
    proc = subprocess.run([BIN, *args], capture_output=True, text=True, env=full_env)
    if proc.returncode != expect:
        failures.append(f"{' '.join(args)}: exit {proc.returncode}, expected {expect}\n{proc.stderr}")
    return proc


def record(*args, expect=0, env=None):
    proc = run("--format", "json", *args, expect=expect, env=env)
    try:
        doc = json.loads(proc.stdout)
    except json.JSONDecodeError as e:
        failures.append(f"{' '.join(args)}: output is not json ({e})")
        return {}
    for err in VALIDATOR.iter_errors(doc):
        failures.append(f"{' '.join(args)}: schema: {err.message} at {list(err.absolute_path)}")
    return doc


def check(cond, what):
    if not cond:
        failures.append(what)


with tempfile.TemporaryDirectory() as tmp:
    t5 = os.path.join(tmp, "t5.txt")
    run("gen", "--n", "5", "--triangle", "--output", t5)
    with open(t5) as fh:
        t5_text = fh.read()
    check(t5_text.startswith("n=5\n1 2 3 4 5\n"), "gen --output wrote an unexpected family")

    # text format of gen is the raw family, identical to the file
    check(run("gen", "--n", "5", "--triangle").stdout == t5_text, "gen text output differs from --output file")

    star = os.path.join(tmp, "star.txt")
    run("gen", "--n", "4", "--star", "1:1", "--output", star)

    doc = record("diversity", "--input", t5)
    check(doc.get("result", {}).get("gamma") == 4, "diversity of T(5) should be 4")
    check(record("diversity", "--input", star).get("result", {}).get("gamma") == 0, "diversity of a star should be 0")

    doc = record("decompose", "--input", t5)
    check(doc.get("result", {}).get("stop_reason") == "exhausted", "decompose T(5) should exhaust")
    roots = os.path.join(tmp, "roots.txt")
    run("decompose", "--input", t5, "--roots-out", roots)
    doc = record("cascade", "--input", roots)
    check(doc.get("result", {}).get("classification", {}).get("shape") in ("star", "triangle"),
          "cascade of T(5) roots should classify as star or triangle")

    sunflower = os.path.join(tmp, "sunflower.txt")
    with open(sunflower, "w") as fh:
        fh.write("n=4\n1:1 2:2\n1:1 2:3\n1:1 2:4\n")
    doc = record("compress", "--input", sunflower, "--s", "2")
    check(doc.get("result", {}).get("family") == "n=4\n1:1\n", "compress of the classic sunflower")

    doc = record("verify-bounds", "--n", "1000")
    check(doc.get("result", {}).get("certificates", [{}])[0].get("fact22", {}).get("overall") == "proved",
          "verify-bounds 1000 should prove the first bundle")
    record("verify-bounds", "--n", "499", expect=3)

    # Monte Carlo reports are identical across worker counts once the envelope is stripped
    results = []
    for workers in ("1", "2", "5"):
        doc = record("--workers", workers, "montecarlo", "--sym", "3", "--p", "1/2", "--trials", "20000", "--seed", "7")
        results.append(json.dumps(doc.get("result"), sort_keys=True))
    check(len(set(results)) == 1, "montecarlo result depends on the worker count")
    record("montecarlo", "--sym", "2", "--split", "--trials", "1000")
    run("montecarlo", "--triangle", "4", "--r", "3", "--delta", "1/2", "--m", "2", "--trials", "100", expect=3)

    doc = record("search", "--n", "4", "--mode", "exact")
    check(doc.get("result", {}).get("best_gamma") == 1, "exact search at n=4 should give 1")
    record("search", "--n", "5", "--mode", "heuristic", "--iterations", "50", "--restarts", "2")
    doc = record("search", "--n", "6", "--mode", "triangle")
    check(doc.get("result", {}).get("gamma") == 18, "triangle audit at n=6 should give 18")

    # csv and text renderings exist for a structured result
    check(run("--format", "csv", "diversity", "--input", t5).stdout.startswith("key,value\n"), "csv rendering")
    check("gamma: 4" in run("diversity", "--input", t5).stdout, "text rendering")

    # exit codes
    bad = os.path.join(tmp, "bad.txt")
    with open(bad, "w") as fh:
        fh.write("n=3\n1 1 2\n")
    proc = run("diversity", "--input", bad, expect=2)
    check("line 2" in proc.stderr, "parse errors should name the line")
    run("diversity", "--input", os.path.join(tmp, "missing.txt"), expect=2)
    run("compress", "--input", sunflower, "--s", "0", expect=2)
    run("--no-such-flag", "diversity", expect=2)
    run("--budget", "1", "decompose", "--input", t5, expect=4)
    run("decompose", "--input", t5, expect=4, env={"PERMDIV_BUDGET": "1"})
    run("--precision-cap", "8", "verify-bounds", "--n", "500", expect=2)

if failures:
    print("\n".join(failures))
    sys.exit(1)
print("cli smoke: all checks passed")
