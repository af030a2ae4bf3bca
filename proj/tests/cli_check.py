"""Runs the slice CLI once (or twice) and checks exit code and output."""

import argparse
import json
import subprocess
import sys


def run(binary, args, env=None):
    return subprocess.run([binary] + args, capture_output=True, env=env)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--binary", required=True)
    ap.add_argument("--expect-exit", type=int, default=0)
    ap.add_argument("--schema")
    ap.add_argument("--contains", action="append", default=[])
    ap.add_argument("--min-checks", type=int)
    ap.add_argument("--dim-V", type=int)
    ap.add_argument("--deterministic", action="store_true")
    ap.add_argument("cli_args", nargs=argparse.REMAINDER)
    opts = ap.parse_args()
    args = opts.cli_args[1:] if opts.cli_args[:1] == ["--"] else opts.cli_args

    first = run(opts.binary, args)
    if first.returncode != opts.expect_exit:
        sys.stderr.write(first.stderr.decode())
        sys.exit(f"exit code {first.returncode}, expected {opts.expect_exit}")
    out = first.stdout.decode()
    for needle in opts.contains:
        if needle not in out and needle not in first.stderr.decode():
            sys.exit(f"output does not mention {needle!r}")

    if opts.deterministic:
        again = run(opts.binary, args, env={"SLICE_NUM_THREADS": "1"})
        if again.stdout != first.stdout:
            sys.exit("output differs between runs")

    if opts.schema or opts.min_checks is not None or opts.dim_V is not None:
        doc = json.loads(out)
        if opts.schema:
            import jsonschema

            with open(opts.schema) as f:
                schema = json.load(f)
            jsonschema.validate(doc, schema)
        if opts.min_checks is not None:
            names = {c["name"] for p in doc["points"] for c in p["checks"]}
            if len(names) < opts.min_checks:
                sys.exit(f"only {len(names)} distinct checks")
        if opts.dim_V is not None and doc["dims"]["V"] != opts.dim_V:
            sys.exit(f"dims.V = {doc['dims']['V']}, expected {opts.dim_V}")


if __name__ == "__main__":
    main()
