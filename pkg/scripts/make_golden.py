"""Regenerate tests/golden/*.json from the current CLI.

Each file holds argv, the exit code and the parsed stdout.  Review the diff
before committing: these files freeze behaviour.
"""

import io
import json
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

from levelset import cli

HALVES = "[0]+p^1 t^0 O; [1]+p^1 t^0 O"
A_AB = "union([1/2] + p^0 t^1 O, [0] + p^0 t^0 O)"

CASES = {
    "axioms_strict": ["axioms", "--mode", "strict", "--window", "U=0,1;lo=-1;hi=1"],
    "axioms_compatible": ["axioms", "--mode", "compatible", "--window", "U=0,1;lo=-1;hi=1"],
    "axioms_z": ["axioms", "--structure", '{"kind": "zstride", "d": 2}', "--window", "U=x;lo=-3;hi=1"],
    "rigidity_field3": ["rigidity", "--field", "3,3", "--window", "U=-1,0,1;lo=-1,-1;hi=1,1"],
    "rigidity_z": ["rigidity", "--structure", '{"kind": "zstride", "d": 1}', "--window", "U=x;lo=-2;hi=1"],
    "intersect_nested": ["intersect", "[0]+p^0 t^0 O", "[1]+p^1 t^0 O"],
    "intersect_empty": ["intersect", "[0]+p^1 t^0 O", "[1]+p^1 t^0 O"],
    "canon": ["canon", "--field", "3,3", "[7 + 1/3*t2^1*t3^1] + p^1 t2^0 t3^0 O"],
    "normalize": ["normalize", "union([0]+p^1 t^0 O, [1]+p^1 t^0 O)"],
    "level": ["level", A_AB],
    "uniform_fail": ["uniform", A_AB],
    "uniform_ok": ["uniform", "diff([0]+p^0 t^0 O, [0] + t^1 OO)"],
    "classify_S": ["classify", "diff([0]+p^0 t^0 O, [0]+p^0 t^0 O)"],
    "measure": ["measure", "--field", "2,2", "[5] + p^2 t^-1 O"],
    "measure_rank1": ["measure", "[0] + t^1 OO"],
    "ddd": ["ddd", "diff([0]+p^0 t^0 O, [0]+p^1 t^0 O, [1]+p^2 t^0 O)"],
    "cover_halves": ["cover", "--field", "2,2", "--target", "[0]+p^0 t^0 O", "--gamma", "0", "--family", HALVES],
    "cover_missing": ["cover", "--target", "[0]+p^0 t^0 O", "--family", "[0]+p^1 t^0 O"],
    "cover_bad_gamma": ["cover", "--target", "[0]+p^0 t^0 O", "--gamma", "1", "--family", HALVES],
    "subcover_mixed": [
        "subcover", "--target", "[0]+p^1 t^0 O",
        "--family", "[0]+p^0 t^-1 O; [2]+p^2 t^0 O; [0]+p^2 t^0 O",
    ],
    "fip_halves": ["fip", "--target", "[0]+p^0 t^0 O", "--family", HALVES],
    "fip_single": ["fip", "--target", "[0]+p^0 t^0 O", "--family", "[0]+p^1 t^0 O"],
    "demo": ["demo-no-subcover", "--j", "0", "--k", "3"],
    "zlevel_primes": ["zlevel", "--d", "1", "--set", "primes", "--window", "0,100"],
    "zlevel_evens": ["zlevel", "--d", "1", "--set", "evens", "--window", "0,100"],
    "zlevel_typeL": ["zlevel", "--set", "typeL:4"],
    "twin": ["twin", "--k", "5", "--N", "10000"],
    "twin_anomaly": ["twin", "--k", "1", "--N", "10"],
    "induce": ["induce", "--p", "3", "--i-lo", "0", "--i-hi", "1", "--j-lo", "-1", "--j-hi", "1"],
    "inflate": ["inflate", "--pivot", "1", "--window", "U=0,1;lo=-1,-1;hi=1,1"],
    "stack": ["stack", "--p", "2"],
    "product_check": ["product-check", "--window", "U=0/0,1/0,0/1;lo=-1;hi=1"],
    "oracle_check": ["oracle-check", "union([0]+p^1 t^0 O, [1]+p^1 t^0 O)", "[0]+p^0 t^0 O"],
    "parse_error": ["level", "union([0]+p^1 t^0 O"],
    "usage_error": ["cover", "--target", "[0]+p^0 t^0 O"],
}


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        try:
            code = cli.main(argv)
        except SystemExit as exc:
            code = exc.code
    text = out.getvalue()
    return code, json.loads(text) if text.strip() else None


def main():
    dest = Path(__file__).resolve().parent.parent / "tests" / "golden"
    dest.mkdir(parents=True, exist_ok=True)
    for name, argv in CASES.items():
        code, out = run(argv)
        case = {"argv": argv, "exit": code, "stdout": out}
        (dest / f"{name}.json").write_text(json.dumps(case, sort_keys=True, indent=1) + "\n")
        print(f"{name}: exit {code}")


if __name__ == "__main__":
    main()
