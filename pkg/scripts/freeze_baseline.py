"""Freeze the exact-vs-theory deviation profile used as a regression baseline.

    python scripts/freeze_baseline.py [--out tests/data/deviation_baseline.json]
"""

import argparse
import json
import pathlib
import time

from photonsim.experiment import ExperimentConfig, run_exact
from photonsim.pointer import DEFAULT_LAMBDA
from photonsim.theory import NONPROTECTIVE, PROTECTIVE, TheoryParams, nonprotective_T, protective_prob

N_MAX = {PROTECTIVE: 14, NONPROTECTIVE: 20}
DEFAULT_OUT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "data" / "deviation_baseline.json"


def profile(mode, n_max, lam=DEFAULT_LAMBDA):
    params = TheoryParams()
    theory = protective_prob if mode == PROTECTIVE else nonprotective_T
    rows = []
    for n in range(n_max + 1):
        exact = run_exact(ExperimentConfig(mode=mode, steps=n, lam=lam)).p_exact
        rows.append({"n": n, "p_exact": exact, "p_theory": theory(params, n),
                     "deviation": exact - theory(params, n)})
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=pathlib.Path, default=DEFAULT_OUT)
    args = ap.parse_args()
    t0 = time.perf_counter()
    data = {"lambda": DEFAULT_LAMBDA,
            "profiles": {mode: profile(mode, n) for mode, n in N_MAX.items()}}
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(data, indent=2) + "\n")
    for mode, rows in data["profiles"].items():
        worst = max(abs(r["deviation"]) for r in rows)
        print(f"{mode}: n <= {rows[-1]['n']}, max |deviation| = {worst:.4e}")
    print(f"wrote {args.out} in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
