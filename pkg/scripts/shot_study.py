"""Eight-seed shot study: per-step mean and SD of sampled survival against theory.

    python scripts/shot_study.py [--mode protective] [--n-max 14] [--repeats 8]
"""

import argparse
import csv
import math
import pathlib

import numpy as np

from photonsim.experiment import ExperimentConfig, run_repeats
from photonsim.svgplot import write_line_chart
from photonsim.theory import MODES, PROTECTIVE, TheoryParams, nonprotective_T, protective_prob

DEFAULT_SHOTS = {"protective": 5000, "nonprotective": 4000}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mode", choices=MODES, default=PROTECTIVE)
    ap.add_argument("--n-max", type=int, default=14)
    ap.add_argument("--repeats", type=int, default=8)
    ap.add_argument("--shots", type=int)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--outdir", type=pathlib.Path, default=pathlib.Path("results"))
    args = ap.parse_args()
    shots = args.shots or DEFAULT_SHOTS[args.mode]
    theory = protective_prob if args.mode == PROTECTIVE else nonprotective_T
    params = TheoryParams()
    args.outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    for n in range(args.n_max + 1):
        seeds = [args.seed + r * (args.n_max + 1) + n for r in range(args.repeats)]
        runs = run_repeats(ExperimentConfig(mode=args.mode, steps=n, shots=shots), seeds)
        vals = np.array([r.p_shots for r in runs])
        sd = float(vals.std(ddof=1)) if args.repeats > 1 else 0.0
        rows.append((n, theory(params, n), runs[0].p_exact, float(vals.mean()), sd))
        print(f"n={n:2d} theory={rows[-1][1]:.5f} exact={rows[-1][2]:.5f} "
              f"mean={rows[-1][3]:.5f} sd={sd:.5f} "
              f"|mean-theory|/(sd/sqrt(R))={abs(rows[-1][3] - rows[-1][1]) / max(sd / math.sqrt(args.repeats), 1e-300):.2f}")
    stem = args.outdir / f"shots_{args.mode}"
    with open(f"{stem}.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "p_theory", "p_exact", "mean", "sd"])
        w.writerows([(n, *map(repr, r)) for n, *r in rows])
    ns = [r[0] for r in rows]
    write_line_chart(f"{stem}.svg", ns, {"theory": [r[1] for r in rows], "exact": [r[2] for r in rows],
                                        "shot mean": [r[3] for r in rows]},
                     title=f"{args.mode}: {args.repeats} runs of {shots} shots")


if __name__ == "__main__":
    main()
