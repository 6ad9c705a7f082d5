"""Scan the translation parameter lambda for several pointer register sizes.

    python scripts/calibration_scan.py [--qubits 5 6 7 8] [--outdir results]
"""

import argparse
import pathlib

from photonsim.pointer import LambdaCalibration, PointerGrid, calibrate_lambda
from photonsim.svgplot import write_line_chart


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[5, 6, 7, 8])
    ap.add_argument("--outdir", type=pathlib.Path, default=pathlib.Path("results"))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    series, lams = {}, None
    for nq in args.qubits:
        res = calibrate_lambda(LambdaCalibration(PointerGrid(num_qubits=nq)))
        lams = res.lambdas
        series[f"{nq} qubits"] = list(res.fidelities)
        print(f"{nq} qubits: best lambda {res.best_lambda} (fidelity {res.best_fidelity:.8f}), "
              f"argmax-match interval {res.interval}")
    write_line_chart(args.outdir / "calibration.svg", list(lams), series,
                     title="Translation fidelity", xlabel="lambda", ylabel="fidelity")


if __name__ == "__main__":
    main()
