"""Run the e^x sin x example on {0, 3pi/2} and print the report.

    python3 scripts/reproduce_worked_example.py [--out results/] [--samples 100000]
"""

import argparse
import time

from hermite_rolle.experiment import ExperimentConfig, report_lines, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--out", default=None)
    ap.add_argument("--samples", type=int, default=100_000)
    args = ap.parse_args()

    cfg = ExperimentConfig(samples=args.samples, out=args.out)
    t0 = time.perf_counter()
    rep = run_experiment(cfg)
    print("\n".join(report_lines(rep)))
    print(f"elapsed {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
