"""How the degree-5..11 table depends on where the sample grid stops.

Compares the default grid (100000 values from x_z at spacing
(x_n - x_0)/100000) with runs stopping a fixed margin before x_n.
Near x_n the samples are dominated by roundoff amplified by 1/Q^2, so
the high-degree rows move by factors of a few between neighbouring grids.
"""

from hermite_rolle.experiment import ExperimentConfig, run_experiment

RUNS = [
    ("default grid", {}),
    ("margin 1e-5, 100000 steps", {"steps": 100_000, "margin": 1e-5}),
    ("margin 1e-4, 100000 steps", {"steps": 100_000, "margin": 1e-4}),
    ("margin 1e-3, 100000 steps", {"steps": 100_000, "margin": 1e-3}),
]


def main():
    for label, kw in RUNS:
        rep = run_experiment(ExperimentConfig(spline=False, **kw))
        print(label)
        for e in rep.fits:
            print(f"  deg {e['degree']:>2}  max error {e['max_error']:.2e}  V {e['V']:.2e}")


if __name__ == "__main__":
    main()
