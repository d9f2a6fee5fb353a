"""Observed order of the fixed-step tableaus on y' = y over [0, 1].

Errors at h = 2^-6 .. 2^-10 fall far below double-precision roundoff, so
the run uses 50-digit mpmath arithmetic.
"""

import mpmath

from hermite_rolle.rk import RKF7, RKF8, integrate, observed_orders


def _mp(v):
    return mpmath.mpf(v.numerator) / v.denominator


def errors(tab, powers):
    out = []
    for p in powers:
        n = 2**p
        h = mpmath.mpf(1) / n
        y = integrate(lambda x, y: y, mpmath.mpf(0), mpmath.mpf(1), h, n, tab, _mp)[-1]
        out.append(float(abs(y - mpmath.e)))
    return out


def main():
    with mpmath.workdps(50):
        for tab, powers in [(RKF7, range(6, 11)), (RKF8, range(3, 8))]:
            errs = errors(tab, powers)
            print(f"{tab.name} ({tab.stages} stages)")
            for p, e in zip(powers, errs):
                print(f"  h = 2^-{p:<2}  error {e:.3e}")
            print("  orders " + ", ".join(f"{q:.2f}" for q in observed_orders(errs)))


if __name__ == "__main__":
    main()
