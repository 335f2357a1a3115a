#!/usr/bin/env python3
"""Regenerate the Chebyshev coefficient tables frozen into irsoutage.specfun.

Fits are done in 50-digit arithmetic (mpmath) at Chebyshev nodes, truncated
to the shortest series whose double-precision Clenshaw evaluation stays below
the target error on a dense random grid. Run from the repo root:

    python tools/gen_cheb_tables.py

and paste the printed tables into src/irsoutage/specfun.py.
"""

import random

import mpmath as mp

mp.mp.dps = 50


def cheb_fit(f, n):
    """Chebyshev coefficients of f on [-1, 1] from n nodes (c0 halved in Clenshaw)."""
    nodes = [mp.cos(mp.pi * (k + mp.mpf("0.5")) / n) for k in range(n)]
    fv = [f(x) for x in nodes]
    coeffs = []
    for j in range(n):
        acc = mp.mpf(0)
        for k in range(n):
            acc += fv[k] * mp.cos(mp.pi * j * (k + mp.mpf("0.5")) / n)
        coeffs.append(2 * acc / n)
    return coeffs


def clenshaw(coeffs, s):
    b1 = b2 = mp.mpf(0)
    for c in reversed(coeffs[1:]):
        b1, b2 = 2 * s * b1 - b2 + c, b1
    return s * b1 - b2 + coeffs[0] / 2


def trim(f, coeffs, smin, smax, target, trials=3000):
    """Shortest truncation keeping double-evaluated max relative error <= target."""
    rng = random.Random(20240809)
    pts = [mp.mpf(rng.uniform(smin, smax)) for _ in range(trials)] + [mp.mpf(smin), mp.mpf(smax)]
    exact = [f(s) for s in pts]
    for m in range(6, len(coeffs) + 1):
        cs = [float(c) for c in coeffs[:m]]
        worst = mp.mpf(0)
        for s, ex in zip(pts, exact):
            approx = clenshaw([mp.mpf(c) for c in cs], s)
            worst = max(worst, abs(approx - ex) / abs(ex))
        if worst <= target:
            return cs, worst
    raise RuntimeError("fit did not reach target; raise node count")


def show(name, coeffs, err):
    print(f"# max rel err {mp.nstr(err, 3)}")
    print(f"{name} = (")
    for c in coeffs:
        print(f"    {c!r},")
    print(")\n")


def k_scaled(order, x):
    return mp.sqrt(x) * mp.exp(x) * mp.besselk(order, x)


def main():
    # sqrt(x) e^x K0(x) and K1(x) for x in [2, inf); s = 2*(2/x) - 1
    for order, name in ((0, "_K0_LARGE_CHEB"), (1, "_K1_LARGE_CHEB")):
        def g(s, order=order):
            u = (s + 1) / 2  # u = 2/x in (0, 1]
            if u == 0:
                return mp.sqrt(mp.pi / 2)
            return k_scaled(order, 2 / u)
        coeffs = cheb_fit(g, 80)
        cs, err = trim(g, coeffs, -1.0, 1.0, mp.mpf("3e-16"))
        show(name, cs, err)

    # Hankel amplitude functions for J0, x >= 9; s = 2*(9/x)^2 - 1
    def chi(x):
        return x - mp.pi / 4

    def p_amp(x):
        return mp.sqrt(mp.pi * x / 2) * (
            mp.besselj(0, x) * mp.cos(chi(x)) + mp.bessely(0, x) * mp.sin(chi(x))
        )

    def q_amp(x):  # x * Q(x), O(1)
        return x * mp.sqrt(mp.pi * x / 2) * (
            mp.bessely(0, x) * mp.cos(chi(x)) - mp.besselj(0, x) * mp.sin(chi(x))
        )

    for fn, name, limit in ((p_amp, "_J0_P_CHEB", mp.mpf(1)),
                            (q_amp, "_J0_Q_CHEB", mp.mpf("-0.125"))):
        def g(s, fn=fn, limit=limit):
            t = (s + 1) / 2  # t = (9/x)^2 in (0, 1]
            if t == 0:
                return limit
            return fn(9 / mp.sqrt(t))
        coeffs = cheb_fit(g, 60)
        cs, err = trim(g, coeffs, -1.0, 1.0, mp.mpf("3e-16"))
        show(name, cs, err)


if __name__ == "__main__":
    main()
