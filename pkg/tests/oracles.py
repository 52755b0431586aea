"""Independent reference computations used to derive frozen test values.

Nothing here imports the package: configurations are built by intersecting
circles, cross-ratios by composing Moebius matrices, and arc endpoints by
maximizing arg R along a driving-angle parametrization, all in mpmath.
"""
from __future__ import annotations

import mpmath as mp

mp.mp.dps = 40


def moebius_cross_ratio(p, q, z, w):
    """Image of z under the Moebius map sending p -> 0, q -> oo, w -> 1."""
    p, q, z, w = (mp.mpc(x) for x in (p, q, z, w))
    # T(x) = k (x - p) / (x - q) with k fixed by T(w) = 1
    m = mp.matrix([[1, -p], [1, -q]])
    k = (w - q) / (w - p)
    m = mp.matrix([[k, 0], [0, 1]]) * m
    return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def circle_intersections(c1, r1, c2, r2):
    c1, c2 = mp.mpc(c1), mp.mpc(c2)
    d = abs(c2 - c1)
    if d > r1 + r2 or d < abs(r1 - r2) or d == 0:
        return []
    x = (d * d + r1 * r1 - r2 * r2) / (2 * d)
    h = mp.sqrt(max(r1 * r1 - x * x, 0))
    u = (c2 - c1) / d
    base = c1 + x * u
    return [base + 1j * h * u, base - 1j * h * u]


def configs_at(lengths, theta):
    """Configurations with v1 = 0, v2 = a and the bar v2v3 at direction theta."""
    a, b, c, d = (mp.mpf(x) for x in lengths)
    v3 = a + b * mp.expj(theta)
    return [(mp.mpc(0), mp.mpc(a), v3, v4) for v4 in circle_intersections(v3, c, 0, d)]


def uniformizer(V):
    v1, v2, v3, v4 = V
    return moebius_cross_ratio(v1, v3, v2, v4)


def arg_r_extremes(lengths, samples=2000):
    """(min, max) of ``|arg R|`` with ``arg`` in (-pi, pi], refined by golden-section search."""
    step = 2 * mp.pi / samples

    def values(theta):
        return [abs(mp.arg(uniformizer(V))) for V in configs_at(lengths, theta)]

    grid = [(k * step, values(k * step)) for k in range(samples)]
    grid = [(t, v) for t, v in grid if v]
    out = []
    for sign in (1, -1):
        t0 = max(grid, key=lambda tv: max(sign * x for x in tv[1]))[0]

        def f(theta):
            v = values(theta)
            return max(sign * x for x in v) if v else -mp.inf

        lo, hi = t0 - step, t0 + step
        g = (mp.sqrt(5) - 1) / 2
        for _ in range(150):
            m1, m2 = hi - g * (hi - lo), lo + g * (hi - lo)
            if f(m1) > f(m2):
                hi = m2
            else:
                lo = m1
        out.append(sign * f((lo + hi) / 2))
    return out[1], out[0]


def arm_jacobian_fd(lengths, phi, eta, h=mp.mpf("1e-12")):
    """Real determinant of d(1/R) by central differences in mpmath."""
    a, b, c = (mp.mpf(x) for x in lengths)

    def rinv(p, e):
        V = (mp.mpc(0), mp.mpc(a), a + b * mp.expj(p), a + b * mp.expj(p) + c * mp.expj(e))
        return 1 / uniformizer(V)

    dp = (rinv(phi + h, eta) - rinv(phi - h, eta)) / (2 * h)
    de = (rinv(phi, eta + h) - rinv(phi, eta - h)) / (2 * h)
    return dp.real * de.imag - dp.imag * de.real
