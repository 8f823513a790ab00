"""Independent numerical oracles shared across test modules."""

import math

import numpy as np


def shooting_negative_count(G, t_max=40.0, steps=400000):
    """Oscillation-count oracle for -u'' = alpha G u on (0, inf), u(0) = 0.

    RK4 integration of the zero-energy solution; its number of zeros in
    (0, inf) equals the number of negative eigenvalues of the half-line
    Dirichlet operator.  Beyond compactly supported G the solution is affine,
    adding one final zero iff u and u' leave the support with opposite signs.
    """
    h = t_max / steps
    u, v = 0.0, 1.0
    t = 0.0
    zeros = 0
    prev_sign = 0.0

    def rhs(t, u, v):
        return v, -float(G(np.array([t]))[0]) * u

    for _ in range(steps):
        k1u, k1v = rhs(t, u, v)
        k2u, k2v = rhs(t + h / 2, u + h / 2 * k1u, v + h / 2 * k1v)
        k3u, k3v = rhs(t + h / 2, u + h / 2 * k2u, v + h / 2 * k2v)
        k4u, k4v = rhs(t + h, u + h * k3u, v + h * k3v)
        u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
        v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        t += h
        s = math.copysign(1.0, u) if u != 0 else 0.0
        if prev_sign != 0 and s != 0 and s != prev_sign:
            zeros += 1
        if s != 0:
            prev_sign = s
    if u * v < 0:
        zeros += 1
    return zeros


def dense_negative_count(diag, offdiag):
    """Full symmetric eigendecomposition count, the Sturm sweep's oracle."""
    n = len(diag)
    A = np.diag(np.asarray(diag, dtype=float))
    for i in range(n - 1):
        A[i, i + 1] = A[i + 1, i] = offdiag[i]
    return int(np.sum(np.linalg.eigvalsh(A) < 0))
