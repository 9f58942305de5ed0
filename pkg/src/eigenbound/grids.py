"""Quadrature rules over balls in R^3 and deterministic point sampling.

Angular rules are Lebedev rules (closed-form node sets for 6/14/26/38
points) or a Gauss-Legendre (cos theta) x uniform (phi) product rule for
any other requested count.  Weights of an angular rule sum to 1, so a
surface integral over the unit sphere is 4*pi*sum(w*f).
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

_SQ3 = 1.0 / np.sqrt(3.0)
_SQ2 = 1.0 / np.sqrt(2.0)


def _octahedron():
    pts = []
    for i in range(3):
        for s in (1.0, -1.0):
            v = [0.0, 0.0, 0.0]
            v[i] = s
            pts.append(v)
    return np.array(pts)


def _cube_corners():
    return np.array([[sx * _SQ3, sy * _SQ3, sz * _SQ3]
                     for sx in (1, -1) for sy in (1, -1) for sz in (1, -1)])


def _edge_midpoints():
    pts = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        for si in (1, -1):
            for sj in (1, -1):
                v = [0.0, 0.0, 0.0]
                v[i] = si * _SQ2
                v[j] = sj * _SQ2
                pts.append(v)
    return np.array(pts)


def _pq0_points(p, q):
    pts = []
    for a, b in ((p, q), (q, p)):
        for i, j in ((0, 1), (0, 2), (1, 2)):
            for si in (1, -1):
                for sj in (1, -1):
                    v = [0.0, 0.0, 0.0]
                    v[i] = si * a
                    v[j] = sj * b
                    pts.append(v)
    return np.array(pts)


def _lebedev(n):
    if n == 6:
        return _octahedron(), np.full(6, 1.0 / 6.0)
    if n == 14:
        dirs = np.vstack([_octahedron(), _cube_corners()])
        w = np.concatenate([np.full(6, 1.0 / 15.0), np.full(8, 3.0 / 40.0)])
        return dirs, w
    if n == 26:
        dirs = np.vstack([_octahedron(), _edge_midpoints(), _cube_corners()])
        w = np.concatenate([np.full(6, 1.0 / 21.0), np.full(12, 4.0 / 105.0),
                            np.full(8, 9.0 / 280.0)])
        return dirs, w
    if n == 38:
        p = np.sqrt((1.0 - _SQ3) / 2.0)
        q = np.sqrt((1.0 + _SQ3) / 2.0)
        dirs = np.vstack([_octahedron(), _cube_corners(), _pq0_points(p, q)])
        w = np.concatenate([np.full(6, 1.0 / 105.0), np.full(8, 9.0 / 280.0),
                            np.full(24, 1.0 / 35.0)])
        return dirs, w
    raise ValueError(f"no closed-form Lebedev rule with {n} points")

LEBEDEV_COUNTS = (6, 14, 26, 38)


def angular_rule(n_angular):
    """Unit-sphere rule with >= n_angular nodes; weights sum to 1."""
    if n_angular in LEBEDEV_COUNTS:
        return _lebedev(n_angular)
    n_t = max(2, int(np.ceil(np.sqrt(n_angular / 2.0))))
    ct, wt = leggauss(n_t)          # cos(theta) in [-1, 1]
    phi = 2.0 * np.pi * (np.arange(2 * n_t) + 0.5) / (2 * n_t)
    st = np.sqrt(1.0 - ct ** 2)
    dirs = np.empty((n_t * 2 * n_t, 3))
    w = np.empty(n_t * 2 * n_t)
    idx = 0
    for i in range(n_t):
        for ph in phi:
            dirs[idx] = (st[i] * np.cos(ph), st[i] * np.sin(ph), ct[i])
            w[idx] = wt[i] / (2.0 * 2 * n_t)
            idx += 1
    return dirs, w


def radial_rule(r_lo, r_hi, n):
    """Gauss-Legendre nodes/weights on [r_lo, r_hi]."""
    x, w = leggauss(n)
    half = 0.5 * (r_hi - r_lo)
    return r_lo + half * (x + 1.0), half * w


def ball_rule(radius, n_radial, n_angular, center=(0.0, 0.0, 0.0)):
    """Product rule over the ball |x - center| <= radius.

    Returns (nodes (N,3), weights (N,)); weights sum to the ball volume.
    """
    if n_radial < 2 or n_angular < 2:
        raise ValueError("need at least 2 nodes per factor")
    r, wr = radial_rule(0.0, radius, n_radial)
    dirs, wa = angular_rule(n_angular)
    nodes = (r[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
    weights = (wr * r ** 2)[:, None] * (4.0 * np.pi * wa)[None, :]
    return nodes + np.asarray(center, dtype=float), weights.reshape(-1)


_PLASTIC = 1.3247179572447460260  # real root of x^3 = x + 1


def ball_sample(radius, n, center=(0.0, 0.0, 0.0), seed=0):
    """Deterministic low-discrepancy sample of the ball (R3 Kronecker lattice).

    The seed shifts the lattice offset; it does not make the set random.
    """
    alpha = np.array([1.0 / _PLASTIC, 1.0 / _PLASTIC ** 2, 1.0 / _PLASTIC ** 3])
    offset = np.mod(0.5 + seed * np.array([0.7548776662, 0.5698402910, 0.3287880702]), 1.0)
    idx = np.arange(1, n + 1)[:, None]
    u = np.mod(offset[None, :] + idx * alpha[None, :], 1.0)
    r = radius * np.cbrt(u[:, 0])
    ct = 2.0 * u[:, 1] - 1.0
    st = np.sqrt(np.maximum(0.0, 1.0 - ct ** 2))
    phi = 2.0 * np.pi * u[:, 2]
    pts = np.column_stack([r * st * np.cos(phi), r * st * np.sin(phi), r * ct])
    return pts + np.asarray(center, dtype=float)


def refine_maximum(f, x0, step, rounds=3, shrink=0.35):
    """Deterministic pattern search around x0 for a local max of f on R^3.

    f takes an (N,3) array and returns (N,) real values.
    """
    offsets = np.array([[i, j, k] for i in (-1, 0, 1) for j in (-1, 0, 1)
                        for k in (-1, 0, 1)], dtype=float)
    best_x = np.asarray(x0, dtype=float)
    best_v = float(f(best_x[None, :])[0])
    h = step
    for _ in range(rounds):
        cand = best_x[None, :] + h * offsets
        vals = f(cand)
        i = int(np.argmax(vals))
        if vals[i] > best_v:
            best_v = float(vals[i])
            best_x = cand[i]
        h *= shrink
    return best_x, best_v
