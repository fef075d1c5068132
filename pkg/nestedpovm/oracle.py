#!/usr/bin/env python3
# Copyright (c) 2026 The nestedpovm developers
# Distributed under the MIT software license, see the accompanying
# file LICENSE.txt or http://www.opensource.org/licenses/mit-license.php.
"""Independent baselines for the optimal success probability.

- brute_force_nested(): exhaustive grid over the first step Q of a nested
  qubit measurement, each branch finished with its exact Helstrom value.
- polytope_ratio_probability(): geometric value 1/N + R for equiprobable
  qubit states, R the radius of the smallest ball enclosing the weighted
  Bloch vectors r_j/N.
- random_povm_search(): best of many random POVMs.

The grid and random searches only ever evaluate feasible measurements, so
they bound the optimum from below."""
from collections import namedtuple
import itertools
import logging

import numpy as np

from .discrimination import SizeMismatch, UnsupportedDimension, WeightedEnsemble
from .operators import bloch_state, to_bloch
from .qubit import sandwich_arrays, sqrt_arrays
from .util import NestedPovmError

logger = logging.getLogger("NestedPovm.oracle")

EQUIPROBABLE_TOL = 1e-10
PURITY_TOL = 1e-9


class NotEquiprobable(NestedPovmError):
    pass

class NotPure(NestedPovmError):
    pass

class UnsupportedN(NestedPovmError):
    pass


class GridSpec(namedtuple("GridSpec", ["resolution"])):
    """Grid over Q = c*1 + s*min(c, 1-c) * n(theta, phi).sigma.

    Every parameter takes the values i/resolution of its range, i = 0..resolution,
    with c, s in [0, 1], theta in [0, pi] and phi in [0, 2*pi]. Doubling the
    resolution keeps every old point, so refined grids never do worse."""
    __slots__ = ()

    RANGES = {"c": (0.0, 1.0), "s": (0.0, 1.0), "theta": (0.0, np.pi), "phi": (0.0, 2 * np.pi)}

    def __new__(cls, resolution):
        resolution = int(resolution)
        if resolution < 2:
            raise ValueError("grid resolution must be at least 2, got %d" % resolution)
        return super().__new__(cls, resolution)

    def values(self, name):
        lo, hi = self.RANGES[name]
        return lo + (hi - lo) * np.arange(self.resolution + 1) / self.resolution

    def refined(self):
        return GridSpec(2 * self.resolution)


def _branch_value(s0, sv, xa, xb):
    """(Tr[S(xa + xb)S] + ||S(xa - xb)S||_1)/2 for batched S and qubit Bloch xa, xb.

    This is the branch probability times the conditional Helstrom value."""
    total_c, _ = sandwich_arrays(s0, sv, xa.c + xb.c, xa.r + xb.r)
    diff_c, diff_r = sandwich_arrays(s0, sv, xa.c - xb.c, xa.r - xb.r)
    trace_norm = 2 * np.maximum(np.abs(diff_c), np.linalg.norm(diff_r, axis=-1))
    return (2 * total_c + trace_norm) / 2

def brute_force_nested(e, grid):
    """Best success probability over the grid of first steps Q (N = 3 or 4 qubits)."""
    if e.dim != 2:
        raise UnsupportedDimension("grid search needs qubit states, got dimension %d" % e.dim)
    if len(e) not in (3, 4):
        raise SizeMismatch("grid search handles 3 or 4 states, got %d" % len(e))
    if not isinstance(grid, GridSpec):
        grid = GridSpec(grid)
    slots = e.padded(4)
    x = [to_bloch(slots.weighted(j)) for j in range(4)]

    s, theta, phi = np.meshgrid(grid.values("s"), grid.values("theta"), grid.values("phi"), indexing="ij")
    direction = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)
    direction = direction.reshape(-1, 3)
    s = s.reshape(-1)

    best = -np.inf
    best_point = None
    for c in grid.values("c"):
        rq = (s * min(c, 1 - c))[:, None] * direction
        cq = np.full(len(s), c)
        q0, qv = sqrt_arrays(cq, rq)
        p0, pv = sqrt_arrays(1 - cq, -rq)
        value = _branch_value(q0, qv, x[0], x[2]) + _branch_value(p0, pv, x[1], x[3])
        i = int(np.argmax(value))
        # Strict improvement keeps the lexicographically first maximizer
        if value[i] > best:
            best = float(value[i])
            best_point = (c, rq[i])
    logger.debug("Grid %d: best %.12g at c=%.6g r=%s", grid.resolution, best, best_point[0], best_point[1].tolist())
    return best


def minimal_enclosing_ball(points):
    """(center, radius) of the smallest ball containing a few points in R^3.

    Exhaustive over the subsets of at most 4 points that can lie on the
    boundary; fine for the handful of vertices used here."""
    points = np.asarray(points, dtype=float)
    best = None
    for k in range(1, min(4, len(points)) + 1):
        for subset in itertools.combinations(range(len(points)), k):
            p = points[list(subset)]
            d = p[1:] - p[0]
            if k == 1:
                center = p[0]
            else:
                gram = d @ d.T
                if abs(np.linalg.det(gram)) < 1e-14 * max(1.0, np.trace(gram)) ** (k - 1):
                    continue
                t = np.linalg.solve(gram, np.einsum("ij,ij->i", d, d) / 2)
                center = p[0] + t @ d
            radius = float(np.linalg.norm(p[0] - center))
            if np.all(np.linalg.norm(points - center, axis=1) <= radius * (1 + 1e-12) + 1e-15):
                if best is None or radius < best[1]:
                    best = (center, radius)
    return best


def _bloch_vectors(e):
    if e.dim != 2:
        raise UnsupportedDimension("polytope rule applies to qubits, got dimension %d" % e.dim)
    n = len(e)
    if any(abs(p - 1 / n) > EQUIPROBABLE_TOL for p in e.weights):
        raise NotEquiprobable("polytope rule needs equal probabilities, got %s" % e.weights)
    vectors = np.array([2 * to_bloch(rho).r for _, rho in e.states])
    lengths = np.linalg.norm(vectors, axis=1)
    if np.any(np.abs(lengths - 1) > PURITY_TOL):
        raise NotPure("polytope rule needs pure states, Bloch vector lengths %s" % lengths.tolist())
    return vectors

def polytope_ratio_probability(e):
    """1/N + R for equiprobable pure qubit states.

    R is the ratio between the polytope of weighted Bloch vectors r_j/N and
    the largest similar polytope inside the Bloch ball, i.e. the radius of
    the smallest ball enclosing the r_j/N. A polygon containing the origin
    is already maximal (R = 1/N for states on a great circle); otherwise it
    grows until its longest side spans a diameter."""
    n = len(e)
    if n not in (2, 3, 4):
        raise UnsupportedN("polytope rule implemented for 2 to 4 states, got %d" % n)
    if n == 4:
        logger.warning("Polytope rule for 4 states is heuristic")
    vectors = _bloch_vectors(e)
    _, radius = minimal_enclosing_ball(vectors / n)
    return 1 / n + radius


def equatorial_triple(phi2, phi3):
    """Equiprobable pure states with Bloch vectors (1,0,0), (cos phi2, sin phi2, 0), (cos phi3, sin phi3, 0)."""
    return WeightedEnsemble.uniform([bloch_state((np.cos(phi), np.sin(phi), 0.0)) for phi in (0.0, phi2, phi3)])

def triangle_contains_origin(phi2, phi3, tol=1e-12):
    """Point-in-triangle test for the origin and the three equatorial Bloch vectors (boundary included)."""
    pts = [(np.cos(phi), np.sin(phi)) for phi in (0.0, phi2, phi3)]
    (ax, ay), (bx, by), (cx, cy) = pts
    if abs((bx - ax) * (cy - ay) - (by - ay) * (cx - ax)) <= tol:
        # Degenerate: the points span at most a chord, which passes through
        # the origin only if two of them are antipodal
        return any(np.hypot(p[0] + q[0], p[1] + q[1]) <= 1e-9 for p, q in itertools.combinations(pts, 2))
    signs = []
    for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]):
        # z-component of (p2 - p1) x (0 - p1)
        signs.append((x2 - x1) * (-y1) - (y2 - y1) * (-x1))
    return min(signs) >= -tol or max(signs) <= tol


def random_povm_search(e, trials, seed, batch=5000):
    """Best success probability over `trials` random POVMs, deterministic per seed.

    POVMs are E_j = S^(-1/2) G_j S^(-1/2) with S = sum_j G_j and G_j random
    PSD; when there are at least as many outcomes as dimensions every second
    batch uses rank-one G_j so near-projective measurements are sampled too."""
    rng = np.random.default_rng(seed)
    n, d = len(e), e.dim
    rho = np.array([e.weighted(j).matrix for j in range(n)])
    best = -np.inf
    done = 0
    while done < trials:
        size = min(batch, trials - done)
        rank = 1 if n >= d and (done // batch) % 2 == 1 else d
        g = rng.normal(size=(size, n, d, rank)) + 1j * rng.normal(size=(size, n, d, rank))
        gg = g @ np.conj(np.swapaxes(g, -1, -2))
        w, v = np.linalg.eigh(gg.sum(axis=1))
        inv = np.where(w > 1e-12 * w[..., -1:], 1 / np.sqrt(np.abs(w)), 0.0)
        t = (v * inv[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))
        elements = t[:, None] @ gg @ t[:, None]
        values = np.einsum("tjab,jba->t", elements, rho).real
        best = max(best, float(values.max()))
        done += size
    return best
