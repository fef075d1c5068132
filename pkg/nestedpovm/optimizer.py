#!/usr/bin/env python3
# Copyright (c) 2026 The nestedpovm developers
# Distributed under the MIT software license, see the accompanying
# file LICENSE.txt or http://www.opensource.org/licenses/mit-license.php.
"""Numerical maximization of F_Q over qubit operators 0 <= Q <= 1.

Multi-start Nelder-Mead (scipy.optimize.minimize). The search runs in
unconstrained coordinates that decode onto the feasible set, so it never
needs penalties. Starts come from fixed seeds, the best points of a coarse
scan and seeded random draws. Each start is re-run from its best point a
few times, the way restarted simplex codes do, to shake the simplex loose
from the |.| kinks of the objective; all re-runs of a start share one
budget of max_evals evaluations.

With C = 0 the search runs over the two-parameter family of
ReducedParametrization (plus the candidate Q = 0); otherwise, or with
full_search set, over all feasible (c_Q, r_Q)."""
from collections import namedtuple
import logging

import numpy as np
import scipy.optimize as so

from .config import OptimizerConfig
from .operators import absolute_value, from_bloch, positive_part, support_projector, to_bloch
from .qubit import QubitQ, classify, f_q_bloch, f_q_bloch_batch, n3_reduced_parametrization
from .util import NestedPovmError

logger = logging.getLogger("NestedPovm.optimizer")

SIMPLEX_STEP = 0.1
# Best scan points used as starts
GRID_STARTS = 4


class BudgetExhausted(NestedPovmError):
    """A local search hit max_evals before converging."""


OptimizationResult = namedtuple("OptimizationResult", ["best_q",
                                                       "value",
                                                       "starts_used",
                                                       "converged",
                                                       "history"])


def project_arrays(c, r):
    """Clamp c to [0, 1] and shrink r to norm min(c, 1 - c) where it is longer."""
    c = np.clip(c, 0.0, 1.0)
    r = np.asarray(r, dtype=float)
    bound = np.minimum(c, 1 - c)
    norm = np.linalg.norm(r, axis=-1)
    scale = np.where(norm > bound, bound / np.where(norm > 0, norm, 1.0), 1.0)
    return c, r * np.asarray(scale)[..., None]

def feasibility_project(candidate):
    """Nearest-radius feasible QubitQ for a candidate (c, r). Idempotent."""
    c, r = candidate
    c, r = project_arrays(float(c), np.asarray(r, dtype=float).reshape(3))
    return QubitQ(float(c), r)


class _Space():
    """Search coordinates x for feasible (c_Q, r_Q).

    decode() works on single points and on batches; scan is a fixed grid of
    coordinates and seeds a list of fixed starting points."""

    def __init__(self, dims, decode, draw, scan, seeds=()):
        self.dims = dims
        self.decode = decode
        self.draw = draw
        self.scan = scan
        self.seeds = list(seeds)

def _full_decode(x):
    # c = (1 - cos x0)/2, |r| = (1 - cos x1)/2 * min(c, 1 - c), direction (x2, x3)
    x = np.asarray(x, dtype=float)
    c = (1 - np.cos(x[..., 0])) / 2
    s = (1 - np.cos(x[..., 1])) / 2
    theta, phi = x[..., 2], x[..., 3]
    direction = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)
    return project_arrays(c, (s * np.minimum(c, 1 - c))[..., None] * direction)

def _full_encode(c, r):
    c = float(np.clip(c, 0.0, 1.0))
    r = np.asarray(r, dtype=float).reshape(3)
    bound = min(c, 1 - c)
    norm = float(np.linalg.norm(r))
    s = min(1.0, norm / bound) if bound > 0 else 0.0
    theta = float(np.arccos(np.clip(r[2] / norm, -1.0, 1.0))) if norm > 0 else 0.0
    phi = float(np.arctan2(r[1], r[0]))
    return np.array([np.arccos(1 - 2 * c), np.arccos(1 - 2 * s), theta, phi])

def _grid(*axes):
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))

def _full_space(a, b, c, resolution):
    def draw(rng, index):
        cq = rng.uniform()
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        bound = min(cq, 1 - cq)
        # Half the starts sit on the boundary |r| = min(c, 1 - c), where projectors live
        radius = bound if index % 2 == 0 else bound * rng.uniform() ** (1 / 3)
        return _full_encode(cq, radius * direction)

    steps = np.arange(resolution + 1) / resolution
    scan = _grid(np.arccos(1 - 2 * steps), np.arccos(1 - 2 * steps), np.pi * steps, 2 * np.pi * steps)
    # Q = 1, Q = 0 and the projector attaining Tr[(A + |B| - |C|)+] + ||C||_1 when that bound is tight
    m = from_bloch(a) + absolute_value(from_bloch(b)) - absolute_value(from_bloch(c))
    witness = to_bloch(support_projector(positive_part(m)))
    seeds = [_full_encode(1.0, np.zeros(3)), _full_encode(0.0, np.zeros(3)), _full_encode(witness.c, witness.r)]
    return _Space(4, _full_decode, draw, scan, seeds)

def _reduced_space(a, b, resolution):
    family = n3_reduced_parametrization(a, b)

    def decode(x):
        # c = (3 - cos x0)/4 covers [1/2, 1]
        x = np.asarray(x, dtype=float)
        return family.vectors((3 - np.cos(x[..., 0])) / 4, x[..., 1])

    def draw(rng, index):
        return np.array([rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)])

    steps = np.arange(4 * resolution + 1) / (4 * resolution)
    scan = _grid(np.pi * steps, 2 * np.pi * steps)
    return _Space(2, decode, draw, scan)


def _local_search(objective, x0, config):
    """Nelder-Mead plus refinements sharing one budget of max_evals evaluations.

    Returns (x, value, converged, history)."""
    history = []
    best = [-np.inf]

    def record(xk):
        best[0] = max(best[0], -objective(xk))
        history.append((len(history), best[0]))

    x = np.asarray(x0, dtype=float)
    remaining = config.max_evals
    converged = False
    previous = None
    for _ in range(1 + config.refinements):
        if remaining <= len(x) + 1:
            break
        simplex = np.vstack([x] + [x + SIMPLEX_STEP * e for e in np.eye(len(x))])
        res = so.minimize(objective, x, method="Nelder-Mead", callback=record,
                          options=dict(xatol=config.xatol, fatol=config.fatol,
                                       maxfev=remaining, initial_simplex=simplex))
        remaining -= res.nfev
        converged = converged or bool(res.success)
        x = res.x
        if not res.success or (previous is not None and previous - res.fun <= config.fatol):
            break
        previous = res.fun
    record(x)
    return x, -objective(x), converged, history


def maximize_f(a, b, c, config=None, strict=False):
    """Maximize F_Q(A, B, C) over feasible qubit Q.

    Local searches start from the fixed seeds of the search space, the
    GRID_STARTS best points of a coarse scan and config.restarts random
    points. Deterministic for a given config.seed. A search that exhausts
    max_evals before converging leaves converged False; with strict set that
    raises BudgetExhausted."""
    config = config or OptimizerConfig()
    signs = classify(b, c)
    reduced = not config.full_search and c.c == 0 and not np.any(c.r)
    if reduced:
        space = _reduced_space(a, b, config.scan_resolution)
    else:
        space = _full_space(a, b, c, config.scan_resolution)

    def objective(x):
        cq, rq = space.decode(x)
        return -float(f_q_bloch_batch(a, b, c, cq, rq, signs))

    cq, rq = space.decode(space.scan)
    scanned = f_q_bloch_batch(a, b, c, cq, rq, signs)
    top = np.argsort(-scanned, kind="stable")[:GRID_STARTS]
    logger.debug("Scan of %d points: best F = %.12g", len(scanned), scanned[top[0]])

    rng = np.random.default_rng(config.seed)
    starts = space.seeds + [space.scan[i] for i in top] + [space.draw(rng, index) for index in range(config.restarts)]
    best = None
    all_converged = True
    for index, x0 in enumerate(starts):
        x, value, converged, history = _local_search(objective, x0, config)
        all_converged &= converged
        logger.debug("Start %d: F = %.12g (converged %s)", index, value, converged)
        # Strictly greater keeps the earliest start on ties
        if best is None or value > best[1]:
            best = (x, value, history)

    q = feasibility_project(space.decode(best[0]))
    if reduced and f_q_bloch(a, b, c, q, signs) < 0:
        q = QubitQ(0.0)
    value = f_q_bloch(a, b, c, q, signs)

    if not all_converged:
        logger.warning("Optimizer budget of %d evaluations exhausted in some starts; best F = %.12g", config.max_evals, value)
        if strict:
            raise BudgetExhausted("Nelder-Mead did not converge within %d evaluations" % config.max_evals)
    return OptimizationResult(q, value, len(starts), all_converged, best[2])
