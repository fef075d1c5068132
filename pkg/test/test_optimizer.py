#!/usr/bin/env python3
# Copyright (c) 2026 The nestedpovm developers
# Distributed under the MIT software license, see the accompanying
# file LICENSE.txt or http://www.opensource.org/licenses/mit-license.php.
"""Tests for the multi-start search over qubit Q."""
import logging

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest
import scipy.optimize as so

from nestedpovm.config import OptimizerConfig
from nestedpovm.discrimination import build_abc, f_closed_form, random_ensemble
from nestedpovm.operators import HermitianOperator, random_hermitian, random_psd, random_pure, to_bloch
from nestedpovm.optimizer import (
    GRID_STARTS,
    BudgetExhausted,
    _local_search,
    feasibility_project,
    maximize_f,
    project_arrays,
)
from nestedpovm.oracle import brute_force_nested
from nestedpovm.qubit import QubitQ, f_q_bloch
from nestedpovm.util import (
    assert_approx,
    assert_equal,
    assert_greater_than_or_equal,
    assert_raises,
)


def bloch_abc(e):
    t = build_abc(e)
    return to_bloch(t.a), to_bloch(t.b), to_bloch(t.c), t.offset


def test_feasibility_project():
    q = feasibility_project((1.3, (1.0, 0.0, 0.0)))
    assert_equal(q, QubitQ(1.0))
    q = feasibility_project((0.5, (2.0, 0.0, 0.0)))
    assert_equal(q, QubitQ(0.5, (0.5, 0.0, 0.0)))
    q = feasibility_project((0.3, (0.1, 0.1, 0.0)))
    assert_equal(q, QubitQ(0.3, (0.1, 0.1, 0.0)))

def test_projection_is_idempotent(rng):
    c = rng.uniform(-0.5, 1.5, size=50)
    r = rng.normal(size=(50, 3))
    c1, r1 = project_arrays(c, r)
    c2, r2 = project_arrays(c1, r1)
    np.testing.assert_array_equal(c1, c2)
    np.testing.assert_allclose(r1, r2, atol=1e-15)
    assert np.all(np.linalg.norm(r1, axis=1) <= np.minimum(c1, 1 - c1) + 1e-12)


def test_deterministic_per_seed(trine):
    a, b, c, _ = bloch_abc(trine)
    config = OptimizerConfig(restarts=4, seed=3)
    first = maximize_f(a, b, c, config)
    second = maximize_f(a, b, c, config)
    assert_equal(first.value, second.value)
    assert_equal(first.best_q, second.best_q)
    # The trine has C = 0, so no fixed seeds: scan tops plus random draws
    assert_equal(first.starts_used, GRID_STARTS + 4)

def test_value_is_exact_at_returned_q(bb84, fast_config):
    a, b, c, offset = bloch_abc(bb84)
    result = maximize_f(a, b, c, fast_config)
    assert_equal(result.value, f_q_bloch(a, b, c, result.best_q))
    assert_approx(offset + result.value, 0.5, 1e-6)

def test_history_is_monotone(trine, fast_config):
    a, b, c, _ = bloch_abc(trine)
    history = maximize_f(a, b, c, fast_config).history
    values = [v for _, v in history]
    assert values == sorted(values)

def test_budget_exhausted(trine, caplog):
    a, b, c, _ = bloch_abc(trine)
    config = OptimizerConfig(restarts=2, max_evals=5)
    with caplog.at_level(logging.WARNING, logger="NestedPovm.optimizer"):
        result = maximize_f(a, b, c, config)
    assert not result.converged
    assert "budget" in caplog.text
    # The best point found is still feasible and evaluated exactly
    assert_equal(result.value, f_q_bloch(a, b, c, result.best_q))
    assert_raises(BudgetExhausted, maximize_f, a, b, c, config, True)

@pytest.mark.parametrize("seed", [1, 2])
def test_reduced_and_full_search_agree(seed, fast_config):
    e = random_ensemble(3, 2, np.random.default_rng(seed))
    a, b, c, _ = bloch_abc(e)
    reduced = maximize_f(a, b, c, fast_config)
    full = maximize_f(a, b, c, fast_config.with_overrides(full_search=True))
    assert_approx(reduced.value, full.value, fast_config.match_tol)

@pytest.mark.parametrize("n,seed", [(3, 5), (4, 6), (4, 7)])
def test_not_worse_than_grid(n, seed):
    config = OptimizerConfig()
    e = random_ensemble(n, 2, np.random.default_rng(seed))
    a, b, c, offset = bloch_abc(e)
    result = maximize_f(a, b, c, config)
    grid = brute_force_nested(e, 16)
    assert_greater_than_or_equal(offset + result.value, grid - config.match_tol)

@pytest.mark.parametrize("seed", [6, 8, 9])
def test_never_below_its_own_scan(seed):
    # For four states the scan visits exactly the points of the brute-force grid
    config = OptimizerConfig(restarts=2, scan_resolution=10)
    e = random_ensemble(4, 2, np.random.default_rng(seed))
    a, b, c, offset = bloch_abc(e)
    result = maximize_f(a, b, c, config)
    assert_greater_than_or_equal(offset + result.value, brute_force_nested(e, 10) - 1e-12)

def test_refinements_share_the_budget(monkeypatch):
    calls = []
    minimize = so.minimize

    def counting(*args, **kwargs):
        res = minimize(*args, **kwargs)
        calls.append((kwargs["options"]["maxfev"], res.nfev))
        return res

    monkeypatch.setattr(so, "minimize", counting)
    config = OptimizerConfig(max_evals=2000, refinements=3)
    _, value, converged, _ = _local_search(lambda x: (x[0] - 1) ** 2 + 10 * (x[1] + 2) ** 2, [0.0, 0.0], config)
    assert converged
    assert_approx(value, 0.0, 1e-12)
    assert_equal(calls[0][0], 2000)
    for (budget, used), (next_budget, _) in zip(calls, calls[1:]):
        assert_equal(next_budget, budget - used)

def test_budget_binds_across_refinements(monkeypatch):
    calls = []
    minimize = so.minimize

    def counting(*args, **kwargs):
        res = minimize(*args, **kwargs)
        calls.append(res.nfev)
        return res

    monkeypatch.setattr(so, "minimize", counting)
    rosenbrock = lambda x: (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2
    config = OptimizerConfig(max_evals=40, refinements=3)
    _, _, converged, _ = _local_search(rosenbrock, [-1.5, 2.0], config)
    assert not converged
    # Nelder-Mead may finish the iteration it is in
    assert sum(calls) <= config.max_evals + 3


def _family_instance(family, rng):
    p = random_pure(2, rng)
    rest = HermitianOperator.identity(2) - p
    if family == "i":
        alpha, beta = rng.uniform(0.1, 1.0, size=2)
        return p * alpha - rest * beta, p * rng.normal(), rest * rng.normal()
    if family == "ii":
        signs = rng.choice([-1.0, 1.0], size=2)
        return random_hermitian(2, rng), random_psd(2, rng) * signs[0], random_psd(2, rng) * signs[1]
    a1, a2 = rng.normal(size=2)
    b1, b2, c1, c2 = rng.uniform(0.1, 1.0, size=4)
    return p * a1 + rest * a2, p * b1 - rest * b2, p * c1 - rest * c2

@pytest.mark.parametrize("family", ["i", "ii", "iii"])
@settings(max_examples=50, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_search_matches_closed_forms(family, seed):
    rng = np.random.default_rng(seed)
    a, b, c = _family_instance(family, rng)
    closed = f_closed_form(a, b, c)
    assert_equal(closed.family, family)
    config = OptimizerConfig(restarts=1, refinements=0)
    result = maximize_f(to_bloch(a), to_bloch(b), to_bloch(c), config)
    assert_approx(result.value, closed.value, 1e-4)
    assert result.value <= closed.value + 1e-9

@settings(max_examples=50, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_three_state_relabeling_identity(seed):
    # Moving state 1 into slot 0: F(A, B, 0) = F(-3B - A, B - A, 0)/2 + Tr[A + B]
    t = build_abc(random_ensemble(3, 2, np.random.default_rng(seed)))
    a, b, zero = to_bloch(t.a), to_bloch(t.b), to_bloch(t.c)
    config = OptimizerConfig(restarts=4)
    left = maximize_f(a, b, zero, config).value
    right = maximize_f(-3 * b - a, b - a, zero, config).value / 2 + 2 * (a.c + b.c)
    assert_approx(left, right, 2e-4)

def test_with_overrides_ignores_none():
    config = OptimizerConfig().with_overrides(seed=None, restarts=3)
    assert_equal((config.seed, config.restarts), (0, 3))
