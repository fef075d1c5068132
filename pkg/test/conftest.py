#!/usr/bin/env python3
# Copyright (c) 2026 The nestedpovm developers
# Distributed under the MIT software license, see the accompanying
# file LICENSE.txt or http://www.opensource.org/licenses/mit-license.php.
"""Shared fixtures: standard ensembles and seeded generators."""
import numpy as np
import pytest

from nestedpovm.config import OptimizerConfig
from nestedpovm.discrimination import WeightedEnsemble
from nestedpovm.operators import bloch_state


def trine_states():
    return [bloch_state((np.cos(2 * np.pi * k / 3), np.sin(2 * np.pi * k / 3), 0.0)) for k in range(3)]

def bb84_states():
    """|0>, |1>, |+>, |->"""
    return [bloch_state(v) for v in ((0, 0, 1), (0, 0, -1), (1, 0, 0), (-1, 0, 0))]


@pytest.fixture
def rng():
    return np.random.default_rng(20260417)

@pytest.fixture
def trine():
    return WeightedEnsemble.uniform(trine_states())

@pytest.fixture
def bb84():
    return WeightedEnsemble.uniform(bb84_states())

@pytest.fixture
def fast_config():
    """Fewer restarts than the default; plenty for qubit ensembles."""
    return OptimizerConfig(restarts=6)
