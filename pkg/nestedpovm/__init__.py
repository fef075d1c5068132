#!/usr/bin/env python3
# Copyright (c) 2026 The nestedpovm developers
# Distributed under the MIT software license, see the accompanying
# file LICENSE.txt or http://www.opensource.org/licenses/mit-license.php.
"""Minimum-error state discrimination with nested binary measurements."""
from .discrimination import WeightedEnsemble, discriminate, helstrom, optimal_probability
from .operators import HermitianOperator, bloch_state
from .povm import NestedPovm, Povm, decompose, recompose
from .util import NestedPovmError
