#!/usr/bin/env python3
# Copyright (c) 2026 The nestedpovm developers
# Distributed under the MIT software license, see the accompanying
# file LICENSE.txt or http://www.opensource.org/licenses/mit-license.php.
"""Tests for POVM validation and the nested binary decomposition."""
from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from nestedpovm.operators import (
    HermitianOperator,
    NotSubIdentity,
    random_density,
)
from nestedpovm.povm import (
    BitPath,
    InvalidNestedPovm,
    InvalidPovm,
    NestedPovm,
    Povm,
    all_paths,
    apply_binary,
    decompose,
    depth_for,
    leaf_index,
    leaf_path,
    measure_sequentially,
    random_povm,
    recompose,
    validate,
    validate_nested,
)
from nestedpovm.util import (
    assert_approx,
    assert_equal,
    assert_operator_close,
    assert_raises,
    assert_raises_message,
)


def basis_projector(dim, k):
    m = np.zeros((dim, dim))
    m[k, k] = 1
    return HermitianOperator(m)


def test_validate():
    basis = Povm([basis_projector(2, 0), basis_projector(2, 1)])
    report = validate(basis)
    assert report.passed
    assert_equal(report.n, 2)

    report = validate(Povm([np.eye(2)]))
    assert not report.passed
    assert "N >= 2" in report.reason

    report = validate(Povm([np.diag([1.5, 0.0]), np.diag([-0.5, 1.0])]))
    assert not report.passed
    assert_approx(report.psd_violation, 0.5)

    report = validate(Povm([np.diag([0.5, 0.0]), np.diag([0.0, 1.0])]))
    assert not report.passed
    assert_approx(report.completeness_residual, 0.5)

def test_povm_container():
    assert_raises(InvalidPovm, Povm, [])
    assert_raises(InvalidPovm, Povm, [np.eye(2), np.eye(3)])
    assert_raises(InvalidPovm, Povm, [[[0, 1], [0, 0]]])
    p = Povm([np.eye(2)]).padded(3)
    assert_equal(len(p), 3)
    assert_operator_close(p[2], np.zeros((2, 2)))


def test_bit_paths():
    # k1 is the least significant bit
    assert_equal(leaf_index(BitPath("10")), 1)
    assert_equal(leaf_index(BitPath("01")), 2)
    assert_equal(leaf_path(2, 2), BitPath("01"))
    assert_equal(leaf_path(5, 3), BitPath((1, 0, 1)))
    for depth in range(4):
        assert_equal([leaf_index(p) for p in all_paths(depth)], list(range(1 << depth)))
    assert_equal(str(BitPath((0, 1, 1))), "011")
    assert_equal(BitPath().child(1), BitPath("1"))
    with pytest.raises(ValueError):
        BitPath("012")

def test_depth_for():
    assert_equal([depth_for(n) for n in (2, 3, 4, 5, 8, 9)], [1, 2, 2, 3, 3, 4])
    assert_raises(InvalidPovm, depth_for, 1)


def test_decompose_computational_basis():
    # Elements |0>,|2>,|1>,|3>: the first step separates span{|0>,|1>} from span{|2>,|3>}
    p = Povm([basis_projector(4, k) for k in (0, 2, 1, 3)])
    n = decompose(p)
    assert_equal(n.depth, 2)
    assert_operator_close(n.operator("0"), np.diag([1.0, 1.0, 0.0, 0.0]))
    assert_operator_close(n.operator("1"), np.diag([0.0, 0.0, 1.0, 1.0]))
    assert_operator_close(n.operator("00"), np.diag([1.0, 0.0, 0.0, 0.0]))
    assert_operator_close(n.operator("01"), np.diag([0.0, 1.0, 0.0, 0.0]))
    assert_operator_close(n.operator("10"), np.diag([0.0, 0.0, 1.0, 0.0]))
    assert_operator_close(n.operator("11"), np.diag([0.0, 0.0, 0.0, 1.0]))
    for e, f in zip(p, recompose(n)):
        assert_operator_close(e, f, 1e-12)

def test_decompose_pads_to_power_of_two(rng):
    p = random_povm(3, 2, rng)
    n = decompose(p)
    assert_equal(n.depth, 2)
    flat = recompose(n)
    assert_equal(len(flat), 4)
    assert_operator_close(flat[3], np.zeros((2, 2)), 1e-12)
    # A zero element gives a zero node
    assert_operator_close(n.operator("11"), np.zeros((2, 2)), 1e-12)

def test_decompose_rejects_invalid():
    assert_raises_message(InvalidPovm, "sum to the identity", decompose,
                          Povm([np.diag([0.5, 0.0]), np.diag([0.0, 1.0])]))
    assert_raises(InvalidPovm, decompose, Povm([np.eye(2)]))

@pytest.mark.parametrize("n,dim", [(2, 2), (3, 2), (4, 2), (5, 2), (3, 3), (4, 3), (6, 4), (8, 2)])
def test_decompose_recompose(n, dim, rng):
    p = random_povm(n, dim, rng)
    assert validate(p).passed
    nested = decompose(p)
    report = validate_nested(nested)
    assert report.passed, report
    flat = recompose(nested)
    for e, f in zip(p.padded(len(flat)), flat):
        assert_operator_close(e, f, 1e-9)

@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), n=st.integers(min_value=2, max_value=6))
def test_weak_completeness(seed, n):
    nested = decompose(random_povm(n, 2, np.random.default_rng(seed)))
    for path, (b0, b1) in nested.nodes.items():
        assert_operator_close(b0 + b1, nested.parent_support(path), 1e-8)


def test_nested_structure_checks():
    half = np.eye(2) / 2
    assert_raises(InvalidNestedPovm, NestedPovm, 0, {})
    assert_raises(InvalidNestedPovm, NestedPovm, 2, {(): (half, half)})
    assert_raises(InvalidNestedPovm, NestedPovm, 1, {(): (half, half), (0,): (half, half)})
    broken = NestedPovm(1, {(): (half, np.eye(2) / 4)})
    assert not validate_nested(broken).passed
    assert_raises(InvalidNestedPovm, recompose, broken)


def test_apply_binary():
    rho = HermitianOperator(np.eye(2) / 2)
    post, prob = apply_binary(rho, np.diag([1.0, 0.0]))
    assert_approx(prob, 0.5)
    assert_operator_close(post, np.diag([0.5, 0.0]))
    assert_raises(NotSubIdentity, apply_binary, rho, 2 * np.eye(2))

@pytest.mark.parametrize("n,dim", [(3, 2), (4, 3), (5, 2)])
def test_measure_sequentially_matches_flat_povm(n, dim, rng):
    p = random_povm(n, dim, rng)
    rho = random_density(dim, rng)
    outcomes = measure_sequentially(rho, decompose(p))
    assert_equal(len(outcomes), 1 << depth_for(n))
    for j, e in enumerate(p):
        assert_approx(outcomes[j][1], rho.expectation(e), 1e-10)
    assert_approx(sum(prob for _, prob in outcomes), 1.0, 1e-10)
