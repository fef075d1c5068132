#!/usr/bin/env python3
# Copyright (c) 2026 The nestedpovm developers
# Distributed under the MIT software license, see the accompanying
# file LICENSE.txt or http://www.opensource.org/licenses/mit-license.php.
"""POVMs and their decomposition into nested binary POVMs.

Any N-outcome POVM {E_j} can be measured as a tree of two-outcome POVMs.
At step u the measurement applied depends on the bit string k_1..k_(u-1) of
the previous outcomes, and the u-th node of that branch is

    B^(u)_{k_1..k_u} = G E G^dagger,   G = B^(u-1)^(-1/2) ... B^(1)^(-1/2)

where E sums every E_j whose index starts with the bits k_1..k_u and the
inverse square roots are taken on the support only. Leaf (k_1, .., k_uF)
carries the flat index j = sum_u 2^(u-1) k_u, so k_1 is the least
significant bit. Sibling nodes only sum to the support projector of their
parent ("weak completeness"); the composition still sums to the identity.

N is padded with zero elements up to 2^uF, uF = ceil(log2 N)."""
from collections import namedtuple
import logging
import math

import numpy as np

from .operators import (
    PSD_TOL,
    HermitianOperator,
    as_operator,
    check_psd,
    check_sub_identity,
    operator_sqrt,
    pseudo_inverse_sqrt,
    psd_violation,
    random_psd,
    support_projector,
)
from .util import NestedPovmError

logger = logging.getLogger("NestedPovm.povm")

COMPLETENESS_TOL = 1e-9
ROUNDTRIP_TOL = 1e-9


class InvalidPovm(NestedPovmError):
    pass

class InvalidNestedPovm(NestedPovmError):
    pass


ValidationReport = namedtuple('ValidationReport', ['passed',
                                                   'n',
                                                   'psd_violation',
                                                   'completeness_residual',
                                                   'reason'])


class Povm():
    """Ordered list of PSD operators of a common dimension.

    Positivity and completeness are not enforced here; see validate()."""
    __slots__ = ("elements",)

    def __init__(self, elements):
        try:
            elements = tuple(as_operator(e) for e in elements)
        except NestedPovmError as e:
            raise InvalidPovm("bad POVM element: %s" % e.message)
        if not elements:
            raise InvalidPovm("a POVM needs at least one element")
        if len({e.dim for e in elements}) != 1:
            raise InvalidPovm("POVM elements have different dimensions")
        self.elements = elements

    @property
    def dim(self):
        return self.elements[0].dim

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, j):
        return self.elements[j]

    def padded(self, n):
        """Append zero elements up to n outcomes."""
        if n < len(self):
            raise InvalidPovm("cannot pad %d elements down to %d" % (len(self), n))
        zero = HermitianOperator.zero(self.dim)
        return Povm(self.elements + (zero,) * (n - len(self)))

    def __repr__(self):
        return "Povm(n=%d, dim=%d)" % (len(self), self.dim)


def validate(p):
    """Check positivity and completeness, returning a ValidationReport."""
    n = len(p)
    violation = max(psd_violation(e) for e in p)
    total = sum((e.matrix for e in p), np.zeros((p.dim, p.dim), dtype=complex))
    residual = float(np.linalg.norm(total - np.eye(p.dim)))
    reason = None
    if n < 2:
        reason = "N >= 2 required, got %d element" % n
    elif violation > PSD_TOL:
        reason = "element not positive semidefinite (eigenvalue %g)" % -violation
    elif residual > COMPLETENESS_TOL:
        reason = "elements do not sum to the identity (residual %g)" % residual
    return ValidationReport(passed=reason is None, n=n, psd_violation=violation,
                            completeness_residual=residual, reason=reason)


class BitPath(tuple):
    """Outcome string k_1..k_m of the first m binary steps (possibly empty)."""
    __slots__ = ()

    def __new__(cls, bits=()):
        if isinstance(bits, str):
            bits = [int(b) for b in bits]
        bits = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bit path may only contain 0 and 1: %r" % (bits,))
        return super().__new__(cls, bits)

    def child(self, k):
        return BitPath(self + (k,))

    def __str__(self):
        return "".join(str(b) for b in self)

    def __repr__(self):
        return "BitPath('%s')" % str(self)


def leaf_index(path):
    """Flat outcome index j = sum_u 2^(u-1) k_u of a bit path."""
    return sum(k << u for u, k in enumerate(path))

def leaf_path(index, depth):
    return BitPath((index >> u) & 1 for u in range(depth))

def depth_for(n):
    """Number of binary steps uF = ceil(log2 N) needed for N outcomes."""
    if n < 2:
        raise InvalidPovm("N >= 2 required, got %d" % n)
    return math.ceil(math.log2(n))

def all_paths(length):
    return [leaf_path(i, length) for i in range(1 << length)]


class NestedPovm():
    """Binary tree of conditional binary POVMs.

    `nodes` maps every BitPath of length u-1 (1 <= u <= depth) to the pair
    (B^(u)_{path,0}, B^(u)_{path,1})."""
    __slots__ = ("depth", "nodes")

    def __init__(self, depth, nodes):
        if depth < 1:
            raise InvalidNestedPovm("depth must be at least 1")
        nodes = {BitPath(path): (as_operator(b0), as_operator(b1)) for path, (b0, b1) in nodes.items()}
        expected = {path for u in range(depth) for path in all_paths(u)}
        if set(nodes) != expected:
            missing = sorted(str(q) for q in expected - set(nodes))
            extra = sorted(str(q) for q in set(nodes) - expected)
            raise InvalidNestedPovm("tree of depth %d has missing nodes %s and unexpected nodes %s" % (depth, missing, extra))
        if len({b.dim for pair in nodes.values() for b in pair}) != 1:
            raise InvalidNestedPovm("node operators have different dimensions")
        self.depth = depth
        self.nodes = nodes

    @property
    def dim(self):
        return self.nodes[BitPath()][0].dim

    def operator(self, path):
        """B^(u)_{path} for a non-empty path of length u."""
        path = BitPath(path)
        return self.nodes[BitPath(path[:-1])][path[-1]]

    def parent_support(self, path):
        """Support projector that the children of `path` must sum to."""
        if not path:
            return HermitianOperator.identity(self.dim)
        return support_projector(self.operator(path))

    def __repr__(self):
        return "NestedPovm(depth=%d, dim=%d)" % (self.depth, self.dim)


NestedReport = namedtuple('NestedReport', ['passed', 'psd_violation', 'weak_completeness_residual', 'worst_path'])

def validate_nested(n):
    """Check positivity of every node and weak completeness against the parent support."""
    worst_psd = 0.0
    worst_residual = 0.0
    worst_path = None
    for path, (b0, b1) in sorted(n.nodes.items(), key=lambda kv: (len(kv[0]), kv[0])):
        worst_psd = max(worst_psd, psd_violation(b0), psd_violation(b1))
        residual = float(np.linalg.norm((b0 + b1).matrix - n.parent_support(path).matrix))
        if residual > worst_residual:
            worst_residual, worst_path = residual, path
    passed = worst_psd <= PSD_TOL and worst_residual <= COMPLETENESS_TOL
    return NestedReport(passed, worst_psd, worst_residual, worst_path)


def decompose(p):
    """Decompose a valid POVM into an equivalent NestedPovm."""
    report = validate(p)
    if not report.passed:
        raise InvalidPovm(report.reason)
    depth = depth_for(len(p))
    padded = p.padded(1 << depth)
    logger.debug("Decomposing %d-outcome POVM into %d binary steps", len(p), depth)

    # whiten[path] = B^(u)^(-1/2) ... B^(1)^(-1/2) along `path`
    whiten = {BitPath(): np.eye(p.dim, dtype=complex)}
    nodes = {}
    for u in range(1, depth + 1):
        mask = (1 << u) - 1
        for parent in all_paths(u - 1):
            g = whiten[parent]
            pair = []
            for k in (0, 1):
                path = parent.child(k)
                prefix = leaf_index(path)
                block = sum((e.matrix for j, e in enumerate(padded) if j & mask == prefix),
                            np.zeros((p.dim, p.dim), dtype=complex))
                b = HermitianOperator(g @ block @ g.conj().T, check=False)
                pair.append(b)
                if u < depth:
                    whiten[path] = pseudo_inverse_sqrt(b).matrix @ g
            nodes[parent] = tuple(pair)
    return NestedPovm(depth, nodes)


def _leaf_amplitude(n, path):
    """sqrt(B^(uF)) ... sqrt(B^(1)) along a leaf path."""
    x = np.eye(n.dim, dtype=complex)
    for u in range(1, len(path) + 1):
        x = operator_sqrt(n.operator(path[:u])).matrix @ x
    return x

def recompose(n):
    """Flatten a NestedPovm into its 2^depth element POVM."""
    report = validate_nested(n)
    if not report.passed:
        raise InvalidNestedPovm("node %s breaks positivity or weak completeness (psd %g, residual %g)" %
                                (report.worst_path, report.psd_violation, report.weak_completeness_residual))
    elements = [None] * (1 << n.depth)
    for j in range(1 << n.depth):
        x = _leaf_amplitude(n, leaf_path(j, n.depth))
        elements[j] = HermitianOperator(x.conj().T @ x, check=False)
    return Povm(elements)


def apply_binary(state, b):
    """Back-action of outcome B on a (weighted) state.

    Returns the unnormalized post-measurement state sqrt(B) state sqrt(B)
    and its trace, the probability of the outcome."""
    state = check_psd(state, "state")
    b = check_sub_identity(b, "outcome operator")
    post = state.sandwich(operator_sqrt(b))
    return post, post.trace()

def measure_sequentially(state, n):
    """Run the nested measurement step by step on a (weighted) state.

    Returns a list indexed by leaf j of (post-state, probability) pairs."""
    frontier = {BitPath(): as_operator(state)}
    for _ in range(n.depth):
        step = {}
        for path, current in frontier.items():
            for k, b in enumerate(n.nodes[path]):
                step[path.child(k)], _ = apply_binary(current, b)
        frontier = step
    outcomes = [None] * (1 << n.depth)
    for path, post in frontier.items():
        outcomes[leaf_index(path)] = (post, post.trace())
    return outcomes


def random_povm(n, dim, rng):
    """E_j = S^(-1/2) G_j S^(-1/2) for random PSD G_j with S = sum_j G_j."""
    gs = [random_psd(dim, rng) for _ in range(n)]
    t = pseudo_inverse_sqrt(HermitianOperator(sum(g.matrix for g in gs), check=False))
    return Povm([g.sandwich(t) for g in gs])
