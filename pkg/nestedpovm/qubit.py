#!/usr/bin/env python3
# Copyright (c) 2026 The nestedpovm developers
# Distributed under the MIT software license, see the accompanying
# file LICENSE.txt or http://www.opensource.org/licenses/mit-license.php.
"""Bloch-space evaluation of F_Q for qubits.

For qubit operators written as X = c_X*1 + r_X.sigma the objective

    F_Q(A, B, C) = Tr[QA] + ||sqrt(Q) B sqrt(Q)||_1 + ||sqrt(1-Q) C sqrt(1-Q)||_1

has a closed form in the coefficients of A, B, C and Q. A trace-norm term
is 2|Tr[Q B]/2| when B has definite sign and

    2 sqrt((c_Q c_B + r_Q.r_B)^2 + (r_B^2 - c_B^2)(c_Q^2 - r_Q^2))

otherwise. The C term is the same expression with Q replaced by 1-Q,
i.e. c_Q -> 1-c_Q, r_Q -> -r_Q, and C's own coefficients under the radical.

Evaluation is vectorized over batches of Q so the optimizer and the grid
oracle share one code path."""
from collections import namedtuple
import logging

import numpy as np

from .operators import BlochOperator, from_bloch, to_bloch
from .util import NestedPovmError

logger = logging.getLogger("NestedPovm.qubit")

# Feasibility slack for |r_Q| <= min(c_Q, 1 - c_Q)
CONSTRAINT_TOL = 1e-12
# Relative tolerance for classifying an operator as definite
SIGN_TOL = 1e-9


class ConstraintViolation(NestedPovmError):
    """Q violates 0 <= Q <= 1."""

class NotDefiniteSign(NestedPovmError):
    pass


class QubitQ(namedtuple("QubitQ", ["c", "r"])):
    """Qubit operator Q = c*1 + r.sigma with 0 <= Q <= 1.

    Equivalently 0 <= c <= 1 and |r| <= min(c, 1 - c)."""
    __slots__ = ()

    def __new__(cls, c, r=(0.0, 0.0, 0.0)):
        r = np.array(r, dtype=float).reshape(3)
        c = float(c)
        if not -CONSTRAINT_TOL <= c <= 1 + CONSTRAINT_TOL:
            raise ConstraintViolation("c_Q = %r outside [0, 1]" % c)
        if np.linalg.norm(r) > min(c, 1 - c) + CONSTRAINT_TOL:
            raise ConstraintViolation("|r_Q| = %r exceeds min(c_Q, 1 - c_Q) for c_Q = %r" % (np.linalg.norm(r), c))
        r.setflags(write=False)
        return super().__new__(cls, c, r)

    @classmethod
    def from_operator(cls, q):
        b = to_bloch(q)
        return cls(b.c, b.r)

    @property
    def radius(self):
        return float(np.linalg.norm(self.r))

    def bloch(self):
        return BlochOperator(self.c, self.r)

    def to_operator(self):
        return from_bloch(self.bloch())

    def complement(self):
        return QubitQ(1 - self.c, -self.r)

    def __eq__(self, other):
        return isinstance(other, QubitQ) and self.c == other.c and np.array_equal(self.r, other.r)

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "QubitQ(c=%r, r=%r)" % (self.c, self.r.tolist())


def sqrt_coefficients(q):
    """Scalar and radius of sqrt(Q); the direction of its vector is that of r_Q.

    Returns (c_sqrt, r_sqrt) with c_sqrt^2 + r_sqrt^2 = c and 2 c_sqrt r_sqrt = |r_Q|."""
    if not isinstance(q, QubitQ):
        q = QubitQ(*q)
    hi = np.sqrt(q.c + q.radius)
    lo = np.sqrt(max(0.0, q.c - q.radius))
    return (hi + lo) / 2, (hi - lo) / 2

def sqrt_bloch(q):
    """sqrt(Q) in Bloch form."""
    c_s, r_s = sqrt_coefficients(q)
    radius = q.radius
    direction = q.r / radius if radius > 0 else np.zeros(3)
    return BlochOperator(c_s, r_s * direction)

def sandwich_arrays(s0, sv, b0, bv):
    """Coefficients of S B S from those of S (batched) and B.

    s0 has shape (...), sv shape (..., 3); b0 is a scalar and bv a 3-vector."""
    s0 = np.asarray(s0, dtype=float)
    sv = np.asarray(sv, dtype=float)
    ss = np.einsum("...i,...i->...", sv, sv)
    sb = sv @ bv
    c = b0 * (s0 ** 2 + ss) + 2 * s0 * sb
    r = (s0 ** 2 - ss)[..., None] * bv + (2 * s0 * b0)[..., None] * sv + (2 * sb)[..., None] * sv
    return c, r

def sandwich_bloch(s, b):
    """Bloch form of S B S for qubit operators S and B (Pauli algebra, no matrices)."""
    return BlochOperator(*sandwich_arrays(s.c, s.r, b.c, b.r))

def sqrt_arrays(cq, rq):
    """Batched sqrt(Q): returns (c, r) arrays of sqrt(Q) for feasible (cq, rq)."""
    cq = np.asarray(cq, dtype=float)
    rq = np.asarray(rq, dtype=float)
    radius = np.linalg.norm(rq, axis=-1)
    hi = np.sqrt(cq + radius)
    lo = np.sqrt(np.maximum(cq - radius, 0.0))
    unit = rq / np.where(radius > 0, radius, 1.0)[..., None]
    return (hi + lo) / 2, ((hi - lo) / 2)[..., None] * unit


def sign_class(x, tol=SIGN_TOL):
    """+1 / -1 for a definite-sign qubit operator, 0 if indefinite."""
    hi, lo = x.eigenvalues
    scale = max(abs(hi), abs(lo))
    if lo >= -tol * scale:
        return 1
    if hi <= tol * scale:
        return -1
    return 0

SignInfo = namedtuple("SignInfo", ["b", "c"])

def classify(b, c, tol=SIGN_TOL):
    return SignInfo(sign_class(b, tol), sign_class(c, tol))


def _trace_norm_term(scalar, det_q, x, sign):
    """||sqrt(Q) X sqrt(Q)||_1 from a = c_Q c_X + r_Q.r_X and det Q = c_Q^2 - r_Q^2."""
    if sign != 0:
        return 2 * sign * scalar
    disc = scalar ** 2 + (x.r @ x.r - x.c ** 2) * det_q
    return 2 * np.sqrt(np.maximum(disc, 0.0))

def f_q_bloch_batch(a, b, c, cq, rq, sign_info=None):
    """F_Q for a batch of qubit Q given as arrays cq (n,) and rq (n, 3)."""
    if sign_info is None:
        sign_info = classify(b, c)
    cq = np.asarray(cq, dtype=float)
    rq = np.asarray(rq, dtype=float)
    rr = np.einsum("...i,...i->...", rq, rq)
    det_q = cq ** 2 - rr
    det_p = (1 - cq) ** 2 - rr
    value = 2 * (cq * a.c + rq @ a.r)
    value = value + _trace_norm_term(cq * b.c + rq @ b.r, det_q, b, sign_info.b)
    value = value + _trace_norm_term((1 - cq) * c.c - rq @ c.r, det_p, c, sign_info.c)
    return value

def f_q_bloch(a, b, c, q, sign_info=None):
    """F_Q(A, B, C) for a single feasible QubitQ.

    Each trace-norm term picks its own formula from the sign of B or C, so a
    definite B may be combined with an indefinite C and vice versa."""
    if not isinstance(q, QubitQ):
        q = QubitQ(*q)
    return float(f_q_bloch_batch(a, b, c, q.c, q.r, sign_info))


def definite_sign_optimum(a, b, c):
    """Maximum of F_Q when B and C both have definite sign.

    F_Q then reduces to Tr[QM] + ||C||_1 with M = A + |B| - |C|, so the best
    Q is the projector onto the positive eigenspace of M. Ties (M with no
    positive eigenvalue) resolve to Q = 0."""
    signs = classify(b, c)
    if signs.b == 0 or signs.c == 0:
        raise NotDefiniteSign("B and C must both have definite sign (got %d, %d)" % signs)
    m = a + b * signs.b - c * signs.c
    hi, lo = m.eigenvalues
    if hi <= 0:
        q = QubitQ(0.0)
    elif lo > 0:
        q = QubitQ(1.0)
    else:
        q = QubitQ(0.5, m.r / (2 * m.norm))
    value = max(hi, 0.0) + max(lo, 0.0) + 2 * signs.c * c.c
    logger.debug("Definite-sign optimum %.12g at %r", value, q)
    return value, q


class ReducedParametrization():
    """Two-parameter family of candidate maximizers for C = 0.

    With C = 0, F_Q is positively homogeneous in Q, so a maximizer other than
    Q = 0 has largest eigenvalue c_Q + r_Q = 1. The vector r_Q lies in the
    plane of r_A and r_B, at angle phi from r_A:

        Q(c, phi) = c*1 + (1 - c)(cos(phi) e1 + sin(phi) e2).sigma,  c in [1/2, 1]"""

    C_BOUNDS = (0.5, 1.0)

    def __init__(self, a, b):
        self.e1, self.e2 = _plane_basis(a.r, b.r)

    def vectors(self, c, phi):
        """Arrays (cq, rq) for broadcastable c and phi."""
        c = np.clip(np.asarray(c, dtype=float), *self.C_BOUNDS)
        phi = np.asarray(phi, dtype=float)
        radius = (1 - c)[..., None]
        rq = radius * (np.cos(phi)[..., None] * self.e1 + np.sin(phi)[..., None] * self.e2)
        return c, rq

    def q(self, c, phi):
        cq, rq = self.vectors(c, phi)
        return QubitQ(float(cq), rq)

def _unit_or_none(v, tol=1e-12):
    n = np.linalg.norm(v)
    return v / n if n > tol else None

def _plane_basis(ra, rb):
    e1 = _unit_or_none(np.asarray(ra, dtype=float))
    if e1 is None:
        e1 = _unit_or_none(np.asarray(rb, dtype=float))
    if e1 is None:
        e1 = np.array([1.0, 0.0, 0.0])
    e2 = _unit_or_none(rb - (rb @ e1) * e1)
    if e2 is None:
        axis = np.eye(3)[np.argmin(np.abs(e1))]
        e2 = _unit_or_none(np.cross(e1, axis))
    return e1, e2

def n3_reduced_parametrization(a, b):
    return ReducedParametrization(a, b)
