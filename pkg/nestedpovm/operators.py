#!/usr/bin/env python3
# Copyright (c) 2026 The nestedpovm developers
# Distributed under the MIT software license, see the accompanying
# file LICENSE.txt or http://www.opensource.org/licenses/mit-license.php.
"""Dense Hermitian operators and spectral utilities.

Everything here works on small dense matrices (dimension at most MAX_DIM).
Operators are immutable once constructed, so values can be shared freely
between threads and worker processes.

A qubit operator can also be written in Bloch form X = c*1 + r.sigma, see
BlochOperator, to_bloch() and from_bloch()."""
from collections import namedtuple
import logging

import numpy as np

from .util import NestedPovmError

logger = logging.getLogger("NestedPovm.operators")

# Relative Frobenius tolerance for the Hermiticity check
HERMITICITY_TOL = 1e-10
# Eigenvalues below RANK_TOL * max|eigenvalue| are outside the support
RANK_TOL = 1e-9
# Eigenvalues in [-PSD_TOL, 0) are clamped to zero
PSD_TOL = 1e-9
MAX_DIM = 16

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.array([SIGMA_X, SIGMA_Y, SIGMA_Z])


class NonHermitianInput(NestedPovmError):
    """Matrix differs from its conjugate transpose beyond HERMITICITY_TOL."""

class NotPsd(NestedPovmError):
    """Operator has an eigenvalue below -PSD_TOL."""

class NotSubIdentity(NestedPovmError):
    """Operator has an eigenvalue above 1 + PSD_TOL."""

class WrongDimension(NestedPovmError):
    pass


def hermiticity_residual(matrix):
    """Relative Frobenius distance between a matrix and its adjoint."""
    m = np.asarray(matrix)
    return np.linalg.norm(m - m.conj().T) / max(1.0, np.linalg.norm(m))


class HermitianOperator():
    """A dense Hermitian matrix.

    The entries are checked and symmetrized on construction and then frozen.
    Arithmetic between operators and with real scalars yields new operators."""
    __slots__ = ("_matrix",)

    def __init__(self, entries, check=True):
        m = np.array(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise WrongDimension("expected a square matrix, got shape %s" % (m.shape,))
        if not 1 <= m.shape[0] <= MAX_DIM:
            raise WrongDimension("dimension %d outside [1, %d]" % (m.shape[0], MAX_DIM))
        if check:
            residual = hermiticity_residual(m)
            if residual > HERMITICITY_TOL:
                raise NonHermitianInput("matrix is not Hermitian (residual %g)" % residual)
        m = (m + m.conj().T) / 2
        m.setflags(write=False)
        self._matrix = m

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim), check=False)

    @classmethod
    def zero(cls, dim):
        return cls(np.zeros((dim, dim)), check=False)

    @classmethod
    def projector(cls, vector):
        """Projector onto the ray of `vector` (normalized first)."""
        v = np.asarray(vector, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("cannot project onto the zero vector")
        v = v / norm
        return cls(np.outer(v, v.conj()), check=False)

    @property
    def matrix(self):
        return self._matrix

    @property
    def dim(self):
        return self._matrix.shape[0]

    def trace(self):
        return float(np.trace(self._matrix).real)

    def expectation(self, other):
        """Tr[self * other] for another Hermitian operator."""
        return float(np.einsum("ij,ji->", self._matrix, as_operator(other).matrix).real)

    def sandwich(self, k):
        """K X K^dagger for an arbitrary square matrix or operator K."""
        km = np.asarray(getattr(k, "matrix", k))
        return HermitianOperator(km @ self._matrix @ km.conj().T, check=False)

    def is_close(self, other, tol=1e-10):
        other = as_operator(other)
        return self.dim == other.dim and np.linalg.norm(self._matrix - other.matrix) <= tol

    def __add__(self, other):
        if not isinstance(other, HermitianOperator):
            return NotImplemented
        return HermitianOperator(self._matrix + other.matrix, check=False)

    def __sub__(self, other):
        if not isinstance(other, HermitianOperator):
            return NotImplemented
        return HermitianOperator(self._matrix - other.matrix, check=False)

    def __neg__(self):
        return HermitianOperator(-self._matrix, check=False)

    def __mul__(self, scalar):
        if isinstance(scalar, (HermitianOperator, np.ndarray)) or np.iscomplexobj(scalar):
            return NotImplemented
        return HermitianOperator(float(scalar) * self._matrix, check=False)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / float(scalar))

    def __eq__(self, other):
        if not isinstance(other, HermitianOperator):
            return NotImplemented
        return np.array_equal(self._matrix, other.matrix)

    __hash__ = None

    def __repr__(self):
        return "HermitianOperator(dim=%d, %s)" % (self.dim, np.array2string(self._matrix, precision=6))


def as_operator(x):
    """Wrap an array-like in a HermitianOperator (no-op for operators)."""
    if isinstance(x, HermitianOperator):
        return x
    return HermitianOperator(x)


def _spectrum(x):
    """Eigenvalues (descending) and eigenvector columns of a Hermitian operator."""
    w, v = np.linalg.eigh(as_operator(x).matrix)
    return w[::-1], v[:, ::-1]

def _psd_spectrum(x):
    w, v = _spectrum(x)
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[-1] < -PSD_TOL * scale:
        raise NotPsd("operator has eigenvalue %g < 0" % w[-1])
    return np.clip(w, 0.0, None), v

def _support_mask(w):
    scale = float(np.max(np.abs(w))) if len(w) else 0.0
    if scale == 0.0:
        return np.zeros(len(w), dtype=bool)
    return np.abs(w) >= RANK_TOL * scale

def _from_spectrum(w, v):
    return HermitianOperator((v * w) @ v.conj().T, check=False)


def eigendecompose(x):
    """Eigenpairs of a Hermitian operator as (eigenvalue, eigenvector) tuples.

    Eigenvalues are sorted in descending order and the eigenvectors are
    orthonormal."""
    w, v = _spectrum(x)
    return [(float(w[i]), v[:, i].copy()) for i in range(len(w))]

def eigenvalues(x):
    return _spectrum(x)[0]

def trace_norm(x):
    """Sum of the absolute eigenvalues."""
    return float(np.sum(np.abs(eigenvalues(x))))

def positive_part(x):
    """X+ = (X + |X|)/2, with eigenvalues below the rank threshold dropped."""
    w, v = _spectrum(x)
    w = np.where(_support_mask(w) & (w > 0), w, 0.0)
    return _from_spectrum(w, v)

def absolute_value(x):
    w, v = _spectrum(x)
    return _from_spectrum(np.abs(w), v)

def pseudo_inverse_sqrt(x):
    """X^(-1/2) on the support of a PSD operator and zero on its kernel."""
    w, v = _psd_spectrum(x)
    mask = _support_mask(w)
    inv = np.zeros_like(w)
    inv[mask] = 1.0 / np.sqrt(w[mask])
    return _from_spectrum(inv, v)

def support_basis(x):
    """Orthonormal columns spanning the support of X."""
    w, v = _spectrum(x)
    return v[:, _support_mask(w)]

def support_projector(x):
    u = support_basis(x)
    return HermitianOperator(u @ u.conj().T, check=False)

def operator_sqrt(x):
    w, v = _psd_spectrum(x)
    return _from_spectrum(np.sqrt(w), v)

def psd_violation(x):
    """How far the smallest eigenvalue lies below zero (0 for PSD input)."""
    return max(0.0, -float(eigenvalues(x)[-1]))

def check_psd(x, name="operator"):
    x = as_operator(x)
    violation = psd_violation(x)
    if violation > PSD_TOL * max(1.0, trace_norm(x)):
        raise NotPsd("%s is not positive semidefinite (eigenvalue %g)" % (name, -violation))
    return x

def check_sub_identity(x, name="operator"):
    """Check 0 <= X <= 1 within PSD_TOL."""
    x = check_psd(x, name)
    excess = psd_violation(HermitianOperator.identity(x.dim) - x)
    if excess > PSD_TOL:
        raise NotSubIdentity("%s exceeds the identity (eigenvalue 1%+g)" % (name, excess))
    return x

def definite_sign(x, tol):
    """+1 if X >= 0, -1 if X <= 0, 0 if indefinite, relative to max|eigenvalue|.

    The zero operator counts as positive."""
    w = eigenvalues(x)
    scale = float(np.max(np.abs(w)))
    if w[-1] >= -tol * scale:
        return 1
    if w[0] <= tol * scale:
        return -1
    return 0

def commutator_norm(x, y):
    a, b = as_operator(x).matrix, as_operator(y).matrix
    return float(np.linalg.norm(a @ b - b @ a))

def commutes(x, y, tol):
    a, b = as_operator(x).matrix, as_operator(y).matrix
    return commutator_norm(a, b) <= tol * np.linalg.norm(a) * np.linalg.norm(b)


class BlochOperator(namedtuple("BlochOperator", ["c", "r"])):
    """Qubit Hermitian operator X = c*1 + r.sigma.

    Eigenvalues are c + |r| and c - |r|."""
    __slots__ = ()

    def __new__(cls, c, r):
        r = np.array(r, dtype=float).reshape(3)
        r.setflags(write=False)
        return super().__new__(cls, float(c), r)

    @property
    def norm(self):
        return float(np.linalg.norm(self.r))

    @property
    def eigenvalues(self):
        return (self.c + self.norm, self.c - self.norm)

    def to_operator(self):
        return from_bloch(self)

    def __add__(self, other):
        return BlochOperator(self.c + other.c, self.r + other.r)

    def __sub__(self, other):
        return BlochOperator(self.c - other.c, self.r - other.r)

    def __neg__(self):
        return BlochOperator(-self.c, -self.r)

    def __mul__(self, scalar):
        return BlochOperator(scalar * self.c, scalar * self.r)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, BlochOperator) and self.c == other.c and np.array_equal(self.r, other.r)

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "BlochOperator(c=%r, r=%r)" % (self.c, self.r.tolist())


def to_bloch(x):
    """Bloch coefficients c = Tr X / 2, r_i = Tr[X sigma_i] / 2 of a qubit operator."""
    x = as_operator(x)
    if x.dim != 2:
        raise WrongDimension("Bloch form needs dimension 2, got %d" % x.dim)
    m = x.matrix
    r = np.einsum("kij,ji->k", PAULI, m).real / 2
    return BlochOperator(np.trace(m).real / 2, r)

def from_bloch(b):
    m = b.c * np.eye(2, dtype=complex) + np.einsum("k,kij->ij", b.r, PAULI)
    return HermitianOperator(m, check=False)

def bloch_state(vector):
    """Density matrix (1 + v.sigma)/2 of a Bloch vector with |v| <= 1."""
    v = np.asarray(vector, dtype=float).reshape(3)
    if np.linalg.norm(v) > 1 + PSD_TOL:
        raise NotPsd("Bloch vector %s is longer than 1" % v.tolist())
    return from_bloch(BlochOperator(0.5, v / 2))


# Random operators, driven by a numpy Generator so results are seed-pinned.

def random_hermitian(dim, rng, scale=1.0):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator(scale * (g + g.conj().T) / 2, check=False)

def random_psd(dim, rng, rank=None):
    g = rng.normal(size=(dim, rank or dim)) + 1j * rng.normal(size=(dim, rank or dim))
    return HermitianOperator(g @ g.conj().T, check=False)

def random_density(dim, rng, rank=None):
    p = random_psd(dim, rng, rank)
    return p / p.trace()

def random_pure(dim, rng):
    return HermitianOperator.projector(rng.normal(size=dim) + 1j * rng.normal(size=dim))
