#!/usr/bin/env python3
# Copyright (c) 2026 The nestedpovm developers
# Distributed under the MIT software license, see the accompanying
# file LICENSE.txt or http://www.opensource.org/licenses/mit-license.php.
"""Minimum-error discrimination of weighted state ensembles.

Ensembles carry the weighted states rho~_j = p_j rho_j. Measuring N = 3 or 4
states with a nested binary measurement whose first step is (Q, 1 - Q) and
whose second steps are the conditional Helstrom measurements succeeds with

    P(Q) = offset + F_Q(A, B, C)

where A, B, C and offset are fixed by the ensemble (build_abc()). The
optimal probability is offset + max_Q F_Q. The maximum is known in closed
form when one of three conditions holds (f_closed_form()); otherwise it is
found numerically over qubit Q (see optimizer.py).

Slot convention: slot j holds the state measured by leaf j = k1 + 2*k2 of
the nested measurement, so slots 0 and 2 follow the outcome Q and slots 1
and 3 follow the outcome 1 - Q."""
from collections import namedtuple
import itertools
import logging

import numpy as np

from .operators import (
    HermitianOperator,
    absolute_value,
    as_operator,
    check_psd,
    check_sub_identity,
    commutes,
    definite_sign,
    operator_sqrt,
    positive_part,
    random_density,
    random_pure,
    support_basis,
    support_projector,
    to_bloch,
    trace_norm,
)
from .povm import (
    InvalidPovm,
    NestedPovm,
    Povm,
    decompose,
    measure_sequentially,
    validate,
)
from .optimizer import maximize_f
from .util import NestedPovmError

logger = logging.getLogger("NestedPovm.discrimination")

NORMALIZATION_TOL = 1e-10
# A branch this unlikely contributes nothing to the recursion
BRANCH_TOL = 1e-12
SIGN_TOL = 1e-9
SUPPORT_TOL = 1e-9
COMMUTE_TOL = 1e-9


class InvalidEnsemble(NestedPovmError):
    pass

class SizeMismatch(NestedPovmError):
    pass

class DeadBranch(NestedPovmError):
    """Branch probability is at most BRANCH_TOL, the conditional ensemble is undefined."""

class ConditionsNotMet(NestedPovmError):
    """None of the closed-form conditions holds for this A, B, C."""

class UnsupportedDimension(NestedPovmError):
    pass


class WeightedEnsemble():
    """Ordered list of (probability, density matrix) pairs.

    States with zero probability are kept in place."""
    __slots__ = ("states",)

    def __init__(self, states):
        checked = []
        for j, (p, rho) in enumerate(states):
            try:
                rho = check_psd(as_operator(rho), "state %d" % j)
            except NestedPovmError as e:
                raise InvalidEnsemble(e.message)
            p = float(p)
            if p < 0:
                raise InvalidEnsemble("state %d has negative probability %g" % (j, p))
            if abs(rho.trace() - 1) > NORMALIZATION_TOL:
                raise InvalidEnsemble("state %d has trace %.12g, expected 1" % (j, rho.trace()))
            checked.append((p, rho))
        if not checked:
            raise InvalidEnsemble("ensemble is empty")
        if len({rho.dim for _, rho in checked}) != 1:
            raise InvalidEnsemble("states have different dimensions")
        total = sum(p for p, _ in checked)
        if abs(total - 1) > NORMALIZATION_TOL:
            raise InvalidEnsemble("probabilities sum to %.12g, expected 1" % total)
        self.states = tuple(checked)

    @classmethod
    def uniform(cls, rhos):
        rhos = list(rhos)
        return cls([(1 / len(rhos), rho) for rho in rhos])

    @property
    def n(self):
        return len(self.states)

    @property
    def dim(self):
        return self.states[0][1].dim

    @property
    def weights(self):
        return [p for p, _ in self.states]

    def weighted(self, j):
        """rho~_j = p_j rho_j"""
        p, rho = self.states[j]
        return rho * p

    def permuted(self, permutation):
        """Ensemble whose slot s holds state permutation[s]."""
        return WeightedEnsemble([self.states[j] for j in permutation])

    def padded(self, n):
        """Append zero-probability maximally mixed states up to n slots."""
        if n < self.n:
            raise SizeMismatch("cannot pad %d states down to %d" % (self.n, n))
        mixed = HermitianOperator.identity(self.dim) / self.dim
        return WeightedEnsemble(list(self.states) + [(0.0, mixed)] * (n - self.n))

    def __len__(self):
        return len(self.states)

    def __repr__(self):
        return "WeightedEnsemble(n=%d, dim=%d, p=%s)" % (self.n, self.dim, [round(p, 6) for p in self.weights])


AbcTriple = namedtuple("AbcTriple", ["a", "b", "c", "offset"])
ClosedForm = namedtuple("ClosedForm", ["value", "witness", "family"])


def _check_sizes(e, p):
    if len(e) != len(p):
        raise SizeMismatch("%d states but %d POVM elements" % (len(e), len(p)))
    if e.dim != p.dim:
        raise SizeMismatch("states have dimension %d, POVM elements %d" % (e.dim, p.dim))

def success_probability(e, p):
    """sum_j Tr[E_j rho~_j]"""
    _check_sizes(e, p)
    return sum(e.weighted(j).expectation(p[j]) for j in range(len(e)))

def success_probability_nested(e, n):
    """Success probability of a nested measurement, leaf j guessing state j.

    Each weighted state is run through the tree with measure_sequentially();
    ensembles shorter than 2^depth are padded with zero-probability states."""
    if e.dim != n.dim:
        raise SizeMismatch("states have dimension %d, tree operators %d" % (e.dim, n.dim))
    if len(e) > 1 << n.depth:
        raise SizeMismatch("%d states but only %d leaves" % (len(e), 1 << n.depth))
    total = 0.0
    for j in range(len(e)):
        if e.states[j][0] == 0:
            continue
        outcomes = measure_sequentially(e.weighted(j), n)
        total += outcomes[j][1]
    return total


def helstrom_projector(delta, support=None):
    """Projector onto the positive eigenspace of delta, restricted to a subspace.

    `support` holds orthonormal columns; the projector lies inside their span."""
    delta = as_operator(delta)
    u = np.eye(delta.dim, dtype=complex) if support is None else support
    if u.shape[1] == 0:
        return HermitianOperator.zero(delta.dim)
    w, v = np.linalg.eigh(u.conj().T @ delta.matrix @ u)
    vp = u @ v[:, w > 0]
    return HermitianOperator(vp @ vp.conj().T, check=False)

def helstrom(e):
    """Optimal two-state discrimination.

    Returns (probability, binary Povm) with probability (w + ||rho~_0 - rho~_1||_1)/2,
    w = p_0 + p_1, and the POVM {P, 1 - P} where P projects onto the positive
    eigenspace of rho~_0 - rho~_1."""
    if len(e) != 2:
        raise SizeMismatch("Helstrom measurement needs 2 states, got %d" % len(e))
    delta = e.weighted(0) - e.weighted(1)
    probability = (sum(e.weights) + trace_norm(delta)) / 2
    p = helstrom_projector(delta)
    return probability, Povm([p, HermitianOperator.identity(e.dim) - p])

def helstrom_value(e):
    return helstrom(e)[0]


def conditional_ensemble(e, b, selected):
    """States after outcome B, restricted to the `selected` slots.

    Returns (ensemble, branch probability) where the ensemble holds the
    normalized states sqrt(B) rho_j sqrt(B) / Tr[B rho_j] with weights
    Tr[B rho~_j] / branch probability. A state that never reaches the
    branch is replaced by the maximally mixed state with weight 0."""
    b = check_sub_identity(b, "branch operator")
    s = operator_sqrt(b)
    posts = [e.weighted(j).sandwich(s) for j in selected]
    traces = [post.trace() for post in posts]
    branch = sum(traces)
    if branch <= BRANCH_TOL:
        raise DeadBranch("branch probability %g is below %g" % (branch, BRANCH_TOL))
    mixed = HermitianOperator.identity(e.dim) / e.dim
    states = []
    for post, t in zip(posts, traces):
        if t > BRANCH_TOL:
            states.append((t, post / t))
        else:
            states.append((0.0, mixed))
    kept = sum(t for t, _ in states)
    if kept <= BRANCH_TOL:
        raise DeadBranch("no state reaches the branch with probability above %g" % BRANCH_TOL)
    return WeightedEnsemble([(t / kept, rho) for t, rho in states]), branch

def branch_slots(n, k1):
    """Slots j with first bit k1, ordered by their remaining bits."""
    return [j for j in range(n) if j % 2 == k1]

def recursion_value(e, first_step, solver=helstrom_value):
    """Value of a nested measurement whose first step is fixed.

    sum_k1 P(k1) * solver(conditional ensemble of branch k1). Odd N is padded
    with a zero-probability state. A dead branch contributes 0."""
    if len(e) < 3:
        raise SizeMismatch("recursion needs at least 3 states, got %d" % len(e))
    if len(e) % 2:
        e = e.padded(len(e) + 1)
    first_step = first_step if isinstance(first_step, Povm) else Povm(first_step)
    report = validate(first_step)
    if len(first_step) != 2 or not report.passed:
        raise InvalidPovm("first step must be a valid binary POVM (%s)" % (report.reason or "%d elements" % len(first_step)))
    total = 0.0
    for k1, b in enumerate(first_step):
        try:
            cond, branch = conditional_ensemble(e, b, branch_slots(len(e), k1))
        except DeadBranch:
            logger.debug("Branch %d is dead, contributes 0", k1)
            continue
        total += branch * solver(cond)
    return total


def build_abc(e, permutation=None):
    """A, B, C and offset for N = 3 or 4 states with slot s holding state permutation[s].

    N = 4: A = (x0 + x2 - x1 - x3)/2, B = (x0 - x2)/2, C = (x1 - x3)/2, offset = (p1 + p3)/2
    N = 3: A = (x0 + x2)/2 - x1,      B = (x0 - x2)/2, C = 0,           offset = p1"""
    n = len(e)
    if n not in (3, 4):
        raise SizeMismatch("A, B, C are defined for 3 or 4 states, got %d" % n)
    permutation = tuple(range(n)) if permutation is None else tuple(permutation)
    if sorted(permutation) != list(range(n)):
        raise SizeMismatch("%r is not a permutation of %d labels" % (permutation, n))
    x = [e.weighted(j) for j in permutation]
    p = [e.states[j][0] for j in permutation]
    b = (x[0] - x[2]) / 2
    if n == 4:
        a = (x[0] + x[2] - x[1] - x[3]) / 2
        c = (x[1] - x[3]) / 2
        offset = (p[1] + p[3]) / 2
    else:
        a = (x[0] + x[2]) / 2 - x[1]
        c = HermitianOperator.zero(e.dim)
        offset = p[1]
    return AbcTriple(a, b, c, offset)


def f_q(a, b, c, q):
    """F_Q = Tr[QA] + ||sqrt(Q) B sqrt(Q)||_1 + ||sqrt(1-Q) C sqrt(1-Q)||_1"""
    a, b, c, q = (as_operator(x) for x in (a, b, c, q))
    if len({a.dim, b.dim, c.dim, q.dim}) != 1:
        raise SizeMismatch("A, B, C and Q must share a dimension")
    q = check_sub_identity(q, "Q")
    rest = HermitianOperator.identity(q.dim) - q
    return (q.expectation(a)
            + trace_norm(b.sandwich(operator_sqrt(q)))
            + trace_norm(c.sandwich(operator_sqrt(rest))))

def closed_form_bound(a, b, c):
    """Tr[(A + |B| - |C|)+] + ||C||_1, an upper bound on F_Q for every Q."""
    m = a + absolute_value(b) - absolute_value(c)
    return positive_part(m).trace() + trace_norm(c), m

def _outside(x, projector):
    """Frobenius norm of the part of X not inside the projector's range."""
    pm = projector.matrix
    return float(np.linalg.norm(x.matrix - pm @ x.matrix @ pm))

def closed_form_family(a, b, c):
    """Which closed-form condition holds: "i", "ii", "iii" or None.

    i:   B inside the positive support of A and C inside its negative support
    ii:  B and C each of definite sign
    iii: A, B, C pairwise commuting"""
    plus = support_projector(positive_part(a))
    minus = support_projector(positive_part(-a))
    if _outside(b, plus) <= SUPPORT_TOL and _outside(c, minus) <= SUPPORT_TOL:
        return "i"
    if definite_sign(b, SIGN_TOL) and definite_sign(c, SIGN_TOL):
        return "ii"
    if commutes(a, b, COMMUTE_TOL) and commutes(a, c, COMMUTE_TOL) and commutes(b, c, COMMUTE_TOL):
        return "iii"
    return None

def f_closed_form(a, b, c):
    """Closed-form maximum of F_Q over 0 <= Q <= 1.

    Returns ClosedForm(value, witness Q, family). The witness attains the
    value: 1_{A+} for family i, the projector onto the positive support of
    A + |B| - |C| otherwise."""
    a, b, c = (as_operator(x) for x in (a, b, c))
    family = closed_form_family(a, b, c)
    if family is None:
        raise ConditionsNotMet("no closed-form condition holds for this A, B, C")
    value, m = closed_form_bound(a, b, c)
    if family == "i":
        witness = support_projector(positive_part(a))
    else:
        witness = support_projector(positive_part(m))
    return ClosedForm(value, witness, family)


def _permutations(n, which):
    if which == "identity":
        return [tuple(range(n))]
    if which != "all":
        raise ValueError("permutation search must be 'all' or 'identity', not %r" % which)
    return list(itertools.permutations(range(n)))

def nested_measurement(slots, q):
    """Depth-2 nested measurement: first step (Q, 1 - Q), then Helstrom per branch.

    `slots` is an ensemble of 4 states in slot order. Each second step is the
    Helstrom projector of the branch computed inside the parent support, so
    siblings sum exactly to that support. A branch holding one state, or a
    dead branch, keeps its whole support on the first leaf."""
    q = as_operator(q)
    rest = HermitianOperator.identity(q.dim) - q
    nodes = {(): (q, rest)}
    for k1, parent in enumerate((q, rest)):
        basis = support_basis(parent)
        whole = HermitianOperator(basis @ basis.conj().T, check=False)
        first, second = branch_slots(4, k1)
        s = operator_sqrt(parent)
        x0 = slots.weighted(first).sandwich(s)
        x1 = slots.weighted(second).sandwich(s)
        lone = slots.states[second][0] == 0
        if lone or x0.trace() + x1.trace() <= BRANCH_TOL:
            plus = whole
        else:
            plus = helstrom_projector(x0 - x1, basis)
        nodes[(k1,)] = (plus, whole - plus)
    return NestedPovm(2, nodes)


OptimalResult = namedtuple("OptimalResult", ["probability",
                                             "nested",
                                             "permutation",
                                             "method",
                                             "family",
                                             "q",
                                             "optimization"])

def optimal_probability(e, config=None, permutations="all"):
    """Optimal success probability for N = 3 or 4 states.

    Closed forms are tried for every labeling of the states, identity first;
    the first one that applies wins. Otherwise F_Q is maximized numerically
    over qubit Q for the identity labeling.

    The returned nested measurement guesses state permutation[j] on leaf j."""

    n = len(e)
    if n not in (3, 4):
        raise SizeMismatch("optimal_probability handles 3 or 4 states, got %d" % n)
    for perm in _permutations(n, permutations):
        triple = build_abc(e, perm)
        try:
            closed = f_closed_form(triple.a, triple.b, triple.c)
        except ConditionsNotMet:
            logger.debug("No closed form for labeling %s", perm)
            continue
        logger.debug("Closed form (%s) for labeling %s: %.12g", closed.family, perm, triple.offset + closed.value)
        nested = nested_measurement(e.permuted(perm).padded(4), closed.witness)
        return OptimalResult(triple.offset + closed.value, nested, perm,
                             "closed-form(%s)" % closed.family, closed.family, closed.witness, None)

    if e.dim != 2:
        raise UnsupportedDimension("numerical optimization over Q needs qubit states, got dimension %d" % e.dim)
    perm = tuple(range(n))
    triple = build_abc(e, perm)
    result = maximize_f(to_bloch(triple.a), to_bloch(triple.b), to_bloch(triple.c), config)
    q = result.best_q.to_operator()
    nested = nested_measurement(e.padded(4), q)
    return OptimalResult(triple.offset + result.value, nested, perm, "numerical", None, q, result)


DiscriminationReport = namedtuple("DiscriminationReport", ["probability",
                                                           "method",
                                                           "family",
                                                           "permutation",
                                                           "q",
                                                           "nested",
                                                           "optimization"])

def discriminate(e, config=None, permutations="all"):
    """Optimal discrimination for any supported ensemble size (1 to 4 states)."""
    n = len(e)
    if n == 1:
        return DiscriminationReport(1.0, "trivial", None, (0,), None, None, None)
    if n == 2:
        probability, povm = helstrom(e)
        return DiscriminationReport(probability, "helstrom", None, (0, 1), povm[0], decompose(povm), None)
    if n in (3, 4):
        r = optimal_probability(e, config, permutations)
        return DiscriminationReport(r.probability, r.method, r.family, r.permutation, r.q, r.nested, r.optimization)
    raise SizeMismatch("closed forms and the optimizer cover at most 4 states, got %d" % n)


def random_ensemble(n, dim, rng, pure=False):
    """Random weights (flat Dirichlet) and random states."""
    weights = rng.dirichlet(np.ones(n))
    make = random_pure if pure else random_density
    return WeightedEnsemble([(p, make(dim, rng)) for p in weights])
