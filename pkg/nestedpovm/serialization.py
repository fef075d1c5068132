#!/usr/bin/env python3
# Copyright (c) 2026 The nestedpovm developers
# Distributed under the MIT software license, see the accompanying
# file LICENSE.txt or http://www.opensource.org/licenses/mit-license.php.
"""JSON and CSV formats.

Matrices are row-major lists of rows whose entries are [re, im] pairs.

Ensemble:  {"dim": d, "states": [{"p": 0.25, "matrix": M} | {"p": 0.25, "bloch": [x, y, z]}, ...]}
POVM:      {"dim": d, "elements": [M, ...]}
Nested:    {"depth": uF, "nodes": [{"path": "01", "b0": M, "b1": M}, ...]}

Numbers are written with OUTPUT_DIGITS significant digits."""
import csv
import json
import logging

import numpy as np

from .discrimination import InvalidEnsemble, WeightedEnsemble
from .operators import HermitianOperator, bloch_state, to_bloch
from .povm import BitPath, InvalidNestedPovm, InvalidPovm, NestedPovm, Povm
from .util import NestedPovmError, format_sig, round_sig

logger = logging.getLogger("NestedPovm.serialization")

SWEEP_COLUMNS = ["phi2", "phi3", "probability", "method"]


class ParseError(NestedPovmError):
    pass


def matrix_to_json(x):
    m = np.asarray(getattr(x, "matrix", x))
    return [[[round_sig(z.real), round_sig(z.imag)] for z in row] for row in m]

def matrix_from_json(data, dim=None):
    try:
        m = np.array([[complex(float(re), float(im)) for re, im in row] for row in data], dtype=complex)
    except (TypeError, ValueError) as e:
        raise ParseError("matrix entries must be [re, im] pairs: %s" % e)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ParseError("matrix must be square, got shape %s" % (m.shape,))
    if dim is not None and m.shape[0] != dim:
        raise ParseError("matrix has dimension %d, document says %d" % (m.shape[0], dim))
    return m

def _operator(data, dim, what):
    try:
        return HermitianOperator(matrix_from_json(data, dim))
    except ParseError:
        raise
    except NestedPovmError as e:
        raise ParseError("%s: %s" % (what, e.message))

def _field(doc, key, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError("missing field %r" % key)
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError("field %r has the wrong type" % key)
    return value


def ensemble_from_json(doc):
    dim = _field(doc, "dim", int)
    states = []
    for j, entry in enumerate(_field(doc, "states", list)):
        p = _field(entry, "p", (int, float))
        if "bloch" in entry:
            if dim != 2:
                raise ParseError("state %d: Bloch vectors need dim 2" % j)
            try:
                rho = bloch_state(entry["bloch"])
            except (NestedPovmError, ValueError, TypeError) as e:
                raise ParseError("state %d: bad Bloch vector (%s)" % (j, getattr(e, "message", e)))
        else:
            rho = _operator(_field(entry, "matrix", list), dim, "state %d" % j)
        states.append((p, rho))
    try:
        return WeightedEnsemble(states)
    except InvalidEnsemble as e:
        raise ParseError(e.message)

def ensemble_to_json(e, bloch=False):
    states = []
    for p, rho in e.states:
        if bloch and e.dim == 2:
            states.append({"p": round_sig(p), "bloch": [round_sig(2 * v) for v in to_bloch(rho).r]})
        else:
            states.append({"p": round_sig(p), "matrix": matrix_to_json(rho)})
    return {"dim": e.dim, "states": states}


def povm_from_json(doc):
    dim = _field(doc, "dim", int)
    elements = [_operator(m, dim, "element %d" % j) for j, m in enumerate(_field(doc, "elements", list))]
    try:
        return Povm(elements)
    except InvalidPovm as e:
        raise ParseError(e.message)

def povm_to_json(p):
    return {"dim": p.dim, "elements": [matrix_to_json(x) for x in p]}


def nested_to_json(n):
    nodes = []
    for path in sorted(n.nodes, key=lambda q: (len(q), str(q))):
        b0, b1 = n.nodes[path]
        nodes.append({"path": str(path), "b0": matrix_to_json(b0), "b1": matrix_to_json(b1)})
    return {"depth": n.depth, "nodes": nodes}

def nested_from_json(doc):
    depth = _field(doc, "depth", int)
    nodes = {}
    for entry in _field(doc, "nodes", list):
        try:
            path = BitPath(_field(entry, "path", str))
        except ValueError as e:
            raise ParseError(str(e))
        what = "node '%s'" % str(path)
        nodes[path] = (_operator(_field(entry, "b0", list), None, what),
                       _operator(_field(entry, "b1", list), None, what))
    try:
        return NestedPovm(depth, nodes)
    except InvalidNestedPovm as e:
        raise ParseError(e.message)


def load_json(path):
    """Read a JSON document; OSError propagates, malformed JSON raises ParseError."""
    with open(path, encoding="utf8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError("%s is not valid JSON: %s" % (path, e))

def dumps(doc):
    return json.dumps(doc, indent=2)


def write_sweep_csv(path, rows, extra_columns=()):
    """Rows are dicts keyed by SWEEP_COLUMNS (plus extra_columns), written in the given order."""
    columns = SWEEP_COLUMNS + list(extra_columns)
    with open(path, "w", newline="", encoding="utf8") as f:
        writer = csv.writer(f)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_sig(row[k]) if isinstance(row[k], float) else row[k] for k in columns])

def read_sweep_csv(path):
    with open(path, newline="", encoding="utf8") as f:
        rows = list(csv.DictReader(f))
    for row in rows:
        for k in row:
            if k != "method":
                row[k] = float(row[k])
    return rows
