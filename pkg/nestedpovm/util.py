#!/usr/bin/env python3
# Copyright (c) 2026 The nestedpovm developers
# Distributed under the MIT software license, see the accompanying
# file LICENSE.txt or http://www.opensource.org/licenses/mit-license.php.
"""Helpful routines shared by the library, the command line and the tests."""

import logging

import numpy as np

logger = logging.getLogger("NestedPovm.utils")

# Number of significant digits used for every number written to JSON or CSV.
OUTPUT_DIGITS = 12


class NestedPovmError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message):
        super().__init__(message)
        self.message = message


# Assert functions
##################

def assert_equal(thing1, thing2, *args):
    if thing1 != thing2 or any(thing1 != arg for arg in args):
        raise AssertionError("not(%s)" % " == ".join(str(arg) for arg in (thing1, thing2) + args))

def assert_greater_than(thing1, thing2):
    if thing1 <= thing2:
        raise AssertionError("%s <= %s" % (str(thing1), str(thing2)))

def assert_greater_than_or_equal(thing1, thing2):
    if thing1 < thing2:
        raise AssertionError("%s < %s" % (str(thing1), str(thing2)))

def assert_approx(v, vexp, vspan=1e-10):
    """Assert that `v` is within `vspan` of `vexp`"""
    if v < vexp - vspan:
        raise AssertionError("%s < [%s..%s]" % (str(v), str(vexp - vspan), str(vexp + vspan)))
    if v > vexp + vspan:
        raise AssertionError("%s > [%s..%s]" % (str(v), str(vexp - vspan), str(vexp + vspan)))

def assert_operator_close(x, y, tol=1e-10):
    """Assert two operators agree in Frobenius norm.

    Accepts HermitianOperator instances or plain arrays."""
    a = np.asarray(getattr(x, "matrix", x))
    b = np.asarray(getattr(y, "matrix", y))
    if a.shape != b.shape:
        raise AssertionError("shape %s != %s" % (a.shape, b.shape))
    err = np.linalg.norm(a - b)
    if err > tol:
        raise AssertionError("Frobenius distance %g exceeds %g" % (err, tol))

def assert_raises(exc, fun, *args, **kwds):
    assert_raises_message(exc, None, fun, *args, **kwds)

def assert_raises_message(exc, message, fun, *args, **kwds):
    try:
        fun(*args, **kwds)
    except exc as e:
        if message is not None and message not in e.message:
            raise AssertionError("Expected substring not found:" + e.message)
    except Exception as e:
        raise AssertionError("Unexpected exception raised: " + type(e).__name__)
    else:
        raise AssertionError("No exception raised")


# Formatting
############

def round_sig(x, digits=OUTPUT_DIGITS):
    """Round a float to `digits` significant digits."""
    x = float(x)
    if x == 0.0 or not np.isfinite(x):
        return x
    return float("%.*g" % (digits, x))

def format_sig(x, digits=OUTPUT_DIGITS):
    return "%.*g" % (digits, float(x))
