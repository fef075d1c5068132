#!/usr/bin/env python3
# Copyright (c) 2026 The nestedpovm developers
# Distributed under the MIT software license, see the accompanying
# file LICENSE.txt or http://www.opensource.org/licenses/mit-license.php.
"""Command-line front end.

    python -m nestedpovm discriminate ENSEMBLE.json [--verify]
    python -m nestedpovm decompose POVM.json
    python -m nestedpovm sweep OUTPUT.csv [--phi2 2*pi/3] [--phi3-steps 200]

Reports go to stdout as JSON, logs to stderr."""
import argparse
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
import logging
import math
import sys
import time

import numpy as np
import psutil

from .config import DEFAULT_CONFIGFILE, load_config, parse_angle, parse_angles
from .discrimination import (
    InvalidEnsemble,
    SizeMismatch,
    UnsupportedDimension,
    discriminate,
)
from .operators import to_bloch
from .oracle import (
    GridSpec,
    NotEquiprobable,
    NotPure,
    UnsupportedN,
    brute_force_nested,
    equatorial_triple,
    polytope_ratio_probability,
    random_povm_search,
)
from .povm import InvalidNestedPovm, InvalidPovm, decompose, recompose
from .serialization import (
    ParseError,
    dumps,
    ensemble_from_json,
    load_json,
    matrix_to_json,
    nested_to_json,
    povm_from_json,
    write_sweep_csv,
)
from .util import NestedPovmError, round_sig


class CommandStatus(Enum):
    PASSED = 1
    FAILED = 2
    PARSE_ERROR = 3
    UNSUPPORTED = 4
    IO_ERROR = 5

EXIT_SUCCESS = 0
EXIT_FAILED = 1
EXIT_PARSE_ERROR = 2
EXIT_UNSUPPORTED = 3
EXIT_IO_ERROR = 4

EXIT_CODES = {
    CommandStatus.PASSED: EXIT_SUCCESS,
    CommandStatus.FAILED: EXIT_FAILED,
    CommandStatus.PARSE_ERROR: EXIT_PARSE_ERROR,
    CommandStatus.UNSUPPORTED: EXIT_UNSUPPORTED,
    CommandStatus.IO_ERROR: EXIT_IO_ERROR,
}

# A phi3 range this close to 2*pi counts as a full turn
FULL_TURN_TOL = 1e-9


class InvalidSweepSpec(NestedPovmError):
    pass


class NestedPovmCommandMetaClass(type):
    """Metaclass for NestedPovmCommand.

    Ensures that any subclass of `NestedPovmCommand` overrides
    `set_command_params` and `run_command` but DOES NOT override either
    `__init__` or `main`. If any of those standards are violated, a
    ``TypeError`` is raised."""

    def __new__(cls, clsname, bases, dct):
        if not clsname == 'NestedPovmCommand':
            if not ('run_command' in dct and 'set_command_params' in dct):
                raise TypeError("NestedPovmCommand subclasses must override "
                                "'run_command' and 'set_command_params'")
            if '__init__' in dct or 'main' in dct:
                raise TypeError("NestedPovmCommand subclasses may not override "
                                "'__init__' or 'main'")

        return super().__new__(cls, clsname, bases, dct)


class NestedPovmCommand(metaclass=NestedPovmCommandMetaClass):
    """Base class for a command.

    Commands subclass this and override set_command_params() and
    run_command(); add_options() adds command-specific flags. The
    __init__() and main() methods should not be overridden."""

    def __init__(self):
        """Sets command defaults. Do not override this method. Instead, override the set_command_params() method"""
        self.name = None
        self.description = None
        self.status = CommandStatus.FAILED
        self.out = sys.stdout
        self._handlers = []
        self.set_command_params()

        assert self.name is not None, "Command must set self.name in set_command_params()"

    def main(self, argv=None):
        """Main function. Returns the process exit code."""
        try:
            self.parse_args(argv)
        except SystemExit as e:
            return e.code if isinstance(e.code, int) else EXIT_PARSE_ERROR

        e = None
        try:
            self.setup()
            self.run_command()
        except BaseException as exception:
            e = exception
        return self.shutdown(e=e)

    def parse_args(self, argv):
        parser = argparse.ArgumentParser(prog="nestedpovm %s" % self.name, description=self.description)
        parser.add_argument("-l", "--loglevel", dest="loglevel", default="WARNING",
                            help="log events at this level and higher to stderr. Can be set to DEBUG, INFO, WARNING, ERROR or CRITICAL (default: %(default)s)")
        parser.add_argument("--logfile", dest="logfile",
                            help="also write all log events (DEBUG and up) to this file")
        parser.add_argument("--configfile", dest="configfile", default=None,
                            help="location of the config file (default: %s)" % DEFAULT_CONFIGFILE)
        parser.add_argument("--seed", type=int,
                            help="random seed of the optimizer restarts (default: from config, 0)")
        parser.add_argument("--restarts", type=int,
                            help="number of optimizer restarts (default: from config, 16)")
        parser.add_argument("--grid-resolution", dest="grid_resolution", type=int,
                            help="resolution of the brute-force oracle grid used by --verify (default: from config, 40)")
        parser.add_argument("--verify", default=False, action="store_true",
                            help="cross-check results against the oracles")
        parser.add_argument("--permutations", choices=["all", "identity"], default="all",
                            help="labelings tried when looking for a closed form (default: %(default)s)")
        self.add_options(parser)
        self.options = parser.parse_args(argv)

    def setup(self):
        """Read the config file, start logging and apply command-line overrides."""
        self._start_logging()
        self.config = load_config(self.options.configfile)
        self.optimizer_config = self.config.optimizer.with_overrides(seed=self.options.seed,
                                                                     restarts=self.options.restarts)
        self.grid_resolution = self.options.grid_resolution or self.config.oracle.grid_resolution
        self.log.debug("Optimizer configuration: %s", self.optimizer_config)

    def shutdown(self, e=None):
        """Handle an exception if there was one, stop logging and return the exit code."""
        if e is not None:
            self.handle_exception(e)
        else:
            self.status = CommandStatus.PASSED

        if self.status == CommandStatus.PASSED:
            self.log.info("%s finished", self.name)
        for handler in self._handlers:
            self.log.removeHandler(handler)
            handler.close()
        self._handlers = []
        return EXIT_CODES[self.status]

    def handle_exception(self, e):
        if isinstance(e, (ParseError, InvalidPovm, InvalidNestedPovm, InvalidEnsemble, InvalidSweepSpec)):
            self.log.error("Invalid input: %s" % e.message)
            self.status = CommandStatus.PARSE_ERROR
        elif isinstance(e, (SizeMismatch, UnsupportedDimension, UnsupportedN)):
            self.log.error("Unsupported input: %s" % e.message)
            self.status = CommandStatus.UNSUPPORTED
        elif isinstance(e, OSError):
            self.log.error("I/O error: %s" % e)
            self.status = CommandStatus.IO_ERROR
        elif isinstance(e, KeyboardInterrupt):
            self.log.warning("Exiting after keyboard interrupt")
        elif isinstance(e, Exception):
            self.log.exception("Unexpected exception caught while running %s" % self.name)
        else:
            raise e

    # Methods to override in subclasses.
    def set_command_params(self):
        """Commands must override this method to set self.name and self.description"""
        raise NotImplementedError

    def add_options(self, parser):
        """Override this method to add command-line options"""
        pass

    def run_command(self):
        """Commands must override this method to define their logic"""
        raise NotImplementedError

    def emit(self, doc):
        print(dumps(doc), file=self.out)

    def _start_logging(self):
        # Library modules log below the "NestedPovm" logger
        self.log = logging.getLogger("NestedPovm")
        self.log.setLevel(logging.DEBUG)
        # Console handler on stderr; stdout carries the reports
        ch = logging.StreamHandler(sys.stderr)
        # User can provide log level as a number or string (eg DEBUG). loglevel was caught as a string, so try to convert it to an int
        ll = int(self.options.loglevel) if self.options.loglevel.isdigit() else self.options.loglevel.upper()
        ch.setLevel(ll)
        # Microsecond UTC timestamps so log files of several runs can be concatenated and sorted
        formatter = logging.Formatter(fmt='%(asctime)s.%(msecs)03d000Z %(name)s (%(levelname)s): %(message)s', datefmt='%Y-%m-%dT%H:%M:%S')
        formatter.converter = time.gmtime
        ch.setFormatter(formatter)
        self._handlers.append(ch)
        if self.options.logfile:
            fh = logging.FileHandler(self.options.logfile, encoding='utf-8')
            fh.setLevel(logging.DEBUG)
            fh.setFormatter(formatter)
            self._handlers.append(fh)
        for handler in self._handlers:
            self.log.addHandler(handler)


def _q_json(q):
    if q is None:
        return None
    doc = {"matrix": matrix_to_json(q)}
    if q.dim == 2:
        b = to_bloch(q)
        doc["bloch"] = {"c": round_sig(b.c), "r": [round_sig(v) for v in b.r]}
    return doc


class DiscriminateCommand(NestedPovmCommand):
    def set_command_params(self):
        self.name = "discriminate"
        self.description = "Optimal minimum-error discrimination of 1 to 4 states."

    def add_options(self, parser):
        parser.add_argument("ensemble", help="ensemble JSON file")

    def run_command(self):
        e = ensemble_from_json(load_json(self.options.ensemble))
        report = discriminate(e, self.optimizer_config, self.options.permutations)
        self.log.info("%d states: probability %.12g via %s", len(e), report.probability, report.method)
        doc = {
            "probability": round_sig(report.probability),
            "method": report.method,
            "permutation": list(report.permutation),
            "q": _q_json(report.q),
            "nested": nested_to_json(report.nested) if report.nested is not None else None,
        }
        if report.optimization is not None:
            doc["optimizer"] = {"converged": report.optimization.converged,
                                "starts": report.optimization.starts_used}
        if self.options.verify:
            doc["oracle"] = self.verify(e, report.probability)
        self.emit(doc)

    def verify(self, e, probability):
        checks = {}
        if e.dim == 2 and len(e) in (3, 4):
            grid = brute_force_nested(e, GridSpec(self.grid_resolution))
            checks["grid"] = {"resolution": self.grid_resolution, "probability": round_sig(grid),
                              "gap": round_sig(probability - grid)}
        try:
            polytope = polytope_ratio_probability(e)
            checks["polytope"] = {"probability": round_sig(polytope), "gap": round_sig(probability - polytope)}
        except (NotEquiprobable, NotPure, UnsupportedN, UnsupportedDimension) as exc:
            self.log.debug("Polytope rule not applicable: %s", exc.message)
        trials = self.config.oracle.random_trials
        search = random_povm_search(e, trials, self.optimizer_config.seed)
        checks["random"] = {"trials": trials, "probability": round_sig(search), "gap": round_sig(probability - search)}
        for name, check in checks.items():
            if check["gap"] < -1e-9:
                self.log.warning("Oracle %s beats the reported optimum by %g", name, -check["gap"])
        return checks


class DecomposeCommand(NestedPovmCommand):
    def set_command_params(self):
        self.name = "decompose"
        self.description = "Decompose a POVM into nested binary POVMs and report the round-trip error."

    def add_options(self, parser):
        parser.add_argument("povm", help="POVM JSON file")

    def run_command(self):
        p = povm_from_json(load_json(self.options.povm))
        nested = decompose(p)
        flat = recompose(nested)
        padded = p.padded(len(flat))
        residual = max(float(np.linalg.norm(f.matrix - e.matrix)) for f, e in zip(flat, padded))
        self.log.info("Depth %d, round-trip residual %g", nested.depth, residual)
        self.emit({"nested": nested_to_json(nested), "residual": round_sig(residual)})


def sweep_row(task):
    """One sweep grid point; module level so worker processes can run it."""
    phi2, phi3, optimizer_config, permutations, verify = task
    e = equatorial_triple(phi2, phi3)
    report = discriminate(e, optimizer_config, permutations)
    row = {"phi2": phi2, "phi3": phi3, "probability": report.probability, "method": report.method}
    if verify:
        row["polytope"] = polytope_ratio_probability(e)
    return row

def worker_count(jobs):
    """Explicit job count, or the number of physical cores for 0."""
    if jobs and jobs > 0:
        return jobs
    return psutil.cpu_count(logical=False) or 1


class SweepCommand(NestedPovmCommand):
    def set_command_params(self):
        self.name = "sweep"
        self.description = ("Optimal probability for three equiprobable pure equatorial states "
                            "(1,0,0), (cos phi2, sin phi2, 0), (cos phi3, sin phi3, 0) over a phi3 grid.")

    def add_options(self, parser):
        parser.add_argument("output", help="CSV file to write")
        parser.add_argument("--phi2", help="comma separated phi2 values, e.g. '0,pi/6,2*pi/3' (default: from config)")
        parser.add_argument("--phi3-start", dest="phi3_start", default="0", help="first phi3 (default: %(default)s)")
        parser.add_argument("--phi3-stop", dest="phi3_stop", default="2*pi", help="end of the phi3 range, left out when the range is a full turn (default: %(default)s)")
        parser.add_argument("--phi3-steps", dest="phi3_steps", type=int, help="number of phi3 values (default: from config, 200)")
        parser.add_argument("--jobs", type=int, help="worker processes, 0 for one per physical core (default: from config)")

    def sweep_spec(self):
        try:
            phi2 = parse_angles(self.options.phi2) if self.options.phi2 else self.config.sweep.phi2
            start = parse_angle(self.options.phi3_start)
            stop = parse_angle(self.options.phi3_stop)
        except ValueError as e:
            raise InvalidSweepSpec(str(e))
        steps = self.options.phi3_steps or self.config.sweep.phi3_steps
        return SweepSpec(phi2, start, stop, steps)

    def run_command(self):
        spec = self.sweep_spec()
        jobs = worker_count(self.options.jobs if self.options.jobs is not None else self.config.sweep.jobs)
        tasks = [(phi2, phi3, self.optimizer_config, self.options.permutations, self.options.verify)
                 for phi2, phi3 in spec.points()]
        self.log.info("Sweeping %d points with %d worker(s)", len(tasks), jobs)
        if jobs == 1:
            rows = [sweep_row(t) for t in tasks]
        else:
            # map() yields in submission order, so rows stay in grid order
            with ProcessPoolExecutor(max_workers=jobs) as executor:
                rows = list(executor.map(sweep_row, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
        write_sweep_csv(self.options.output, rows, extra_columns=["polytope"] if self.options.verify else ())
        self.emit({"output": self.options.output, "rows": len(rows)})


class SweepSpec():
    """phi2 values and a phi3 grid of `steps` points.

    The grid includes both ends, except over a full turn where stop is
    dropped since it repeats start."""
    __slots__ = ("phi2", "start", "stop", "steps")

    def __init__(self, phi2, start, stop, steps):
        if steps < 2:
            raise InvalidSweepSpec("phi3 needs at least 2 steps, got %d" % steps)
        if not phi2:
            raise InvalidSweepSpec("no phi2 values given")
        if not all(math.isfinite(v) for v in tuple(phi2) + (start, stop)):
            raise InvalidSweepSpec("angles must be finite")
        self.phi2 = tuple(phi2)
        self.start = start
        self.stop = stop
        self.steps = steps

    def phi3_values(self):
        full_turn = abs(self.stop - self.start) >= 2 * math.pi - FULL_TURN_TOL
        return np.linspace(self.start, self.stop, self.steps, endpoint=not full_turn)

    def points(self):
        return [(float(phi2), float(phi3)) for phi2 in self.phi2 for phi3 in self.phi3_values()]


COMMANDS = {
    "discriminate": DiscriminateCommand,
    "decompose": DecomposeCommand,
    "sweep": SweepCommand,
}

def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv or argv[0] not in COMMANDS:
        print("usage: nestedpovm {%s} [options]" % ",".join(COMMANDS), file=sys.stderr)
        return EXIT_PARSE_ERROR
    return COMMANDS[argv[0]]().main(argv[1:])
