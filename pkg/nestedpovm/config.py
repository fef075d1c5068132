#!/usr/bin/env python3
# Copyright (c) 2026 The nestedpovm developers
# Distributed under the MIT software license, see the accompanying
# file LICENSE.txt or http://www.opensource.org/licenses/mit-license.php.
"""Configuration read from config.ini.

Every value has a built-in default, so a missing section or key falls back
silently. Command-line flags override the file (see cli.py)."""
import configparser
from dataclasses import dataclass, field, replace
import logging
import math
import os
import re

logger = logging.getLogger("NestedPovm.config")

DEFAULT_CONFIGFILE = os.path.abspath(os.path.join(os.path.dirname(os.path.realpath(__file__)), "..", "config.ini"))

DEFAULT_PHI2 = (0.0, math.pi / 6, math.pi / 2, 2 * math.pi / 3, math.pi)


@dataclass(frozen=True)
class OptimizerConfig:
    seed: int = 0
    restarts: int = 16
    max_evals: int = 2000
    match_tol: float = 1e-4
    full_search: bool = False
    xatol: float = 1e-9
    fatol: float = 1e-12
    # Nelder-Mead re-runs from the best point, nelmin style
    refinements: int = 3
    # Points per parameter range of the coarse scan that seeds the starts
    scan_resolution: int = 12

    def with_overrides(self, **kwargs):
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


@dataclass(frozen=True)
class OracleConfig:
    grid_resolution: int = 40
    random_trials: int = 20000


@dataclass(frozen=True)
class SweepConfig:
    phi2: tuple = DEFAULT_PHI2
    phi3_steps: int = 200
    # 0 picks the number of physical cores
    jobs: int = 0


@dataclass(frozen=True)
class Config:
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    path: str = None


_ANGLE = re.compile(r"^\s*(?:([0-9.]+)\s*\*\s*)?pi\s*(?:/\s*([0-9.]+))?\s*$")

def parse_angle(text):
    """Parse an angle written as a number or as a multiple of pi ("2*pi/3")."""
    m = _ANGLE.match(text)
    if m:
        return float(m.group(1) or 1) * math.pi / float(m.group(2) or 1)
    try:
        return float(text)
    except ValueError:
        raise ValueError("cannot parse angle %r" % text)

def parse_angles(text):
    return tuple(parse_angle(part) for part in text.split(",") if part.strip())


def load_config(path=None):
    """Read a config file; without a path, config.ini next to the package if present."""
    parser = configparser.ConfigParser()
    if path is None and os.path.exists(DEFAULT_CONFIGFILE):
        path = DEFAULT_CONFIGFILE
    if path is not None:
        with open(path, encoding="utf8") as f:
            parser.read_file(f)
        logger.debug("Read configuration from %s", path)

    def section(name):
        return parser[name] if parser.has_section(name) else {}

    opt = section("optimizer")
    optimizer = OptimizerConfig()
    if opt:
        optimizer = OptimizerConfig(
            seed=opt.getint("seed", optimizer.seed),
            restarts=opt.getint("restarts", optimizer.restarts),
            max_evals=opt.getint("max_evals", optimizer.max_evals),
            match_tol=opt.getfloat("match_tol", optimizer.match_tol),
            full_search=opt.getboolean("full_search", optimizer.full_search),
            xatol=opt.getfloat("xatol", optimizer.xatol),
            fatol=opt.getfloat("fatol", optimizer.fatol),
            refinements=opt.getint("refinements", optimizer.refinements),
            scan_resolution=opt.getint("scan_resolution", optimizer.scan_resolution),
        )

    orc = section("oracle")
    oracle = OracleConfig()
    if orc:
        oracle = OracleConfig(
            grid_resolution=orc.getint("grid_resolution", oracle.grid_resolution),
            random_trials=orc.getint("random_trials", oracle.random_trials),
        )

    swp = section("sweep")
    sweep = SweepConfig()
    if swp:
        sweep = SweepConfig(
            phi2=parse_angles(swp["phi2"]) if "phi2" in swp else sweep.phi2,
            phi3_steps=swp.getint("phi3_steps", sweep.phi3_steps),
            jobs=swp.getint("jobs", sweep.jobs),
        )

    return Config(optimizer=optimizer, oracle=oracle, sweep=sweep, path=path)
