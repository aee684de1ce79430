"""Python bindings for the paam analysis and simulation library.

Config documents are passed as JSON text, a dict, or a path to a file.
"""

from __future__ import annotations

import json
import os
from typing import Any, Union

from . import _paam
from ._paam import ConfigError, arrival_bound, assign_buckets, parse_duration

__version__ = _paam.__version__

Config = Union[str, dict, os.PathLike]


def _text(doc: Config) -> str:
    if isinstance(doc, dict):
        return json.dumps(doc)
    if isinstance(doc, os.PathLike) or (isinstance(doc, str) and not doc.lstrip().startswith("{")):
        with open(doc, encoding="utf-8") as f:
            return f.read()
    return doc


def fingerprint(config: Config) -> str:
    return _paam.fingerprint(_text(config))


def canonical_config(config: Config) -> dict:
    return json.loads(_paam.canonical_config(_text(config)))


def analyze(config: Config) -> dict:
    """Analysis report; a chain's response_ns is None when unschedulable."""
    return json.loads(_paam.analyze(_text(config)))


def analyze_csv(config: Config) -> str:
    return _paam.analyze_csv(_text(config))


def simulate(config: Config, mode: str = "paam", duration: str = "1s", seed: int = 0,
             jitter_permille: int = 0, trace: bool = False) -> dict[str, Any]:
    return _paam.simulate(_text(config), mode, duration, seed, jitter_permille, trace)


def check(config: Config, report: Union[dict, str], duration: str = "1s", seed: int = 0):
    """Simulates in PAAM mode and compares against `report`. Returns (passed, rows)."""
    if isinstance(report, dict):
        report = json.dumps(report)
    return _paam.check(_text(config), report, duration, seed)


def admit(base: Config, candidate: Config):
    """(accepted, reason, failing_chain)."""
    return _paam.admit(_text(base), _text(candidate))


def generate(**params) -> dict:
    """Random system; keyword names follow the generator parameter file."""
    return json.loads(_paam.generate(json.dumps(params)))


def schedulability_ratio(trials: int, **params) -> float:
    return _paam.schedulability_ratio(json.dumps(params), trials)


__all__ = [
    "ConfigError", "admit", "analyze", "analyze_csv", "arrival_bound", "assign_buckets",
    "canonical_config", "check", "fingerprint", "generate", "parse_duration",
    "schedulability_ratio", "simulate",
]
