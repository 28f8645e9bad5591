"""Python access to the focklab numerics and check runner."""

import json

from ._focklab import (
    ConfigError,
    FocklabError,
    basis_norm,
    berezin,
    list_suites,
    run_suite_json,
    wiener_l1_error,
)
from ._focklab import heat_transform as _heat_transform
from ._focklab import toeplitz_matrix as _toeplitz_matrix

__all__ = [
    "ConfigError",
    "FocklabError",
    "basis_norm",
    "berezin",
    "heat_transform",
    "list_suites",
    "run_suite",
    "toeplitz_matrix",
    "wiener_l1_error",
]


def heat_transform(symbol, s, z):
    """f^(s)(z) for a symbol description such as {"family": "gaussian", "a": 1.0}."""
    return _heat_transform(json.dumps(symbol), s, complex(z))


def toeplitz_matrix(symbol, t, N):
    """Truncated Toeplitz matrix of a symbol description on degrees <= N."""
    return _toeplitz_matrix(json.dumps(symbol), t, N)


def run_suite(suite, seed=1, **overrides):
    """Runs one suite (or "full") and returns the report as a dict."""
    config = {"schema": 1, "suite": suite, "seed": seed}
    config.update(overrides)
    return json.loads(run_suite_json(json.dumps(config)))
