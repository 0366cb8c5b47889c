"""Exact Kan extensions of finite toy algebraic QFTs."""

import json
from fractions import Fraction
from pathlib import Path

from . import _core
from ._core import KanqftError, command_names, fixture_names

__all__ = [
    "KanqftError",
    "command_names",
    "fixture_names",
    "fixture",
    "run",
    "markdown",
    "cohomology",
    "cochain_dims",
    "rank",
    "kernel",
    "solve",
]


def _model_text(model):
    if isinstance(model, dict):
        return json.dumps(model)
    if isinstance(model, Path):
        return model.read_text()
    if isinstance(model, str):
        if model in _core.fixture_names():
            return _core.fixture_json(model)
        if model.lstrip().startswith("{"):
            return model
        return Path(model).read_text()
    raise TypeError(f"cannot read a model from {type(model).__name__}")


def fixture(name):
    return json.loads(_core.fixture_json(name))


def run(command, model, max_degree=4, seed_order="normal", expect=None):
    """Run a report command; returns (report dict, exit code)."""
    text, code = _core.run(command, _model_text(model), max_degree, seed_order, "json",
                           None if expect is None else list(expect))
    return json.loads(text), code


def markdown(command, model, max_degree=4, seed_order="normal"):
    return _core.run(command, _model_text(model), max_degree, seed_order, "md")[0]


def cohomology(model, obj, max_degree=4, ran=False):
    """Dimensions of H^n for n < max_degree of hoU (or hoRan) at a Loc object."""
    return _core.cohomology_dims(_model_text(model), obj, max_degree, ran)


def cochain_dims(model, obj, max_degree=4, ran=False):
    return _core.cochain_dims(_model_text(model), obj, max_degree, ran)


def _rows(m):
    rows = [[str(Fraction(x)) for x in row] for row in m]
    return rows, (len(rows[0]) if rows else 0)


def rank(m):
    return _core.rank(*_rows(m))


def kernel(m, cols=None):
    rows, n = _rows(m)
    return [[Fraction(x) for x in v] for v in _core.kernel(rows, n if cols is None else cols)]


def solve(m, b):
    rows, n = _rows(m)
    x = _core.solve(rows, n, [str(Fraction(v)) for v in b])
    return None if x is None else [Fraction(v) for v in x]
