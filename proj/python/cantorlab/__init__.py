"""Potential theory and orthogonal polynomials on generalized Julia sets.

High-precision values cross the boundary as decimal strings; `as_float`
converts them when double precision is enough.
"""

import json

from ._core import LabError, Tower, compare, known_products
from ._core import run as _run

__all__ = ["LabError", "Tower", "as_float", "compare", "known_products", "run"]


def as_float(values):
    if isinstance(values, str):
        return float(values)
    return [float(v) for v in values]


def run(config, output=""):
    """Run the pipeline. `config` is a dict or a JSON string."""
    if not isinstance(config, str):
        config = json.dumps(config)
    return _run(config, output)
