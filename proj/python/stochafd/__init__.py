"""Adaptive Fourier decompositions of deterministic and random signals."""

import json

from ._core import (
    afd,
    analytic_projection,
    appendix_equivalence,
    ee_norm,
    generate_noisy,
    hilbert_transform,
    poafd,
    safd1,
    safd2,
    spectrum,
)
from ._core import run_json as _run_json

__all__ = [
    "afd",
    "analytic_projection",
    "appendix_equivalence",
    "ee_norm",
    "generate_noisy",
    "hilbert_transform",
    "poafd",
    "run",
    "safd1",
    "safd2",
    "spectrum",
]


def run(config):
    """Run a RunConfig given as a dict; returns (document, exit_code)."""
    text, code = _run_json(json.dumps(config))
    return json.loads(text), code
