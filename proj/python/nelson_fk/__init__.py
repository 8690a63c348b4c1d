"""Path-integral engine for the renormalized Nelson model."""

import json as _json

from ._core import (
    Chi,
    ConfigError,
    DomainError,
    McControls,
    ModelParams,
    NelsonError,
    VarianceBlowup,
    action,
    bound_table,
    fiber_energy,
    ground_energy,
    pair_lemma_check,
    pekar_energy_constant,
    pekar_gaussian,
    renorm_energy,
    renorm_energy_closed,
    sample_path,
    suite_names,
)
from ._core import run_suite as _run_suite

__version__ = "0.1.0"


def run_suite(name):
    """Run a verification suite and return its report as a dict."""
    return _json.loads(_run_suite(name))


__all__ = [
    "Chi",
    "ConfigError",
    "DomainError",
    "McControls",
    "ModelParams",
    "NelsonError",
    "VarianceBlowup",
    "action",
    "bound_table",
    "fiber_energy",
    "ground_energy",
    "pair_lemma_check",
    "pekar_energy_constant",
    "pekar_gaussian",
    "renorm_energy",
    "renorm_energy_closed",
    "run_suite",
    "sample_path",
    "suite_names",
]
