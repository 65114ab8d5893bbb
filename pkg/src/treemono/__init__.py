"""Exact-arithmetic harmonic functions on the d-regular tree and their
monotone energy functionals."""

__version__ = "0.1.0"

from .builtins import builtin_model
from .functionals import (
    almgren_N,
    dirichlet_G,
    edge_energy,
    height,
    monotonicity_report,
    series,
    weiss,
)
from .identities import identity_suite
from .model import HarmonicModel, RootData, build_model, check_harmonic, linear_2reg
from .oracles import OracleFamily, oracle_diff
from .scalar import EXACT, NumberMode
from .tree import TreeConfig

__all__ = [
    "EXACT", "HarmonicModel", "NumberMode", "OracleFamily", "RootData", "TreeConfig",
    "almgren_N", "build_model", "builtin_model", "check_harmonic", "dirichlet_G",
    "edge_energy", "height", "identity_suite", "linear_2reg", "monotonicity_report",
    "oracle_diff", "series", "weiss",
]
