"""Canonical perturbation theory in exact arithmetic."""
from .engine import (
    BranchSpec,
    CanonicalTransform,
    CMTSeries,
    beta_series,
    canonical_transform,
    cmt_series,
    cmt_series_assemble,
    deformation_series,
    dump,
    energy_series,
    frequency_series,
    w_functions,
)
from .series import Monomial, TrigSeries, mono
from .surd import Surd

__all__ = [
    "BranchSpec", "CanonicalTransform", "CMTSeries", "Monomial", "Surd", "TrigSeries",
    "beta_series", "canonical_transform", "cmt_series", "cmt_series_assemble", "deformation_series",
    "dump", "energy_series", "frequency_series", "mono", "w_functions",
]
