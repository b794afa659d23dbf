"""Exact isogeny algebra over End(E) and certified lower bounds for essential minima."""

from .bounds import (
    BoundParams,
    CertifiedBound,
    PowerProduct,
    kappa_bound,
    sin1_bound,
    thm1_bound,
    thm2_bound,
    thm2_constants,
)
from .divisors import DivisorClass, KernelRow, degree_int, gael_check
from .matrix import Isogeny, MorphMatrix, dual_isogeny, ker_cardinality
from .order import EISENSTEIN, GAUSSIAN, INTEGERS, OrderDesc, OrderElem, try_div
from .pipeline import PipelineInput, PipelineReport, run_pipeline
from .saturation import SaturationResult, saturate_minors, transform_for_H
from .torsion import count_kernel

__version__ = "0.1.0"

__all__ = [
    "BoundParams",
    "CertifiedBound",
    "DivisorClass",
    "EISENSTEIN",
    "GAUSSIAN",
    "INTEGERS",
    "Isogeny",
    "KernelRow",
    "MorphMatrix",
    "OrderDesc",
    "OrderElem",
    "PipelineInput",
    "PipelineReport",
    "PowerProduct",
    "SaturationResult",
    "count_kernel",
    "degree_int",
    "dual_isogeny",
    "gael_check",
    "kappa_bound",
    "ker_cardinality",
    "run_pipeline",
    "saturate_minors",
    "sin1_bound",
    "thm1_bound",
    "thm2_bound",
    "thm2_constants",
    "transform_for_H",
    "try_div",
]
