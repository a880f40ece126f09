"""Exact verification of canonical logarithmic connections on torus-equivariant bundles over smooth complete toric varieties."""

from . import errors, exact
from .connection import CONNECTION_SIGN, LogConnection, canonical_connection
from .fan import Atlas, Fan, build_atlas, fan_from_json, validate_fan
from .klyachko import KlyachkoData, bundle_from_json, build_cocycle, solve_all, solve_decomposition
from .pipeline import PipelineOptions, VerificationReport, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "Atlas",
    "CONNECTION_SIGN",
    "Fan",
    "KlyachkoData",
    "LogConnection",
    "PipelineOptions",
    "VerificationReport",
    "build_atlas",
    "build_cocycle",
    "bundle_from_json",
    "canonical_connection",
    "errors",
    "exact",
    "fan_from_json",
    "run_pipeline",
    "solve_all",
    "solve_decomposition",
    "validate_fan",
]
