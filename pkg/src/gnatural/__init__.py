"""Curvature of g-natural metrics G = a g^s + b g^h + c g^v on tangent bundles.

Closed-form lifted curvature is checked against a brute-force computation on
TM as a 2n-manifold, and weak symmetry is tested pointwise by least squares.
"""

from .base_geometry import CurvatureBundle, MetricSpec, curvature_bundle
from .calculus import DiffConfig, ScalarField, partial
from .lift import PRESETS, GNaturalParams, SplitVector, TangentPoint, lifted_curvature_closed
from .oracle import brute_curvature, brute_nabla_curvature, bundle_metric
from .weaksym import WeakSymSolution, classify_bundle, is_flat, solve_pointwise

__all__ = [
    "CurvatureBundle",
    "DiffConfig",
    "GNaturalParams",
    "MetricSpec",
    "PRESETS",
    "ScalarField",
    "SplitVector",
    "TangentPoint",
    "WeakSymSolution",
    "brute_curvature",
    "brute_nabla_curvature",
    "bundle_metric",
    "classify_bundle",
    "curvature_bundle",
    "is_flat",
    "lifted_curvature_closed",
    "partial",
    "solve_pointwise",
]
