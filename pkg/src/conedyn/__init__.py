"""conedyn: cone fields, differentially positive flows, conal orders.

A numpy toolkit for monotone-systems geometry: cones and their Hilbert
projective metric, cone fields with invariant transport, flows with
variational (tangent) propagation, positivity checkers, Perron-Frobenius
directions, causal-order oracles, and Monte-Carlo convergence experiments
on a small registry of example systems.
"""

from . import (
    cli,
    conefield,
    cones,
    experiments,
    flow,
    geometry,
    order,
    pf,
    positivity,
    registry,
    reports,
)
from .conefield import ConeField, ConstantField, HomogeneousPSDField
from .cones import Containment, Lorentz, Orthant, Polyhedral, PSDCone
from .flow import FlowSystem, OmegaEstimate, TangentFlow, Trajectory
from .geometry import ManifoldSpec, Tangent, euclidean, spd
from .order import FutureSet, OrderVerdict
from .pf import PfResult
from .positivity import DpVerdict

__version__ = "0.1.0"

__all__ = [
    "cli", "conefield", "cones", "experiments", "flow", "geometry", "order",
    "pf", "positivity", "registry", "reports",
    "ConeField", "ConstantField", "HomogeneousPSDField",
    "Containment", "Lorentz", "Orthant", "Polyhedral", "PSDCone",
    "FlowSystem", "OmegaEstimate", "TangentFlow", "Trajectory",
    "ManifoldSpec", "Tangent", "euclidean", "spd",
    "FutureSet", "OrderVerdict", "PfResult", "DpVerdict",
    "__version__",
]
