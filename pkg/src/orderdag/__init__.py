"""Markov equivalence classes, interventional essential graphs and asymptotic
metric bounds for random order DAGs."""

from .graph import (
    ClosureConflict,
    Dag,
    GraphError,
    InterventionSet,
    Pdag,
    intervened_dag,
    skeleton,
    v_structures,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ClosureConflict",
    "Dag",
    "GraphError",
    "InterventionSet",
    "Pdag",
    "intervened_dag",
    "skeleton",
    "v_structures",
    "__version__",
]
