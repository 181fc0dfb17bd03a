"""Finite machinery for uniform Turán density questions on r-graphs:
exact densities, twin structure and descriptive sequences, palette
generators, reduced hypergraphs and small combinatorial searches."""

from .errors import CapExceeded, GeneratorBug, InvalidQuery, StructureError, UturanError
from .hypergraph import DensityQuery, RGraph, check_locally_dense, contains_subgraph, edge_density
from .ordering import Ordering
from .descriptive import DescriptiveSequence

__version__ = "0.1.0"

__all__ = [
    "CapExceeded", "GeneratorBug", "InvalidQuery", "StructureError", "UturanError",
    "DensityQuery", "RGraph", "check_locally_dense", "contains_subgraph", "edge_density",
    "Ordering", "DescriptiveSequence", "__version__",
]
