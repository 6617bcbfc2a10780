"""Lattice cohomology of negative definite plumbing graphs."""
from .graph import PlumbingGraph, make_graph, parse_graph
from .lattice import Lattice
from .homology import ZUModule
from .engine import lattice_cohomology

__all__ = ["PlumbingGraph", "make_graph", "parse_graph", "Lattice", "ZUModule", "lattice_cohomology"]
__version__ = "0.1.0"
