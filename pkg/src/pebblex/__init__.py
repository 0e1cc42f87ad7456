"""Graph pebbling thresholds, multiset shadows and hypoexponential numerics."""

from .errors import (AccuracyError, BudgetExceeded, EnumerationCapError, OracleBudgetError,
                     PebblexError, PreconditionError)
from .graphs import BouquetSpec, Graph, make_bouquet, make_clique, make_path, make_tree, parse_graph
from .pebbling import PebbleDistribution, SolvabilityVerdict, is_solvable, solvable_batch

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "BudgetExceeded", "EnumerationCapError", "OracleBudgetError",
    "PebblexError", "PreconditionError", "BouquetSpec", "Graph", "make_bouquet",
    "make_clique", "make_path", "make_tree", "parse_graph", "PebbleDistribution",
    "SolvabilityVerdict", "is_solvable", "solvable_batch",
]
