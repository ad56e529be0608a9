"""Optimal stopping of uniform draws: exact dynamic programs, planar Poisson
limits and seeded Monte Carlo cross-checks."""

from .discrete import DiscreteValueTable, FiniteCutoffRule, discrete_values, finite_cutoff_rule, value_matrix
from .errors import DomainError, ExtendTableError
from .lindley import MemorylessRankRule, RankDpResult, delta_rank_rule, evaluate_rank_rule, lindley_values
from .moser import HarmonicBounds, ThresholdRule, ValueSequence, moser_bounds, moser_rule, moser_values
from .poisson import CutoffTable, cutoffs, h, u, v, w

__all__ = [
    "CutoffTable", "DiscreteValueTable", "DomainError", "ExtendTableError", "FiniteCutoffRule",
    "HarmonicBounds", "MemorylessRankRule", "RankDpResult", "ThresholdRule", "ValueSequence",
    "cutoffs", "delta_rank_rule", "discrete_values", "evaluate_rank_rule", "finite_cutoff_rule",
    "h", "lindley_values", "moser_bounds", "moser_rule", "moser_values", "u", "v", "value_matrix", "w",
]
