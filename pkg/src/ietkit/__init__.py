"""Exact Rauzy-Veech induction toolkit for interval exchange maps."""

__version__ = "0.1.0"

from .core import (CapExceededError, DomainError, Iem, PermutationPair,
                   is_admissible, symmetric_pair)
from .induction import (Arrow, CocycleMatrix, InductionTrace, RauzyDiagram,
                        RauzyPath, TieError, arrow_matrix, discontinuity_ancestry,
                        induce, rauzy_class, rauzy_successors, rv_step, tiling_check)
from .words import (WordError, fibonacci, parse_winner_word, parse_word,
                    quotient_word, realize_iem, realize_lengths, word_to_path)

__all__ = [
    "Arrow", "CapExceededError", "CocycleMatrix", "DomainError", "Iem",
    "InductionTrace", "PermutationPair", "RauzyDiagram", "RauzyPath", "TieError",
    "WordError", "arrow_matrix", "discontinuity_ancestry", "fibonacci", "induce",
    "is_admissible", "parse_winner_word", "parse_word", "quotient_word",
    "rauzy_class", "rauzy_successors", "realize_iem", "realize_lengths",
    "rv_step", "symmetric_pair", "tiling_check", "word_to_path",
]
