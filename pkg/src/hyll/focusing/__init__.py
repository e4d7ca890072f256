"""Focused calculus: proofs, checker, erasure and proof search."""
from .calculus import (ACTIVE, LEFT, RIGHT, FocProof, FSeq, active, check_focused, erase,
                       erase_sequent, left, neutral, right)
from .search import (Guide, SearchBudget, SearchResult, default_fuel, polarized_goal,
                     prove_unfocused, search, search_ex)

__all__ = ["ACTIVE", "LEFT", "RIGHT", "FocProof", "FSeq", "active", "check_focused", "erase",
           "erase_sequent", "left", "neutral", "right", "Guide", "SearchBudget", "SearchResult",
           "default_fuel", "polarized_goal", "prove_unfocused", "search", "search_ex"]
