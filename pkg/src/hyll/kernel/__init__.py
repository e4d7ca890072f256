"""Proof objects and checker for the unfocused calculus, with executable metatheory."""
from .proof import (CheckReport, KernelError, Proof, RuleError, Sequent, check_proof, invert,
                    INVERTIBLE_LEFT, INVERTIBLE_RIGHT)
from .meta import (contract, cut_eliminate, duplicate, identity_expand, subst_param, weaken)

__all__ = ["CheckReport", "KernelError", "Proof", "RuleError", "Sequent", "check_proof", "invert",
           "INVERTIBLE_LEFT", "INVERTIBLE_RIGHT", "contract", "cut_eliminate", "duplicate",
           "identity_expand", "subst_param", "weaken"]
