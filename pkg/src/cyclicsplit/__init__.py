"""Whitehead-graph algorithms for subgroups of free groups and cyclic splittings."""

from .digraph import XDigraph, canonical_form, immersive_quotients, stallings_graph
from .errors import (CyclicSplitError, InvalidAutomorphism, InvalidCut, InvalidLetter,
                     InvalidSpec, PreconditionViolation, ResourceLimit, SkippedCase,
                     TrivialSubgroup, WrongRank)
from .splittings import (in_proper_free_factor, property_L_orbit, rank2_loop_elliptic,
                         segment_elliptic)
from .whitehead import AutSequence, TypeI, TypeII, min_set, minimize
from .words import Alphabet

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "AutSequence", "CyclicSplitError", "InvalidAutomorphism", "InvalidCut",
    "InvalidLetter", "InvalidSpec", "PreconditionViolation", "ResourceLimit", "SkippedCase",
    "TrivialSubgroup", "TypeI", "TypeII", "WrongRank", "XDigraph", "canonical_form",
    "immersive_quotients", "in_proper_free_factor", "min_set", "minimize",
    "property_L_orbit", "rank2_loop_elliptic", "segment_elliptic", "stallings_graph",
]
