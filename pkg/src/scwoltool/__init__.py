"""Complexes of groups over small categories without loops: validation,
fundamental groups, developments and coarse-geometric probes."""

from .complex import ComplexOfGroups, InducedComplex, induced_complex, validate_complex
from .groups import FiniteGroup, GroupHom, check_hom, conjugation_aut, cyclic_group, image_membership, symmetric_group
from .metric import DisconnectedError, FiniteMetricSpace
from .report import ValidationReport, Violation
from .scwol import Scwol, ScwolAction, composable_sequences, dimension, one_skeleton, quotient, validate_action, validate_scwol
from .words import OrientedEdge, PathWord, Pi1Presentation, Undecided, Verdict, loop_word, maximal_tree, reduce, word_equal

__version__ = "0.1.0"
