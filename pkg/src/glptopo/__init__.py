"""Workbench for the topological semantics of GL, GL.3 and GLP."""

from .formula import (
    And,
    Bot,
    Box,
    Dia,
    Formula,
    Imp,
    Not,
    Or,
    Top,
    Var,
    Word,
    closure,
    is_ordered,
    parse,
    parse_word,
    pretty,
    shift_up,
)
from .ordinal import CnfOrdinal, add, cmp, ell, ell_iter, in_U, omega_pow, parse_ordinal, sub_left
from .space import (
    FiniteSpace,
    PointMap,
    SpaceReport,
    check_glp_space,
    enumerate_topologies,
    is_dmap,
    mask,
    model_check,
    points,
    topology_from_operator,
    validates,
)
from .kripke import (
    GlVerdict,
    Tree,
    enumerate_trees,
    fork,
    gl3_decide,
    gl_decide,
    model_check_tree,
    tree_dsum,
)
from .dmap import SymbolicDMap, build_dmap, refute_on_ordinal
from .icard import decide_word_implication, eval_closed, eval_word, min_word, trichotomy, word_entails

__version__ = "0.1.0"
