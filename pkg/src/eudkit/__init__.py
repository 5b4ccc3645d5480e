"""Enhanced Universal Dependencies: merging, post-processing, empty nodes, evaluation."""

from .conllu import ROOT, Document, NodeId, Sentence, Token, parse_conllu, serialize_conllu, validate_sentence
from .errors import EUDError
from .graph import (
    DependencyTree,
    Edge,
    EnhancedGraph,
    apply_graph,
    collapse_empty_nodes,
    expand_empty_nodes,
    graph_of,
    tree_of,
    would_cycle,
)
from .merge import MergeOptions, merge
from .metrics import Metric, Score, evaluate, universal_part
from .rules import RuleConfig, case_marker_of, expand_case_labels, prune_function_word_edges

__version__ = "0.1.0"
