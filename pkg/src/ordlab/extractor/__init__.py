"""Extraction strategies for homogeneous chains."""

from .common import Extraction, Params, chains_for, orient, seed_chain
from .diagonal import extract_w2_diagonal
from .ideals import extract_no_antichain
from .splitting import RefutationWitness, Split, extract_wfsplit_aca, wf_split
from .ssrt import ColoringTable, extract_cd2_sads, random_stable_coloring, ssrt_extract
from .tower import extract_tower
from .trees import LabeledTree, all_valid_trees, random_valid_tree, satisfies_conclusion, tree_helper

STRATEGIES = ("tower", "w2-diagonal", "cd2-sads", "wf-split", "ideal")

__all__ = [
    "ColoringTable", "Extraction", "LabeledTree", "Params", "RefutationWitness", "STRATEGIES", "Split",
    "all_valid_trees", "chains_for", "extract_cd2_sads", "extract_no_antichain", "extract_tower",
    "extract_w2_diagonal", "extract_wfsplit_aca", "orient", "random_stable_coloring",
    "random_valid_tree", "satisfies_conclusion", "seed_chain", "ssrt_extract", "tree_helper", "wf_split",
]
