"""Labeled trees whose nodes are label paths, and the search for a label recurring below every child."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from ..errors import HypothesisViolated

Node = tuple[int, ...]  # labels from the root down; the node's own label is the last entry


@dataclass(frozen=True)
class LabeledTree:
    nodes: frozenset[Node]
    k: int

    @classmethod
    def of(cls, nodes: Iterable[Node], k: int) -> "LabeledTree":
        return cls(frozenset(tuple(n) for n in nodes), k)

    @property
    def root(self) -> Node:
        return min(self.nodes, key=len)

    def children(self, node: Node) -> list[Node]:
        return sorted(c for c in (node + (i,) for i in range(self.k)) if c in self.nodes)

    def descendants(self, node: Node) -> Iterator[Node]:
        """Proper descendants, depth-first with the lowest label first."""
        for c in self.children(node):
            yield c
            yield from self.descendants(c)

    def level(self, node: Node) -> int:
        return len(node) - len(self.root)

    def is_leaf(self, node: Node) -> bool:
        return not self.children(node)

    def check(self) -> None:
        """Raise HypothesisViolated naming the first failed requirement."""
        if not self.nodes:
            raise HypothesisViolated("tree is empty")
        if self.k < 2:
            raise HypothesisViolated("height k must be at least 2")
        root = self.root
        if len(root) != 1 or sum(1 for n in self.nodes if len(n) == 1) != 1:
            raise HypothesisViolated("tree must have exactly one root")
        for n in self.nodes:
            if n[:len(root)] != root:
                raise HypothesisViolated(f"node {n} does not descend from the root")
            if len(n) > 1 and n[:-1] not in self.nodes:
                raise HypothesisViolated(f"node {n} has no parent in the tree")
            if any(not 0 <= lab < self.k for lab in n):
                raise HypothesisViolated(f"node {n} carries a label outside [0, {self.k})")
            if len(n) > 1 and n[-1] == n[-2]:
                raise HypothesisViolated(f"node {n} repeats its parent's label")
            if self.is_leaf(n) and self.level(n) != self.k:
                raise HypothesisViolated(f"leaf {n} is at level {self.level(n)}, not {self.k}")
            if self.level(n) > self.k:
                raise HypothesisViolated(f"node {n} is deeper than {self.k}")


def satisfies_conclusion(t: LabeledTree, node: Node) -> bool:
    """node is internal and each child has a proper descendant carrying node's label."""
    kids = t.children(node)
    if not kids:
        return False
    lab = node[-1]
    return all(any(d[-1] == lab for d in t.descendants(c)) for c in kids)


def tree_helper(t: LabeledTree) -> Node:
    """Find an internal node whose label reappears below every one of its children.

    If the current node fails, the first child (lowest label) with no
    descendant repeating the label roots a subtree that avoids that label
    altogether; recursing there loses one label and one level, so the
    search ends before running out of labels.
    """
    t.check()
    node = t.root
    while True:
        kids = t.children(node)
        if not kids:
            raise HypothesisViolated("reached a leaf; the tree hypotheses cannot hold")
        lab = node[-1]
        bad = [c for c in kids if not any(d[-1] == lab for d in t.descendants(c))]
        if not bad:
            return node
        node = bad[0]


def full_tree(k: int, root_label: int = 0) -> LabeledTree:
    nodes = [(root_label,)]
    frontier = [(root_label,)]
    for _ in range(k):
        nxt = []
        for n in frontier:
            for lab in range(k):
                if lab != n[-1]:
                    nxt.append(n + (lab,))
        nodes += nxt
        frontier = nxt
    return LabeledTree.of(nodes, k)


def _subtrees(node: Node, k: int, depth: int) -> Iterator[list[Node]]:
    """Every valid subtree rooted at node whose leaves all sit at the given remaining depth."""
    if depth == 0:
        yield [node]
        return
    labels = [lab for lab in range(k) if lab != node[-1]]
    for r in range(1, len(labels) + 1):
        for chosen in itertools.combinations(labels, r):
            options = [list(_subtrees(node + (lab,), k, depth - 1)) for lab in chosen]
            for combo in itertools.product(*options):
                yield [node] + [x for part in combo for x in part]


def all_valid_trees(k: int, root_label: int = 0) -> Iterator[LabeledTree]:
    for nodes in _subtrees((root_label,), k, k):
        yield LabeledTree.of(nodes, k)


def random_valid_tree(k: int, rng: np.random.Generator, keep: float = 0.6, root_label: int = 0) -> LabeledTree:
    """Random pruning of the complete tree that keeps every leaf at level k."""

    def grow(node: Node, depth: int) -> list[Node]:
        if depth == 0:
            return [node]
        labels = [lab for lab in range(k) if lab != node[-1]]
        chosen = [lab for lab in labels if rng.random() < keep]
        if not chosen:
            chosen = [labels[int(rng.integers(len(labels)))]]
        out = [node]
        for lab in chosen:
            out += grow(node + (lab,), depth - 1)
        return out

    return LabeledTree.of(grow((root_label,), k), k)
