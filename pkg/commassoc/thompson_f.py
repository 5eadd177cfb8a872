#!/usr/bin/env python3

import logging
import random
from dataclasses import dataclass

from commassoc.tree_core import (
    LEAF,
    BinaryTree,
    Caret,
    Leaf,
    TreeSyntaxError,
    free_carets,
    graft,
    parse_tree,
    random_tree,
    render_tree,
)


class LeafCountMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class TreePair:
    """Representative of an element of Thompson's group F, one instance of the generalized associative law."""

    source: BinaryTree
    target: BinaryTree

    def __post_init__(self):
        if self.source.leaf_count != self.target.leaf_count:
            msg = (
                f'tree pair needs equal leaf counts, got {self.source.leaf_count} '
                f'and {self.target.leaf_count}'
            )
            raise LeafCountMismatchError(msg)

    @property
    def leaf_count(self) -> int:
        return self.source.leaf_count

    def __str__(self):
        return render_pair(self)


# (leaf index, tree hung from it), applied to both trees of a pair
ExpansionPlan = list[tuple[int, BinaryTree]]


def make_pair(s: BinaryTree, t: BinaryTree) -> TreePair:
    return TreePair(s, t)


def identity_pair() -> TreePair:
    return TreePair(LEAF, LEAF)


def parse_pair(text: str) -> TreePair:
    """Parse '<tree> ; <tree>'."""
    parts = text.split(';')
    if len(parts) != 2:
        offset = len(text.encode('utf-8')) if len(parts) < 2 else len(';'.join(parts[:2]).encode('utf-8'))
        msg = 'a tree pair is two trees separated by one ";"'
        raise TreeSyntaxError(msg, offset)
    source_text, target_text = parts
    source = parse_tree(source_text)
    try:
        target = parse_tree(target_text)
    except TreeSyntaxError as error:
        shift = len(source_text.encode('utf-8')) + 1
        raise TreeSyntaxError(error.reason, error.offset + shift) from error
    return make_pair(source, target)


def render_pair(p: TreePair) -> str:
    return f'{render_tree(p.source)} ; {render_tree(p.target)}'


def _validate_plan(plan: ExpansionPlan, leaf_count: int):
    seen = set()
    for index, _ in plan:
        if not 0 <= index < leaf_count:
            msg = f'expansion index {index} out of range for {leaf_count} leaves'
            raise IndexError(msg)
        if index in seen:
            msg = f'expansion plan hangs two trees from leaf {index}'
            raise ValueError(msg)
        seen.add(index)


def expand_pair(p: TreePair, plan: ExpansionPlan) -> TreePair:
    """Common expansion: hang the same trees from the same leaves of both trees."""
    _validate_plan(plan, p.leaf_count)
    source, target = p.source, p.target
    # Descending order keeps the lower indices valid while grafting
    for index, sub in sorted(plan, key=lambda item: item[0], reverse=True):
        source = graft(source, index, sub)
        target = graft(target, index, sub)
    return TreePair(source, target)


def _collapse(t: BinaryTree, index: int) -> BinaryTree:
    if isinstance(t, Leaf):
        msg = f'no free caret at leaf {index}'
        raise ValueError(msg)
    if index == 0 and isinstance(t.left, Leaf) and isinstance(t.right, Leaf):
        return LEAF
    left_count = t.left.leaf_count
    if index < left_count:
        return Caret(_collapse(t.left, index), t.right)
    return Caret(t.left, _collapse(t.right, index - left_count))


def matching_carets(p: TreePair) -> list[int]:
    return sorted(set(free_carets(p.source)) & set(free_carets(p.target)))


def is_reduced(p: TreePair) -> bool:
    return not matching_carets(p)


def collapse_caret(p: TreePair, index: int) -> TreePair:
    """Remove the caret free at leaf index in both trees, replacing it by a leaf."""
    if index not in matching_carets(p):
        msg = f'leaf {index} does not start a matching free caret'
        raise ValueError(msg)
    return TreePair(_collapse(p.source, index), _collapse(p.target, index))


def reduce_pair(p: TreePair) -> TreePair:
    """Unique reduced representative of the class of p."""
    while True:
        matches = matching_carets(p)
        if not matches:
            return p
        p = collapse_caret(p, matches[0])


def _union(a: BinaryTree, b: BinaryTree) -> BinaryTree:
    if isinstance(a, Leaf):
        return b
    if isinstance(b, Leaf):
        return a
    return Caret(_union(a.left, b.left), _union(a.right, b.right))


def _hangs(t: BinaryTree, refinement: BinaryTree) -> list[BinaryTree]:
    """Subtrees of refinement sitting below each leaf of t."""
    if isinstance(t, Leaf):
        return [refinement]
    if isinstance(refinement, Leaf):
        msg = 'refinement does not contain the tree'
        raise ValueError(msg)
    return _hangs(t.left, refinement.left) + _hangs(t.right, refinement.right)


def _expand_to(p: TreePair, tree: BinaryTree, refinement: BinaryTree) -> TreePair:
    plan = [(index, sub) for index, sub in enumerate(_hangs(tree, refinement)) if not isinstance(sub, Leaf)]
    return expand_pair(p, plan)


def multiply(p: TreePair, q: TreePair) -> TreePair:
    """Product in F: expand both pairs until p's target equals q's source, then compose."""
    refinement = _union(p.target, q.source)
    p_expanded = _expand_to(p, p.target, refinement)
    q_expanded = _expand_to(q, q.source, refinement)
    product = reduce_pair(TreePair(p_expanded.source, q_expanded.target))
    logging.debug(f'multiply {render_pair(p)} by {render_pair(q)} -> {render_pair(product)}')
    return product


def invert(p: TreePair) -> TreePair:
    return TreePair(p.target, p.source)


def pairs_equivalent(p: TreePair, q: TreePair) -> bool:
    return reduce_pair(p) == reduce_pair(q)


def random_pair(n: int, rng: random.Random) -> TreePair:
    return TreePair(random_tree(n, rng), random_tree(n, rng))
