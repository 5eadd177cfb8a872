#!/usr/bin/env python3

import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

DEFAULT_HEIGHT_CAP = 16

# One step of a LeafPath or a vine turn
LEFT = 'L'
RIGHT = 'R'


class TreeSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f'{message} at byte offset {offset}')
        self.reason = message
        self.offset = offset


class CapExceededError(ValueError):
    def __init__(self, message: str, cap: int):
        super().__init__(message)
        self.cap = cap


@dataclass(frozen=True)
class Leaf:
    @property
    def leaf_count(self) -> int:
        return 1

    @property
    def height(self) -> int:
        return 0


@dataclass(frozen=True)
class Caret:
    left: 'BinaryTree'
    right: 'BinaryTree'
    leaf_count: int = field(init=False, compare=False, repr=False)
    height: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'leaf_count', self.left.leaf_count + self.right.leaf_count)
        object.__setattr__(self, 'height', 1 + max(self.left.height, self.right.height))


BinaryTree = Union[Leaf, Caret]
LeafPath = tuple[str, ...]

LEAF = Leaf()


@dataclass(frozen=True)
class VineSpec:
    """A vine of height n.

    turns holds n-1 flags from the root downwards: at each caret above the free caret the vine
    continues as the left ('L') or right ('R') child, the other child being a leaf.
    """

    n: int
    turns: tuple[str, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            msg = f'vine height must be at least 1, got {self.n}'
            raise ValueError(msg)
        if len(self.turns) != self.n - 1:
            msg = f'vine of height {self.n} needs {self.n - 1} turns, got {len(self.turns)}'
            raise ValueError(msg)
        bad = [t for t in self.turns if t not in (LEFT, RIGHT)]
        if bad:
            msg = f'vine turns must be L or R, got {bad[0]!r}'
            raise ValueError(msg)

    @staticmethod
    def from_text(n: int, turns: str) -> 'VineSpec':
        return VineSpec(n, tuple(turns.upper()))

    @staticmethod
    def left(n: int) -> 'VineSpec':
        return VineSpec(n, (LEFT,) * (n - 1))


def parse_tree(text: str) -> BinaryTree:
    """Parse the fully parenthesized tree grammar: tree := '*' | '(' tree ',' tree ')'.

    Whitespace is ignored. Errors carry the byte offset of the offending character.
    """
    tree, pos = _parse_tree_at(text, _skip_spaces(text, 0))
    pos = _skip_spaces(text, pos)
    if pos != len(text):
        raise TreeSyntaxError(f'unexpected {text[pos]!r} after tree', _byte_offset(text, pos))
    return tree


def _skip_spaces(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode('utf-8'))


def _expect(text: str, pos: int, char: str) -> int:
    pos = _skip_spaces(text, pos)
    if pos >= len(text):
        raise TreeSyntaxError(f'expected {char!r}, got end of input', _byte_offset(text, pos))
    if text[pos] != char:
        raise TreeSyntaxError(f'expected {char!r}, got {text[pos]!r}', _byte_offset(text, pos))
    return pos + 1


def _parse_tree_at(text: str, pos: int) -> tuple[BinaryTree, int]:
    pos = _skip_spaces(text, pos)
    if pos >= len(text):
        raise TreeSyntaxError('expected tree, got end of input', _byte_offset(text, pos))
    if text[pos] == '*':
        return LEAF, pos + 1
    if text[pos] != '(':
        raise TreeSyntaxError(f'expected tree, got {text[pos]!r}', _byte_offset(text, pos))
    left, pos = _parse_tree_at(text, pos + 1)
    pos = _expect(text, pos, ',')
    right, pos = _parse_tree_at(text, pos)
    pos = _expect(text, pos, ')')
    return Caret(left, right), pos


def render_tree(t: BinaryTree) -> str:
    if isinstance(t, Leaf):
        return '*'
    return f'({render_tree(t.left)},{render_tree(t.right)})'


@lru_cache(maxsize=None)
def _full_tree(h: int) -> BinaryTree:
    if h == 0:
        return LEAF
    sub = _full_tree(h - 1)
    return Caret(sub, sub)


def full_tree(h: int, height_cap: int = DEFAULT_HEIGHT_CAP) -> BinaryTree:
    """Full binary tree of height h (2^h leaves)."""
    if h < 0:
        msg = f'height must be non-negative, got {h}'
        raise ValueError(msg)
    if h > height_cap:
        msg = f'full tree of height {h} exceeds the height cap {height_cap}'
        raise CapExceededError(msg, height_cap)
    return _full_tree(h)


def make_vine(spec: VineSpec) -> BinaryTree:
    tree: BinaryTree = Caret(LEAF, LEAF)
    for turn in reversed(spec.turns):
        tree = Caret(tree, LEAF) if turn == LEFT else Caret(LEAF, tree)
    return tree


def left_vine(n: int) -> BinaryTree:
    """Vine of height n whose free caret holds the two leftmost leaves."""
    return make_vine(VineSpec.left(n))


def graft(t: BinaryTree, leaf: int, sub: BinaryTree) -> BinaryTree:
    """Hang sub from the given leaf of t."""
    if not 0 <= leaf < t.leaf_count:
        msg = f'leaf index {leaf} out of range for a tree with {t.leaf_count} leaves'
        raise IndexError(msg)
    return _graft(t, leaf, sub)


def _graft(t: BinaryTree, leaf: int, sub: BinaryTree) -> BinaryTree:
    if isinstance(t, Leaf):
        return sub
    left_count = t.left.leaf_count
    if leaf < left_count:
        return Caret(_graft(t.left, leaf, sub), t.right)
    return Caret(t.left, _graft(t.right, leaf - left_count, sub))


def free_carets(t: BinaryTree) -> list[int]:
    """Leaf indices i such that leaves i and i+1 hang from the same caret."""
    found: list[int] = []
    _collect_free_carets(t, 0, found)
    return found


def _collect_free_carets(t: BinaryTree, offset: int, found: list[int]):
    if isinstance(t, Leaf):
        return
    if isinstance(t.left, Leaf) and isinstance(t.right, Leaf):
        found.append(offset)
        return
    _collect_free_carets(t.left, offset, found)
    _collect_free_carets(t.right, offset + t.left.leaf_count, found)


def leaf_distance(h: int, i: int, k: int) -> int:
    """Distance from leaves i and k of the full tree of height h up to their closest common ancestor."""
    size = 1 << h
    if not (0 <= i < size and 0 <= k < size):
        msg = f'leaves {i}, {k} out of range for the full tree of height {h}'
        raise IndexError(msg)
    if i == k:
        msg = f'leaf distance needs two different leaves, got {i} twice'
        raise ValueError(msg)
    return (i ^ k).bit_length()


def leaf_depths(t: BinaryTree) -> list[int]:
    depths: list[int] = []

    def walk(node: BinaryTree, depth: int):
        if isinstance(node, Leaf):
            depths.append(depth)
            return
        walk(node.left, depth + 1)
        walk(node.right, depth + 1)

    walk(t, 0)
    return depths


def leaf_path(t: BinaryTree, i: int) -> LeafPath:
    if not 0 <= i < t.leaf_count:
        msg = f'leaf index {i} out of range for a tree with {t.leaf_count} leaves'
        raise IndexError(msg)
    steps: list[str] = []
    node = t
    while isinstance(node, Caret):
        if i < node.left.leaf_count:
            steps.append(LEFT)
            node = node.left
        else:
            i -= node.left.leaf_count
            steps.append(RIGHT)
            node = node.right
    return tuple(steps)


def subtree_at(t: BinaryTree, path: LeafPath) -> BinaryTree:
    node = t
    for depth, step in enumerate(path):
        if isinstance(node, Leaf):
            msg = f'path {"".join(path)} leaves the tree at depth {depth}'
            raise ValueError(msg)
        if step == LEFT:
            node = node.left
        elif step == RIGHT:
            node = node.right
        else:
            msg = f'path steps must be L or R, got {step!r}'
            raise ValueError(msg)
    return node


@lru_cache(maxsize=None)
def _trees_with(n: int) -> tuple[BinaryTree, ...]:
    if n == 1:
        return (LEAF,)
    return tuple(Caret(left, right) for k in range(1, n) for left in _trees_with(k) for right in _trees_with(n - k))


def enumerate_trees(n: int) -> list[BinaryTree]:
    """All binary trees with n leaves, ordered by their text rendering."""
    if n < 1:
        msg = f'a tree has at least one leaf, got {n}'
        raise ValueError(msg)
    trees = sorted(_trees_with(n), key=render_tree)
    logging.debug(f'enumerated {len(trees)} trees with {n} leaves')
    return trees


def random_tree(n: int, rng: random.Random) -> BinaryTree:
    if n < 1:
        msg = f'a tree has at least one leaf, got {n}'
        raise ValueError(msg)
    if n == 1:
        return LEAF
    k = rng.randint(1, n - 1)
    return Caret(random_tree(k, rng), random_tree(n - k, rng))
