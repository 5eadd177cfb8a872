#!/usr/bin/env python3

import random

import pytest

from commassoc.thompson_f import (
    LeafCountMismatchError,
    TreePair,
    collapse_caret,
    expand_pair,
    identity_pair,
    invert,
    is_reduced,
    matching_carets,
    multiply,
    pairs_equivalent,
    parse_pair,
    random_pair,
    reduce_pair,
    render_pair,
)
from commassoc.tree_core import LEAF, TreeSyntaxError, leaf_depths, parse_tree, random_tree

X0 = '((*,*),*) ; (*,(*,*))'
X1 = '(*,((*,*),*)) ; (*,(*,(*,*)))'


@pytest.fixture
def x0() -> TreePair:
    return parse_pair(X0)


@pytest.fixture
def x1() -> TreePair:
    return parse_pair(X1)


def test_parse_and_render_pair(x0):
    """Test the pair text format."""
    assert render_pair(x0) == X0
    assert str(x0) == X0
    assert x0.leaf_count == 3


def test_parse_pair_errors():
    """Test malformed pairs raise the right errors."""
    with pytest.raises(LeafCountMismatchError):
        parse_pair('(*,*) ; *')
    with pytest.raises(TreeSyntaxError, match='separated by one'):
        parse_pair('(*,*)')
    with pytest.raises(TreeSyntaxError) as info:
        parse_pair('* ; x')
    assert info.value.offset == 4


def test_expand_then_reduce(x0):
    """Test expanding a reduced pair and reducing again gives it back."""
    expanded = expand_pair(x0, [(2, parse_tree('(*,*)')), (0, parse_tree('((*,*),*)'))])
    assert expanded.leaf_count == 6
    assert not is_reduced(expanded)
    assert reduce_pair(expanded) == x0
    assert pairs_equivalent(expanded, x0)


def test_expand_plan_validation(x0):
    """Test expansion plans must name distinct leaves in range."""
    with pytest.raises(IndexError):
        expand_pair(x0, [(3, LEAF)])
    with pytest.raises(ValueError, match='two trees'):
        expand_pair(x0, [(1, LEAF), (1, LEAF)])


def test_matching_carets_and_collapse():
    """Test collapsing a matching caret."""
    pair = parse_pair('((*,*),(*,*)) ; (*,(*,(*,*)))')
    assert matching_carets(pair) == [2]
    assert render_pair(collapse_caret(pair, 2)) == X0
    with pytest.raises(ValueError, match='matching free caret'):
        collapse_caret(pair, 0)


def test_reduce_to_identity():
    """Test equal trees reduce to the one-leaf pair."""
    tree = parse_tree('((*,(*,*)),(*,*))')
    assert reduce_pair(TreePair(tree, tree)) == identity_pair()


def test_multiply_by_inverse(x0, x1):
    """Test p * p^-1 is the identity."""
    for p in (x0, x1, multiply(x0, x1)):
        assert multiply(p, invert(p)) == identity_pair()
        assert multiply(invert(p), p) == identity_pair()


def test_multiply_by_identity(x0):
    """Test the identity is neutral on both sides."""
    assert multiply(identity_pair(), x0) == x0
    assert multiply(x0, identity_pair()) == x0


def test_multiplication_is_associative():
    """Test (pq)r = p(qr) on random pairs."""
    rng = random.Random(11)
    for _ in range(500):
        p, q, r = (reduce_pair(random_pair(rng.randint(1, 6), rng)) for _ in range(3))
        assert multiply(multiply(p, q), r) == multiply(p, multiply(q, r))


def test_collapse_order_does_not_matter():
    """Test collapsing matching carets in any order reaches the reduced pair."""
    rng = random.Random(23)
    for _ in range(200):
        p = random_pair(rng.randint(1, 5), rng)
        plan = [(i, random_tree(rng.randint(1, 3), rng)) for i in range(p.leaf_count) if rng.random() < 0.5]
        q = expand_pair(p, plan)
        while matches := matching_carets(q):
            q = collapse_caret(q, rng.choice(matches))
        assert q == reduce_pair(p)


def test_multiply_result_is_reduced(x0, x1):
    """Test products are always reduced."""
    assert is_reduced(multiply(x0, x1))
    assert is_reduced(multiply(x1, x0))
    assert multiply(x0, x1) != multiply(x1, x0)


def test_square_of_generator(x0):
    """Test x0 * x0 against the pair worked out by hand."""
    assert render_pair(multiply(x0, x0)) == '(((*,*),*),*) ; (*,(*,(*,*)))'


def _end_slopes(p: TreePair) -> tuple[int, int]:
    """log2 slopes at both ends of the interval: depth changes of the outermost leaves."""
    source, target = leaf_depths(p.source), leaf_depths(p.target)
    return source[0] - target[0], source[-1] - target[-1]


def test_end_slopes_are_additive():
    """Test the slopes at 0 and 1 add up under multiplication."""
    rng = random.Random(5)
    for _ in range(30):
        p, q = (random_pair(rng.randint(1, 7), rng) for _ in range(2))
        product = _end_slopes(multiply(p, q))
        left, right = _end_slopes(p), _end_slopes(q)
        assert product == (left[0] + right[0], left[1] + right[1])
