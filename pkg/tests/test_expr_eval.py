#!/usr/bin/env python3

import itertools
import random

import numpy as np
import pytest

from commassoc.expr_eval import (
    CommCaret,
    ConstLeaf,
    ExprSyntaxError,
    Outcome,
    UnboundVariableError,
    VarLeaf,
    bp_sequence,
    bp_set,
    check_bp_structure,
    check_mod_center,
    check_passing_to_derived,
    constants,
    evaluate,
    evaluate_many,
    expr_from_tree,
    fresh_variable,
    full_tree_expr,
    hang_expr,
    is_linear,
    map_constants,
    parse_expr,
    render_expr,
    satisfies,
    shape,
    value_set,
    variables,
)
from commassoc.finite_group import element_index, make_subset, whole
from commassoc.tree_core import LEAF, CapExceededError, enumerate_trees, full_tree, parse_tree, random_tree
from tests.catalog import catalog_group, names_up_to
from tests.oracles import slow_evaluate, slow_first_failure

ONE = ConstLeaf(0)


def test_parse_and_render_expr():
    """Test the bracket syntax for commutator expressions."""
    e = parse_expr(' [x1, [x2 ,#0]] ')
    assert e == CommCaret(VarLeaf('x1'), CommCaret(VarLeaf('x2'), ONE))
    assert render_expr(e) == '[x1,[x2,#0]]'
    assert shape(e) == parse_tree('(*,(*,*))')


@pytest.mark.parametrize(
    ('text', 'offset'),
    [
        ('[x1 x2]', 4),
        ('[x1,x2', 6),
        ('y1', 0),
        ('#', 1),
        ('[x1,x2] x3', 8),
    ],
)
def test_parse_expr_errors(text, offset):
    """Test syntax errors carry their offset."""
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr(text)
    assert info.value.offset == offset


def test_parse_expr_checks_constants(s3):
    """Test constants are range-checked against a group."""
    with pytest.raises(ExprSyntaxError, match='unknown constant #9'):
        parse_expr('[x1,#9]', s3)
    assert constants(parse_expr('[#5,[x1,#2]]', s3)) == [5, 2]


def test_variables_and_linearity():
    """Test variable order and linearity."""
    e = parse_expr('[x2,[x1,x2]]')
    assert variables(e) == ['x2', 'x1']
    assert not is_linear(e)
    assert is_linear(parse_expr('[x3,[x1,#0]]'))


def test_expr_from_tree():
    """Test leaves are numbered left to right."""
    assert render_expr(full_tree_expr(2)) == '[[x1,x2],[x3,x4]]'
    assert render_expr(expr_from_tree(parse_tree('(*,(*,*))'), 'y', 3)) == '[y3,[y4,y5]]'
    assert expr_from_tree(LEAF) == VarLeaf('x1')


def test_evaluate_matches_oracle(s4):
    """Test single and vectorised evaluation against the slow evaluator."""
    e = parse_expr('[[x1,x2],[x3,#5]]')
    rng = np.random.default_rng(1)
    columns = {name: rng.integers(0, s4.order, size=200) for name in ('x1', 'x2', 'x3')}
    many = evaluate_many(e, s4, columns)
    for at in range(200):
        assignment = {name: int(col[at]) for name, col in columns.items()}
        assert evaluate(e, s4, assignment) == slow_evaluate(e, s4, assignment) == int(many[at])


def test_evaluate_errors(s3):
    """Test unbound variables and bad constants."""
    with pytest.raises(UnboundVariableError):
        evaluate(parse_expr('[x1,x2]'), s3, {'x1': 0})
    with pytest.raises(ValueError, match='not an element'):
        evaluate(ConstLeaf(6), s3, {})


def test_satisfies_least_counterexample(s3):
    """Test the exhaustive search reports the lexicographically least counterexample."""
    verdict = satisfies(s3, whole(s3), parse_expr('[x1,x2]'), ONE)
    assert verdict.outcome is Outcome.FAILS
    assert verdict.counterexample == {'x1': 1, 'x2': 2}
    assert verdict.evaluations == 9
    assert not verdict.sampled


def test_satisfies_matches_oracle(s3, d4):
    """Test the search against brute force over a few identities."""
    for G in (s3, d4):
        for s_text, t_text in (
            ('[[x1,x2],x3]', '[x1,[x2,x3]]'),
            ('[x1,x2]', '[x2,x1]'),
            ('[[x1,x2],[x3,x1]]', '#0'),
            ('[x2,x1]', '[x2,x1]'),
        ):
            s, t = parse_expr(s_text), parse_expr(t_text)
            verdict = satisfies(G, whole(G), s, t)
            expected = slow_first_failure(G, range(G.order), s, t)
            assert verdict.holds == (expected is None)
            assert verdict.counterexample == expected


def test_satisfies_on_subset(s3):
    """Test variables range over the given subset only."""
    A3 = value_set(parse_expr('[x1,x2]'), s3, whole(s3))
    assert satisfies(s3, A3, parse_expr('[x1,x2]'), ONE).holds
    assert satisfies(s3, make_subset(s3, []), parse_expr('[x1,x2]'), ONE).holds


def test_satisfies_without_variables(s3):
    """Test closed expressions are simply compared."""
    swap = element_index(s3, '(1 2)')
    assert satisfies(s3, whole(s3), ONE, ONE).holds
    verdict = satisfies(s3, whole(s3), ConstLeaf(swap), ONE)
    assert verdict.outcome is Outcome.FAILS
    assert verdict.counterexample == {}


def test_sampling_prepass(s3):
    """Test a large space is sampled first and the counterexample is flagged."""
    s, t = parse_expr('[x1,x2]'), parse_expr('[x2,x1]')
    verdict = satisfies(s3, whole(s3), s, t, sample_threshold=10, seed=4)
    assert verdict.outcome is Outcome.FAILS
    assert verdict.sampled
    assert evaluate(s, s3, verdict.counterexample) != evaluate(t, s3, verdict.counterexample)


def test_linear_fast_path(a5):
    """Test one linear side against a constant needs no enumeration."""
    s = full_tree_expr(3)
    verdict = satisfies(a5, whole(a5), s, ONE)
    assert verdict.outcome is Outcome.FAILS
    assert evaluate(s, a5, verdict.counterexample) != 0
    assert set(verdict.counterexample) == set(variables(s))
    assert verdict.sampled
    assert verdict.evaluations == 0


def test_budget_exceeded(a5):
    """Test an identity that holds on samples ends in BUDGET_EXCEEDED when the space is too big."""
    s = parse_expr('[[x1,x1],[x2,x3]]')
    verdict = satisfies(a5, whole(a5), s, ONE, budget=1000, sample_threshold=100, samples=500)
    assert verdict.outcome is Outcome.BUDGET_EXCEEDED
    assert not verdict.holds


def test_value_set(s3, s4):
    """Test value sets for linear and non-linear expressions."""
    commutators = value_set(parse_expr('[x1,x2]'), s3, whole(s3))
    assert commutators.members == frozenset({0, element_index(s3, '(1 2 3)'), element_index(s3, '(1 3 2)')})
    assert value_set(parse_expr('[x1,x1]'), s4, whole(s4)).members == frozenset({0})
    with pytest.raises(CapExceededError):
        value_set(parse_expr('[x1,[x2,x1]]'), s4, whole(s4), budget=100)


def test_bp_sequence(s3, s4, a5):
    """Test B_p sizes and where the sequence starts to repeat."""
    seq = bp_sequence(s3)
    assert [len(b) for b in seq.sets] == [6, 3, 1, 1]
    assert seq.cycle_start == 2
    assert len(seq.distinct) == 3
    assert [len(b) for b in bp_sequence(s4).sets] == [24, 12, 4, 1, 1]
    a5_seq = bp_sequence(a5)
    assert [len(b) for b in a5_seq.sets] == [60, 60]
    assert a5_seq.cycle_start == 0


def test_bp_sequence_height_cap(s3, a5):
    """Test the sequence must repeat within the height cap."""
    with pytest.raises(CapExceededError, match='height cap 2'):
        bp_sequence(s3, height_cap=2)
    assert len(bp_sequence(s3, height_cap=3).sets) == 4
    assert bp_sequence(a5, height_cap=1).cycle_start == 0


def test_bp_set_matches_full_tree_values(s3):
    """Test B_p is the value set of the full tree of height p."""
    for p in range(3):
        assert bp_set(s3, p).members == value_set(full_tree_expr(p), s3, whole(s3)).members
    with pytest.raises(ValueError):
        bp_set(s3, -1)
    with pytest.raises(CapExceededError):
        bp_set(s3, 17)


@pytest.mark.parametrize('name', names_up_to(60))
def test_bp_structure(name):
    """Test B_p is normal, inverse closed and generates the derived subgroup."""
    G = catalog_group(name)
    for p in range(4):
        assert check_bp_structure(G, p).holds


def test_hang_expr():
    """Test hung trees get fresh variables in order."""
    t = parse_expr('[x1,[x2,#0]]')
    hung = hang_expr(t, [full_tree(1), LEAF])
    assert render_expr(hung) == '[[y1,y2],[y3,#0]]'
    with pytest.raises(ValueError, match='variable leaves'):
        hang_expr(t, [LEAF])


def test_passing_to_derived(s3, s4):
    """Test an identity on hung trees against B_p and the derived subgroup."""
    t = parse_expr('[x1,x2]')
    report = check_passing_to_derived(s3, t, 1, [full_tree(1), full_tree(1)])
    assert report.hypothesis
    assert report.on_bp
    assert report.on_derived
    assert report.consistent
    report = check_passing_to_derived(s4, t, 1, [full_tree(1), LEAF])
    assert not report.hypothesis
    assert report.consistent
    with pytest.raises(ValueError, match='at most 1'):
        check_passing_to_derived(s3, t, 1, [full_tree(2), LEAF])


def test_passing_to_derived_random():
    """Test the hung-tree identity against B_p and G^(p) on random shapes, hangs and small groups."""
    rng = random.Random(7)
    groups = [catalog_group(name) for name in names_up_to(8)]
    for _ in range(200):
        G = rng.choice(groups)
        p = rng.choice([1, 2])
        t = expr_from_tree(random_tree(rng.randint(1, 3), rng))
        slots = len(variables(t))
        while True:
            sizes = [rng.randint(1, p + 1) for _ in range(slots)]
            if sum(sizes) <= 5:
                break
        hangs = [random_tree(size, rng) for size in sizes]
        report = check_passing_to_derived(G, t, p, hangs)
        assert report.consistent, (G.name, render_expr(t), p)
        assert report.on_bp == report.on_derived, (G.name, render_expr(t), p)


def test_fresh_variable():
    """Test a fresh variable follows the highest index in use."""
    assert fresh_variable(parse_expr('[x1,x3]'), parse_expr('x2')) == VarLeaf('x4')
    assert fresh_variable(ONE) == VarLeaf('x1')


def test_mod_center(q8, s3, d4):
    """Test an identity mod the center against its commutator with a fresh variable."""
    s, t = parse_expr('[x1,x2]'), ONE
    for G in (q8, d4):
        report = check_mod_center(G, s, t)
        assert report.quotient
        assert report.right
        assert report.left
    report = check_mod_center(s3, s, t)
    assert not report.quotient
    assert report.consistent


SHAPES = [expr_from_tree(tree) for n in (1, 2, 3) for tree in enumerate_trees(n)] + [ONE]


@pytest.mark.parametrize('name', names_up_to(16))
def test_mod_center_all_small_shapes(name):
    """Test the three conditions agree for every pair of shapes with at most 3 leaves."""
    G = catalog_group(name)
    for s, t in itertools.combinations_with_replacement(SHAPES, 2):
        report = check_mod_center(G, s, t)
        assert report.consistent, (render_expr(s), render_expr(t))


def test_map_constants():
    """Test constants are mapped through a projection."""
    e = parse_expr('[#3,[x1,#1]]')
    assert render_expr(map_constants(e, np.array([0, 0, 1, 1]))) == '[#1,[x1,#0]]'
