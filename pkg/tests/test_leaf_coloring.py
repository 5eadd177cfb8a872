#!/usr/bin/env python3

import itertools

import networkx as nx
import pytest

from commassoc.finite_group import cyclic
from commassoc.leaf_coloring import (
    ColoringInstance,
    LeafColoring,
    constraint_graph,
    min_colors,
    mirror_coloring,
    proof_clique,
    repeated_label_tree_check,
    tightness_table,
    valid_coloring,
    verify_lower_bound,
)
from commassoc.tree_core import CapExceededError
from tests.oracles import common_ancestor_distance, slow_chromatic_number


def test_instance():
    """Test the derived height, leaf count and constrained distances."""
    inst = ColoringInstance(2, 2)
    assert inst.h == 5
    assert inst.leaves == 32
    assert inst.bound == 4
    assert inst.distances == [1, 3, 5]
    assert ColoringInstance(1, 1).distances == [1, 2]
    with pytest.raises(ValueError, match='positive'):
        ColoringInstance(0, 1)


def test_neighbors_match_adjacency():
    """Test the closed-form neighbour lists against pairwise adjacency."""
    inst = ColoringInstance(2, 2)
    graph = constraint_graph(inst)
    for i in range(inst.leaves):
        expected = {k for k in range(inst.leaves) if k != i and graph.adjacent(i, k)}
        assert set(graph.neighbors(i)) == expected
        assert len(expected) == graph.degree()
    for i, k in itertools.combinations(range(inst.leaves), 2):
        assert graph.adjacent(i, k) == inst.constrained(common_ancestor_distance(inst.h, i, k))


def test_to_networkx():
    """Test the materialised graph and its cap."""
    graph = constraint_graph(ColoringInstance(1, 1)).to_networkx()
    assert nx.is_isomorphic(graph, nx.complete_graph(4))
    assert constraint_graph(ColoringInstance(1, 1)).edge_count() == 6
    with pytest.raises(CapExceededError):
        constraint_graph(ColoringInstance(5, 2)).to_networkx()
    with pytest.raises(CapExceededError):
        constraint_graph(ColoringInstance(2, 2), cap=16)


def test_valid_coloring():
    """Test the least violating pair is reported."""
    inst = ColoringInstance(1, 1)
    assert valid_coloring(inst, LeafColoring((0, 1, 2, 3))).valid
    verdict = valid_coloring(inst, LeafColoring((0, 1, 0, 2)))
    assert not verdict.valid
    assert verdict.violation == (0, 2)
    assert verdict.distance == 2
    assert valid_coloring(inst, LeafColoring((0, 1, 2, 3))).distance is None
    with pytest.raises(ValueError, match='entries'):
        valid_coloring(inst, LeafColoring((0, 1)))


def test_valid_coloring_unconstrained_distance():
    """Test equal colors at an unconstrained distance are fine."""
    inst = ColoringInstance(1, 2)
    # leaves 0 and 2 are at distance 2, which is not 1 mod 2
    assert valid_coloring(inst, LeafColoring((0, 1, 0, 1, 2, 3, 2, 3))).valid


def test_valid_coloring_large_blocks():
    """Test the block-by-block path for wide subtrees."""
    inst = ColoringInstance(4, 2)
    colors = list(range(inst.leaves))
    assert valid_coloring(inst, LeafColoring(tuple(colors))).valid
    colors[256] = 0
    verdict = valid_coloring(inst, LeafColoring(tuple(colors)))
    assert verdict.violation == (0, 256)
    assert verdict.distance == 9


def test_proof_clique():
    """Test the recursive clique is pairwise constrained and has 2^n leaves."""
    for n, j in [(1, 1), (2, 2), (3, 2), (2, 3), (4, 1)]:
        inst = ColoringInstance(n, j)
        clique = proof_clique(inst)
        graph = constraint_graph(inst)
        assert len(clique) == inst.bound
        assert all(graph.adjacent(i, k) for i, k in itertools.combinations(clique, 2))
    assert proof_clique(ColoringInstance(2, 2)) == [0, 6, 24, 30]


@pytest.mark.parametrize('j', [1, 2, 3, 4])
def test_min_colors_single_level(j):
    """Test one level needs four colors whatever j is."""
    inst = ColoringInstance(1, j)
    count, coloring = min_colors(inst)
    assert count == 4
    assert coloring.used == 4
    assert valid_coloring(inst, coloring).valid


def test_min_colors_matches_brute_force():
    """Test the exact search against trying every coloring."""
    for n, j in [(1, 1), (1, 2)]:
        inst = ColoringInstance(n, j)
        graph = constraint_graph(inst)
        edges = {(i, k) for i, k in itertools.combinations(range(inst.leaves), 2) if graph.adjacent(i, k)}
        assert min_colors(inst)[0] == slow_chromatic_number(inst.leaves, edges)


def test_min_colors_two_levels():
    """Test two levels need 2^(n+1) colors, with j = 1 making the graph complete."""
    count, _ = min_colors(ColoringInstance(2, 1))
    assert count == 8
    count, _ = min_colors(ColoringInstance(2, 2))
    assert count == 8


def test_min_colors_cap():
    """Test exact search refuses big instances."""
    with pytest.raises(CapExceededError):
        min_colors(ColoringInstance(3, 2))


def test_mirror_coloring():
    """Test mirroring keeps a coloring valid."""
    inst = ColoringInstance(1, 3)
    _, coloring = min_colors(inst)
    mirrored = mirror_coloring(coloring)
    assert mirrored.colors == tuple(reversed(coloring.colors))
    assert valid_coloring(inst, mirrored).valid


def test_verify_lower_bound():
    """Test the bound by exact search and by the proof clique."""
    verdict = verify_lower_bound(ColoringInstance(1, 1))
    assert verdict.holds
    assert verdict.exact_minimum == 4
    assert verdict.clique_size == 2
    assert verdict.witness is not None
    verdict = verify_lower_bound(ColoringInstance(3, 3))
    assert verdict.holds
    assert verdict.exact_minimum is None
    assert verdict.clique_size == 8


def test_repeated_label_tree_check():
    """Test labelings by a small group always repeat a label at distance qj+1."""
    report = repeated_label_tree_check(cyclic(3), j=2, n=2, labelings=20, seed=1)
    assert report.ok
    assert report.labelings == 20
    assert all((found.distance - 1) % 2 == 0 for found in report.found)
    assert all(found.q == (found.distance - 1) // 2 for found in report.found)


def test_repeated_label_tree_check_fixed_labelings():
    """Test hand-written labelings are checked before random ones."""
    report = repeated_label_tree_check(cyclic(3), 1, 2, labelings=0, fixed=[[0, 1, 2, 0, 1, 2, 0, 1]])
    assert report.labelings == 1
    assert report.found[0].i == 0
    assert report.found[0].k == 3


def test_repeated_label_tree_check_needs_small_group():
    """Test 2^n must exceed the group order."""
    with pytest.raises(ValueError, match='2\\^n'):
        repeated_label_tree_check(cyclic(4), 1, 2)


def test_tightness_table():
    """Test exact minima against the bound for small heights."""
    rows = tightness_table(3)
    assert [(row.n, row.j, row.h, row.bound, row.minimum) for row in rows] == [
        (1, 1, 2, 2, 4),
        (1, 2, 3, 2, 4),
        (2, 1, 3, 4, 8),
    ]
