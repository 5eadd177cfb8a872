#!/usr/bin/env python3

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx
import numpy as np

from commassoc.finite_group import FiniteGroup
from commassoc.tree_core import CapExceededError, leaf_distance

GRAPH_CAP = 1 << 20
EXACT_CAP = 64
MATERIALIZE_CAP = 1 << 10
# Above this block size violations are searched block by block
VECTOR_BLOCK = 64
DEFAULT_LABELINGS = 100


@dataclass(frozen=True)
class ColoringInstance:
    """Leaves of the full tree of height nj+1; leaves at distance d = 1 (mod j) need different colors."""

    n: int
    j: int
    h: int = field(init=False)

    def __post_init__(self):
        if self.n < 1 or self.j < 1:
            msg = f'n and j must be positive, got n={self.n}, j={self.j}'
            raise ValueError(msg)
        object.__setattr__(self, 'h', self.n * self.j + 1)

    @property
    def leaves(self) -> int:
        return 1 << self.h

    @property
    def bound(self) -> int:
        return 1 << self.n

    def constrained(self, d: int) -> bool:
        # with j = 1 every distance counts
        return (d - 1) % self.j == 0

    @property
    def distances(self) -> list[int]:
        return [d for d in range(1, self.h + 1) if self.constrained(d)]


@dataclass(frozen=True)
class LeafColoring:
    colors: tuple[int, ...]

    @property
    def used(self) -> int:
        return len(set(self.colors))


@dataclass
class ConstraintGraph:
    """Constraint graph whose edges come from the leaf distance formula on demand."""

    instance: ColoringInstance

    def adjacent(self, i: int, k: int) -> bool:
        return i != k and self.instance.constrained(leaf_distance(self.instance.h, i, k))

    def neighbors(self, i: int) -> Iterator[int]:
        for d in self.instance.distances:
            base = ((i >> (d - 1)) ^ 1) << (d - 1)
            yield from range(base, base + (1 << (d - 1)))

    def degree(self) -> int:
        return sum(1 << (d - 1) for d in self.instance.distances)

    def edge_count(self) -> int:
        return self.instance.leaves * self.degree() // 2

    def to_networkx(self, max_vertices: int = MATERIALIZE_CAP) -> nx.Graph:
        if self.instance.leaves > max_vertices:
            msg = f'{self.instance.leaves} leaves is too many to materialise (cap {max_vertices})'
            raise CapExceededError(msg, max_vertices)
        graph = nx.Graph()
        graph.add_nodes_from(range(self.instance.leaves))
        graph.add_edges_from((i, k) for i in range(self.instance.leaves) for k in self.neighbors(i) if i < k)
        return graph


def constraint_graph(inst: ColoringInstance, cap: int = GRAPH_CAP) -> ConstraintGraph:
    if inst.leaves > cap:
        msg = f'instance n={inst.n}, j={inst.j} has {inst.leaves} leaves, over the cap {cap}'
        raise CapExceededError(msg, cap)
    return ConstraintGraph(inst)


@dataclass(frozen=True)
class ColoringVerdict:
    valid: bool
    violation: Optional[tuple[int, int]] = None

    @property
    def distance(self) -> Optional[int]:
        if self.violation is None:
            return None
        i, k = self.violation
        return (i ^ k).bit_length()


def valid_coloring(inst: ColoringInstance, c: LeafColoring) -> ColoringVerdict:
    """Check every constrained pair; a violation is reported as the leaf pair (i, k), i < k."""
    if len(c.colors) != inst.leaves:
        msg = f'coloring has {len(c.colors)} entries, the tree has {inst.leaves} leaves'
        raise ValueError(msg)
    colors = np.asarray(c.colors)
    found: Optional[tuple[int, int]] = None
    for d in inst.distances:
        half = 1 << (d - 1)
        blocks = colors.reshape(-1, 2, half)
        pair: Optional[tuple[int, int]] = None
        if half <= VECTOR_BLOCK:
            hits = np.argwhere(blocks[:, 0, :, None] == blocks[:, 1, None, :])
            if len(hits):
                block, i, k = (int(x) for x in hits[0])
                pair = (block * 2 * half + i, block * 2 * half + half + k)
        else:
            for block, (left, right) in enumerate(blocks):
                common = np.intersect1d(left, right)
                if len(common):
                    i = int(np.flatnonzero(np.isin(left, common))[0])
                    k = int(np.flatnonzero(right == left[i])[0])
                    pair = (block * 2 * half + i, block * 2 * half + half + k)
                    break
        if pair is not None and (found is None or pair < found):
            found = pair
    return ColoringVerdict(found is None, found)


def proof_clique(inst: ColoringInstance) -> list[int]:
    """2^n pairwise constrained leaves: leftmost and rightmost subtrees of height (n-1)j+1, recursively."""

    def build(level: int, offset: int) -> list[int]:
        if level == 0:
            return [offset]
        height = level * inst.j + 1
        sub = (level - 1) * inst.j + 1
        return build(level - 1, offset) + build(level - 1, offset + (1 << height) - (1 << sub))

    return build(inst.n, 0)


def _dsatur_branch_and_bound(graph: nx.Graph, lower: int, upper: LeafColoring) -> LeafColoring:
    n = graph.number_of_nodes()
    adjacency = [sorted(graph.neighbors(v)) for v in range(n)]
    colors = [-1] * n
    # counts[v][c]: colored neighbours of v with color c
    counts = [[0] * upper.used for _ in range(n)]
    best = {'used': upper.used, 'colors': upper.colors}

    def pick() -> int:
        chosen, key = -1, (-1, -1)
        for v in range(n):
            if colors[v] >= 0:
                continue
            candidate = (sum(1 for x in counts[v] if x), len(adjacency[v]))
            # strict comparison keeps the lowest index on ties
            if candidate > key:
                chosen, key = v, candidate
        return chosen

    def search(colored: int, used: int):
        if used >= best['used']:
            return
        if colored == n:
            best['used'], best['colors'] = used, tuple(colors)
            return
        v = pick()
        for c in range(min(used + 1, best['used'] - 1)):
            if counts[v][c]:
                continue
            colors[v] = c
            for w in adjacency[v]:
                counts[w][c] += 1
            search(colored + 1, max(used, c + 1))
            for w in adjacency[v]:
                counts[w][c] -= 1
            colors[v] = -1
            if best['used'] <= lower:
                return

    search(0, 0)
    return LeafColoring(best['colors'])


def min_colors(inst: ColoringInstance, exact_cap: int = EXACT_CAP) -> tuple[int, LeafColoring]:
    """Exact chromatic number of the constraint graph with an optimal coloring."""
    if inst.leaves > exact_cap:
        msg = f'exact search is limited to {exact_cap} leaves, instance has {inst.leaves}'
        raise CapExceededError(msg, exact_cap)
    graph = constraint_graph(inst).to_networkx()
    greedy = nx.greedy_color(graph, strategy='DSATUR')
    upper = LeafColoring(tuple(greedy[v] for v in range(inst.leaves)))
    clique, _ = nx.max_weight_clique(graph, weight=None)
    lower = len(clique)
    logging.debug(f'n={inst.n} j={inst.j}: clique bound {lower}, DSATUR bound {upper.used}')
    best = upper if upper.used <= lower else _dsatur_branch_and_bound(graph, lower, upper)
    return best.used, best


def mirror_coloring(c: LeafColoring) -> LeafColoring:
    """Swap leaf i with leaf 2^h - 1 - i."""
    return LeafColoring(tuple(reversed(c.colors)))


@dataclass(frozen=True)
class LowerBoundVerdict:
    bound: int
    holds: bool
    exact_minimum: Optional[int] = None
    witness: Optional[LeafColoring] = None
    clique_size: int = 0


def verify_lower_bound(
    inst: ColoringInstance, exact: Optional[bool] = None, exact_cap: int = EXACT_CAP
) -> LowerBoundVerdict:
    """At least 2^n colors: by exact search when the instance is small enough, else by the proof clique."""
    exact = inst.leaves <= exact_cap if exact is None else exact
    clique = proof_clique(inst)
    graph = constraint_graph(inst)
    is_clique = all(graph.adjacent(i, k) for pos, i in enumerate(clique) for k in clique[pos + 1 :])
    clique_size = len(clique) if is_clique else 0
    if exact:
        minimum, witness = min_colors(inst, exact_cap)
        return LowerBoundVerdict(inst.bound, minimum >= inst.bound, minimum, witness, clique_size)
    return LowerBoundVerdict(inst.bound, clique_size >= inst.bound, clique_size=clique_size)


@dataclass(frozen=True)
class RepeatedLabel:
    i: int
    k: int
    distance: int
    q: int


@dataclass
class PigeonholeReport:
    group: str
    n: int
    j: int
    labelings: int
    found: list[RepeatedLabel] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return len(self.found) == self.labelings


def repeated_label_tree_check(
    G: FiniteGroup,
    j: int,
    n: int,
    labelings: int = DEFAULT_LABELINGS,
    seed: int = 0,
    cap: int = GRAPH_CAP,
    fixed: Sequence[Sequence[int]] = (),
) -> PigeonholeReport:
    """Label the leaves of the full tree of height nj+1 with elements of G and find equal labels at distance qj+1."""
    if (1 << n) <= G.order:
        msg = f'need 2^n > |G|, got n={n} for order {G.order}'
        raise ValueError(msg)
    inst = ColoringInstance(n, j)
    constraint_graph(inst, cap)
    rng = np.random.default_rng(seed)
    report = PigeonholeReport(G.name, n, j, len(fixed) + labelings)
    drawn = [rng.integers(0, G.order, size=inst.leaves) for _ in range(labelings)]
    for labels in [np.asarray(f) for f in fixed] + drawn:
        verdict = valid_coloring(inst, LeafColoring(tuple(int(x) for x in labels)))
        if verdict.violation is None:
            logging.warning(f'labeling of {inst.leaves} leaves by {G.name} has no repeated label at distance qj+1')
            continue
        i, k = verdict.violation
        d = verdict.distance or 0
        report.found.append(RepeatedLabel(i, k, d, (d - 1) // j))
    return report


@dataclass(frozen=True)
class TightnessRow:
    n: int
    j: int
    h: int
    bound: int
    minimum: int


def tightness_table(max_height: int = 5, exact_cap: int = EXACT_CAP) -> list[TightnessRow]:
    """Exact minima next to 2^n for every (n, j) with nj+1 <= max_height."""
    rows = []
    for n in range(1, max_height):
        for j in range(1, max_height):
            if n * j + 1 > max_height:
                continue
            inst = ColoringInstance(n, j)
            minimum, _ = min_colors(inst, exact_cap)
            rows.append(TightnessRow(n, j, inst.h, inst.bound, minimum))
    return rows
