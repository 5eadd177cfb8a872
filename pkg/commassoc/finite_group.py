#!/usr/bin/env python3

import logging
import math
import re
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Optional

import numpy as np
from sympy import isprime
from sympy.combinatorics import Permutation

from commassoc.tree_core import CapExceededError

DEFAULT_ORDER_CAP = 5040
EXHAUSTIVE_ASSOCIATIVITY_CAP = 128
ASSOCIATIVITY_SAMPLES = 10**5
# Row block size for pairwise commutator sweeps
_BLOCK = 256

_BUILTIN_RE = re.compile(r'^\s*([a-z_]+[a-z_0-9]*?)\s*(?:\(\s*(\d+)\s*\))?\s*$')
_CYCLE_RE = re.compile(r'\(([^()]*)\)')


class GroupAxiomError(ValueError):
    def __init__(self, axiom: str, witness: tuple, message: str):
        super().__init__(f'{axiom} fails: {message} (witness {witness})')
        self.axiom = axiom
        self.witness = witness


class GroupDefinitionError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message if line is None else f'line {line}: {message}')
        self.line = line


@dataclass(eq=False)
class FiniteGroup:
    """Finite group given by its Cayley table; element 0 is the identity.

    permutations keeps the 0-based images of each element when the group was built by closure.
    """

    name: str
    table: np.ndarray
    labels: list[str]
    permutations: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return int(self.table.shape[0])

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.argmax(self.table == 0, axis=1).astype(self.table.dtype)

    @cached_property
    def comm_table(self) -> np.ndarray:
        """comm_table[a, b] = a^-1 b^-1 a b."""
        inv = self.inverse
        return self.table[self.table[inv[:, None], inv[None, :]], self.table]

    @cached_property
    def label_index(self) -> dict[str, int]:
        return {label: index for index, label in enumerate(self.labels)}

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=self.table.dtype)

    def label(self, element: int) -> str:
        return self.labels[int(element)]

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))


@dataclass(frozen=True)
class Subset:
    group: FiniteGroup = field(compare=False, repr=False)
    members: frozenset[int]

    @property
    def indices(self) -> np.ndarray:
        return np.array(sorted(self.members), dtype=np.intp)

    def __len__(self):
        return len(self.members)

    def __contains__(self, element: object) -> bool:
        return element in self.members

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def render(self) -> str:
        return '{' + ', '.join(self.group.label(e) for e in self) + '}'


@dataclass(frozen=True)
class Subgroup(Subset):
    normal: bool = field(default=False, compare=False)


def make_subset(G: FiniteGroup, members: Iterable[int]) -> Subset:
    chosen = frozenset(int(m) for m in members)
    outside = [m for m in chosen if not 0 <= m < G.order]
    if outside:
        msg = f'element {outside[0]} is not in {G.name} of order {G.order}'
        raise ValueError(msg)
    return Subset(G, chosen)


def whole(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, frozenset(range(G.order)), normal=True)


def trivial(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, frozenset({0}), normal=True)


def _validate_table(table: np.ndarray, exhaustive_cap: int, samples: int, seed: int):
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise GroupAxiomError('shape', tuple(table.shape), 'Cayley table must be a non-empty square')
    n = table.shape[0]
    outside = np.argwhere((table < 0) | (table >= n))
    if len(outside):
        a, b = (int(x) for x in outside[0])
        raise GroupAxiomError('closure', (a, b), f'{a}*{b} = {int(table[a, b])} is not an element')
    ident = np.arange(n)
    broken = np.flatnonzero((table[0] != ident) | (table[:, 0] != ident))
    if len(broken):
        a = int(broken[0])
        raise GroupAxiomError('identity', (a,), f'element 0 does not act as identity on {a}')
    for axis, what in ((1, 'row'), (0, 'column')):
        latin = np.all(np.sort(table, axis=axis) == (ident[None, :] if axis == 1 else ident[:, None]), axis=axis)
        bad = np.flatnonzero(~latin)
        if len(bad):
            a = int(bad[0])
            raise GroupAxiomError('inverse', (a,), f'{what} {a} repeats an element, so {a} has no inverse')

    if n <= exhaustive_cap:
        left = table[table]
        right = table[:, table]
        failing = np.argwhere(left != right)
    else:
        rng = np.random.default_rng(seed)
        triples = rng.integers(0, n, size=(samples, 3))
        a, b, c = triples.T
        failing = triples[table[table[a, b], c] != table[a, table[b, c]]]
    if len(failing):
        a, b, c = (int(x) for x in failing[0])
        raise GroupAxiomError('associativity', (a, b, c), f'({a}*{b})*{c} != {a}*({b}*{c})')


def from_cayley_table(
    table: Sequence[Sequence[int]],
    name: str = 'table',
    labels: Optional[list[str]] = None,
    *,
    exhaustive_cap: int = EXHAUSTIVE_ASSOCIATIVITY_CAP,
    samples: int = ASSOCIATIVITY_SAMPLES,
    seed: int = 0,
) -> FiniteGroup:
    """Validate a Cayley table and wrap it as a group.

    Associativity is checked on every triple up to exhaustive_cap elements and on random triples above.
    """
    arr = np.asarray(table)
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        raise GroupAxiomError('shape', tuple(arr.shape), 'Cayley table entries must be integers')
    arr = arr.astype(np.int32)
    _validate_table(arr, exhaustive_cap, samples, seed)
    n = arr.shape[0]
    if labels is not None and len(labels) != n:
        msg = f'{len(labels)} labels for a group of order {n}'
        raise ValueError(msg)
    logging.debug(f'validated Cayley table {name} of order {n}')
    return FiniteGroup(name, arr, labels if labels is not None else [str(i) for i in range(n)])


def render_permutation(images: Sequence[int]) -> str:
    cycles = Permutation(list(images)).cyclic_form
    if not cycles:
        return '()'
    return ''.join('(' + ' '.join(str(point + 1) for point in cycle) + ')' for cycle in cycles)


def parse_cycles(text: str, degree: int) -> tuple[int, ...]:
    """Parse disjoint cycles over 1..degree, e.g. '(1 2 3)(4 5)', into 0-based images."""
    stripped = text.strip()
    if _CYCLE_RE.sub('', stripped).strip():
        msg = f'malformed cycle notation {text!r}'
        raise GroupDefinitionError(msg)
    cycles: list[list[int]] = []
    seen: set[int] = set()
    for body in _CYCLE_RE.findall(stripped):
        try:
            points = [int(token) for token in body.replace(',', ' ').split()]
        except ValueError as error:
            msg = f'malformed cycle ({body}) in {text!r}'
            raise GroupDefinitionError(msg) from error
        for point in points:
            if not 1 <= point <= degree:
                msg = f'point {point} outside 1..{degree} in {text!r}'
                raise GroupDefinitionError(msg)
            if point in seen:
                msg = f'point {point} appears twice in {text!r}'
                raise GroupDefinitionError(msg)
            seen.add(point)
        if len(points) > 1:
            cycles.append([point - 1 for point in points])
    if not cycles:
        return tuple(range(degree))
    return tuple(int(x) for x in Permutation(cycles, size=degree).array_form)


def from_permutations(
    generators: Sequence[Sequence[int]],
    degree: int,
    name: str = 'perm',
    *,
    order_cap: int = DEFAULT_ORDER_CAP,
) -> FiniteGroup:
    """Group generated by permutations of 0..degree-1, enumerated as the orbit of the identity.

    Products compose left to right: (a*b)(i) = b(a(i)).
    """
    gens = []
    for gen in generators:
        images = tuple(int(x) for x in gen)
        if sorted(images) != list(range(degree)):
            msg = f'{images} is not a permutation of {degree} points'
            raise GroupDefinitionError(msg)
        gens.append(images)

    identity = tuple(range(degree))
    elements = [identity]
    index = {identity: 0}
    parent = [0]
    via = [0]
    right_mult: list[list[int]] = []
    position = 0
    while position < len(elements):
        current = elements[position]
        row = []
        for g_index, gen in enumerate(gens):
            product = tuple(gen[point] for point in current)
            found = index.get(product)
            if found is None:
                if len(elements) >= order_cap:
                    msg = f'{name} has more than {order_cap} elements'
                    raise CapExceededError(msg, order_cap)
                found = len(elements)
                index[product] = found
                elements.append(product)
                parent.append(position)
                via.append(g_index)
            row.append(found)
        right_mult.append(row)
        position += 1

    n = len(elements)
    table = np.zeros((n, n), dtype=np.int32)
    table[:, 0] = np.arange(n)
    if gens:
        steps = np.array(right_mult, dtype=np.int32)
        # a*b = (a*parent(b))*g where b = parent(b)*g; parents precede children in BFS order
        for b in range(1, n):
            table[:, b] = steps[table[:, parent[b]], via[b]]
    logging.debug(f'closure of {len(gens)} generators on {degree} points has order {n}')
    labels = [render_permutation(p) for p in elements]
    group = FiniteGroup(name, table, labels, permutations=np.array(elements, dtype=np.int32).reshape(n, degree))
    if n > EXHAUSTIVE_ASSOCIATIVITY_CAP:
        _validate_table(table, EXHAUSTIVE_ASSOCIATIVITY_CAP, ASSOCIATIVITY_SAMPLES, 0)
    return group


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        msg = f'cyclic(n) needs n >= 1, got {n}'
        raise GroupDefinitionError(msg)
    ident = np.arange(n)
    table = (ident[:, None] + ident[None, :]) % n
    return from_cayley_table(table, f'cyclic({n})')


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, elements r^k s^e stored at index k + n*e."""
    if n < 1:
        msg = f'dihedral(n) needs n >= 1, got {n}'
        raise GroupDefinitionError(msg)
    k = np.arange(2 * n) % n
    e = np.arange(2 * n) // n
    sign = np.where(e == 1, -1, 1)
    rot = (k[:, None] + sign[:, None] * k[None, :]) % n
    ref = e[:, None] ^ e[None, :]
    table = rot + n * ref
    labels = []
    for index in range(2 * n):
        r = '' if k[index] == 0 else ('r' if k[index] == 1 else f'r^{k[index]}')
        s = 's' if e[index] else ''
        labels.append(r + s or '1')
    return from_cayley_table(table, f'dihedral({n})', labels)


def symmetric(n: int, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    if not 1 <= n <= 6:
        msg = f'symmetric(n) is available for 1 <= n <= 6, got {n}'
        raise GroupDefinitionError(msg)
    gens = []
    if n >= 2:
        swap = list(range(n))
        swap[0], swap[1] = 1, 0
        rotation = [(i + 1) % n for i in range(n)]
        gens = [swap, rotation]
    return from_permutations(gens, n, f'symmetric({n})', order_cap=order_cap)


def alternating(n: int, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    if not 1 <= n <= 6:
        msg = f'alternating(n) is available for 1 <= n <= 6, got {n}'
        raise GroupDefinitionError(msg)
    gens = []
    for third in range(2, n):
        images = list(range(n))
        images[0], images[1], images[third] = 1, third, 0
        gens.append(images)
    return from_permutations(gens, n, f'alternating({n})', order_cap=order_cap)


def quaternion8() -> FiniteGroup:
    # i, j as permutations of 8 points (regular representation)
    i_gen = [2, 3, 1, 0, 6, 7, 5, 4]
    j_gen = [4, 5, 7, 6, 1, 0, 2, 3]
    group = from_permutations([i_gen, j_gen], 8, 'quaternion8')
    index = {tuple(row): pos for pos, row in enumerate(group.permutations.tolist())}
    i = index[tuple(i_gen)]
    j = index[tuple(j_gen)]
    k = int(group.table[i, j])
    minus = int(group.table[i, i])
    labels = [''] * 8
    for element, name in ((0, '1'), (i, 'i'), (j, 'j'), (k, 'k')):
        labels[element] = name
        labels[int(group.table[minus, element])] = f'-{name}'
    group.labels = labels
    return group


def heisenberg(p: int) -> FiniteGroup:
    """Upper unitriangular 3x3 matrices over Z/p; (a, b, c) stored at a*p*p + b*p + c."""
    if not (isprime(p) and p <= 5):
        msg = f'heisenberg(p) needs a prime p <= 5, got {p}'
        raise GroupDefinitionError(msg)
    idx = np.arange(p**3)
    a, b, c = idx // (p * p), (idx // p) % p, idx % p
    na = (a[:, None] + a[None, :]) % p
    nb = (b[:, None] + b[None, :]) % p
    nc = (c[:, None] + c[None, :] + a[:, None] * b[None, :]) % p
    table = na * p * p + nb * p + nc
    labels = [f'({x},{y},{z})' for x, y, z in zip(a, b, c)]
    return from_cayley_table(table, f'heisenberg({p})', labels)


_CATALOG = {
    'cyclic': cyclic,
    'dihedral': dihedral,
    'symmetric': symmetric,
    'alternating': alternating,
    'heisenberg': heisenberg,
}

_CATALOG_ORDERS = {
    'cyclic': lambda n: n,
    'dihedral': lambda n: 2 * n,
    'symmetric': math.factorial,
    'alternating': lambda n: max(1, math.factorial(n) // 2),
    'heisenberg': lambda p: p**3,
}


def _check_order(name: str, order: int, order_cap: int):
    if order > order_cap:
        msg = f'{name} has order {order}, over the order cap {order_cap}'
        raise CapExceededError(msg, order_cap)


def builtin(name: str, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Catalog group by name, e.g. 'cyclic(6)' or 'quaternion8'; the order is checked before building."""
    match = _BUILTIN_RE.match(name.lower())
    if match is None:
        msg = f'unknown group {name!r}'
        raise GroupDefinitionError(msg)
    family, parameter = match.group(1), match.group(2)
    if family == 'quaternion8' and parameter is None:
        _check_order(family, 8, order_cap)
        return quaternion8()
    if family not in _CATALOG:
        msg = f'unknown group family {family!r}; known: {", ".join(sorted(_CATALOG))}, quaternion8'
        raise GroupDefinitionError(msg)
    if parameter is None:
        msg = f'{family} needs a parameter, e.g. {family}(3)'
        raise GroupDefinitionError(msg)
    n = int(parameter)
    _check_order(f'{family}({n})', _CATALOG_ORDERS[family](n), order_cap)
    return _CATALOG[family](n)


def parse_group_text(text: str, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Group definition file: 'name <string>', then 'table <order>' rows or 'perm <degree>' cycles."""
    lines = [(number, line.strip()) for number, line in enumerate(text.splitlines(), start=1)]
    lines = [(number, line) for number, line in lines if line and not line.startswith('#')]
    if not lines:
        msg = 'empty group definition'
        raise GroupDefinitionError(msg)
    number, first = lines[0]
    if not first.startswith('name'):
        msg = f'expected "name <string>", got {first!r}'
        raise GroupDefinitionError(msg, number)
    name = first[len('name') :].strip() or 'unnamed'
    if len(lines) < 2:
        msg = 'missing "table <order>" or "perm <degree>" line'
        raise GroupDefinitionError(msg, number)
    number, header = lines[1]
    parts = header.split()
    if len(parts) != 2 or parts[0] not in ('table', 'perm') or not parts[1].isdigit():
        msg = f'expected "table <order>" or "perm <degree>", got {header!r}'
        raise GroupDefinitionError(msg, number)
    size = int(parts[1])
    body = lines[2:]
    if parts[0] == 'table':
        if len(body) != size:
            msg = f'table of order {size} needs {size} rows, got {len(body)}'
            raise GroupDefinitionError(msg, number)
        rows = []
        for row_number, row in body:
            try:
                values = [int(token) for token in row.split()]
            except ValueError as error:
                msg = f'table rows hold integers, got {row!r}'
                raise GroupDefinitionError(msg, row_number) from error
            if len(values) != size:
                msg = f'row has {len(values)} entries, expected {size}'
                raise GroupDefinitionError(msg, row_number)
            rows.append(values)
        return from_cayley_table(rows, name)

    generators = []
    for row_number, row in body:
        try:
            generators.append(parse_cycles(row, size))
        except GroupDefinitionError as error:
            raise GroupDefinitionError(str(error), row_number) from error
    return from_permutations(generators, size, name, order_cap=order_cap)


def load_group_file(path: Path, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    return parse_group_text(Path(path).read_text(encoding='utf-8'), order_cap)


def load_group(source: str, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Group from a definition file if source names an existing file, else from the builtin catalog."""
    path = Path(source)
    if path.is_file():
        logging.debug(f'loading group file {path}')
        return load_group_file(path, order_cap)
    return builtin(source, order_cap)


def element_index(G: FiniteGroup, text: str) -> int:
    """Element from its label, '#k' or a bare index."""
    text = text.strip()
    if text in G.label_index:
        return G.label_index[text]
    if G.permutations is not None and text.startswith('('):
        images = parse_cycles(text, G.permutations.shape[1])
        matches = np.flatnonzero(np.all(G.permutations == np.array(images), axis=1))
        if len(matches):
            return int(matches[0])
    digits = text[1:] if text.startswith('#') else text
    if digits.isdigit() and int(digits) < G.order:
        return int(digits)
    msg = f'{text!r} is not an element of {G.name}'
    raise ValueError(msg)


def multiply(G: FiniteGroup, a, b):
    return G.table[a, b]


def commutator(G: FiniteGroup, a, b):
    """[a, b] = a^-1 b^-1 a b; works elementwise on index arrays."""
    inv = G.inverse
    return G.table[G.table[inv[a], inv[b]], G.table[a, b]]


def conjugate(G: FiniteGroup, a, g):
    """a^g = g^-1 a g; works elementwise on index arrays."""
    return G.table[G.table[G.inverse[g], a], g]


def centralizes(G: FiniteGroup, b: int, X: Iterable[int]) -> bool:
    xs = np.fromiter(X, dtype=np.intp)
    return bool(np.all(G.table[b, xs] == G.table[xs, b]))


def conjugacy_class(G: FiniteGroup, a: int) -> Subset:
    return Subset(G, frozenset(int(x) for x in np.unique(conjugate(G, a, G.elements()))))


def center(G: FiniteGroup) -> Subgroup:
    members = np.flatnonzero(np.all(G.table == G.table.T, axis=1))
    return Subgroup(G, frozenset(int(z) for z in members), normal=True)


def is_normal_subset(G: FiniteGroup, X: Iterable[int]) -> bool:
    xs = np.fromiter(X, dtype=np.intp)
    if not len(xs):
        return True
    inside = np.zeros(G.order, dtype=bool)
    inside[xs] = True
    images = conjugate(G, xs[:, None], G.elements()[None, :])
    return bool(np.all(inside[images]))


def is_inverse_closed(G: FiniteGroup, X: Iterable[int]) -> bool:
    xs = np.fromiter(X, dtype=np.intp)
    inside = np.zeros(G.order, dtype=bool)
    inside[xs] = True
    return bool(np.all(inside[G.inverse[xs]]))


def subgroup_generated(G: FiniteGroup, X: Iterable[int]) -> Subgroup:
    gens = np.unique(np.fromiter(X, dtype=np.intp))
    inside = np.zeros(G.order, dtype=bool)
    inside[0] = True
    frontier = np.array([0], dtype=np.intp)
    while len(frontier) and len(gens):
        products = np.unique(G.table[np.ix_(frontier, gens)])
        fresh = products[~inside[products]]
        inside[fresh] = True
        frontier = fresh
    members = frozenset(int(x) for x in np.flatnonzero(inside))
    return Subgroup(G, members, normal=is_normal_subset(G, members))


def _commutator_values(G: FiniteGroup, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    found = np.zeros(G.order, dtype=bool)
    for start in range(0, len(left), _BLOCK):
        block = left[start : start + _BLOCK]
        found[commutator(G, block[:, None], right[None, :]).ravel()] = True
    return np.flatnonzero(found)


def commutator_subgroup(G: FiniteGroup, H: Subset, K: Subset) -> Subgroup:
    """[H, K], generated by all [h, k]."""
    return subgroup_generated(G, _commutator_values(G, H.indices, K.indices))


def derived_subgroup(G: FiniteGroup, H: Optional[Subset] = None) -> Subgroup:
    H = whole(G) if H is None else H
    return commutator_subgroup(G, H, H)


def derived_series(G: FiniteGroup) -> list[Subgroup]:
    """G = G^(0) > G^(1) > ... until the series stabilises."""
    series = [whole(G)]
    while True:
        nxt = derived_subgroup(G, series[-1])
        if nxt == series[-1]:
            return series
        series.append(nxt)


def lower_central_series(G: FiniteGroup) -> list[Subgroup]:
    series = [whole(G)]
    everything = whole(G)
    while True:
        nxt = commutator_subgroup(G, series[-1], everything)
        if nxt == series[-1]:
            return series
        series.append(nxt)


def is_solvable(G: FiniteGroup) -> bool:
    return len(derived_series(G)[-1]) == 1


def derived_length(G: FiniteGroup) -> Optional[int]:
    series = derived_series(G)
    return len(series) - 1 if len(series[-1]) == 1 else None


def nilpotency_class(G: FiniteGroup) -> Optional[int]:
    series = lower_central_series(G)
    return len(series) - 1 if len(series[-1]) == 1 else None


def quotient(G: FiniteGroup, N: Subset) -> tuple[FiniteGroup, np.ndarray]:
    """G/N as a standalone group plus the projection element -> coset index."""
    normal_members = N.indices
    closed = bool(np.isin(G.table[np.ix_(normal_members, normal_members)], normal_members).all())
    if 0 not in N or not closed or not is_normal_subset(G, N.members):
        msg = f'{N.render()} is not a normal subgroup of {G.name}'
        raise ValueError(msg)
    projection = np.full(G.order, -1, dtype=np.int32)
    representatives: list[int] = []
    for g in range(G.order):
        if projection[g] >= 0:
            continue
        projection[G.table[g, normal_members]] = len(representatives)
        representatives.append(g)
    reps = np.array(representatives, dtype=np.intp)
    table = projection[G.table[np.ix_(reps, reps)]]
    labels = [f'{G.label(r)}N' if len(N) > 1 else G.label(r) for r in reps]
    factor = from_cayley_table(table, f'{G.name}/{len(N)}', labels)
    logging.debug(f'quotient of {G.name} by a normal subgroup of order {len(N)} has order {factor.order}')
    return factor, projection


def upper_central_series(G: FiniteGroup) -> list[Subgroup]:
    """Z_0 = 1, Z_{i+1}/Z_i = Z(G/Z_i), computed through quotients until stable."""
    series = [trivial(G)]
    while True:
        factor, projection = quotient(G, series[-1])
        factor_center = center(factor)
        members = frozenset(int(g) for g in np.flatnonzero(np.isin(projection, factor_center.indices)))
        nxt = Subgroup(G, members, normal=True)
        if nxt == series[-1]:
            return series
        series.append(nxt)


def subgroup_as_group(H: Subset) -> tuple[FiniteGroup, np.ndarray]:
    """Standalone copy of a subgroup plus the embedding of its elements into the parent."""
    G = H.group
    embedding = H.indices
    position = np.full(G.order, -1, dtype=np.int32)
    position[embedding] = np.arange(len(embedding))
    table = position[G.table[np.ix_(embedding, embedding)]]
    labels = [G.label(e) for e in embedding]
    return from_cayley_table(table, f'{G.name}[{len(H)}]', labels), embedding


@dataclass(frozen=True)
class IdentityFailure:
    identity: str
    witness: tuple[int, ...]


def _triples(G: FiniteGroup, exhaustive_cap: int, samples: int, seed: int) -> tuple[np.ndarray, ...]:
    n = G.order
    if n <= exhaustive_cap:
        grids = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing='ij')
        return tuple(grid.ravel() for grid in grids)
    rng = np.random.default_rng(seed)
    return tuple(rng.integers(0, n, size=(3, samples)))


def check_commutator_identities(
    G: FiniteGroup, exhaustive_cap: int = 60, samples: int = 10**5, seed: int = 0
) -> Optional[IdentityFailure]:
    """Check [xy,z] = [x,z]^y [y,z], [x,yz] = [x,z] [x,y]^z and [y,x] = [x,y]^-1 = [x^y,y^-1] = [x^-1,y^x]."""
    x, y, z = _triples(G, exhaustive_cap, samples, seed)
    mul = G.table
    inv = G.inverse
    xz = commutator(G, x, z)
    xy = commutator(G, x, y)
    checks = [
        ('[xy,z] = [x,z]^y [y,z]', commutator(G, mul[x, y], z), mul[conjugate(G, xz, y), commutator(G, y, z)]),
        ('[x,yz] = [x,z] [x,y]^z', commutator(G, x, mul[y, z]), mul[xz, conjugate(G, xy, z)]),
        ('[y,x] = [x,y]^-1', commutator(G, y, x), inv[commutator(G, x, y)]),
        ('[x,y]^-1 = [x^y,y^-1]', inv[commutator(G, x, y)], commutator(G, conjugate(G, x, y), inv[y])),
        ('[x,y]^-1 = [x^-1,y^x]', inv[commutator(G, x, y)], commutator(G, inv[x], conjugate(G, y, x))),
    ]
    for identity, left, right in checks:
        failing = np.flatnonzero(left != right)
        if len(failing):
            at = int(failing[0])
            witness = (int(x[at]), int(y[at]), int(z[at]))
            logging.warning(f'{identity} fails in {G.name} at {witness}')
            return IdentityFailure(identity, witness)
    logging.debug(f'commutator identities hold on {len(x)} triples of {G.name}')
    return None
