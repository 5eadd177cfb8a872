#!/usr/bin/env python3

import logging
import re
from collections.abc import Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import partial
from typing import Optional, Union

import numpy as np

from commassoc.finite_group import (
    FiniteGroup,
    Subgroup,
    Subset,
    center,
    commutator,
    derived_series,
    is_inverse_closed,
    is_normal_subset,
    quotient,
    subgroup_generated,
    whole,
)
from commassoc.tree_core import DEFAULT_HEIGHT_CAP, LEAF, BinaryTree, Caret, CapExceededError, Leaf, full_tree

DEFAULT_BUDGET = 10**10
SAMPLE_THRESHOLD = 10**6
DEFAULT_SAMPLES = 10**4
CHUNK = 1 << 16
# Contiguous chunks handed to one worker task
TASK_CHUNKS = 8
PARALLEL_THRESHOLD = 1 << 20

_VAR_RE = re.compile(r'x[0-9]+')
_INT_RE = re.compile(r'[0-9]+')


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f'{message} at offset {offset}')
        self.offset = offset


class UnboundVariableError(KeyError):
    pass


@dataclass(frozen=True)
class VarLeaf:
    name: str


@dataclass(frozen=True)
class ConstLeaf:
    element: int


@dataclass(frozen=True)
class CommCaret:
    left: 'TreeExpr'
    right: 'TreeExpr'


TreeExpr = Union[VarLeaf, ConstLeaf, CommCaret]
Assignment = dict[str, int]


class Outcome(Enum):
    HOLDS = 'holds'
    FAILS = 'fails'
    BUDGET_EXCEEDED = 'budget_exceeded'


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    counterexample: Optional[Assignment] = None
    evaluations: int = 0
    # True when the counterexample is not from the ordered search, so it need not be the least one
    sampled: bool = False

    @property
    def holds(self) -> bool:
        return self.outcome is Outcome.HOLDS


def parse_expr(text: str, G: Optional[FiniteGroup] = None) -> TreeExpr:
    """Parse expr := var | '#' int | '[' expr ',' expr ']' with variables x1, x2, ...

    With G given, constants are range-checked against it.
    """
    expr, pos = _parse_at(text, _skip(text, 0))
    pos = _skip(text, pos)
    if pos != len(text):
        raise ExprSyntaxError(f'unexpected {text[pos]!r} after expression', pos)
    if G is not None:
        for element in constants(expr):
            if element >= G.order:
                msg = f'unknown constant #{element}: {G.name} has order {G.order}'
                raise ExprSyntaxError(msg, text.find(f'#{element}'))
    return expr


def _skip(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _parse_at(text: str, pos: int) -> tuple[TreeExpr, int]:
    pos = _skip(text, pos)
    if pos >= len(text):
        raise ExprSyntaxError('expected expression, got end of input', pos)
    if text[pos] == '[':
        left, pos = _parse_at(text, pos + 1)
        pos = _skip(text, pos)
        if pos >= len(text) or text[pos] != ',':
            raise ExprSyntaxError('expected ","', pos)
        right, pos = _parse_at(text, pos + 1)
        pos = _skip(text, pos)
        if pos >= len(text) or text[pos] != ']':
            raise ExprSyntaxError('expected "]"', pos)
        return CommCaret(left, right), pos + 1
    if text[pos] == '#':
        match = _INT_RE.match(text, pos + 1)
        if match is None:
            raise ExprSyntaxError('expected element index after "#"', pos + 1)
        return ConstLeaf(int(match.group())), match.end()
    match = _VAR_RE.match(text, pos)
    if match is None:
        raise ExprSyntaxError(f'expected variable, constant or "[", got {text[pos]!r}', pos)
    return VarLeaf(match.group()), match.end()


def render_expr(e: TreeExpr) -> str:
    if isinstance(e, VarLeaf):
        return e.name
    if isinstance(e, ConstLeaf):
        return f'#{e.element}'
    return f'[{render_expr(e.left)},{render_expr(e.right)}]'


def expr_from_tree(t: BinaryTree, prefix: str = 'x', start: int = 1) -> TreeExpr:
    """Label the leaves of t with prefix+start, prefix+(start+1), ... from left to right."""
    counter = [start]

    def build(node: BinaryTree) -> TreeExpr:
        if isinstance(node, Leaf):
            var = VarLeaf(f'{prefix}{counter[0]}')
            counter[0] += 1
            return var
        return CommCaret(build(node.left), build(node.right))

    return build(t)


def shape(e: TreeExpr) -> BinaryTree:
    if isinstance(e, CommCaret):
        return Caret(shape(e.left), shape(e.right))
    return LEAF


def _leaves(e: TreeExpr) -> list[Union[VarLeaf, ConstLeaf]]:
    if isinstance(e, CommCaret):
        return _leaves(e.left) + _leaves(e.right)
    return [e]


def variables(e: TreeExpr) -> list[str]:
    """Distinct variable names in order of first occurrence, left to right."""
    names: list[str] = []
    for leaf in _leaves(e):
        if isinstance(leaf, VarLeaf) and leaf.name not in names:
            names.append(leaf.name)
    return names


def constants(e: TreeExpr) -> list[int]:
    return [leaf.element for leaf in _leaves(e) if isinstance(leaf, ConstLeaf)]


def is_linear(e: TreeExpr) -> bool:
    """No variable occurs twice."""
    names = [leaf.name for leaf in _leaves(e) if isinstance(leaf, VarLeaf)]
    return len(names) == len(set(names))


def _check_constant(G: FiniteGroup, element: int):
    if not 0 <= element < G.order:
        msg = f'constant #{element} is not an element of {G.name}'
        raise ValueError(msg)


def evaluate(e: TreeExpr, G: FiniteGroup, a: Mapping[str, int]) -> int:
    if isinstance(e, VarLeaf):
        if e.name not in a:
            raise UnboundVariableError(e.name)
        return int(a[e.name])
    if isinstance(e, ConstLeaf):
        _check_constant(G, e.element)
        return e.element
    return int(commutator(G, evaluate(e.left, G, a), evaluate(e.right, G, a)))


def evaluate_many(e: TreeExpr, G: FiniteGroup, columns: Mapping[str, np.ndarray]) -> np.ndarray:
    """Evaluate e on many assignments at once; columns maps each variable to an array of elements."""
    shapes = [np.shape(col) for col in columns.values()]
    target = np.broadcast_shapes(*shapes) if shapes else ()

    def walk(node: TreeExpr):
        if isinstance(node, VarLeaf):
            if node.name not in columns:
                raise UnboundVariableError(node.name)
            return np.asarray(columns[node.name])
        if isinstance(node, ConstLeaf):
            _check_constant(G, node.element)
            return np.intp(node.element)
        return commutator(G, walk(node.left), walk(node.right))

    return np.broadcast_to(walk(e), target)


def _joint_variables(s: TreeExpr, t: TreeExpr) -> list[str]:
    names = variables(s)
    return names + [name for name in variables(t) if name not in names]


def _first_failure(
    G: FiniteGroup, s: TreeExpr, t: TreeExpr, names: list[str], xs: np.ndarray, start: int, stop: int
) -> Optional[int]:
    """Least flat assignment index in [start, stop) where s and t differ."""
    radix = (len(xs),) * len(names)
    for low in range(start, stop, CHUNK):
        flat = np.arange(low, min(low + CHUNK, stop), dtype=np.int64)
        digits = np.unravel_index(flat, radix)
        columns = {name: xs[digit] for name, digit in zip(names, digits)}
        bad = np.flatnonzero(evaluate_many(s, G, columns) != evaluate_many(t, G, columns))
        if len(bad):
            return int(flat[bad[0]])
    return None


def _assignment(names: list[str], xs: np.ndarray, flat: int) -> Assignment:
    digits = np.unravel_index(flat, (len(xs),) * len(names))
    return {name: int(xs[digit]) for name, digit in zip(names, digits)}


def _search_parallel(
    G: FiniteGroup, s: TreeExpr, t: TreeExpr, names: list[str], xs: np.ndarray, total: int, workers: int
) -> Optional[int]:
    span = CHUNK * TASK_CHUNKS
    scan = partial(_first_failure, G, s, t, names, xs)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # Waves of contiguous ranges; the first failing range of a wave holds the least failure
        for wave in range(0, total, span * workers):
            starts = list(range(wave, min(wave + span * workers, total), span))
            stops = [min(start + span, total) for start in starts]
            for found in pool.map(scan, starts, stops):
                if found is not None:
                    return found
    return None


def _constant_side(s: TreeExpr, t: TreeExpr) -> Optional[tuple[TreeExpr, int]]:
    if isinstance(t, ConstLeaf) and is_linear(s):
        return s, t.element
    if isinstance(s, ConstLeaf) and is_linear(t):
        return t, s.element
    return None


def _linear_values(e: TreeExpr, G: FiniteGroup, xs: np.ndarray) -> np.ndarray:
    if isinstance(e, VarLeaf):
        return xs
    if isinstance(e, ConstLeaf):
        _check_constant(G, e.element)
        return np.array([e.element], dtype=np.intp)
    left = _linear_values(e.left, G, xs)
    right = _linear_values(e.right, G, xs)
    if not len(left) or not len(right):
        return np.array([], dtype=np.intp)
    return np.unique(commutator(G, left[:, None], right[None, :]))


def _realize(e: TreeExpr, G: FiniteGroup, xs: np.ndarray, value: int) -> Assignment:
    """Some assignment of the linear expression e taking the given value."""
    if isinstance(e, VarLeaf):
        return {e.name: int(value)}
    if isinstance(e, ConstLeaf):
        return {}
    left = _linear_values(e.left, G, xs)
    right = _linear_values(e.right, G, xs)
    i, k = np.argwhere(commutator(G, left[:, None], right[None, :]) == value)[0]
    found = _realize(e.left, G, xs, int(left[i]))
    found.update(_realize(e.right, G, xs, int(right[k])))
    return found


def satisfies(
    G: FiniteGroup,
    X: Subset,
    s: TreeExpr,
    t: TreeExpr,
    *,
    budget: int = DEFAULT_BUDGET,
    sample_threshold: int = SAMPLE_THRESHOLD,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    workers: int = 1,
) -> Verdict:
    """Does every assignment of X-values to the variables make s and t equal?

    Assignments are searched as a mixed-radix counter over X in index order, first variable most
    significant, so a completed search reports the lexicographically least counterexample.
    Spaces above sample_threshold get a random pre-pass that can only find counterexamples;
    spaces above budget end in BUDGET_EXCEEDED unless that pre-pass fails them.
    """
    names = _joint_variables(s, t)
    xs = X.indices
    total = len(xs) ** len(names)
    if not names:
        equal = evaluate(s, G, {}) == evaluate(t, G, {})
        return Verdict(Outcome.HOLDS if equal else Outcome.FAILS, None if equal else {}, 1)
    if total == 0:
        return Verdict(Outcome.HOLDS)

    if total > sample_threshold:
        linear = _constant_side(s, t)
        if linear is not None:
            side, value = linear
            values = _linear_values(side, G, xs)
            others = values[values != value]
            logging.debug(f'linear side {render_expr(side)} takes {len(values)} values')
            if not len(others):
                return Verdict(Outcome.HOLDS)
            witness = _realize(side, G, xs, int(others[0]))
            full = {name: witness.get(name, int(xs[0])) for name in names}
            return Verdict(Outcome.FAILS, full, sampled=True)

        rng = np.random.default_rng(seed)
        digits = rng.integers(0, len(xs), size=(len(names), samples))
        columns = {name: xs[digit] for name, digit in zip(names, digits)}
        bad = np.flatnonzero(evaluate_many(s, G, columns) != evaluate_many(t, G, columns))
        if len(bad):
            at = int(bad[0])
            logging.debug(f'sampling found a counterexample after {at + 1} of {samples} samples')
            return Verdict(Outcome.FAILS, {name: int(col[at]) for name, col in columns.items()}, at + 1, True)

    if total > budget:
        logging.warning(f'{total} assignments exceed the evaluation budget {budget}')
        return Verdict(Outcome.BUDGET_EXCEEDED, evaluations=min(total, samples) if total > sample_threshold else 0)

    if workers > 1 and total > PARALLEL_THRESHOLD:
        found = _search_parallel(G, s, t, names, xs, total, workers)
    else:
        found = _first_failure(G, s, t, names, xs, 0, total)
    if found is None:
        return Verdict(Outcome.HOLDS, evaluations=total)
    return Verdict(Outcome.FAILS, _assignment(names, xs, found), found + 1)


def value_set(e: TreeExpr, G: FiniteGroup, X: Subset, budget: int = DEFAULT_BUDGET) -> Subset:
    """All values of e with variables ranging over X."""
    xs = X.indices
    if is_linear(e):
        values = _linear_values(e, G, xs)
    else:
        names = variables(e)
        total = len(xs) ** len(names)
        if total > budget:
            msg = f'value set of {render_expr(e)} needs {total} evaluations, over the budget {budget}'
            raise CapExceededError(msg, budget)
        found = np.zeros(G.order, dtype=bool)
        radix = (len(xs),) * len(names)
        for low in range(0, total, CHUNK):
            digits = np.unravel_index(np.arange(low, min(low + CHUNK, total), dtype=np.int64), radix)
            found[evaluate_many(e, G, {name: xs[d] for name, d in zip(names, digits)}).ravel()] = True
        values = np.flatnonzero(found)
    return Subset(G, frozenset(int(v) for v in values))


def full_tree_expr(p: int, height_cap: int = DEFAULT_HEIGHT_CAP) -> TreeExpr:
    return expr_from_tree(full_tree(p, height_cap))


def bp_step(G: FiniteGroup, B: Subset) -> Subset:
    """{[a, b] : a, b in B}."""
    return value_set(CommCaret(VarLeaf('x1'), VarLeaf('x2')), G, B)


def bp_set(G: FiniteGroup, p: int, height_cap: int = DEFAULT_HEIGHT_CAP) -> Subset:
    """Values of the full-tree commutator of height p; bp_set(G, 0) is G."""
    if p < 0:
        msg = f'p must be non-negative, got {p}'
        raise ValueError(msg)
    if p > height_cap:
        msg = f'height {p} exceeds the height cap {height_cap}'
        raise CapExceededError(msg, height_cap)
    current: Subset = whole(G)
    for _ in range(p):
        current = bp_step(G, current)
    return current


@dataclass(frozen=True)
class BpSequence:
    """B_0, B_1, ... up to and including the first set that repeats an earlier one."""

    sets: list[Subset]
    cycle_start: int

    @property
    def distinct(self) -> list[Subset]:
        return self.sets[:-1]


def bp_sequence(G: FiniteGroup, height_cap: int = DEFAULT_HEIGHT_CAP) -> BpSequence:
    sets: list[Subset] = [whole(G)]
    seen = {sets[0].members: 0}
    while True:
        if len(sets) > height_cap:
            msg = f'B_p sequence of {G.name} does not repeat within the height cap {height_cap}'
            raise CapExceededError(msg, height_cap)
        nxt = bp_step(G, sets[-1])
        sets.append(nxt)
        if nxt.members in seen:
            logging.debug(f'B_p sequence of {G.name}: sizes {[len(b) for b in sets]}, cycle at {seen[nxt.members]}')
            return BpSequence(sets, seen[nxt.members])
        seen[nxt.members] = len(sets) - 1


def map_constants(e: TreeExpr, projection: np.ndarray) -> TreeExpr:
    """Replace every constant by its image, e.g. its coset under a quotient projection."""
    if isinstance(e, ConstLeaf):
        return ConstLeaf(int(projection[e.element]))
    if isinstance(e, CommCaret):
        return CommCaret(map_constants(e.left, projection), map_constants(e.right, projection))
    return e


def hang_expr(t: TreeExpr, hangs: Sequence[BinaryTree], prefix: str = 'y') -> TreeExpr:
    """Hang hangs[k] below the k-th variable leaf of t, each with fresh variables."""
    slots = sum(isinstance(leaf, VarLeaf) for leaf in _leaves(t))
    if len(hangs) != slots:
        msg = f'{render_expr(t)} has {slots} variable leaves, got {len(hangs)} trees to hang'
        raise ValueError(msg)
    queue = list(hangs)
    counter = [1]

    def build(node: TreeExpr) -> TreeExpr:
        if isinstance(node, VarLeaf):
            hung = expr_from_tree(queue.pop(0), prefix, counter[0])
            counter[0] += len(variables(hung))
            return hung
        if isinstance(node, CommCaret):
            return CommCaret(build(node.left), build(node.right))
        return node

    return build(t)


@dataclass(frozen=True)
class PassingReport:
    hypothesis: bool
    on_bp: bool
    on_derived: bool

    @property
    def consistent(self) -> bool:
        return not self.hypothesis or (self.on_bp and self.on_derived)


def check_passing_to_derived(
    G: FiniteGroup, t: TreeExpr, p: int, hangs: Sequence[BinaryTree], budget: int = DEFAULT_BUDGET
) -> PassingReport:
    """G |= t' = 1 for t' = t with hangs of height at most p, against B_p(G) |= t = 1 and G^(p) |= t = 1."""
    tall = [h for h in hangs if h.height > p]
    if tall:
        msg = f'hung trees must have height at most {p}, got {tall[0].height}'
        raise ValueError(msg)
    one = ConstLeaf(0)
    hung = hang_expr(t, hangs)
    hypothesis = satisfies(G, whole(G), hung, one, budget=budget).holds
    on_bp = satisfies(G, bp_set(G, p), t, one, budget=budget).holds
    series = derived_series(G)
    derived = series[min(p, len(series) - 1)]
    on_derived = satisfies(G, derived, t, one, budget=budget).holds
    report = PassingReport(hypothesis, on_bp, on_derived)
    logging.debug(f'passing to derived for {render_expr(t)} with p={p}: {report}')
    return report


def fresh_variable(*exprs: TreeExpr) -> VarLeaf:
    used = [int(name[1:]) for e in exprs for name in variables(e) if _VAR_RE.fullmatch(name)]
    return VarLeaf(f'x{max(used, default=0) + 1}')


@dataclass(frozen=True)
class ModCenterReport:
    quotient: bool
    right: bool
    left: bool

    @property
    def consistent(self) -> bool:
        return self.quotient == self.right == self.left


def check_mod_center(G: FiniteGroup, s: TreeExpr, t: TreeExpr, budget: int = DEFAULT_BUDGET) -> ModCenterReport:
    """G/Z(G) |= s = t, G |= [s,x] = [t,x] and G |= [x,s] = [x,t] for a fresh x."""
    factor, projection = quotient(G, center(G))
    on_quotient = satisfies(
        factor, whole(factor), map_constants(s, projection), map_constants(t, projection), budget=budget
    ).holds
    x = fresh_variable(s, t)
    right = satisfies(G, whole(G), CommCaret(s, x), CommCaret(t, x), budget=budget).holds
    left = satisfies(G, whole(G), CommCaret(x, s), CommCaret(x, t), budget=budget).holds
    return ModCenterReport(on_quotient, right, left)


@dataclass(frozen=True)
class BpStructure:
    normal: bool
    inverse_closed: bool
    generates: bool

    @property
    def holds(self) -> bool:
        return self.normal and self.inverse_closed and self.generates


def check_bp_structure(G: FiniteGroup, p: int) -> BpStructure:
    """B_p(G) is normal, closed under inverses, and generates G^(p)."""
    B = bp_set(G, p)
    series = derived_series(G)
    derived: Subgroup = series[min(p, len(series) - 1)]
    return BpStructure(
        is_normal_subset(G, B.members),
        is_inverse_closed(G, B.members),
        subgroup_generated(G, B.members) == derived,
    )
