#!/usr/bin/env python3

import itertools
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Optional

import numpy as np

from commassoc.expr_eval import (
    DEFAULT_SAMPLES,
    Assignment,
    CommCaret,
    ConstLeaf,
    TreeExpr,
    VarLeaf,
    evaluate_many,
    value_set,
)
from commassoc.finite_group import FiniteGroup, commutator, conjugate, whole
from commassoc.tree_core import LEFT, RIGHT, VineSpec

EXHAUSTIVE_LIMIT = 10**6
DEFAULT_SHAPE_CAP = 64

# Group word: (symbol, exponent) letters, exponent +1 or -1, freely reduced
Word = tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class VinePlacement:
    """Vine v_n with the symbol a at the side-child of its free caret and x1..xn bottom to top."""

    vine: VineSpec
    side: str = LEFT
    a: str = 'a'
    prefix: str = 'x'

    def __post_init__(self):
        if self.side not in (LEFT, RIGHT):
            msg = f'side must be L or R, got {self.side!r}'
            raise ValueError(msg)

    @property
    def n(self) -> int:
        return self.vine.n

    @property
    def symbols(self) -> list[str]:
        return [self.a] + [f'{self.prefix}{i}' for i in range(1, self.n + 1)]

    @property
    def directions(self) -> tuple[str, ...]:
        """Bottom-up: L when level i reads [W, x_i], R when it reads [x_i, W]."""
        return (self.side,) + tuple(reversed(self.vine.turns))


def vine_expr(pl: VinePlacement) -> TreeExpr:
    expr: TreeExpr = VarLeaf(pl.a)
    for i, direction in enumerate(pl.directions, start=1):
        x = VarLeaf(f'{pl.prefix}{i}')
        expr = CommCaret(expr, x) if direction == LEFT else CommCaret(x, expr)
    return expr


def all_vines(n: int) -> list[VineSpec]:
    return [VineSpec(n, turns) for turns in itertools.product((LEFT, RIGHT), repeat=n - 1)]


def reduce_word(letters: Sequence[tuple[str, int]]) -> Word:
    stack: list[tuple[str, int]] = []
    for symbol, exponent in letters:
        if stack and stack[-1] == (symbol, -exponent):
            stack.pop()
        else:
            stack.append((symbol, exponent))
    return tuple(stack)


def invert_word(w: Word) -> Word:
    return tuple((symbol, -exponent) for symbol, exponent in reversed(w))


def commutator_word(u: Word, v: Word) -> Word:
    return reduce_word(invert_word(u) + invert_word(v) + u + v)


def expr_word(e: TreeExpr) -> Word:
    if isinstance(e, VarLeaf):
        return ((e.name, 1),)
    if isinstance(e, ConstLeaf):
        msg = 'constants have no symbolic word'
        raise ValueError(msg)
    return commutator_word(expr_word(e.left), expr_word(e.right))


def conjugated_word(symbol: str, by: Word) -> Word:
    """symbol^by = by^-1 symbol by."""
    return reduce_word(invert_word(by) + ((symbol, 1),) + by)


def render_word(w: Word) -> str:
    if not w:
        return '1'
    return ' '.join(symbol if exponent == 1 else f'{symbol}^-1' for symbol, exponent in w)


def word_values(w: Word, G: FiniteGroup, columns: Mapping[str, np.ndarray]) -> np.ndarray:
    shapes = [np.shape(col) for col in columns.values()]
    acc = np.zeros(np.broadcast_shapes(*shapes) if shapes else (), dtype=np.intp)
    for symbol, exponent in w:
        value = np.asarray(columns[symbol])
        acc = G.table[acc, value if exponent == 1 else G.inverse[value]]
    return acc


@dataclass(frozen=True)
class RewriteResult:
    """v(a, x) = l(a^e0, x1^(c1), ..., xn^(cn)) = l(a, x1^(h1), ..., xn^(hn))^sign."""

    placement: VinePlacement
    exponents: tuple[int, ...]
    bar_conjugators: tuple[Word, ...]
    sign: int
    hat_conjugators: tuple[Word, ...]
    steps: tuple[str, ...]

    @property
    def a_exponent(self) -> int:
        return self.exponents[0]


def rewrite_to_left_vine(pl: VinePlacement) -> RewriteResult:
    """Rewrite a vine placement as a left vine with conjugated variables.

    Walks from the root down with the exponent of the current subexpression W_i, starting at +1:
    [W, x]^+1 stays, [W, x]^-1 = [W^-1, x^W], [x, W]^+1 = [W^-1, x^W], [x, W]^-1 = [W, x].
    The exponent reaching a decides the bar form; when it is -1 the inverse is pulled back out
    level by level with [a^-1, y] = [a, y^(a^-1)]^-1.
    """
    n = pl.n
    directions = pl.directions
    subexpressions: list[TreeExpr] = [VarLeaf(pl.a)]
    for i, direction in enumerate(directions, start=1):
        x = VarLeaf(f'{pl.prefix}{i}')
        below = subexpressions[-1]
        subexpressions.append(CommCaret(below, x) if direction == LEFT else CommCaret(x, below))

    exponents = [0] * (n + 1)
    exponents[n] = 1
    bar: list[Word] = [()] * n
    steps = []
    for i in range(n, 0, -1):
        direction, eps = directions[i - 1], exponents[i]
        flips = (direction == LEFT) == (eps == -1)
        exponents[i - 1] = -1 if (direction == RIGHT) == (eps == 1) else 1
        if flips:
            bar[i - 1] = expr_word(subexpressions[i - 1])
        steps.append(
            f'level {i}: {"[W,x]" if direction == LEFT else "[x,W]"}^{eps:+d} -> '
            f'[W^{exponents[i - 1]:+d},x{i}{"^W" if flips else ""}]'
        )

    if exponents[0] == 1:
        return RewriteResult(pl, tuple(exponents), tuple(bar), 1, tuple(bar), tuple(steps))

    hat: list[Word] = []
    z: Word = ((pl.a, 1),)
    for i in range(1, n + 1):
        # z = Z_{i-1}; the i-th pull-out conjugates by its inverse
        conj = reduce_word(bar[i - 1] + invert_word(z))
        hat.append(conj)
        z = commutator_word(z, conjugated_word(f'{pl.prefix}{i}', conj))
    steps.append(f'pull a^-1 out through {n} levels')
    logging.debug(f'rewrote vine {"".join(pl.vine.turns)} side {pl.side} with exponents {exponents}')
    return RewriteResult(pl, tuple(exponents), tuple(bar), -1, tuple(hat), tuple(steps))


def _power(symbol: str, exponent: int) -> str:
    return symbol if exponent == 1 else f'{symbol}^-1'


def render_rewrite(result: RewriteResult, form: str = 'bar') -> str:
    """Left vine text with conjugates written as x3^(w)."""
    pl = result.placement
    if form == 'bar':
        text, conjugators, sign = _power(pl.a, result.a_exponent), result.bar_conjugators, 1
    else:
        text, conjugators, sign = pl.a, result.hat_conjugators, result.sign
    for i, conj in enumerate(conjugators, start=1):
        x = f'{pl.prefix}{i}'
        text = f'[{text},{x if not conj else f"{x}^({render_word(conj)})"}]'
    return text if sign == 1 else f'{text}^-1'


@dataclass(frozen=True)
class SignedExpr:
    """Left vine over conjugated variables raised to a formal exponent."""

    a_exponent: int
    conjugators: tuple[Word, ...]
    exponent: int


def as_signed(result: RewriteResult, form: str = 'bar') -> SignedExpr:
    if form == 'bar':
        return SignedExpr(result.a_exponent, result.bar_conjugators, 1)
    return SignedExpr(1, result.hat_conjugators, result.sign)


def evaluate_signed(
    e: SignedExpr, pl: VinePlacement, G: FiniteGroup, columns: Mapping[str, np.ndarray]
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Value of e plus the values substituted for x1..xn."""
    a = np.asarray(columns[pl.a])
    acc = a if e.a_exponent == 1 else G.inverse[a]
    substituted = []
    for i, conj in enumerate(e.conjugators, start=1):
        value = conjugate(G, np.asarray(columns[f'{pl.prefix}{i}']), word_values(conj, G, columns))
        substituted.append(value)
        acc = commutator(G, acc, value)
    return (acc if e.exponent == 1 else G.inverse[acc]), substituted


@dataclass(frozen=True)
class RewriteCheck:
    ok: bool
    checked: int
    exhaustive: bool
    failure: Optional[Assignment] = None
    reason: str = ''


def class_ids(G: FiniteGroup) -> np.ndarray:
    """Smallest element of each conjugacy class, per element."""
    elements = G.elements()
    return conjugate(G, elements[:, None], elements[None, :]).min(axis=1)


def verify_rewrite(
    G: FiniteGroup,
    pl: VinePlacement,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
) -> RewriteCheck:
    """Evaluate the vine and both left-vine forms on the same assignments; substituted values must be conjugates."""
    result = rewrite_to_left_vine(pl)
    symbols = pl.symbols
    total = G.order ** len(symbols)
    exhaustive = total <= exhaustive_limit
    if exhaustive:
        digits = np.unravel_index(np.arange(total, dtype=np.int64), (G.order,) * len(symbols))
    else:
        digits = tuple(np.random.default_rng(seed).integers(0, G.order, size=(len(symbols), samples)))
    columns = {symbol: np.asarray(d, dtype=np.intp) for symbol, d in zip(symbols, digits)}
    checked = len(columns[pl.a])
    original = evaluate_many(vine_expr(pl), G, columns)
    classes = class_ids(G)

    for form in ('bar', 'hat'):
        value, substituted = evaluate_signed(as_signed(result, form), pl, G, columns)
        bad = np.flatnonzero(value != original)
        reason = f'{form} form differs from the vine'
        for i, sub in enumerate(substituted, start=1):
            if len(bad):
                break
            bad = np.flatnonzero(classes[sub] != classes[columns[f'{pl.prefix}{i}']])
            reason = f'{form} value for {pl.prefix}{i} is not a conjugate'
        if len(bad):
            at = int(bad[0])
            failure = {symbol: int(col[at]) for symbol, col in columns.items()}
            logging.warning(f'rewrite check failed on {G.name}: {reason} at {failure}')
            return RewriteCheck(False, checked, exhaustive, failure, reason)
    return RewriteCheck(True, checked, exhaustive)


def _with_constant(pl: VinePlacement, a: int) -> TreeExpr:
    def swap(node: TreeExpr) -> TreeExpr:
        if isinstance(node, VarLeaf) and node.name == pl.a:
            return ConstLeaf(a)
        if isinstance(node, CommCaret):
            return CommCaret(swap(node.left), swap(node.right))
        return node

    return swap(vine_expr(pl))


def vine_values(G: FiniteGroup, pl: VinePlacement, a: int) -> np.ndarray:
    """All values of the placement with a fixed and x1..xn ranging over G."""
    return value_set(_with_constant(pl, a), G, whole(G)).indices


@dataclass(frozen=True)
class CentralizeReport:
    ok: bool
    hypotheses: int
    failure: Optional[tuple[int, int, int, str, str]] = None


def check_centralize_propagation(
    G: FiniteGroup, j: int, multiples: Sequence[int], shape_cap: int = DEFAULT_SHAPE_CAP
) -> CentralizeReport:
    """For n = qj: whenever b centralizes every l_n(a, u), it centralizes every v_{n,l}(a, u) and v_{n,r}(a, u).

    failure is (a, b, n, turns, side) for the first vine value b does not commute with.
    """
    if j < 1:
        msg = f'j must be positive, got {j}'
        raise ValueError(msg)
    commute = G.table == G.table.T
    hypotheses = 0
    for q in multiples:
        n = q * j
        shapes = all_vines(n)[:shape_cap]
        for a in range(G.order):
            left = vine_values(G, VinePlacement(VineSpec.left(n)), a)
            centralizers = np.flatnonzero(np.all(commute[:, left], axis=1))
            hypotheses += len(centralizers)
            for vine, side in itertools.product(shapes, (LEFT, RIGHT)):
                values = vine_values(G, VinePlacement(vine, side), a)
                fails = ~np.all(commute[np.ix_(centralizers, values)], axis=1)
                if np.any(fails):
                    b = int(centralizers[np.flatnonzero(fails)[0]])
                    logging.warning(f'{G.name}: b={b} centralizes l_{n}({a}, u) but not a {side} vine value')
                    return CentralizeReport(False, hypotheses, (a, b, n, ''.join(vine.turns), side))
    return CentralizeReport(True, hypotheses)
