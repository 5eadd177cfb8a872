#!/usr/bin/env python3

import logging
from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from typing import Optional

from commassoc.expr_eval import (
    DEFAULT_BUDGET,
    DEFAULT_SAMPLES,
    SAMPLE_THRESHOLD,
    Assignment,
    BpSequence,
    Outcome,
    Verdict,
    bp_sequence,
    bp_set,
    evaluate,
    expr_from_tree,
    satisfies,
)
from commassoc.finite_group import FiniteGroup, is_solvable, nilpotency_class, whole
from commassoc.thompson_f import TreePair, expand_pair, identity_pair, is_reduced, parse_pair, reduce_pair, render_pair
from commassoc.tree_core import (
    DEFAULT_HEIGHT_CAP,
    LEFT,
    CapExceededError,
    LeafPath,
    enumerate_trees,
    free_carets,
    full_tree,
    leaf_path,
)

DEFAULT_MAX_LEAVES = 7
GENERATOR_PAIR = parse_pair('((*,*),*) ; (*,(*,*))')


class EventualOutcome(Enum):
    YES = 'yes'
    NO = 'no'
    BUDGET_EXCEEDED = 'budget_exceeded'


@dataclass(frozen=True)
class Certificate:
    """One failing assignment for the set B_p."""

    p: int
    size: int
    counterexample: Assignment


@dataclass(frozen=True)
class EventualVerdict:
    pair: TreePair
    outcome: EventualOutcome
    witness_p: Optional[int] = None
    certificate: tuple[Certificate, ...] = ()


def _sides(pair: TreePair):
    return expr_from_tree(pair.source), expr_from_tree(pair.target)


def eventually_satisfies(
    G: FiniteGroup,
    pair: TreePair,
    *,
    sequence: Optional[BpSequence] = None,
    budget: int = DEFAULT_BUDGET,
    sample_threshold: int = SAMPLE_THRESHOLD,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    workers: int = 1,
    height_cap: int = DEFAULT_HEIGHT_CAP,
) -> EventualVerdict:
    """Does G satisfy some common expansion of pair?

    Yes(q) for the least q with B_q(G) |= s = t on the reduced pair (s, t); No once every distinct
    set of the B_p sequence fails. A set that runs over the budget is skipped: a later set may still
    give Yes, though q is then only the least among the decided sets. Otherwise the verdict is
    BUDGET_EXCEEDED.
    """
    reduced = reduce_pair(pair)
    s, t = _sides(reduced)
    sequence = bp_sequence(G, height_cap) if sequence is None else sequence
    certificate = []
    undecided = []
    for p, B in enumerate(sequence.distinct):
        verdict = satisfies(
            G, B, s, t, budget=budget, sample_threshold=sample_threshold, samples=samples, seed=seed, workers=workers
        )
        if verdict.holds:
            logging.debug(f'{render_pair(reduced)} holds on B_{p}({G.name})')
            return EventualVerdict(reduced, EventualOutcome.YES, p)
        if verdict.outcome is Outcome.BUDGET_EXCEEDED:
            undecided.append(p)
            continue
        certificate.append(Certificate(p, len(B), verdict.counterexample or {}))
    if undecided:
        logging.debug(f'{render_pair(reduced)} is undecided on B_p({G.name}) for p in {undecided}')
        return EventualVerdict(reduced, EventualOutcome.BUDGET_EXCEEDED)
    logging.debug(f'{render_pair(reduced)} fails on all {len(certificate)} distinct B_p sets of {G.name}')
    return EventualVerdict(reduced, EventualOutcome.NO, certificate=tuple(certificate))


def recheck_certificate(G: FiniteGroup, verdict: EventualVerdict, height_cap: int = DEFAULT_HEIGHT_CAP) -> bool:
    """Re-evaluate both sides at every certificate assignment; values must come from B_p and differ."""
    if verdict.outcome is not EventualOutcome.NO:
        return False
    s, t = _sides(verdict.pair)
    for entry in verdict.certificate:
        B = bp_set(G, entry.p, height_cap)
        if len(B) != entry.size or any(value not in B for value in entry.counterexample.values()):
            return False
        if evaluate(s, G, entry.counterexample) == evaluate(t, G, entry.counterexample):
            return False
    return True


def witness_expansion(pair: TreePair, q: int, height_cap: int = DEFAULT_HEIGHT_CAP) -> TreePair:
    """Common expansion hanging the full tree of height q from every leaf."""
    hangs = [(index, full_tree(q, height_cap)) for index in range(pair.leaf_count)] if q else []
    return expand_pair(pair, hangs)


def check_instance_direct(G: FiniteGroup, pair: TreePair, *, budget: int = DEFAULT_BUDGET, seed: int = 0) -> Verdict:
    """G |= s = t on the pair exactly as given."""
    s, t = _sides(pair)
    return satisfies(G, whole(G), s, t, budget=budget, seed=seed)


@dataclass(frozen=True)
class LeviResult:
    direct_assoc: bool
    class_le_2: bool

    @property
    def consistent(self) -> bool:
        return self.direct_assoc == self.class_le_2


def levi_check(G: FiniteGroup, *, budget: int = DEFAULT_BUDGET) -> LeviResult:
    """Associativity of the commutator against nilpotency class at most 2, computed independently."""
    direct = check_instance_direct(G, GENERATOR_PAIR, budget=budget)
    if direct.outcome is Outcome.BUDGET_EXCEEDED:
        msg = f'3-variable check on {G.name} exceeds the budget {budget}'
        raise CapExceededError(msg, budget)
    nil_class = nilpotency_class(G)
    return LeviResult(direct.holds, nil_class is not None and nil_class <= 2)


def enumerate_reduced_pairs(max_leaves: int, leaf_cap: int = DEFAULT_MAX_LEAVES) -> Iterator[TreePair]:
    """Non-identity reduced pairs with at most max_leaves leaves, by leaf count then tree text."""
    if max_leaves > leaf_cap:
        msg = f'max_leaves {max_leaves} exceeds the leaf cap {leaf_cap}'
        raise CapExceededError(msg, leaf_cap)
    identity = identity_pair()
    for n in range(1, max_leaves + 1):
        trees = enumerate_trees(n)
        for source in trees:
            for target in trees:
                pair = TreePair(source, target)
                if pair != identity and is_reduced(pair):
                    yield pair


@dataclass
class SurveyReport:
    group: str
    max_leaves: int
    verdicts: list[EventualVerdict] = field(default_factory=list)

    @property
    def counts(self) -> dict[str, int]:
        tally = {outcome.value: 0 for outcome in EventualOutcome}
        for verdict in self.verdicts:
            tally[verdict.outcome.value] += 1
        return tally


def assoc_survey(
    G: FiniteGroup,
    max_leaves: int,
    *,
    leaf_cap: int = DEFAULT_MAX_LEAVES,
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
    sample_threshold: int = SAMPLE_THRESHOLD,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    height_cap: int = DEFAULT_HEIGHT_CAP,
) -> SurveyReport:
    pairs = list(enumerate_reduced_pairs(max_leaves, leaf_cap))
    sequence = bp_sequence(G, height_cap)
    decide = partial(
        eventually_satisfies,
        G,
        sequence=sequence,
        budget=budget,
        sample_threshold=sample_threshold,
        samples=samples,
        seed=seed,
    )
    logging.debug(f'surveying {len(pairs)} reduced pairs over {G.name} with {workers} workers')
    if workers > 1 and len(pairs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(decide, pairs))
    else:
        verdicts = [decide(pair) for pair in pairs]
    return SurveyReport(G.name, max_leaves, verdicts)


@dataclass(frozen=True)
class MainTheoremEntry:
    group: str
    solvable: bool
    counts: dict[str, int]

    @property
    def consistent(self) -> bool:
        """A non-solvable group must not eventually satisfy any surveyed instance."""
        return self.solvable or self.counts[EventualOutcome.YES.value] == 0


@dataclass
class MainTheoremReport:
    max_leaves: int
    entries: list[MainTheoremEntry] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(entry.consistent for entry in self.entries)


def verify_main_theorem(groups: Sequence[FiniteGroup], max_leaves: int, **survey_options) -> MainTheoremReport:
    report = MainTheoremReport(max_leaves)
    for G in groups:
        survey = assoc_survey(G, max_leaves, **survey_options)
        entry = MainTheoremEntry(G.name, is_solvable(G), survey.counts)
        if not entry.consistent:
            logging.warning(f'{G.name} is not solvable but eventually satisfies a surveyed instance')
        report.entries.append(entry)
    return report


@dataclass(frozen=True)
class ProofVine:
    """Where the solvability argument grips a reduced pair.

    Leaves i and i+1 form the leftmost free caret of either tree; in the other tree their lowest
    common ancestor k has the leaf i as left child and a right child whose left spine has j carets
    down to leaf i+1, and k is the free caret of a vine of height m from the root.
    """

    i: int
    caret_in_source: bool
    ancestor: LeafPath
    j: int
    m: int


def proof_vine(pair: TreePair) -> ProofVine:
    if not is_reduced(pair):
        msg = f'{render_pair(pair)} is not reduced'
        raise ValueError(msg)
    if pair.leaf_count < 2:
        msg = 'the identity pair has no free caret'
        raise ValueError(msg)
    in_source = min(free_carets(pair.source)) <= min(free_carets(pair.target))
    holder, other = (pair.source, pair.target) if in_source else (pair.target, pair.source)
    i = min(free_carets(holder))
    left_path = leaf_path(other, i)
    right_path = leaf_path(other, i + 1)
    depth = 0
    while left_path[depth] == right_path[depth]:
        depth += 1
    spine = right_path[depth + 1 :]
    if len(left_path) != depth + 1 or any(step != LEFT for step in spine):
        msg = f'lowest common ancestor of leaves {i}, {i + 1} in {render_pair(pair)} does not hang leaf {i} left'
        raise ValueError(msg)
    return ProofVine(i, in_source, left_path[:depth], len(spine), depth + 1)
