#!/usr/bin/env python3

import json
from collections.abc import Iterator, Mapping
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, TextIO

from commassoc.assoc_decide import EventualOutcome, EventualVerdict
from commassoc.config import OutputMode
from commassoc.finite_group import FiniteGroup
from commassoc.thompson_f import render_pair


def format_assignment(G: FiniteGroup, assignment: Optional[Mapping[str, int]]) -> str:
    if not assignment:
        return '-'
    return ', '.join(f'{name}={G.label(value)}' for name, value in assignment.items())


def verdict_text(G: FiniteGroup, verdict: EventualVerdict) -> str:
    pair = render_pair(verdict.pair)
    if verdict.outcome is EventualOutcome.YES:
        return f'{pair}: eventually satisfied, witness p={verdict.witness_p}'
    if verdict.outcome is EventualOutcome.BUDGET_EXCEEDED:
        return f'{pair}: budget exceeded'
    first = verdict.certificate[0].counterexample if verdict.certificate else None
    return (
        f'{pair}: not eventually satisfied, {len(verdict.certificate)} B_p sets fail; '
        f'counterexample {format_assignment(G, first)}'
    )


def verdict_record(G: FiniteGroup, verdict: EventualVerdict) -> dict[str, Any]:
    """Stable keys: group, pair, outcome, witness_p, counterexample."""
    return {
        'group': G.name,
        'pair': render_pair(verdict.pair),
        'outcome': verdict.outcome.value,
        'witness_p': verdict.witness_p,
        'counterexample': [
            {'p': entry.p, 'assignment': {name: G.label(v) for name, v in entry.counterexample.items()}}
            for entry in verdict.certificate
        ],
    }


@dataclass
class Reporter:
    """Writes one line per emitted item, either as text or as a JSON object with sorted keys."""

    stream: TextIO
    mode: OutputMode = OutputMode.TEXT
    lines: int = field(default=0, init=False)

    def emit(self, text: str, **record: Any):
        if self.mode is OutputMode.STRUCTURED:
            self.stream.write(json.dumps(record, sort_keys=True) + '\n')
        else:
            self.stream.write(text + '\n')
        self.lines += 1


@contextmanager
def open_reporter(output: Optional[str], mode: OutputMode, default: TextIO) -> Iterator[Reporter]:
    if output is None:
        yield Reporter(default, mode)
        return
    with Path(output).open('w', encoding='utf-8') as stream:
        yield Reporter(stream, mode)
