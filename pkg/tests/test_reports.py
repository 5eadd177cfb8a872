#!/usr/bin/env python3

import io
import json

from commassoc.assoc_decide import GENERATOR_PAIR, eventually_satisfies
from commassoc.config import OutputMode
from commassoc.reports import Reporter, format_assignment, open_reporter, verdict_record, verdict_text


def test_format_assignment(s3):
    """Test assignments are shown with element labels."""
    assert format_assignment(s3, {'x1': 1, 'x2': 2}) == 'x1=(1 2), x2=(1 2 3)'
    assert format_assignment(s3, {}) == '-'
    assert format_assignment(s3, None) == '-'


def test_verdict_text(s3, a5):
    """Test the one-line verdict summaries."""
    yes = eventually_satisfies(s3, GENERATOR_PAIR)
    assert verdict_text(s3, yes) == '((*,*),*) ; (*,(*,*)): eventually satisfied, witness p=1'
    no = eventually_satisfies(a5, GENERATOR_PAIR)
    assert verdict_text(a5, no).startswith('((*,*),*) ; (*,(*,*)): not eventually satisfied, 1 B_p sets fail')


def test_verdict_record(a5):
    """Test structured records use labels and stable keys."""
    record = verdict_record(a5, eventually_satisfies(a5, GENERATOR_PAIR))
    assert sorted(record) == ['counterexample', 'group', 'outcome', 'pair', 'witness_p']
    assert record['outcome'] == 'no'
    assert record['witness_p'] is None
    assert record['counterexample'][0]['p'] == 0
    assert set(record['counterexample'][0]['assignment']) == {'x1', 'x2', 'x3'}


def test_reporter_modes():
    """Test text and structured output."""
    text = io.StringIO()
    Reporter(text).emit('hello', ignored=1)
    assert text.getvalue() == 'hello\n'
    structured = io.StringIO()
    reporter = Reporter(structured, OutputMode.STRUCTURED)
    reporter.emit('hello', b=2, a=1)
    assert json.loads(structured.getvalue()) == {'a': 1, 'b': 2}
    assert structured.getvalue() == '{"a": 1, "b": 2}\n'
    assert reporter.lines == 1


def test_open_reporter(tmp_path):
    """Test reports go to a file when one is named."""
    target = tmp_path / 'out.txt'
    with open_reporter(str(target), OutputMode.TEXT, io.StringIO()) as reporter:
        reporter.emit('line')
    assert target.read_text(encoding='utf-8') == 'line\n'
    default = io.StringIO()
    with open_reporter(None, OutputMode.TEXT, default) as reporter:
        reporter.emit('line')
    assert default.getvalue() == 'line\n'
