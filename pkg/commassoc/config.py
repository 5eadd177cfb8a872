#!/usr/bin/env python3

__all__ = [
    'OutputMode',
    'RunConfig',
    'default_field_value',
    'get_option',
]

import ast
import dataclasses
import json
import os
from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

from commassoc.assoc_decide import DEFAULT_MAX_LEAVES
from commassoc.expr_eval import DEFAULT_BUDGET, DEFAULT_SAMPLES, SAMPLE_THRESHOLD
from commassoc.finite_group import DEFAULT_ORDER_CAP
from commassoc.tree_core import DEFAULT_HEIGHT_CAP

ENV_PREFIX = 'COMMASSOC_'


class OutputMode(str, Enum):
    TEXT = 'text'
    STRUCTURED = 'structured'


def get_option(environ: Mapping[str, str], option: str, default: Any) -> Any:
    value = environ.get(f'{ENV_PREFIX}{option.upper()}', '')
    if len(value) == 0:
        return default

    # Plain strings
    if option in ('output', 'output_mode', 'log_level', 'log_file'):
        return value

    try:
        return json.loads(value)
    except (json.JSONDecodeError, ValueError):
        pass

    # Python literals such as 10**10 are not JSON
    try:
        return ast.literal_eval(value)
    except (ValueError, SyntaxError):
        pass

    return value


def default_field_value(field_info):
    # field_info is a Field object from dataclasses
    if field_info.default_factory is not dataclasses.MISSING:
        return field_info.default_factory()
    if field_info.default is not dataclasses.MISSING:
        return field_info.default
    return None


def _parse_int(value: Any, default: int) -> int:
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    text = str(value).strip()
    # literal_eval refuses 10**10, so powers are parsed by hand
    if '**' in text:
        base, _, exponent = text.partition('**')
        if base.strip().isdigit() and exponent.strip().isdigit():
            return int(base) ** int(exponent)
    try:
        return int(text)
    except ValueError:
        return default


@dataclass
class RunConfig:
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    max_leaves: int = DEFAULT_MAX_LEAVES
    order_cap: int = DEFAULT_ORDER_CAP
    height_cap: int = DEFAULT_HEIGHT_CAP
    sample_threshold: int = SAMPLE_THRESHOLD
    samples: int = DEFAULT_SAMPLES
    workers: Optional[int] = None
    output: Optional[str] = None
    output_mode: OutputMode = OutputMode.TEXT
    log_level: str = 'WARNING'
    log_file: Optional[str] = None

    @staticmethod
    def from_environ(environ: Optional[Mapping[str, str]] = None) -> 'RunConfig':
        environ = os.environ if environ is None else environ
        fields = RunConfig.__dataclass_fields__
        values = {
            name: get_option(environ, name, default_field_value(info)) for name, info in fields.items()
        }

        for name in ('seed', 'budget', 'max_leaves', 'order_cap', 'height_cap', 'sample_threshold', 'samples'):
            values[name] = _parse_int(values[name], default_field_value(fields[name]))
        if values['workers'] is not None:
            values['workers'] = _parse_int(values['workers'], 0) or None

        if isinstance(values['output_mode'], str):
            try:
                values['output_mode'] = OutputMode(values['output_mode'])
            except ValueError:
                values['output_mode'] = OutputMode.TEXT

        return RunConfig(**values)

    @property
    def worker_count(self) -> int:
        return self.workers or os.cpu_count() or 1
