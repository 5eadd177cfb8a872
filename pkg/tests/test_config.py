#!/usr/bin/env python3

import os
from dataclasses import fields
from unittest.mock import patch

from commassoc.config import OutputMode, RunConfig, default_field_value, get_option
from commassoc.expr_eval import DEFAULT_BUDGET


def test_defaults():
    """Test the defaults when nothing is set."""
    config = RunConfig.from_environ({})
    assert config == RunConfig()
    assert config.seed == 0
    assert config.budget == DEFAULT_BUDGET
    assert config.max_leaves == 7
    assert config.order_cap == 5040
    assert config.height_cap == 16
    assert config.output_mode is OutputMode.TEXT
    assert config.workers is None


def test_integer_options():
    """Test integers are read from JSON or power notation."""
    config = RunConfig.from_environ(
        {'COMMASSOC_SEED': '7', 'COMMASSOC_BUDGET': '10**6', 'COMMASSOC_MAX_LEAVES': '5', 'COMMASSOC_SAMPLES': '2e3'}
    )
    assert config.seed == 7
    assert config.budget == 10**6
    assert config.max_leaves == 5
    # Not an integer: falls back to the default
    assert config.samples == RunConfig().samples


def test_output_options():
    """Test string options are kept as given."""
    config = RunConfig.from_environ(
        {
            'COMMASSOC_OUTPUT': '123',
            'COMMASSOC_OUTPUT_MODE': 'structured',
            'COMMASSOC_LOG_LEVEL': 'debug',
            'COMMASSOC_LOG_FILE': '/tmp/commassoc.log',
        }
    )
    assert config.output == '123'
    assert config.output_mode is OutputMode.STRUCTURED
    assert config.log_level == 'debug'
    assert config.log_file == '/tmp/commassoc.log'


def test_invalid_output_mode_falls_back():
    """Test an unknown output mode falls back to text."""
    assert RunConfig.from_environ({'COMMASSOC_OUTPUT_MODE': 'xml'}).output_mode is OutputMode.TEXT


def test_workers():
    """Test worker counts and the all-cores default."""
    assert RunConfig.from_environ({'COMMASSOC_WORKERS': '3'}).worker_count == 3
    config = RunConfig.from_environ({'COMMASSOC_WORKERS': '0'})
    assert config.workers is None
    with patch('commassoc.config.os.cpu_count', return_value=12):
        assert config.worker_count == 12
    with patch('commassoc.config.os.cpu_count', return_value=None):
        assert config.worker_count == 1


def test_from_process_environment():
    """Test os.environ is read when no mapping is given."""
    with patch.dict(os.environ, {'COMMASSOC_SEED': '42'}):
        assert RunConfig.from_environ().seed == 42


def test_get_option():
    """Test option parsing order: JSON, Python literal, raw string."""
    environ = {
        'COMMASSOC_A': '[1, 2]',
        'COMMASSOC_B': "('x', 1)",
        'COMMASSOC_C': 'plain text',
        'COMMASSOC_LOG_LEVEL': '10',
    }
    assert get_option(environ, 'a', None) == [1, 2]
    assert get_option(environ, 'b', None) == ('x', 1)
    assert get_option(environ, 'c', None) == 'plain text'
    assert get_option(environ, 'log_level', None) == '10'
    assert get_option(environ, 'missing', 'default') == 'default'
    assert get_option({'COMMASSOC_D': ''}, 'd', 5) == 5


def test_default_field_value():
    """Test defaults are read from dataclass fields."""
    defaults = {f.name: default_field_value(f) for f in fields(RunConfig)}
    assert defaults['seed'] == 0
    assert defaults['output'] is None
    assert defaults['output_mode'] is OutputMode.TEXT
