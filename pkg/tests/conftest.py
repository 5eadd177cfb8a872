#!/usr/bin/env python3

import os

import pytest

from commassoc.finite_group import (
    FiniteGroup,
    alternating,
    cyclic,
    dihedral,
    heisenberg,
    quaternion8,
    symmetric,
)


@pytest.fixture(scope='session')
def s3() -> FiniteGroup:
    return symmetric(3)


@pytest.fixture(scope='session')
def s4() -> FiniteGroup:
    return symmetric(4)


@pytest.fixture(scope='session')
def a5() -> FiniteGroup:
    """Smallest non-solvable group."""
    return alternating(5)


@pytest.fixture(scope='session')
def q8() -> FiniteGroup:
    return quaternion8()


@pytest.fixture(scope='session')
def d4() -> FiniteGroup:
    return dihedral(4)


@pytest.fixture(scope='session')
def c4() -> FiniteGroup:
    return cyclic(4)


@pytest.fixture(scope='session')
def heis3() -> FiniteGroup:
    return heisenberg(3)


@pytest.fixture(autouse=True)
def _clean_environ(monkeypatch):
    """Keep COMMASSOC_* settings of the calling shell out of the tests."""
    for name in list(os.environ):
        if name.startswith('COMMASSOC_'):
            monkeypatch.delenv(name)
