import functools
import os
import sys

import pytest

from polyforge.cgroups import cgroup_from_presentation, rotation_system_from_presentation
from polyforge.polytope import polytope_from_cgroup
from polyforge.toroids import rotation_presentation, torus44_cgroup_presentation
from polyforge.words import Presentation, Word

DATA = os.path.join(os.path.dirname(__file__), os.pardir, "data")

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE = []


@functools.lru_cache(maxsize=None)
def coxeter(*schlafli):
    return cgroup_from_presentation(Presentation.coxeter(list(schlafli)))


@functools.lru_cache(maxsize=None)
def coxeter_polytope(*schlafli):
    return polytope_from_cgroup(coxeter(*schlafli))


@functools.lru_cache(maxsize=None)
def hemicube():
    return cgroup_from_presentation(Presentation.coxeter([4, 3], [Word.of(0, 1, 2) ** 3]))


@functools.lru_cache(maxsize=None)
def torus44(s, t):
    """C-group of the regular {4,4}_(s,t)."""
    return cgroup_from_presentation(torus44_cgroup_presentation(s, t))


@functools.lru_cache(maxsize=None)
def rot(family, s, t):
    return rotation_system_from_presentation(rotation_presentation(family, s, t), 3)


@pytest.fixture
def cube():
    return coxeter_polytope(4, 3)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)


sys.path.insert(0, os.path.dirname(__file__))
