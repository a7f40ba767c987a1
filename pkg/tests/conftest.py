from __future__ import annotations

import itertools

import pytest

from geodetic_forge.groups import check_genset, make_cyclic, make_klein, make_symmetric
from geodetic_forge.nabla import nabla


def full_genset(group):
    return check_genset(group, [g for g in range(group.order) if g != group.identity])


def fixture_matrix():
    """(label, group, genset) over C3, C4, C5, S3, Klein with full and {1, m-1} generators."""
    cells = []
    for m in (3, 4, 5):
        g = make_cyclic(m)
        cells.append((f"C{m}-full", g, full_genset(g)))
        cells.append((f"C{m}-cyclic", g, check_genset(g, [1, m - 1])))
    s3 = make_symmetric(3)
    cells.append(("S3-full", s3, full_genset(s3)))
    klein = make_klein()
    cells.append(("Klein-full", klein, full_genset(klein)))
    return cells


def non_geodetic_extras():
    s3 = make_symmetric(3)
    transpositions = [g for g in range(6) if g != s3.identity and s3.element_order(g) == 2]
    klein = make_klein()
    return [
        ("S3-two-transpositions", s3, check_genset(s3, transpositions[:2])),
        ("Klein-two", klein, check_genset(klein, [1, 2])),
    ]


_cache: dict = {}


def cached_nabla(label, group, genset, n):
    key = (label, n)
    if key not in _cache:
        _cache[key] = nabla(group, genset, n)
    return _cache[key]


def all_words(letters, max_len):
    for k in range(max_len + 1):
        yield from itertools.product(letters, repeat=k)


@pytest.fixture(scope="session")
def k4_system():
    g = make_cyclic(4)
    return cached_nabla("C4-full", g, check_genset(g, [1, 2, 3]), 1)


@pytest.fixture(scope="session")
def c5_system():
    g = make_cyclic(5)
    return cached_nabla("C5-cyclic", g, check_genset(g, [1, 4]), 1)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
