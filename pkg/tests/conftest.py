import itertools

import pytest

from klq.coxeter import build_system, identity, mul_gen_right, right_descents
from klq.selftest import SMALL_SYSTEMS


def elements(sys_, max_length=64):
    """Every element of a finite group (or a ball in an infinite one), by BFS."""
    e = identity(sys_)
    seen = {e}
    frontier = [e]
    for _ in range(max_length):
        nxt = []
        for x in frontier:
            for s in range(sys_.rank):
                xs = mul_gen_right(sys_, x, s)
                if xs.length > x.length and xs not in seen:
                    seen.add(xs)
                    nxt.append(xs)
        if not nxt:
            break
        frontier = nxt
    return sorted(seen, key=lambda x: x.length)


def parabolics(cartan):
    rank = len(cartan)
    for k in range(rank + 1):
        for J in itertools.combinations(range(1, rank + 1), k):
            yield build_system(cartan, J)


@pytest.fixture(params=list(SMALL_SYSTEMS), ids=list(SMALL_SYSTEMS))
def small_cartan(request):
    return SMALL_SYSTEMS[request.param]


A2 = [[2, -1], [-1, 2]]
A3 = SMALL_SYSTEMS["A3"]
B3 = SMALL_SYSTEMS["B3"]


# Acceptance criteria report one line each; they are repeated in the summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
