"""Invariant suite over a corpus of small Coxeter systems."""

from __future__ import annotations

import itertools
from typing import Callable

from .coxeter import CoxeterSystem, build_system, coset_graph
from .engine import EngineOptions, initial_state, run_waves, extract_result
from .oracle import build_table, coset_reps, oracle_result

SMALL_SYSTEMS: dict[str, list[list[int]]] = {
    "A1": [[2]],
    "A1xA1": [[2, 0], [0, 2]],
    "A2": [[2, -1], [-1, 2]],
    "B2": [[2, -1], [-2, 2]],
    "G2": [[2, -1], [-3, 2]],
    "A3": [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
    "B3": [[2, -1, 0], [-1, 2, -1], [0, -2, 2]],
}


def all_parabolics(cartan) -> list[CoxeterSystem]:
    rank = len(cartan)
    return [build_system(cartan, J)
            for k in range(rank + 1)
            for J in itertools.combinations(range(1, rank + 1), k)]


def check_target(sys_: CoxeterSystem, word, table=None) -> list[str]:
    """Run one target with invariant checks on; return failure messages."""
    problems = []
    lengths = []
    opts = EngineOptions(check_invariants=True, on_wave=lambda st: lengths.append(st.wave_floor + 1))
    state = initial_state(sys_, word)
    run_waves(state, opts)
    if any(b >= a for a, b in zip(lengths, lengths[1:])):
        problems.append(f"offending lengths not strictly decreasing: {lengths}")
    done = state.corrections
    run_waves(state, EngineOptions(check_invariants=True))
    if state.corrections != done:
        problems.append("re-running the offender loop applied corrections")
    result = extract_result(state)
    if table is not None and not result.same_polynomials(oracle_result(table, result.y)):
        problems.append("differs from the recursion oracle")
    return problems


def run_selftest(emit: Callable[[str], None] = print) -> int:
    failures = 0
    for name, cartan in SMALL_SYSTEMS.items():
        count = 0
        for sys_ in all_parabolics(cartan):
            graph = coset_graph(sys_)
            levels = coset_reps(sys_, 64)
            table = build_table(sys_, len(levels) - 1)
            for y in itertools.chain.from_iterable(levels):
                count += 1
                try:
                    problems = check_target(sys_, graph.canonical_word(y), table)
                except Exception as exc:  # report and keep going
                    problems = [f"{type(exc).__name__}: {exc}"]
                for msg in problems:
                    failures += 1
                    emit(f"FAIL {name} J={sorted(sys_.labels[j] for j in sys_.J)} "
                         f"y={sys_.word_labels(graph.canonical_word(y))}: {msg}")
        emit(f"ok   {name}: {count} targets over all parabolic subsets")
    emit("selftest passed" if not failures else f"selftest: {failures} failures")
    return failures
