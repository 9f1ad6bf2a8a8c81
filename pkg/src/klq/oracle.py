"""Reference values from the Deodhar recursion.

Builds every ``^J C'_z`` up to a length bound, shortest first::

    ^J C'_w = ^J C'_{ws} C'_s - sum mu(z, ws) ^J C'_z

summed over ``z`` in W^J with ``zs < z`` or ``zs`` outside W^J.  This keeps
the whole table in memory, so it is only meant for small systems.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coxeter import (
    CosetCase, CoxeterSystem, GroupElement, coset_graph, identity,
)
from .engine import KLResult, compute_target, EngineOptions
from .heckemod import ModuleVector, apply_Cs, unit
from .laurent import LaurentPoly, mu_coefficient, to_q_polynomial

__all__ = ["BasisTable", "build_table", "oracle_result", "compare", "CompareReport",
           "coset_reps"]


@dataclass
class BasisTable:
    sys: CoxeterSystem
    bound: int
    vectors: dict[GroupElement, ModuleVector]
    by_length: list[list[GroupElement]]

    def __contains__(self, z):
        return z in self.vectors

    def __getitem__(self, z) -> ModuleVector:
        return self.vectors[z]


def coset_reps(sys_: CoxeterSystem, bound: int) -> list[list[GroupElement]]:
    """Elements of W^J grouped by length, up to ``bound``; each level sorted by canonical word."""
    graph = coset_graph(sys_)
    levels = [[graph.intern(identity(sys_))]]
    for _ in range(bound):
        nxt = set()
        for x in levels[-1]:
            for s in range(sys_.rank):
                case, xs = graph.step(x, s)
                if case is CosetCase.UP_IN:
                    nxt.add(xs)
        if not nxt:
            break
        levels.append(sorted(nxt, key=graph.canonical_word))
    return levels


def build_table(sys_: CoxeterSystem, bound: int) -> BasisTable:
    graph = coset_graph(sys_)
    levels = coset_reps(sys_, bound)
    vectors: dict[GroupElement, ModuleVector] = {levels[0][0]: unit(sys_)}
    for level in levels[1:]:
        for w in level:
            s = min(s for s in range(sys_.rank) if graph.step(w, s)[0] is CosetCase.DOWN)
            ws = graph.step(w, s)[1]
            base = vectors[ws]
            vec = apply_Cs(base, s)
            for z, f in base.items():
                if z == ws:
                    continue
                mu = mu_coefficient(f)
                if not mu:
                    continue
                case, _ = graph.step(z, s)
                if case is CosetCase.UP_IN:
                    continue
                vec.sub_scaled(LaurentPoly.monomial(0, mu), vectors[z])
            vectors[w] = vec
    return BasisTable(sys_, bound, vectors, levels)


def oracle_result(table: BasisTable, y: GroupElement) -> KLResult:
    sys_ = table.sys
    graph = coset_graph(sys_)
    vec = table[y]
    entries = {}
    mu = {}
    for x, f in vec.items():
        w = graph.canonical_word(x)
        entries[w] = (x, to_q_polynomial(f, y.length - x.length))
        if x != y:
            mu[w] = mu_coefficient(f)
    return KLResult(sys_, y, graph.canonical_word(y), entries, mu, {})


@dataclass
class CompareReport:
    y_word: tuple[int, ...]
    equal: bool
    first_divergence: str = ""


def compare(sys_: CoxeterSystem, y: GroupElement, table: BasisTable | None = None,
            options: EngineOptions | None = None) -> CompareReport:
    """Run the engine on ``y`` and check it against the oracle table."""
    graph = coset_graph(sys_)
    word = graph.canonical_word(y)
    if table is None:
        table = build_table(sys_, y.length)
    want = oracle_result(table, y)
    got = compute_target(sys_, word, options)
    if got.same_polynomials(want):
        return CompareReport(word, True)
    keys = sorted(set(got.entries) | set(want.entries))
    for k in keys:
        a, b = got.P(k), want.P(k)
        if a != b:
            return CompareReport(word, False, f"x={sys_.word_labels(k)}: engine {a}, oracle {b}")
    for k in sorted(set(got.mu) | set(want.mu)):
        if got.mu.get(k, 0) != want.mu.get(k, 0):
            return CompareReport(word, False, f"mu at x={sys_.word_labels(k)} differs")
    return CompareReport(word, False, "entries differ")
