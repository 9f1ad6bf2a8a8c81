"""The right Hecke module M^J in the normalized basis ``m~_x = m_x / t^l(x)``.

Right multiplication by ``C'_s`` on a basis vector, for ``x`` in W^J::

    Down   (xs < x):            m~_x C'_s = t m~_x + m~_xs
    UpIn   (xs > x, xs in W^J): m~_x C'_s = t^-1 m~_x + m~_xs
    UpOut  (xs not in W^J):     m~_x C'_s = (t + t^-1) m~_x
"""

from __future__ import annotations

import functools
from typing import Callable, Iterable, Iterator, Sequence

from .coxeter import (
    CosetCase, CosetGraph, CoxeterSystem, GroupElement, NotCosetRep, NotReduced,
    coset_graph, identity, is_min_coset_rep,
)
from .laurent import LaurentPoly

__all__ = [
    "ModuleVector", "unit", "apply_Cs", "d_prime", "axpy_sub", "census",
]

_DOWN = CosetCase.DOWN
_UP_IN = CosetCase.UP_IN


class _Census:
    """Counts live ModuleVector instances (CPython frees them promptly)."""

    def __init__(self):
        self.live = 0
        self.peak = 0
        self.listener: Callable[[int], None] | None = None

    def reset_peak(self):
        self.peak = self.live


census = _Census()


class ModuleVector:
    """Finitely supported map W^J -> LaurentPoly (coefficients of ``m~_x``).

    Treated as a value by the public functions; the engine alone uses
    :meth:`sub_scaled` to update its working vector in place.
    """

    __slots__ = ("sys", "_coeffs", "__weakref__")

    def __init__(self, sys_: CoxeterSystem, coeffs: dict[GroupElement, LaurentPoly] | None = None):
        self.sys = sys_
        self._coeffs = {x: f for x, f in (coeffs or {}).items() if f}
        census.live += 1
        if census.live > census.peak:
            census.peak = census.live
        if census.listener is not None:
            census.listener(census.live)

    def __reduce__(self):
        return (ModuleVector, (self.sys, self._coeffs))

    def __del__(self):
        census.live -= 1

    def __len__(self):
        return len(self._coeffs)

    def __iter__(self) -> Iterator[GroupElement]:
        return iter(self._coeffs)

    def __contains__(self, x):
        return x in self._coeffs

    def __getitem__(self, x: GroupElement) -> LaurentPoly:
        return self._coeffs.get(x, LaurentPoly.zero())

    def items(self):
        return self._coeffs.items()

    def __eq__(self, other):
        if not isinstance(other, ModuleVector):
            return NotImplemented
        return self.sys == other.sys and self._coeffs == other._coeffs

    def __repr__(self):
        return f"ModuleVector(support={len(self._coeffs)})"

    def copy(self) -> "ModuleVector":
        return ModuleVector(self.sys, self._coeffs)

    def sub_scaled(self, g: LaurentPoly, w: "ModuleVector") -> None:
        """In place: ``self <- self - g * w``."""
        coeffs = self._coeffs
        for x, h in w._coeffs.items():
            f = coeffs.get(x)
            prod = g * h
            new = -prod if f is None else f - prod
            if new:
                coeffs[x] = new
            else:
                coeffs.pop(x, None)

    def add_in_place(self, w: "ModuleVector") -> None:
        coeffs = self._coeffs
        for x, h in w._coeffs.items():
            new = coeffs[x] + h if x in coeffs else h
            if new:
                coeffs[x] = new
            else:
                del coeffs[x]

    def to_json(self, graph: CosetGraph) -> list:
        rows = [(graph.canonical_word(x), f) for x, f in self._coeffs.items()]
        rows.sort(key=lambda r: r[0])
        return [[list(w), f.to_json()] for w, f in rows]

    @classmethod
    def from_json(cls, sys_: CoxeterSystem, data, graph: CosetGraph | None = None) -> "ModuleVector":
        from .coxeter import word_to_element
        graph = graph or coset_graph(sys_)
        coeffs = {}
        for word, poly in data:
            x, _ = word_to_element(sys_, word, require_reduced=True)
            coeffs[graph.intern(x)] = LaurentPoly.from_json(poly)
        return cls(sys_, coeffs)


def unit(sys_: CoxeterSystem) -> ModuleVector:
    e = coset_graph(sys_).intern(identity(sys_))
    return ModuleVector(sys_, {e: LaurentPoly.one()})


def _acc(out: dict, x, f: dict, k: int) -> None:
    d = out.get(x)
    if d is None:
        out[x] = {e + k: c for e, c in f.items()}
    else:
        for e, c in f.items():
            e += k
            d[e] = d.get(e, 0) + c


def _act(graph: CosetGraph, coeffs: dict, s: int) -> dict:
    # raw form: element -> {exponent: coefficient}
    out: dict = {}
    step = graph.step
    for x, f in coeffs.items():
        case, xs = step(x, s)
        if case is _DOWN:
            _acc(out, x, f, 1)
            _acc(out, xs, f, 0)
        elif case is _UP_IN:
            _acc(out, x, f, -1)
            _acc(out, xs, f, 0)
        else:
            _acc(out, x, f, 1)
            _acc(out, x, f, -1)
    return out


def _wrap(raw: dict) -> dict[GroupElement, LaurentPoly]:
    out = {}
    for x, d in raw.items():
        d = {e: c for e, c in d.items() if c}
        if d:
            out[x] = LaurentPoly._wrap(d)
    return out


def apply_Cs(v: ModuleVector, s: int) -> ModuleVector:
    """Return ``v C'_s``."""
    graph = coset_graph(v.sys)
    raw = {graph.intern(x): f._terms for x, f in v._coeffs.items()}
    return ModuleVector(v.sys, _wrap(_act(graph, raw, s)))


def _d_prime_raw(sys_: CoxeterSystem, word: Sequence[int], graph: CosetGraph) -> tuple[dict, GroupElement]:
    top = graph.intern(identity(sys_))
    raw: dict = {top: {0: 1}}
    for s in word:
        case, nxt = graph.step(top, s)
        if case is _DOWN:
            raise NotReduced(f"word {tuple(sys_.word_labels(word))} is not reduced")
        if case is not _UP_IN:
            raise NotCosetRep(f"word {tuple(sys_.word_labels(word))} leaves W^J")
        raw = _act(graph, raw, s)
        top = nxt
    return raw, top


def d_prime(sys_: CoxeterSystem, word: Sequence[int]) -> ModuleVector:
    """``m_e C'_{s1} ... C'_{sk}`` for a reduced word of an element of W^J.

    Recomputed from scratch on every call.
    """
    raw, _ = _d_prime_raw(sys_, word, coset_graph(sys_))
    return ModuleVector(sys_, _wrap(raw))


def scaled_d_prime_sum(sys_: CoxeterSystem, jobs: Iterable[tuple[Sequence[int], LaurentPoly]],
                       cache_size: int = 0) -> ModuleVector:
    """``sum g * D'_word`` over ``jobs``; one accumulator vector is alive."""
    graph = coset_graph(sys_)
    total = ModuleVector(sys_)
    lookup = _cached_d_prime(sys_, cache_size) if cache_size else None
    for word, g in jobs:
        if lookup is not None:
            coeffs = lookup(tuple(word))
        else:
            coeffs = _wrap(_d_prime_raw(sys_, word, graph)[0])
        acc = total._coeffs
        for x, h in coeffs.items():
            prod = g * h
            new = acc[x] + prod if x in acc else prod
            if new:
                acc[x] = new
            else:
                del acc[x]
    return total


@functools.lru_cache(maxsize=4)
def _cached_d_prime(sys_: CoxeterSystem, cache_size: int):
    graph = coset_graph(sys_)

    @functools.lru_cache(maxsize=cache_size)
    def lookup(word: tuple[int, ...]) -> dict:
        return _wrap(_d_prime_raw(sys_, word, graph)[0])

    return lookup


def axpy_sub(v: ModuleVector, g: LaurentPoly, w: ModuleVector) -> ModuleVector:
    """Return ``v - g * w``."""
    out = v.copy()
    out.sub_scaled(g, w)
    return out


def check_support(v: ModuleVector) -> bool:
    return all(is_min_coset_rep(v.sys, x) for x in v)
