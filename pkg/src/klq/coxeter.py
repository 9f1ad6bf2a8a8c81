"""Coxeter systems realized by integral generalized Cartan matrices.

Group elements carry the images of the simple roots under ``w`` and ``w^-1``
(columns in the simple-root basis).  Lengths and descents are read off from
root signs, so no word problem is ever solved symbolically.

Generators are addressed internally by index ``0..rank-1``; ``labels`` holds
the names users type (``1..n`` for type A, ``0..n`` for affine A).
"""

from __future__ import annotations

import enum
import functools
import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "CoxeterError", "InvalidCartan", "NotReduced", "NotCosetRep",
    "CoxeterSystem", "GroupElement", "CosetCase",
    "build_system", "type_a", "affine_a", "system_from_json",
    "identity", "mul_gen_right", "mul_gen_left", "right_descents",
    "left_descents", "canonical_word", "word_to_element", "is_min_coset_rep",
    "coset_case", "bruhat_leq", "inverse", "reduced_words", "CosetGraph",
    "coset_graph",
]

INFINITY = 0  # bond label used for m_ij = infinity


class CoxeterError(ValueError):
    pass


class InvalidCartan(CoxeterError):
    pass


class NotReduced(CoxeterError):
    pass


class NotCosetRep(CoxeterError):
    pass


Matrix = tuple[tuple[int, ...], ...]


def _bond_from_product(prod: int) -> int:
    return {0: 2, 1: 3, 2: 4, 3: 6}.get(prod, INFINITY)


@dataclass(frozen=True)
class CoxeterSystem:
    rank: int
    cartan: Matrix
    J: frozenset[int]
    labels: tuple[int, ...]
    bond: Matrix = field(init=False, compare=False)
    name: str = field(default="", compare=False)

    def __post_init__(self):
        bond = tuple(
            tuple(1 if i == j else _bond_from_product(self.cartan[i][j] * self.cartan[j][i])
                  for j in range(self.rank))
            for i in range(self.rank)
        )
        object.__setattr__(self, "bond", bond)

    def index(self, label: int) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise CoxeterError(f"unknown generator label {label!r}") from None

    def indices(self, labels: Iterable[int]) -> tuple[int, ...]:
        return tuple(self.index(lab) for lab in labels)

    def word_labels(self, word: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.labels[i] for i in word)

    def fingerprint(self) -> str:
        """Stable hash of the Cartan matrix, J and labels."""
        payload = repr((self.cartan, sorted(self.J), self.labels)).encode()
        return hashlib.sha256(payload).hexdigest()

    def to_json(self) -> dict:
        return {
            "cartan": [list(row) for row in self.cartan],
            "J": [self.labels[j] for j in sorted(self.J)],
            "labels": list(self.labels),
        }


def build_system(cartan: Sequence[Sequence[int]], J: Iterable[int] = (),
                 labels: Sequence[int] | None = None, name: str = "") -> CoxeterSystem:
    """Validate a generalized Cartan matrix and wrap it as a Coxeter system.

    ``J`` is given in labels (``labels`` defaults to ``1..rank``).
    """
    rows = [list(r) for r in cartan]
    rank = len(rows)
    if rank == 0:
        raise InvalidCartan("empty Cartan matrix")
    for i, row in enumerate(rows):
        if len(row) != rank:
            raise InvalidCartan("Cartan matrix must be square")
        for j, a in enumerate(row):
            if not isinstance(a, int) or isinstance(a, bool):
                raise InvalidCartan(f"entry ({i},{j}) is not an integer")
            if i == j and a != 2:
                raise InvalidCartan(f"diagonal entry ({i},{i}) is {a}, expected 2")
            if i != j and a > 0:
                raise InvalidCartan(f"positive off-diagonal entry at ({i},{j})")
            if i != j and (a == 0) != (rows[j][i] == 0):
                raise InvalidCartan(f"asymmetric zero pattern at ({i},{j})")
    if labels is None:
        labels = tuple(range(1, rank + 1))
    labels = tuple(labels)
    if len(labels) != rank or len(set(labels)) != rank:
        raise InvalidCartan("labels must be distinct, one per generator")
    sys_ = CoxeterSystem(rank, tuple(tuple(r) for r in rows), frozenset(), labels, name=name)
    return CoxeterSystem(rank, sys_.cartan, frozenset(sys_.indices(J)), labels, name=name)


def type_a(n: int, J: Iterable[int] = ()) -> CoxeterSystem:
    cartan = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)]
              for i in range(n)]
    return build_system(cartan, J, range(1, n + 1), name=f"A{n}")


def affine_a(n: int, J: Iterable[int] | None = None) -> CoxeterSystem:
    """Affine type A~n on generators s0..sn; J defaults to {1..n}."""
    if n < 1:
        raise InvalidCartan("affine A needs n >= 1")
    r = n + 1
    cartan = [[0] * r for _ in range(r)]
    for i in range(r):
        cartan[i][i] = 2
    if n == 1:
        cartan[0][1] = cartan[1][0] = -2
    else:
        for i in range(r):
            j = (i + 1) % r
            cartan[i][j] = cartan[j][i] = -1
    if J is None:
        J = range(1, n + 1)
    return build_system(cartan, J, range(0, r), name=f"affine-A{n}")


def system_from_json(data: dict) -> CoxeterSystem:
    """Build a system from ``{"cartan": ..., "J": ...}`` or ``{"type": ..., "n": ..., "J": ...}``."""
    J = data.get("J", [])
    if "cartan" in data:
        return build_system(data["cartan"], J, data.get("labels"))
    kind = data.get("type")
    n = data.get("n")
    if not isinstance(n, int) or n < 1:
        raise InvalidCartan("named system needs a positive integer 'n'")
    if kind == "A":
        return type_a(n, J)
    if kind == "affine-A":
        return affine_a(n, J)
    raise InvalidCartan(f"unknown system type {kind!r}")


class GroupElement:
    """``fwd[j]`` is w(alpha_j); ``inv[j]`` is w^-1(alpha_j).

    Matrices are stored column-major in the simple-root basis.  The root
    representation is faithful, so ``fwd`` alone identifies the element.
    """

    __slots__ = ("fwd", "inv", "length", "_hash")

    def __init__(self, fwd: Matrix, inv: Matrix, length: int):
        self.fwd = fwd
        self.inv = inv
        self.length = length
        self._hash = hash(fwd)

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, GroupElement) and self._hash == other._hash
                and self.fwd == other.fwd)

    def __hash__(self):
        return self._hash

    def __getstate__(self):
        return (self.fwd, self.inv, self.length)

    def __setstate__(self, state):
        self.__init__(*state)

    def __repr__(self):
        return f"GroupElement(length={self.length})"


class CosetCase(enum.Enum):
    DOWN = "Down"
    UP_IN = "UpIn"
    UP_OUT = "UpOut"


def _is_negative(col: Sequence[int]) -> bool:
    for c in col:
        if c:
            return c < 0
    raise AssertionError("zero root vector")


def identity(sys_: CoxeterSystem) -> GroupElement:
    eye = tuple(tuple(int(i == j) for i in range(sys_.rank)) for j in range(sys_.rank))
    return GroupElement(eye, eye, 0)


def _reflect(sys_: CoxeterSystem, s: int, v: Sequence[int]) -> tuple[int, ...]:
    # s(v) = v - <alpha_s^vee, v> alpha_s
    row = sys_.cartan[s]
    pairing = sum(row[k] * v[k] for k in range(sys_.rank) if v[k])
    if not pairing:
        return tuple(v)
    out = list(v)
    out[s] -= pairing
    return tuple(out)


def _right_fwd(sys_: CoxeterSystem, fwd: Matrix, s: int) -> Matrix:
    # (ws)(alpha_j) = w(alpha_j) - a_sj w(alpha_s)
    row = sys_.cartan[s]
    col_s = fwd[s]
    cols = []
    for j, col in enumerate(fwd):
        a = row[j]
        if a:
            cols.append(tuple(c - a * d for c, d in zip(col, col_s)))
        else:
            cols.append(col)
    return tuple(cols)


def _left_inv(sys_: CoxeterSystem, inv: Matrix, s: int) -> Matrix:
    return tuple(_reflect(sys_, s, col) for col in inv)


def mul_gen_right(sys_: CoxeterSystem, x: GroupElement, s: int) -> GroupElement:
    """Return ``x s``."""
    if not 0 <= s < sys_.rank:
        raise CoxeterError(f"generator index {s} out of range")
    step = -1 if _is_negative(x.fwd[s]) else 1
    return GroupElement(_right_fwd(sys_, x.fwd, s), _left_inv(sys_, x.inv, s), x.length + step)


def mul_gen_left(sys_: CoxeterSystem, s: int, x: GroupElement) -> GroupElement:
    """Return ``s x``."""
    if not 0 <= s < sys_.rank:
        raise CoxeterError(f"generator index {s} out of range")
    step = -1 if _is_negative(x.inv[s]) else 1
    return GroupElement(_left_inv(sys_, x.fwd, s), _right_fwd(sys_, x.inv, s), x.length + step)


def inverse(x: GroupElement) -> GroupElement:
    return GroupElement(x.inv, x.fwd, x.length)


def right_descents(sys_: CoxeterSystem, x: GroupElement) -> frozenset[int]:
    return frozenset(s for s in range(sys_.rank) if _is_negative(x.fwd[s]))


def left_descents(sys_: CoxeterSystem, x: GroupElement) -> frozenset[int]:
    return frozenset(s for s in range(sys_.rank) if _is_negative(x.inv[s]))


def canonical_word(sys_: CoxeterSystem, x: GroupElement) -> tuple[int, ...]:
    """Lexicographically smallest reduced word (greedy on left descents)."""
    word = []
    while x.length:
        s = next(s for s in range(sys_.rank) if _is_negative(x.inv[s]))
        word.append(s)
        x = mul_gen_left(sys_, s, x)
    return tuple(word)


def word_to_element(sys_: CoxeterSystem, word: Iterable[int], *,
                    require_reduced: bool = False) -> tuple[GroupElement, bool]:
    """Multiply out ``word`` (internal indices); also report reducedness."""
    x = identity(sys_)
    k = 0
    for s in word:
        x = mul_gen_right(sys_, x, s)
        k += 1
    reduced = x.length == k
    if require_reduced and not reduced:
        raise NotReduced(f"word {tuple(sys_.word_labels(word))} is not reduced")
    return x, reduced


def is_min_coset_rep(sys_: CoxeterSystem, x: GroupElement) -> bool:
    return not any(_is_negative(x.inv[j]) for j in sys_.J)


def _unit(rank: int, s: int) -> tuple[int, ...]:
    return tuple(int(k == s) for k in range(rank))


def coset_case(sys_: CoxeterSystem, x: GroupElement, s: int,
               check: bool = True) -> tuple[CosetCase, GroupElement | None]:
    """Classify ``x s`` for ``x`` in W^J.

    For an ascent, ``xs`` leaves W^J exactly when ``x^-1(alpha_j) = alpha_s``
    for some ``j`` in J (then ``xs = s_j x``).
    """
    if check and not is_min_coset_rep(sys_, x):
        raise NotCosetRep("element is not a minimal coset representative")
    if _is_negative(x.fwd[s]):
        return CosetCase.DOWN, mul_gen_right(sys_, x, s)
    e_s = _unit(sys_.rank, s)
    for j in sys_.J:
        if x.inv[j] == e_s:
            return CosetCase.UP_OUT, None
    return CosetCase.UP_IN, mul_gen_right(sys_, x, s)


def bruhat_leq(sys_: CoxeterSystem, x: GroupElement, y: GroupElement) -> bool:
    while True:
        if x.length > y.length:
            return False
        if y.length == 0:
            return x.length == 0
        s = next(s for s in range(sys_.rank) if _is_negative(y.fwd[s]))
        y = mul_gen_right(sys_, y, s)
        if _is_negative(x.fwd[s]):
            x = mul_gen_right(sys_, x, s)


def reduced_words(sys_: CoxeterSystem, x: GroupElement) -> list[tuple[int, ...]]:
    """All reduced words of ``x`` (exponential; for tests on small groups)."""
    if x.length == 0:
        return [()]
    out = []
    for s in sorted(right_descents(sys_, x)):
        for w in reduced_words(sys_, mul_gen_right(sys_, x, s)):
            out.append(w + (s,))
    return sorted(out)


class CosetGraph:
    """Memoized right action of the generators on W^J.

    Elements are interned, so every product resolves to one shared instance
    and dictionary lookups short-circuit on identity.
    """

    def __init__(self, sys_: CoxeterSystem):
        self.sys = sys_
        self._nodes: dict[GroupElement, tuple[GroupElement, list]] = {}
        self._words: dict[GroupElement, tuple[int, ...]] = {}

    def __len__(self):
        return len(self._nodes)

    def _node(self, x: GroupElement):
        node = self._nodes.get(x)
        if node is None:
            node = self._nodes[x] = (x, [None] * self.sys.rank)
        return node

    def intern(self, x: GroupElement) -> GroupElement:
        return self._node(x)[0]

    def step(self, x: GroupElement, s: int) -> tuple[CosetCase, GroupElement | None]:
        row = self._node(x)[1]
        hit = row[s]
        if hit is None:
            case, xs = coset_case(self.sys, x, s, check=False)
            if xs is not None:
                xs = self.intern(xs)
            hit = row[s] = (case, xs)
        return hit

    def canonical_word(self, x: GroupElement) -> tuple[int, ...]:
        w = self._words.get(x)
        if w is None:
            w = self._words[x] = canonical_word(self.sys, x)
        return w

    def clear(self):
        self._nodes.clear()
        self._words.clear()


@functools.lru_cache(maxsize=16)
def coset_graph(sys_: CoxeterSystem) -> CosetGraph:
    return CosetGraph(sys_)
