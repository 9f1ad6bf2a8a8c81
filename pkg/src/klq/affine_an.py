"""Affine type A~n with J = {1..n}: weights, dot action, and target resolution.

Weights are n-tuples of coordinates on the fundamental weights.  ``s_i``
(i >= 1) acts by the simple reflection; ``s_0`` reflects in the highest
root ``alpha_0`` and then translates by ``-p alpha_0``.  The dot action is
``w . lam = w(lam + rho) - rho`` and the base point is ``-2 rho``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Sequence

from .coxeter import CoxeterError, GroupElement, affine_a, is_min_coset_rep, word_to_element
from .engine import EngineOptions, KLResult, compute_target

__all__ = [
    "AffineError", "NotInOrbit", "NotDominant", "Weight", "AffineCase",
    "dot_apply_gen", "dot_apply_word", "w0_dot", "weight_to_y", "guess_weight",
    "is_p_restricted", "is_dominant", "is_regular", "resolve_case", "run_case", "AffineReport",
]

log = logging.getLogger(__name__)

Weight = tuple[int, ...]


class AffineError(CoxeterError):
    pass


class NotInOrbit(AffineError):
    pass


class NotDominant(AffineError):
    pass


def _alpha(n: int, i: int) -> list[int]:
    if i == 0:
        a = [0] * n
        a[0] += 1
        a[-1] += 1
        return a
    a = [0] * n
    a[i - 1] = 2
    if i > 1:
        a[i - 2] = -1
    if i < n:
        a[i] = -1
    return a


def dot_apply_gen(n: int, p: int, i: int, lam: Sequence[int]) -> Weight:
    if len(lam) != n:
        raise AffineError(f"weight {tuple(lam)} does not have {n} coordinates")
    if not 0 <= i <= n:
        raise AffineError(f"generator s{i} out of range for n={n}")
    v = [a + 1 for a in lam]
    c = sum(v) + p if i == 0 else v[i - 1]
    alpha = _alpha(n, i)
    return tuple(v[j] - c * alpha[j] - 1 for j in range(n))


def dot_apply_word(n: int, p: int, word: Sequence[int], lam: Sequence[int]) -> Weight:
    """``(s_{w1} ... s_{wk}) . lam``; the rightmost generator acts first."""
    for i in reversed(word):
        lam = dot_apply_gen(n, p, i, lam)
    return tuple(lam)


def w0_dot(lam: Sequence[int]) -> Weight:
    n = len(lam)
    return tuple(-(lam[n - 1 - j] + 1) - 1 for j in range(n))


def minus_two_rho(n: int) -> Weight:
    return (-2,) * n


def is_dominant(nu: Sequence[int]) -> bool:
    return all(a >= 0 for a in nu)


def is_p_restricted(nu: Sequence[int], p: int) -> bool:
    return all(0 <= a <= p - 1 for a in nu)


def is_regular(nu: Sequence[int], p: int) -> bool:
    """True when ``nu + rho`` lies on no affine reflecting hyperplane."""
    v = [a + 1 for a in nu]
    n = len(v)
    for i in range(n):
        total = 0
        for j in range(i, n):
            total += v[j]
            if total % p == 0:
                return False
    return True


def guess_weight(n: int) -> Weight:
    """``(p-2) rho - alpha_0`` with ``p = n + 1``."""
    if n % 4 == 2:
        warnings.warn(f"the uniform guess is not meant for n = {n} (n = 2 mod 4)")
    p = n + 1
    nu = [p - 2] * n
    for j, a in enumerate(_alpha(n, 0)):
        nu[j] -= a
    return tuple(nu)


def weight_to_y(n: int, p: int, nu: Sequence[int], max_length: int = 100_000) -> tuple[GroupElement, tuple[int, ...]]:
    """Resolve a dominant weight ``nu = w0 y . (-2 rho)`` to ``y`` in W^J and a reduced word.

    Walks ``lam = w0 . nu`` back to ``-2 rho``; each step applies a generator
    that removes one separating hyperplane, and that generator is the next
    letter of ``y`` from the left.  The word is then checked for
    reducedness, coset membership and replay.
    """
    nu = tuple(nu)
    if len(nu) != n:
        raise AffineError(f"weight {nu} does not have {n} coordinates")
    if p < n + 1:
        raise AffineError(f"p = {p} is below n + 1 = {n + 1}")
    if not is_dominant(nu):
        raise NotDominant(f"weight {nu} is not dominant")
    if not is_regular(nu, p):
        raise NotInOrbit(f"weight {nu} lies on a reflecting hyperplane for p={p}, "
                         "so it is not in the dot-orbit of -2rho")
    base = minus_two_rho(n)
    lam = w0_dot(nu)
    word: list[int] = []
    while lam != base:
        if len(word) > max_length:
            raise NotInOrbit(f"weight {nu}: no path back to -2rho within {max_length} steps")
        v = [a + 1 for a in lam]
        level = sum(v)
        # regularity is preserved by the action
        assert 0 not in v and level % p, "peeling reached a reflecting hyperplane"
        if level < -p:
            i = 0
        else:
            i = next((k + 1 for k in range(n) if v[k] > 0), None)
            if i is None:
                raise NotInOrbit(f"weight {nu} is not in the dot-orbit of -2rho for p={p}")
        word.append(i)
        lam = dot_apply_gen(n, p, i, lam)
    sys_ = affine_a(n)
    word_t = tuple(word)
    y, reduced = word_to_element(sys_, word_t)
    if not reduced:
        raise NotInOrbit(f"weight {nu}: peeled word {word_t} is not reduced")
    if not is_min_coset_rep(sys_, y):
        raise NotInOrbit(f"weight {nu}: peeled element is not a minimal coset representative")
    if w0_dot(dot_apply_word(n, p, word_t, base)) != nu:
        raise NotInOrbit(f"weight {nu}: replaying {word_t} does not reproduce it")
    return y, word_t


@dataclass(frozen=True)
class AffineCase:
    n: int
    p: int
    target_weight: Weight
    y: GroupElement
    y_word: tuple[int, ...]


def resolve_case(n: int, p: int | None, nu: Sequence[int]) -> AffineCase:
    p = n + 1 if p is None else p
    y, word = weight_to_y(n, p, nu)
    return AffineCase(n, p, tuple(nu), y, word)


@dataclass
class AffineReport:
    case: AffineCase
    result: KLResult
    mu: int
    P_e: list[int]
    negative_coefficients: int

    def summary(self) -> str:
        c = self.case
        return (f"n={c.n} p={c.p} weight={c.target_weight} length={c.y.length} "
                f"mu(w0, w0 y)={self.mu}")


def run_case(n: int, p: int | None, nu: Sequence[int],
             options: EngineOptions | None = None) -> AffineReport:
    """Compute ``^J C'_y`` for the weight and report ``^J mu(e, y) = mu(w0, w0 y)``."""
    case = resolve_case(n, p, nu)
    result = compute_target(affine_a(n), case.y_word, options)
    P_e = result.P(())
    ldiff = case.y.length
    mu = P_e[(ldiff - 1) // 2] if ldiff % 2 and len(P_e) > (ldiff - 1) // 2 else 0
    negatives = sum(1 for _, P in result.entries.values() for c in P if c < 0)
    if negatives:
        log.warning("%d negative coefficients in computed P^J polynomials", negatives)
    return AffineReport(case, result, mu, P_e, negatives)
