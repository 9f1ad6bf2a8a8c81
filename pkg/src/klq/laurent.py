"""Sparse Laurent polynomials in ``t = q^(1/2)`` with integer coefficients.

Exponents are kept in t-units so that half-integral powers of ``q`` never
appear.  Coefficients are Python ints (unbounded).
"""

from __future__ import annotations

from typing import Iterable, Mapping

__all__ = [
    "LaurentPoly", "OddExponent", "NegativeExponent",
    "make_g", "to_q_polynomial", "from_q_polynomial", "mu_coefficient",
    "q_poly_to_str",
]


class OddExponent(ArithmeticError):
    pass


class NegativeExponent(ArithmeticError):
    pass


class LaurentPoly:
    """Immutable map exponent -> nonzero coefficient."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        if isinstance(terms, Mapping):
            terms = terms.items()
        clean: dict[int, int] = {}
        for e, c in terms:
            c = clean.get(e, 0) + int(c)
            if c:
                clean[e] = c
            else:
                clean.pop(e, None)
        self._terms = clean

    @classmethod
    def _wrap(cls, terms: dict[int, int]) -> "LaurentPoly":
        # caller guarantees no zero coefficients
        p = object.__new__(cls)
        p._terms = terms
        return p

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> "LaurentPoly":
        return cls._wrap({exp: coeff} if coeff else {})

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls._wrap({})

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls._wrap({0: 1})

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def items(self):
        """(exponent, coefficient) pairs in ascending exponent order."""
        return sorted(self._terms.items())

    def coeff(self, exp: int) -> int:
        return self._terms.get(exp, 0)

    def exponents(self) -> list[int]:
        return sorted(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.monomial(0, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms.items(), reverse=True):
            if e == 0:
                mono = str(abs(c))
            else:
                var = "t" if e == 1 else f"t^{e}"
                mono = var if abs(c) == 1 else f"{abs(c)}*{var}"
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {mono}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    # ring operations

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.monomial(0, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            c += out.get(e, 0)
            if c:
                out[e] = c
            else:
                del out[e]
        return LaurentPoly._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._wrap({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.monomial(0, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return LaurentPoly.zero()
            return LaurentPoly._wrap({e: c * other for e, c in self._terms.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        out: dict[int, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly._wrap({e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``t**k``."""
        return LaurentPoly._wrap({e + k: c for e, c in self._terms.items()})

    def times_t_plus_tinv(self) -> "LaurentPoly":
        return self.shift(1) + self.shift(-1)

    def bar(self) -> "LaurentPoly":
        return LaurentPoly._wrap({-e: c for e, c in self._terms.items()})

    # predicates

    def is_strictly_negative(self) -> bool:
        return all(e < 0 for e in self._terms)

    def is_bar_symmetric(self) -> bool:
        return all(self._terms.get(-e) == c for e, c in self._terms.items())

    def parity_ok(self, parity: int) -> bool:
        return all((e - parity) % 2 == 0 for e in self._terms)

    def has_nonnegative_term(self) -> bool:
        return any(e >= 0 for e in self._terms)

    # serialization

    def to_json(self) -> list[list]:
        return [[e, str(c)] for e, c in sorted(self._terms.items())]

    @classmethod
    def from_json(cls, data) -> "LaurentPoly":
        return cls((int(e), int(c)) for e, c in data)


def make_g(f: LaurentPoly) -> LaurentPoly:
    """Bar-symmetric correction ``f_{>=0}(t) + f_{>0}(t^-1)``.

    ``f - make_g(f)`` has only strictly negative exponents.
    """
    out: dict[int, int] = {}
    for e, c in f._terms.items():
        if e >= 0:
            out[e] = out.get(e, 0) + c
        if e > 0:
            out[-e] = out.get(-e, 0) + c
    return LaurentPoly._wrap({e: c for e, c in out.items() if c})


def to_q_polynomial(f: LaurentPoly, ldiff: int) -> list[int]:
    """Coefficients (ascending in q) of ``P`` with ``P(t^2) = f(t) * t^ldiff``."""
    coeffs: dict[int, int] = {}
    for e, c in f._terms.items():
        e += ldiff
        if e < 0:
            raise NegativeExponent(f"exponent {e - ldiff} below -{ldiff}")
        if e % 2:
            raise OddExponent(f"exponent {e - ldiff} has wrong parity for ldiff={ldiff}")
        coeffs[e // 2] = c
    if not coeffs:
        return []
    return [coeffs.get(d, 0) for d in range(max(coeffs) + 1)]


def from_q_polynomial(coeffs: Iterable[int], ldiff: int) -> LaurentPoly:
    """Inverse of :func:`to_q_polynomial`."""
    return LaurentPoly((2 * d - ldiff, c) for d, c in enumerate(coeffs))


def mu_coefficient(f: LaurentPoly) -> int:
    return f.coeff(-1)


def q_poly_to_str(coeffs: list[int]) -> str:
    parts = []
    for d, c in enumerate(coeffs):
        if not c:
            continue
        if d == 0:
            parts.append(str(c))
        else:
            var = "q" if d == 1 else f"q^{d}"
            parts.append(var if c == 1 else f"{c}*{var}")
    return " + ".join(parts).replace("+ -", "- ") or "0"
