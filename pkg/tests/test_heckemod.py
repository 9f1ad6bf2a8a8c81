import random

import pytest

from klq.coxeter import (
    NotCosetRep, NotReduced, affine_a, bruhat_leq, build_system, canonical_word,
    identity, is_min_coset_rep, mul_gen_right, reduced_words, type_a, word_to_element,
)
from klq.heckemod import ModuleVector, apply_Cs, axpy_sub, census, d_prime, unit
from klq.laurent import LaurentPoly

from conftest import A2, A3, B3, elements, parabolics

T = LaurentPoly.monomial


def el(S, *labels):
    return word_to_element(S, S.indices(labels))[0]


def vec(S, mapping):
    return ModuleVector(S, {el(S, *k): v for k, v in mapping.items()})


# Independent reference: the T_s action on the unnormalized basis m_x,
# with C'_s = t^-1 (T_e + T_s) and q = t^2.
def reference_Cs(S, v, s):
    out = {}

    def add(x, f):
        out[x] = out.get(x, LaurentPoly.zero()) + f

    for x, f in v.items():
        g = f.shift(-x.length)  # coefficient on m_x
        xs = mul_gen_right(S, x, s)
        # m_x T_s
        if xs.length > x.length and is_min_coset_rep(S, xs):
            add(xs, g)
        elif xs.length < x.length:
            add(x, g * (T(2) - T(0)))
            add(xs, g * T(2))
        else:
            add(x, g * T(2))
        add(x, g)  # m_x T_e
    # multiply by t^-1 and renormalize
    return {x: f.shift(x.length - 1) for x, f in out.items() if f}


def random_vector(S, rng, reps):
    coeffs = {}
    for x in rng.sample(reps, min(len(reps), 5)):
        coeffs[x] = LaurentPoly({rng.randint(-4, 4): rng.randint(-3, 3) for _ in range(3)})
    return ModuleVector(S, coeffs)


def test_unit():
    S = build_system(A2)
    v = unit(S)
    assert dict(v.items()) == {identity(S): LaurentPoly.one()}
    assert v[el(S, 1)] == LaurentPoly.zero()


def test_apply_examples():
    S = build_system(A2)
    assert apply_Cs(unit(S), 0) == vec(S, {(): T(-1), (1,): T(0)})
    SJ = build_system(A2, [1])
    assert apply_Cs(unit(SJ), 0) == vec(SJ, {(): T(1) + T(-1)})
    assert apply_Cs(vec(S, {(1,): T(0)}), 0) == vec(S, {(1,): T(1), (): T(0)})


def test_d_prime_examples():
    S1 = build_system([[2]])
    assert d_prime(S1, [0]) == vec(S1, {(): T(-1), (1,): T(0)})
    S = build_system(A2)
    assert d_prime(S, S.indices([1, 2])) == vec(
        S, {(): T(-2), (1,): T(-1), (2,): T(-1), (1, 2): T(0)})
    assert d_prime(S, []) == unit(S)


def test_d_prime_errors():
    S = build_system(A2)
    with pytest.raises(NotReduced):
        d_prime(S, [0, 0])
    SJ = build_system(A2, [1])
    with pytest.raises(NotCosetRep):
        d_prime(SJ, [0])


def test_axpy_sub():
    S = build_system([[2]])
    v = vec(S, {(): T(2), (1,): T(0)})
    w = vec(S, {(): T(1), (1,): T(-1)})
    assert axpy_sub(v, LaurentPoly.zero(), w) == v
    assert len(axpy_sub(v, LaurentPoly.one(), v)) == 0
    assert axpy_sub(v, T(1), w) == vec(S, {(1,): T(0) - T(0)}) == ModuleVector(S)


@pytest.mark.parametrize("make", [
    lambda: list(parabolics(A3)), lambda: list(parabolics(B3)),
    lambda: [affine_a(2), affine_a(3, [1, 3])],
])
def test_apply_matches_T_action(make):
    rng = random.Random(3)
    for S in make():
        reps = [x for x in elements(S, 6) if is_min_coset_rep(S, x)]
        for _ in range(10):
            v = random_vector(S, rng, reps)
            for s in range(S.rank):
                assert dict(apply_Cs(v, s).items()) == reference_Cs(S, v, s)
                assert all(is_min_coset_rep(S, x) for x in apply_Cs(v, s))


@pytest.mark.parametrize("cartan", [A3, B3], ids=["A3", "B3"])
def test_d_prime_properties(cartan):
    for S in parabolics(cartan):
        for y in elements(S):
            if not is_min_coset_rep(S, y):
                continue
            words = reduced_words(S, y)
            words = [tuple(w) for w in words]
            vectors = [d_prime(S, w) for w in words]
            v = vectors[0]
            assert v[y] == LaurentPoly.one()
            for x, f in v.items():
                assert is_min_coset_rep(S, x)
                assert bruhat_leq(S, x, y)
                assert f.parity_ok((y.length - x.length) % 2)
                assert all(c > 0 for _, c in f.items())
            # commutation moves do not change the product (braid moves do)
            for w, u in zip(words, vectors):
                for i in range(len(w) - 1):
                    a, b = w[i], w[i + 1]
                    if S.cartan[a][b] == 0:
                        swapped = w[:i] + (b, a) + w[i + 2:]
                        assert d_prime(S, swapped) == u


def test_census_tracks_live_vectors():
    S = type_a(2)
    before = census.live
    v = d_prime(S, [0, 1])
    assert census.live == before + 1
    del v
    assert census.live == before
