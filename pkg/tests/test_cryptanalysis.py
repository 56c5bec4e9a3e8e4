from __future__ import annotations

import random

import pytest

from miranda.analysis.costs import structural_attack_cost_log2
from miranda.analysis.registry import get_params
from miranda.cryptanalysis import (RANDOM_LIKE, STRUCTURED, SearchProfile, algebra_closure, algebra_join,
                                   calibrate_search, collinearity_recover, distinguish, find_low_rank,
                                   is_field_generator, krylov_polynomial, pair_solutions,
                                   random_code_like, same_rowspace_mate, stabilizes, structural_attack)
from miranda.field import field
from miranda.gabidulin import sample_matrix_gabidulin
from miranda.keys import keygen
from miranda.matrank import BinMatrix, GF2Span, MatrixCode, bits_rank, bits_to_rows, gf2_matmul, random_code


def _times(MG, alpha: int, bits: int) -> int:
    """Matrix of alpha * x for the vector x with matrix `bits`."""
    ctx = MG.ctx
    return MG.vector_to_bits([ctx.mul(alpha, x) for x in MG.bits_to_vector(bits)])


def _companion(f: int, m: int) -> list[int]:
    """Rows of the companion matrix of the monic degree-m polynomial f."""
    rows = [0] * m
    for i in range(1, m):
        rows[i] |= 1 << (i - 1)
    for i in range(m):
        if (f >> i) & 1:
            rows[i] |= 1 << (m - 1)
    return rows


# ---------------------------------------------------------------- low-rank search

def test_profile():
    prof = SearchProfile(4, 4, 9, 2)
    assert (prof.a, prof.b) == (2, 1)
    assert len(prof.constrained) == 8
    assert prof.success_probability() == 1  # s = n - a
    assert 0 < SearchProfile(4, 4, 9, 1).success_probability() < 1
    with pytest.raises(ValueError):
        SearchProfile(4, 4, 9, 3)  # s > n - a


def test_single_loop_at_n_minus_a():
    rng = random.Random(1)
    for _ in range(100):
        C = random_code(5, 5, 12, rng)
        res = find_low_rank(C, 5 - 2, 1, rng)
        assert res.found and res.loops == 1
        assert C.contains(res.word.bits) and 0 < res.word.rank() <= 3


def test_zero_code_and_budget():
    rng = random.Random(2)
    with pytest.raises(ValueError):
        find_low_rank(MatrixCode(4, 4, [], check=False), 2, 10, rng)
    C = random_code(4, 4, 5, rng)
    res = find_low_rank(C, 1, 0, rng)
    assert not res.found and res.loops == 0
    assert distinguish(C, get_params("toy-16"), 0, rng)[0] == STRUCTURED


def test_search_finds_in_structured_code():
    rng = random.Random(3)
    MG = sample_matrix_gabidulin(6, 3, rng)
    res = find_low_rank(MG.matbasis, 4, 1, rng)  # s = n - a
    assert res.found and res.word.rank() == 4  # minimum distance n - kappa + 1


def test_calibration_small():
    cal = calibrate_search(4, 4, 5, 2, 300, random.Random(4))
    # a few random codes have no rank-2 word at all; those searches hit the cap
    assert cal.successes >= 0.95 * cal.searches
    assert 0.25 <= cal.ratio <= 4


def test_distinguisher_small_corpus():
    p = get_params("toy-16")
    rng = random.Random(5)
    for i in range(2):
        D = keygen(p, seed=1000 + i).pk.dual_code()
        assert distinguish(D, p, None, rng)[0] == STRUCTURED
        assert distinguish(random_code_like(D, rng), p, None, rng)[0] == RANDOM_LIKE


# ---------------------------------------------------------------- row spaces and collinearity

def test_same_rowspace_means_collinear():
    rng = random.Random(6)
    MG = sample_matrix_gabidulin(6, 3, rng)
    code = MG.matbasis
    ctx = MG.ctx
    for _ in range(3):
        x = find_low_rank(code, 4, 1, rng).word.bits
        W = same_rowspace_mate(code, x)
        assert len(W) == 6  # the F_{2^6}-line through x
        xv = MG.bits_to_vector(x)
        j = next(i for i, c in enumerate(xv) if c)
        for mask in range(1, 64, 7):
            y = 0
            for k, w in enumerate(W):
                if (mask >> k) & 1:
                    y ^= w
            c = ctx.div(MG.bits_to_vector(y)[j], xv[j])
            assert y == _times(MG, c, x)
        assert len(same_rowspace_mate(code, x, exclude_word=True)) == 5


def test_pair_solutions_edge_cases():
    rng = random.Random(7)
    MG = sample_matrix_gabidulin(5, 2, rng)
    x = MG.matbasis.vectors[0]
    with pytest.raises(ValueError):
        pair_solutions(x, x, 5, 5)
    other = random_code(5, 5, 1, rng).vectors[0]
    if GF2Span(bits_to_rows(other, 5, 5)).basis() != GF2Span(bits_to_rows(x, 5, 5)).basis():
        assert pair_solutions(x, other, 5, 5) is None


def test_collinearity_recovers_multiplier():
    rng = random.Random(8)
    m = 5
    MG = sample_matrix_gabidulin(m, 1, rng)  # every nonzero word has rank m
    ctx = MG.ctx
    x = MG.matbasis.vectors[0]
    alpha = 0b00110
    y = _times(MG, alpha, x)
    P = collinearity_recover(x, y, m, m)
    assert P is not None
    assert gf2_matmul(P, bits_to_rows(x, m, m)) == bits_to_rows(y, m, m)
    assert is_field_generator(P, m)
    # P acts as alpha on the whole code
    for v in MG.matbasis.vectors:
        assert gf2_matmul(P, bits_to_rows(v, m, m)) == bits_to_rows(_times(MG, alpha, v), m, m)


# ---------------------------------------------------------------- algebras

def test_algebra_closure_cases():
    m = 6
    I = [1 << i for i in range(m)]
    alg = algebra_closure(I, m)
    assert alg.dimension == 1 and alg.is_field
    f = field(m).modulus
    C = _companion(f, m)
    assert krylov_polynomial(C, 1) == f
    alg = algebra_closure(C, m)
    assert alg.dimension == m and alg.is_field and alg.minpoly == f
    E = [1] + [0] * (m - 1)  # idempotent diag(1, 0, ..., 0)
    alg = algebra_closure(E, m)
    assert alg.dimension == 2 and not alg.is_field
    assert algebra_closure(BinMatrix(m, m, sum(1 << (i * m + i) for i in range(m)))).dimension == 1


def test_algebra_join_subfields():
    # F_4 and F_8 inside F_64 generate the whole field
    ctx = field(6)
    g = ctx._find_generator()
    a4 = ctx.pow(g, 63 // 3)
    a8 = ctx.pow(g, 63 // 7)
    A = algebra_closure(ctx.mul_matrix(a4))
    B = algebra_closure(ctx.mul_matrix(a8))
    assert (A.dimension, B.dimension) == (2, 3)
    J = algebra_join(A, B)
    assert J.dimension == 6 and J.is_field


def test_field_algebra_stabilizes_gabidulin_image():
    rng = random.Random(9)
    MG = sample_matrix_gabidulin(5, 2, rng)
    code = MG.matbasis
    x = code.vectors[0]
    y = _times(MG, 0b10, x)
    # kappa = 2 words have rank 4 < m, so the multiplier is fixed by a second pair
    P = collinearity_recover(x, y, 5, 5, code=code.vectors, bound=code.dim,
                             partner=(code.vectors[5], _times(MG, 0b10, code.vectors[5])))
    assert P is not None
    assert stabilizes(algebra_closure(P, 5), code.vectors, 5, 5, code.dim)


# ---------------------------------------------------------------- structural attack

@pytest.fixture(scope="module")
def weak_key():
    p = get_params("weak-12")
    return p, keygen(p, seed=1212)


def test_structural_attack_weak_key(weak_key):
    p, kp = weak_key
    res = structural_attack(kp.pk.dual_code(), p, 10 ** 4, random.Random(10))
    assert res.success and res.algebra_dimension == p.m
    assert res.iterations == res.loops + res.pairs <= 10 ** 4
    sec = kp.sk.gab.dual_matbasis
    assert stabilizes(res.algebra, sec.vectors, p.m, p.n, sec.dim)


def test_structural_attack_random_code(weak_key):
    p, kp = weak_key
    rng = random.Random(11)
    res = structural_attack(random_code_like(kp.pk.dual_code(), rng), p, 2000, rng)
    assert not res.success and res.iterations == 2000


def test_structural_attack_hardened_key():
    p = get_params("hard-12")
    case1 = max(structural_attack_cost_log2(p)["per_s"], key=lambda r: r["s"])
    assert case1["case"] == 1 and case1["exponent"] >= 20
    kp = keygen(p, seed=7)
    res = structural_attack(kp.pk.dual_code(), p, 1000, random.Random(12))
    assert not res.success and res.iterations == 1000
