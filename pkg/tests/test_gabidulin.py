from __future__ import annotations

import random

import pytest

from miranda.field import FieldBasis, QPolynomial, field, polynomial_basis, random_basis, rank_weight
from miranda.gabidulin import (GabidulinCode, MatrixGabidulin, gab_decode, gab_encode,
                               sample_gabidulin, sample_matrix_gabidulin)
from miranda.matrank import bits_rank, gf2_rank, parity


def plant_error(ctx, n, r, rng):
    """Random vector of rank exactly r."""
    supp = random_basis(ctx, rng, r) if r else []
    while True:
        rows = [rng.getrandbits(n) for _ in range(r)]
        if gf2_rank(rows) == r:
            break
    e = [0] * n
    for b, row in zip(supp, rows):
        for j in range(n):
            if (row >> j) & 1:
                e[j] ^= b
    assert rank_weight(e) == r
    return e


def test_encode_examples():
    F = field(4)
    r = random.Random(1)
    C = GabidulinCode(F, random_basis(F, r), 2)
    assert gab_encode(C, QPolynomial.zero(F)) == [0] * 4
    assert gab_encode(C, QPolynomial.identity(F)) == list(C.g)
    alpha = 0b0010
    P = QPolynomial(F, [1, alpha])
    assert gab_encode(C, P) == [g ^ F.mul(alpha, F.mul(g, g)) for g in C.g]
    with pytest.raises(ValueError):
        gab_encode(C, QPolynomial(F, [0, 0, 1]))


def test_dependent_points_rejected():
    F = field(4)
    with pytest.raises(ValueError):
        GabidulinCode(F, [1, 2, 3, 4], 2)
    with pytest.raises(ValueError):
        GabidulinCode(F, [1, 2], 3)


@pytest.mark.parametrize("kappa", [1, 2, 3])
def test_mrd_exhaustive(kappa):
    MG = sample_matrix_gabidulin(4, kappa, random.Random(kappa))
    vecs = MG.matbasis.vectors
    assert MG.matbasis.dim == 4 * kappa == gf2_rank(vecs)
    dmin = 5
    span = [0]
    for v in vecs:
        span += [x ^ v for x in span]
    for w in span[1:]:
        dmin = min(dmin, bits_rank(w, 4, 4))
    assert dmin == 4 - kappa + 1


def test_matrix_gabidulin_extremes():
    full = sample_matrix_gabidulin(4, 4, random.Random(2))
    assert full.matbasis.dim == 16 and full.dual_matbasis.dim == 0
    zero = sample_matrix_gabidulin(4, 0, random.Random(3))
    assert zero.matbasis.dim == 0 and zero.dual_matbasis.dim == 16


@pytest.mark.parametrize("m,kappa", [(4, 2), (6, 2), (8, 6), (7, 3)])
def test_dual_matbasis_orthogonal(m, kappa):
    MG = sample_matrix_gabidulin(m, kappa, random.Random(m))
    P, D = MG.matbasis.vectors, MG.dual_matbasis.vectors
    assert len(D) == m * (m - kappa) == gf2_rank(D)
    assert all(parity(a & b) == 0 for a in P for b in D)


def test_parity_vector_short_code():
    F = field(8)
    r = random.Random(4)
    C = GabidulinCode(F, random_basis(F, r, 6), 2)
    for _ in range(20):
        assert C.contains(C.random_codeword(r))
    assert not C.contains([1, 0, 0, 0, 0, 0])


def test_decode_zero_error():
    C = sample_gabidulin(8, 4, random.Random(5))
    c = C.random_codeword(random.Random(6))
    assert gab_decode(c, C) == [0] * 8
    assert gab_decode(c, C, "reconstruction") == [0] * 8


def test_decode_m6_k2():
    r = random.Random(7)
    C = sample_gabidulin(6, 2, r)
    for _ in range(1000):
        e = plant_error(C.ctx, 6, r.randint(0, 2), r)
        y = [a ^ b for a, b in zip(C.random_codeword(r), e)]
        assert gab_decode(y, C) == e
    for _ in range(100):
        e = plant_error(C.ctx, 6, 2, r)
        y = [a ^ b for a, b in zip(C.random_codeword(r), e)]
        assert gab_decode(y, C, "reconstruction") == e


@pytest.mark.parametrize("m,kappa,n", [(8, 6, 8), (8, 2, 6), (9, 3, 9), (10, 4, 7)])
def test_decoders_agree(m, kappa, n):
    r = random.Random(m * 31 + kappa)
    C = sample_gabidulin(m, kappa, r, n)
    for _ in range(150):
        if r.random() < 0.5:
            y = [C.ctx.random(r) for _ in range(n)]
        else:
            e = plant_error(C.ctx, n, r.randint(0, C.t + 1), r)
            y = [a ^ b for a, b in zip(C.random_codeword(r), e)]
        a = gab_decode(y, C)
        b = gab_decode(y, C, "reconstruction")
        assert a == b
        if a is not None:
            assert rank_weight(a) <= C.t
            assert C.contains([yi ^ ei for yi, ei in zip(y, a)])


def test_random_word_contract_m8():
    r = random.Random(8)
    C = sample_gabidulin(8, 6, r)
    hits = 0
    for _ in range(500):
        y = [C.ctx.random(r) for _ in range(8)]
        e = gab_decode(y, C)
        if e is not None:
            hits += 1
            assert rank_weight(e) <= 1
            assert C.contains([a ^ b for a, b in zip(y, e)])
    # balls of radius 1 cover a constant fraction of the space at these sizes
    assert hits > 50


def test_decode_deterministic():
    r = random.Random(10)
    C = sample_gabidulin(12, 6, r)
    y = [C.ctx.random(r) for _ in range(12)]
    assert gab_decode(list(y), C) == gab_decode(list(y), C)
    with pytest.raises(ValueError):
        gab_decode(y[:3], C)
    with pytest.raises(ValueError):
        gab_decode(y, C, "bogus")


def test_matrix_side_consistency():
    r = random.Random(12)
    MG = sample_matrix_gabidulin(8, 4, r)
    C = MG.code
    for _ in range(30):
        c = C.random_codeword(r)
        e = plant_error(C.ctx, 8, 2, r)
        Y = MG.to_matrix([a ^ b for a, b in zip(c, e)])
        E = MG.decode_matrix(Y)
        assert E is not None and E.rank() == 2
        assert MG.matbasis.contains((Y + E).bits)
        assert MG.vector_to_bits(c) == MG.to_matrix(c).bits
        assert MG.bits_to_vector(Y.bits) == MG.to_vector(Y)
