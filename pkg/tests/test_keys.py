from __future__ import annotations

import pytest

from miranda.analysis.registry import get_params
from miranda.keys import InvalidParameters, ParameterSet, keygen, systematic_positions
from miranda.matrank import MatrixCode, gf2_rank, trace_pairing, BinMatrix


def _pair(x: int, y: int) -> int:
    return (x & y).bit_count() & 1


@pytest.mark.parametrize("name", ["micro-8", "toy-16", "weak-12"])
def test_dimensions(name):
    p = get_params(name)
    kp = keygen(p, seed=1)
    m, n = p.m, p.n
    assert len(kp.pk.duals) == p.syn_len
    assert gf2_rank(kp.pk.duals) == p.syn_len
    assert len(kp.sk.extra) == p.l_a
    assert p.code_dim + p.syn_len == m * n


def test_systematic_form():
    p = get_params("toy-16")
    kp = keygen(p, seed=7)
    k = p.code_dim
    pos = systematic_positions(p)
    assert pos == list(range(k, k + p.syn_len))
    for i, d in enumerate(kp.pk.duals):
        assert d >> k == 1 << i


def test_deterministic_seed():
    p = get_params("micro-8")
    a, b, c = keygen(p, seed=b"x"), keygen(p, seed=b"x"), keygen(p, seed=b"y")
    assert a.pk == b.pk and a.sk.g == b.sk.g
    assert a.pk != c.pk


def test_public_code_structure():
    """D^perp lies in C_s^perp, and the extra rows complete it to C_s^perp."""
    p = get_params("micro-8")
    kp = keygen(p, seed=3)
    cs = kp.sk.subcode(kp.pk)
    assert cs.dim == p.kappa * p.m - p.l_s
    rows = list(kp.pk.duals) + list(kp.sk.extra)
    assert gf2_rank(rows) == p.ext_len
    for c in cs.vectors:
        assert all(_pair(c, r) == 0 for r in rows)
        assert kp.sk.gab.matbasis.contains(c)
    # the added part A meets the Gabidulin code only in zero and is orthogonal to D^perp
    A = kp.sk.a_basis
    assert gf2_rank(list(A.vectors) + list(kp.sk.gab.matbasis.vectors)) == A.dim + kp.sk.gab.matbasis.dim
    for a in A.vectors:
        assert all(_pair(a, d) == 0 for d in kp.pk.duals)


def test_dual_code_method():
    p = get_params("micro-8")
    kp = keygen(p, seed=4)
    D = kp.pk.dual_code()
    assert isinstance(D, MatrixCode) and D.dim == p.syn_len
    assert trace_pairing(BinMatrix(p.m, p.n, kp.pk.duals[0]), BinMatrix(p.m, p.n, kp.pk.duals[0])) in (0, 1)


@pytest.mark.parametrize("kw", [
    dict(m=8, n=9, kappa=6, t=1, l_a=8, l_s=0),
    dict(m=8, n=8, kappa=5, t=1, l_a=8, l_s=0),
    dict(m=8, n=8, kappa=6, t=2, l_a=8, l_s=0),
    dict(m=8, n=8, kappa=6, t=1, l_a=-1, l_s=0),
    dict(m=8, n=8, kappa=6, t=1, l_a=8, l_s=0, lam=100),
])
def test_invalid_parameters(kw):
    with pytest.raises(InvalidParameters):
        ParameterSet("bad", **kw).validate()


def test_gv_condition_rejected():
    # without added dimensions the public code has dimension 48 and radius about 1.07
    with pytest.raises(InvalidParameters):
        ParameterSet("bad", 8, 8, 6, 1, 0, 0).validate()
    ParameterSet("ok", 8, 8, 6, 1, 8, 0).validate()
