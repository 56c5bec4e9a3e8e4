from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from miranda.analysis.registry import get_params
from miranda.fdh import (PreimageSampler, RawSignature, Verdict, hash_to_syndrome, samp_pre, sign,
                         support_system, verify)
from miranda.keys import keygen
from miranda.matrank import BinMatrix, syndrome_bits
from miranda.wire import decode_signature, encode_signature


@pytest.fixture(scope="module")
def toy16():
    p = get_params("toy-16")
    return p, keygen(p, seed=16)


@pytest.fixture(scope="module")
def micro():
    p = get_params("micro-8")
    return p, keygen(p, seed=8)


def test_hash_length_and_domain():
    p, q = get_params("toy-16"), get_params("toy-24")
    salt = bytes(16)
    s = hash_to_syndrome(b"msg", salt, p)
    assert s >> p.syn_len == 0
    assert s == hash_to_syndrome(b"msg", salt, p)
    assert s != hash_to_syndrome(b"msg", bytes([1]) + bytes(15), p)
    # same lengths, different names: different outputs
    p2 = get_params("micro-8")
    p3 = get_params("toy-8")
    assert (p2.syn_len, p2.m) == (p3.syn_len, p3.m)
    outs = {hash_to_syndrome(bytes([i]), salt, p2) == hash_to_syndrome(bytes([i]), salt, p3) for i in range(8)}
    assert False in outs
    assert hash_to_syndrome(b"msg", salt, q) >> q.syn_len == 0


def test_samp_pre_contract(micro):
    p, kp = micro
    rng = random.Random(2)
    for _ in range(20):
        s = rng.getrandbits(p.syn_len)
        E = samp_pre(s, kp.sk, kp.pk, rng)
        assert E is not None
        assert E.rank() <= p.t
        assert syndrome_bits(E.bits, kp.pk.duals) == s


def test_sampler_budget_exhaustion(toy16):
    # density about 2^-2.6: a single trial fails most of the time
    p, kp = toy16
    sampler = PreimageSampler(kp.pk, kp.sk)
    rng = random.Random(0)
    results = [sampler.sample(rng.getrandbits(p.syn_len), rng, max_trials=1) for _ in range(50)]
    assert any(r is None for r in results)
    assert all(r[1] == 1 for r in results if r is not None)


def test_sampler_threads_agree(micro):
    p, kp = micro
    sampler = PreimageSampler(kp.pk, kp.sk)
    s = 0x5A
    r = sampler.sample(s, random.Random(9), workers=4)
    assert r is not None
    E, trials = r
    assert syndrome_bits(E.bits, kp.pk.duals) == s and E.rank() <= p.t and trials >= 1


def test_raw_roundtrip_and_rejections(toy16):
    p, kp = toy16
    rng = random.Random(5)
    sig = sign(b"hello", kp.sk, kp.pk, rng=rng)
    assert sig.trials >= 1
    assert verify(b"hello", sig, kp.pk) is Verdict.ACCEPT
    assert verify(b"hellp", sig, kp.pk) is Verdict.REJECT_SYNDROME
    full = BinMatrix(p.m, p.n, sum(1 << (i * p.n + i) for i in range(p.m)))
    assert verify(b"hello", RawSignature(full, sig.salt), kp.pk) is Verdict.REJECT_RANK
    assert verify(b"hello", RawSignature(sig.E, sig.salt[:-1]), kp.pk) is Verdict.MALFORMED
    assert verify(b"hello", RawSignature(BinMatrix(p.m, p.n - 1, 0), sig.salt), kp.pk) is Verdict.MALFORMED
    assert not Verdict.REJECT_RANK and Verdict.ACCEPT


def test_compact_roundtrip(toy16):
    p, kp = toy16
    rng = random.Random(6)
    for i in range(5):
        msg = b"m%d" % i
        raw = sign(msg, kp.sk, kp.pk, rng=rng)
        blob = encode_signature(raw.E, raw.salt, p, rng)
        sig = decode_signature(blob, p)
        assert verify(msg, sig, kp.pk) is Verdict.ACCEPT
        # toy-16 has t n = 32 coefficient unknowns against 56 syndrome bits
        assert verify(msg + b"!", sig, kp.pk) is Verdict.REJECT_NO_SOLUTION


def test_support_system_matches_syndrome(toy16):
    p, kp = toy16
    rng = random.Random(3)
    raw = sign(b"x", kp.sk, kp.pk, rng=rng)
    sig = decode_signature(encode_signature(raw.E, raw.salt, p, rng), p)
    rows = support_system(sig.support, kp.pk.duals, p.n)
    assert len(rows) == p.syn_len
    # any coefficient choice maps to the syndrome of support @ A
    cols = sig.support.column_ints()
    for _ in range(5):
        a = rng.getrandbits(p.t * p.n)
        E = 0
        for k, c in enumerate(cols):
            for j in range(p.n):
                if (a >> (k * p.n + j)) & 1:
                    for i in range(p.m):
                        if (c >> i) & 1:
                            E ^= 1 << (i * p.n + j)
        syn = 0
        for r, row in enumerate(rows):
            if (row & a).bit_count() & 1:
                syn |= 1 << r
        assert syn == syndrome_bits(E, kp.pk.duals)


@given(st.binary(max_size=64), st.integers(0, 2 ** 64))
def test_sign_verify_property(msg, seed):
    p = get_params("micro-8")
    kp = _micro_key()
    sig = sign(msg, kp.sk, kp.pk, rng=random.Random(seed))
    assert verify(msg, sig, kp.pk).accepted


_cache = {}


def _micro_key():
    if "k" not in _cache:
        _cache["k"] = keygen(get_params("micro-8"), seed=99)
    return _cache["k"]
