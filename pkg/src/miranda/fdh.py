"""Hash-to-syndrome, trapdoor preimage sampling, signing and verification."""
from __future__ import annotations

import enum
import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .analysis.counting import density_log2
from .keys import ParameterSet, PublicKey, Trapdoor
from .matrank import BinMatrix, GF2Span, bits_rank, gf2_solve, spread_column, syndrome_bits
from .rng import make_rng

HASH_TAG = b"miranda/h2s/v1"


class Verdict(enum.Enum):
    ACCEPT = "accept"
    REJECT_SYNDROME = "reject:syndrome-mismatch"
    REJECT_RANK = "reject:rank-too-large"
    REJECT_NO_SOLUTION = "reject:support-system-unsolvable"
    MALFORMED = "malformed"

    @property
    def accepted(self) -> bool:
        return self is Verdict.ACCEPT

    def __bool__(self) -> bool:
        return self.accepted


class SigningError(RuntimeError):
    pass


@dataclass(frozen=True)
class RawSignature:
    E: BinMatrix
    salt: bytes
    trials: int = 0


def hash_to_syndrome(message: bytes, salt: bytes, params: ParameterSet) -> int:
    """First syn_len bits (LSB-first) of SHAKE-256(tag || len(name) || name || salt || message)."""
    name = params.name.encode()
    h = hashlib.shake_256()
    h.update(HASH_TAG)
    h.update(len(name).to_bytes(2, "little"))
    h.update(name)
    h.update(salt)
    h.update(message)
    n = params.syn_len
    return int.from_bytes(h.digest((n + 7) // 8), "little") & ((1 << n) - 1)


def default_max_trials(params: ParameterSet) -> int:
    return 2 ** 8 * math.ceil(2.0 ** -density_log2(params))


class PreimageSampler:
    """Inverts the public syndrome map with the trapdoor.

    Each trial guesses the l_a extra syndrome bits t, forms a matrix Y whose
    extended syndrome against (duals, extra) is (s, t), decodes it in the
    hidden Gabidulin code and keeps the result only if its extended
    syndrome is exactly (s, t).

    Y itself is never materialized: Y = sum_u x_u Y_u for fixed particular
    solutions Y_u, and only the (linear) Gabidulin syndrome of Y is needed
    to decode, so the packed syndromes of the Y_u are tabulated once.
    """

    def __init__(self, pk: PublicKey, sk: Trapdoor):
        params = pk.params
        self.pk, self.sk, self.params = pk, sk, params
        gab = sk.gab
        self.code = gab.code
        self.m, self.n = params.m, params.n
        mn = self.m * self.n
        self.rows = list(pk.duals) + list(sk.extra)
        ext = len(self.rows)
        if ext != params.ext_len:
            raise ValueError("trapdoor does not match the public key")
        span = GF2Span(r | (1 << (mn + i)) for i, r in enumerate(self.rows))
        piv = span.pivots()
        if len(piv) != ext or piv[-1] >= mn:
            raise ValueError("duals and extra are not independent")
        # unit-matrix Gabidulin syndromes at each pivot position
        ctx = self.code.ctx
        H = self.code.H
        m = self.m
        elems = gab.basis.elems
        gsz = []
        for p in piv:
            i, j = divmod(p, self.n)
            packed = 0
            for k, row in enumerate(H):
                packed |= ctx.mul(elems[i], row[j]) << (k * m)
            gsz.append(packed)
        # Y_u = sum_v T[v][u] Z_{piv_v}; tabulate GS(Y_u)
        gs = [0] * ext
        for v, p in enumerate(piv):
            trow = span.rows[p] >> mn
            g = gsz[v]
            while trow:
                low = trow & -trow
                gs[low.bit_length() - 1] ^= g
                trow ^= low
        self._gs = gs
        self._syn_len = params.syn_len
        self._elem_mask = (1 << m) - 1
        self.max_trials = default_max_trials(params)

    def _gabidulin_syndrome(self, x: int) -> int:
        gs, acc = self._gs, 0
        while x:
            low = x & -x
            acc ^= gs[low.bit_length() - 1]
            x ^= low
        return acc

    def _trial(self, base: int, s: int, t: int) -> int | None:
        x = s | (t << self._syn_len)
        packed = base ^ self._gabidulin_syndrome(t << self._syn_len)
        m, mask = self.m, self._elem_mask
        S = [(packed >> (k * m)) & mask for k in range(self.code.redundancy)]
        e = self.code.decode_syndrome(S)
        if e is None:
            return None
        E = self.sk.gab.vector_to_bits(e)
        if syndrome_bits(E, self.rows) != x:
            return None  # extended syndrome re-check failed: discard
        return E

    def sample(self, s: int, rng, max_trials: int | None = None,
               workers: int = 1) -> tuple[BinMatrix, int] | None:
        """(E, trials used) or None when the trial budget is exhausted."""
        if s >> self._syn_len:
            raise ValueError("syndrome has the wrong length")
        budget = self.max_trials if max_trials is None else max_trials
        la = self.params.l_a
        if la == 0:
            budget = min(budget, 1)
        base = self._gabidulin_syndrome(s)
        m, n = self.m, self.n
        if workers <= 1:
            for trial in range(1, budget + 1):
                E = self._trial(base, s, rng.getrandbits(la) if la else 0)
                if E is not None:
                    return BinMatrix(m, n, E), trial
            return None
        done = 0
        with ThreadPoolExecutor(max_workers=workers) as pool:
            while done < budget:
                batch = min(workers * 4, budget - done)
                guesses = [rng.getrandbits(la) if la else 0 for _ in range(batch)]
                results = list(pool.map(lambda t: self._trial(base, s, t), guesses))
                for i, E in enumerate(results):
                    if E is not None:  # first success in draw order
                        return BinMatrix(m, n, E), done + i + 1
                done += batch
        return None


def samp_pre(s: int, sk: Trapdoor, pk: PublicKey, rng, max_trials: int | None = None) -> BinMatrix | None:
    res = PreimageSampler(pk, sk).sample(s, rng, max_trials)
    return None if res is None else res[0]


def sign(message: bytes, sk: Trapdoor, pk: PublicKey, rng=None, sampler: PreimageSampler | None = None,
         max_salts: int = 64, workers: int = 1) -> RawSignature:
    rng = make_rng() if rng is None else rng
    sampler = sampler or PreimageSampler(pk, sk)
    params = pk.params
    total = 0
    for _ in range(max_salts):
        salt = rng.getrandbits(8 * params.salt_bytes).to_bytes(params.salt_bytes, "little")
        s = hash_to_syndrome(message, salt, params)
        res = sampler.sample(s, rng, workers=workers)
        if res is None:
            total += sampler.max_trials if params.l_a else 1
            continue
        E, trials = res
        return RawSignature(E, salt, total + trials)
    raise SigningError("no preimage found within the salt budget; check the parameters")


def support_system(support: BinMatrix, duals: Sequence[int], n: int) -> list[int]:
    """Rows of the linear system in the coefficients a[k][j] (unknown k*n + j).

    E = support @ A has column j equal to sum_k a[k][j] * support_col_k.
    """
    cols = support.column_ints()
    unknown_syn = []
    for c in cols:
        base = spread_column(c, n)
        for j in range(n):
            unknown_syn.append(syndrome_bits(base << j, duals))
    nrows = len(duals)
    rows = [0] * nrows
    for v, col in enumerate(unknown_syn):
        while col:
            low = col & -col
            rows[low.bit_length() - 1] |= 1 << v
            col ^= low
    return rows


def verify(message: bytes, sig, pk: PublicKey) -> Verdict:
    """Raw signatures: syndrome and rank check.  Compact signatures (anything
    with a `support` attribute): solvability of the support system."""
    params = pk.params
    m, n = params.m, params.n
    salt = getattr(sig, "salt", None)
    if not isinstance(salt, (bytes, bytearray)) or len(salt) != params.salt_bytes:
        return Verdict.MALFORMED
    s = hash_to_syndrome(message, bytes(salt), params)
    support = getattr(sig, "support", None)
    if support is not None:
        if not isinstance(support, BinMatrix) or support.rows != m or support.cols != params.t:
            return Verdict.MALFORMED
        if params.t == 0:
            return Verdict.ACCEPT if s == 0 else Verdict.REJECT_SYNDROME
        rows = support_system(support, pk.duals, n)
        return Verdict.ACCEPT if gf2_solve(rows, params.t * n, s) is not None else Verdict.REJECT_NO_SOLUTION
    E = getattr(sig, "E", None)
    if not isinstance(E, BinMatrix) or E.shape != (m, n):
        return Verdict.MALFORMED
    if E.rank() > params.t:
        return Verdict.REJECT_RANK
    if syndrome_bits(E.bits, pk.duals) != s:
        return Verdict.REJECT_SYNDROME
    return Verdict.ACCEPT
