"""Add-and-Remove key generation over matrix Gabidulin codes.

The public code is D = C_s + A where C_s is a random subcode of codimension
l_s of a matrix Gabidulin code C and A is a random l_a-dimensional code with
A meeting C only in zero.  The public key is a basis of the dual of D.

Everything is computed on the dual side so no elimination over the
(large) code C itself is ever needed:

    C_s^perp = C^perp + R            (R: l_s random vectors independent mod C^perp)
    D^perp   = {x in C_s^perp : <x, a> = 0 for all a in A}
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .field import FieldBasis, field, random_basis
from .gabidulin import GabidulinCode, MatrixGabidulin
from .matrank import (BinMatrix, GF2Span, MatrixCode, gf2_kernel, gf2_matmul, gf2_rank,
                      random_complement_code, random_subcode, transpose_rows)
from .rng import make_rng


class InvalidParameters(ValueError):
    pass


@dataclass(frozen=True)
class ParameterSet:
    name: str
    m: int
    n: int
    kappa: int
    t: int
    l_a: int
    l_s: int
    lam: int = 128
    q: int = 2

    @property
    def code_dim(self) -> int:
        """Dimension of the public code D."""
        return self.kappa * self.m - self.l_s + self.l_a

    @property
    def syn_len(self) -> int:
        return self.m * (self.n - self.kappa) + self.l_s - self.l_a

    @property
    def ext_len(self) -> int:
        """Length of the extended syndrome (s, t): the dimension of C_s^perp."""
        return self.m * (self.n - self.kappa) + self.l_s

    @property
    def idx_bits(self) -> int:
        return 10 if self.lam == 256 else 9

    @property
    def salt_bytes(self) -> int:
        return (self.lam + 7) // 8

    def validate(self) -> "ParameterSet":
        from .analysis.counting import gv_radius

        if self.q != 2:
            raise InvalidParameters("only q = 2 is supported")
        if self.m < 2 or self.n != self.m:
            raise InvalidParameters("instantiations require n = m >= 2")
        if not 0 <= self.kappa <= self.n:
            raise InvalidParameters("kappa out of range")
        if (self.n - self.kappa) % 2:
            raise InvalidParameters("n - kappa must be even")
        if self.t != (self.n - self.kappa) // 2:
            raise InvalidParameters("t must equal (n - kappa)/2")
        if not 0 <= self.l_s <= self.kappa * self.m:
            raise InvalidParameters("l_s out of range")
        if self.l_a < 0:
            raise InvalidParameters("l_a must be non-negative")
        if self.syn_len < 1:
            raise InvalidParameters("syndrome length must be positive")
        if self.lam <= 0 or self.lam % 8:
            raise InvalidParameters("lambda must be a positive multiple of 8")
        if not self.t > gv_radius(self.m, self.n, self.code_dim):
            raise InvalidParameters("t does not exceed the Gilbert-Varshamov radius")
        return self

    def to_dict(self) -> dict:
        return {"name": self.name, "m": self.m, "n": self.n, "kappa": self.kappa, "t": self.t,
                "l_a": self.l_a, "l_s": self.l_s, "lambda": self.lam}


@dataclass(frozen=True)
class PublicKey:
    params: ParameterSet
    duals: tuple[int, ...]  # flattened m x n matrices, systematic on the last syn_len positions

    @property
    def dual_matrices(self) -> list[BinMatrix]:
        m, n = self.params.m, self.params.n
        return [BinMatrix(m, n, d) for d in self.duals]

    def dual_code(self) -> MatrixCode:
        return MatrixCode(self.params.m, self.params.n, self.duals, check=False)


@dataclass
class Trapdoor:
    gab: MatrixGabidulin
    extra: tuple[int, ...]
    # kept for testing; never serialized
    cs_basis: MatrixCode | None = None
    a_basis: MatrixCode | None = None

    def subcode(self, pk: PublicKey) -> MatrixCode:
        """C_s recovered as the part of C orthogonal to duals and extra."""
        if self.cs_basis is None:
            self.cs_basis = _subcode_from_dual(self.gab.matbasis, list(pk.duals) + list(self.extra))
        return self.cs_basis

    @property
    def g(self) -> tuple[int, ...]:
        return self.gab.code.g

    @property
    def basis(self) -> FieldBasis:
        return self.gab.basis


@dataclass
class KeyPair:
    pk: PublicKey
    sk: Trapdoor


def add_remove(C: MatrixCode, l_a: int, l_s: int, rng) -> tuple[MatrixCode, MatrixCode, MatrixCode]:
    """Primal Add-and-Remove: (D, C_s, A) with D = C_s + A, A meeting C only in zero."""
    if not 0 <= l_s <= C.dim:
        raise ValueError("codimension too large")
    if C.dim - l_s + l_a > C.m * C.n or C.dim + l_a > C.m * C.n:
        raise ValueError("dimension overflow")
    Cs = random_subcode(C, l_s, rng)
    A = random_complement_code(C, l_a, rng)
    D = MatrixCode(C.m, C.n, list(Cs.vectors) + list(A.vectors), check=False)
    return D, Cs, A


def _systematic(vectors: Sequence[int], positions: Sequence[int]) -> list[int] | None:
    """Basis of span(vectors) whose restriction to `positions` is the identity.

    Row i of the result has bit positions[i] set and no other bit among positions.
    Returns None if the restriction is singular.
    """
    rows = list(vectors)
    k = len(rows)
    if len(positions) != k:
        return None
    for i, p in enumerate(positions):
        bit = 1 << p
        piv = next((r for r in range(i, k) if rows[r] & bit), None)
        if piv is None:
            return None
        rows[i], rows[piv] = rows[piv], rows[i]
        pr = rows[i]
        for r in range(k):
            if r != i and rows[r] & bit:
                rows[r] ^= pr
    return rows


def systematic_positions(params: ParameterSet) -> list[int]:
    """Identity positions of the dual basis: the last syn_len flattened coordinates."""
    mn = params.m * params.n
    return list(range(mn - params.syn_len, mn))


def _pairing_rows(left: Sequence[int], right: Sequence[int]) -> list[int]:
    """Row i, bit j = <left_i, right_j>."""
    out = []
    for a in left:
        r = 0
        for j, w in enumerate(right):
            if (a & w).bit_count() & 1:
                r |= 1 << j
        out.append(r)
    return out


def _combine(combos: Sequence[int], vectors: Sequence[int]) -> list[int]:
    return gf2_matmul(combos, vectors)


def keygen(params: ParameterSet, seed: bytes | str | int | None = None, rng=None,
           max_restarts: int = 64) -> KeyPair:
    """Generate (pk, sk).  Deterministic in `seed`.

    Draw order: g, B, R (subcode), A.  The dual basis is published in
    systematic form, which is canonical for the code, so no separate random
    change of basis is drawn.  If the systematic restriction is singular the
    whole draw is repeated from the continuing stream.
    """
    params.validate()
    if rng is None:
        rng = make_rng(seed)
    ctx = field(params.m)
    m, n = params.m, params.n
    mn = m * n
    positions = systematic_positions(params)
    for _ in range(max_restarts):
        g = random_basis(ctx, rng, n)
        B = FieldBasis(ctx, random_basis(ctx, rng))
        gab = MatrixGabidulin(GabidulinCode(ctx, g, params.kappa), B)
        cperp = list(gab.dual_matbasis.vectors)
        cperp_code = MatrixCode(m, n, cperp, check=False)
        R = list(random_complement_code(cperp_code, params.l_s, rng).vectors)
        W = cperp + R  # basis of C_s^perp
        # A: random l_a matrices, pairing against C^perp of full row rank (A meets C in zero)
        while True:
            A = [rng.getrandbits(mn) for _ in range(params.l_a)]
            if gf2_rank(_pairing_rows(A, cperp)) == params.l_a:
                break
        # D^perp = combinations of W orthogonal to every a in A
        P = _pairing_rows(A, W)  # l_a x |W|
        ker = gf2_kernel(P, len(W)) if P else [1 << i for i in range(len(W))]
        duals = _systematic(_combine(ker, W), positions)
        if duals is None:
            continue
        span = GF2Span(duals)
        extra = [w for w in W if span.add(w) is not None]
        assert len(extra) == params.l_a
        pk = PublicKey(params, tuple(duals))
        cs = _subcode_from_dual(gab.matbasis, R) if mn <= 1024 else None
        sk = Trapdoor(gab, tuple(extra), cs_basis=cs, a_basis=MatrixCode(m, n, A, check=False))
        return KeyPair(pk, sk)
    raise RuntimeError("no key with an invertible systematic block found")


def _subcode_from_dual(C: MatrixCode, R: Sequence[int]) -> MatrixCode:
    """{c in C : <c, r> = 0 for r in R}."""
    if not R:
        return C
    P = transpose_rows(_pairing_rows(C.vectors, R), len(R))  # |R| x dim C
    ker = gf2_kernel(P, C.dim)
    return MatrixCode(C.m, C.n, _combine(ker, C.vectors), check=False)
