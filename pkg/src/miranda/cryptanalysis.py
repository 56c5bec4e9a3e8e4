"""Desk-scale attacks: low-rank codeword search, the dual-code distinguisher and
the recovery of the hidden extension-field structure of a public key."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

from .analysis.costs import decompose
from .analysis.counting import ball_size, rank_at_most_probability
from .field import is_irreducible
from .matrank import (
    BinMatrix, GF2Span, MatrixCode, bits_rank, bits_to_rows, gf2_inverse, gf2_left_kernel, gf2_matmul,
    gf2_rank, gf2_solve, iter_bits, random_code, random_invertible, rows_to_bits, transpose_rows,
)

STRUCTURED = "structured"
RANDOM_LIKE = "random-like"


class SearchExhausted(Exception):
    """Raised by callers that want an exception instead of a failed result."""


@dataclass(frozen=True)
class SearchProfile:
    """Zero pattern of the eliminated word: `a` zero columns, then b - 1 zero
    top entries in column a + 1, for a code of dimension k = a m + b."""

    m: int
    n: int
    k: int
    s: int
    a: int = field(init=False)
    b: int = field(init=False)

    def __post_init__(self):
        a, b = decompose(self.k, self.m)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not 0 < self.s <= self.n - a:
            raise ValueError(f"target rank {self.s} outside (0, n - a = {self.n - a}]")

    @property
    def constrained(self) -> list[int]:
        """Flattened positions forced to zero (k - 1 of them)."""
        n = self.n
        pos = [i * n + j for i in range(self.m) for j in range(self.a)]
        pos += [i * n + self.a for i in range(self.b - 1)]
        return pos

    def success_probability(self, exact: bool = False):
        """Probability that one loop succeeds on a uniformly random code."""
        if self.s >= self.n - self.a:
            return 1.0
        return rank_at_most_probability(self.m, self.n, 2, self.a, self.b, self.s, exact=exact)


@dataclass
class LowRankResult:
    found: bool
    loops: int
    word: BinMatrix | None = None
    Q: list[int] | None = None

    def __bool__(self) -> bool:
        return self.found


def _right_mul(bits: int, Q: Sequence[int], m: int, n: int) -> int:
    """Flattened X Q for an n x n matrix Q given by row ints."""
    rows = gf2_matmul(bits_to_rows(bits, m, n), Q)
    return rows_to_bits(rows, n)


def _gather(v: int, positions: Sequence[int]) -> int:
    out = 0
    for i, p in enumerate(positions):
        if (v >> p) & 1:
            out |= 1 << i
    return out


def find_low_rank(C: MatrixCode, s: int, budget: int, rng) -> LowRankResult:
    """Randomized elimination search for a nonzero word of rank <= s.

    Each loop draws Q uniform in GL_n, eliminates C Q down to the zero profile,
    and keeps the word if its rank is at most s.  The returned word is word' Q^-1,
    re-verified to lie in C with rank <= s.
    """
    if C.dim == 0:
        raise ValueError("the zero code has no nonzero word")
    m, n = C.m, C.n
    prof = SearchProfile(m, n, C.dim, s)
    pos = prof.constrained
    for loop in range(1, budget + 1):
        Q = random_invertible(n, rng)
        CQ = [_right_mul(v, Q, m, n) for v in C.vectors]
        ker = gf2_left_kernel([_gather(v, pos) for v in CQ])
        if not ker:
            continue  # cannot happen: k - 1 constraints on k unknowns
        combo = 0
        while not combo:
            for kv in ker:
                if rng.getrandbits(1):
                    combo ^= kv
        word = 0
        for i, v in enumerate(CQ):
            if (combo >> i) & 1:
                word ^= v
        if bits_rank(word, m, n) <= s:
            out = _right_mul(word, gf2_inverse(Q, n), m, n)
            if not C.contains(out) or bits_rank(out, m, n) > s or out == 0:
                raise AssertionError("low-rank search produced an invalid word")
            return LowRankResult(True, loop, BinMatrix(m, n, out), Q)
    return LowRankResult(False, budget)


def distinguisher_budget(m: int, n: int, k: int, s: int, factor: float = 10.0) -> int:
    """factor x the expected loop count of a rank <= s search on a random code."""
    p = SearchProfile(m, n, k, s).success_probability()
    return int(round(factor / p))


def distinguish(dual_code: MatrixCode, params, budget: int | None, rng, factor: float = 10.0) -> tuple[str, LowRankResult]:
    """Label a public dual code by searching it for words of rank kappa.

    A containing Gabidulin dual has minimum distance kappa + 1, so an exhausted
    search means `structured`.  budget=None uses `factor` times the expected
    loop count on a random code of the same dimensions; budget 0 is
    degenerate and always answers `structured`.
    """
    s = params.kappa
    if budget is None:
        budget = distinguisher_budget(dual_code.m, dual_code.n, dual_code.dim, s, factor)
    if budget <= 0:
        return STRUCTURED, LowRankResult(False, 0)
    res = find_low_rank(dual_code, s, budget, rng)
    return (RANDOM_LIKE if res.found else STRUCTURED), res


# ---------------------------------------------------------------- row spaces

def row_space(bits: int, m: int, n: int) -> list[int]:
    return GF2Span(bits_to_rows(bits, m, n)).basis()


def _annihilator(vectors: Sequence[int], n: int) -> list[int]:
    """Basis of {y in F_2^n : <v, y> = 0 for all v}."""
    sol = gf2_solve(list(vectors), n, 0) if vectors else None
    return sol.kernel if sol is not None else [1 << j for j in range(n)]


def same_rowspace_mate(C: MatrixCode, word: BinMatrix | int, exclude_word: bool = False) -> list[int]:
    """Basis of W = {X in span(C) : rowspace(X) within rowspace(word)}.

    With exclude_word, returns a basis of a complement of <word> in W instead.
    """
    m, n = C.m, C.n
    w = word.bits if isinstance(word, BinMatrix) else word
    ann = _annihilator(row_space(w, m, n), n)
    def image(v: int) -> int:
        out, bit = 0, 0
        for r in bits_to_rows(v, m, n):
            for y in ann:
                if (r & y).bit_count() & 1:
                    out |= 1 << bit
                bit += 1
        return out
    if ann:
        combos = gf2_left_kernel([image(v) for v in C.vectors])
    else:
        combos = [1 << i for i in range(C.dim)]
    W = [C.codeword(c) for c in combos]
    if not exclude_word:
        return W
    span = GF2Span([w])
    return [x for x in W if span.add(x) is not None]


# ---------------------------------------------------------------- algebras

def _mat_bits(P: Sequence[int], m: int) -> int:
    return rows_to_bits(P, m)


def _identity(m: int) -> list[int]:
    return [1 << i for i in range(m)]


def _matvec(P: Sequence[int], v: int) -> int:
    out = 0
    for i, r in enumerate(P):
        if (r & v).bit_count() & 1:
            out |= 1 << i
    return out


def krylov_polynomial(P: Sequence[int], v: int) -> int:
    """Minimal polynomial (bit i = x^i) of P relative to the vector v."""
    sp = GF2Span(track=True)
    x = v
    while True:
        if sp.add(x) is None:
            return sp.last_relation
        x = _matvec(P, x)


@dataclass
class Algebra:
    m: int
    basis: list[tuple[int, ...]]  # m x m matrices as row-int tuples
    is_field: bool
    minpoly: int | None = None

    @property
    def dimension(self) -> int:
        return len(self.basis)


def algebra_closure(P: BinMatrix | Sequence[int], m: int | None = None) -> Algebra:
    """GF(2)-span of I, P, P^2, ...; a field exactly when the minimal polynomial is irreducible."""
    if isinstance(P, BinMatrix):
        if P.rows != P.cols:
            raise ValueError("P must be square")
        m = P.rows
        rows = P.row_ints()
    else:
        rows = list(P)
        m = len(rows) if m is None else m
    sp = GF2Span(track=True)
    basis = []
    X = _identity(m)
    while True:
        if sp.add(_mat_bits(X, m)) is None:
            minpoly = sp.last_relation
            break
        basis.append(tuple(X))
        X = gf2_matmul(X, rows)
    return Algebra(m, basis, is_irreducible(minpoly), minpoly)


def algebra_join(A: Algebra, B: Algebra) -> Algebra:
    """Smallest algebra containing both (span closed under products)."""
    m = A.m
    sp = GF2Span()
    basis: list[tuple[int, ...]] = []
    queue = list(A.basis) + list(B.basis)
    while queue:
        X = queue.pop()
        if sp.add(_mat_bits(X, m)) is None:
            continue
        basis.append(X)
        for Y in list(basis):
            queue.append(tuple(gf2_matmul(X, Y)))
            queue.append(tuple(gf2_matmul(Y, X)))
    is_field = A.is_field and B.is_field and _commutes(basis) and _no_zero_divisors(basis, m)
    return Algebra(m, basis, is_field)


def _commutes(basis: Sequence[Sequence[int]]) -> bool:
    return all(gf2_matmul(X, Y) == gf2_matmul(Y, X) for i, X in enumerate(basis) for Y in basis[i + 1:])


def _no_zero_divisors(basis: Sequence[Sequence[int]], m: int) -> bool:
    # a commutative algebra of matrices is a field iff every nonzero element is
    # invertible; checked through a generic element's minimal polynomial degree
    if len(basis) > 16:
        return False
    for mask in range(1, 1 << len(basis)):
        X = [0] * m
        for i in range(len(basis)):
            if (mask >> i) & 1:
                X = [a ^ b for a, b in zip(X, basis[i])]
        if gf2_rank(X) < m:
            return False
    return True


def algebra_span(alg: Algebra, code: Sequence[int], m: int, n: int, stop: int | None = None) -> int:
    """dim span{X Y : X in alg, Y in code}, stopping early once above `stop`."""
    sp = GF2Span()
    for X in alg.basis:
        for y in code:
            sp.add(rows_to_bits(gf2_matmul(X, bits_to_rows(y, m, n)), n))
            if stop is not None and sp.dim > stop:
                return sp.dim
    return sp.dim


def stabilizes(alg: Algebra, code: Sequence[int], m: int, n: int, bound: int) -> bool:
    """Does alg map span(code) into a subspace of dimension <= bound?"""
    return algebra_span(alg, code, m, n, stop=bound) <= bound


def _power_span_bounded(P: Sequence[int], code: Sequence[int], m: int, n: int, bound: int) -> bool:
    """Cheap necessary condition: span(code, P code, P^2 code, ...) stays within bound."""
    sp = GF2Span()
    layer = [bits_to_rows(y, m, n) for y in code]
    for _ in range(m):
        grew = False
        for rows in layer:
            if sp.add(rows_to_bits(rows, n)) is not None:
                grew = True
                if sp.dim > bound:
                    return False
        if not grew:
            return True
        layer = [gf2_matmul(P, rows) for rows in layer]
    return True


def is_field_generator(P: Sequence[int], m: int, v: int | None = None) -> bool:
    """Cheap test that GF(2)[P] is a field of dimension m."""
    v = 1 if v is None else v
    f = krylov_polynomial(P, v)
    return f.bit_length() - 1 == m and is_irreducible(f)


# ---------------------------------------------------------------- collinearity

@dataclass
class PairSolutions:
    """Affine space {A + U K} of matrices X with X C = C2 left after the
    alignment system; K rows span the remaining left-kernel directions."""

    C: int
    C2: int
    m: int
    n: int
    s: int
    A: list[int]
    K: list[int]
    rowspace: tuple[int, ...]

    @property
    def free_bits(self) -> int:
        return self.m * len(self.K)

    def candidates(self, max_free: int):
        if self.free_bits > max_free:
            return
        d = len(self.K)
        for mask in range(1 << self.free_bits):
            P = list(self.A)
            for i in range(self.m):
                u = (mask >> (i * d)) & ((1 << d) - 1)
                if u:
                    P[i] ^= _combine_rows(u, self.K)
            yield P


def _solve_left(C: int, C2: int, m: int, n: int) -> tuple[list[int], list[int]] | None:
    """One X (row ints, m x m) with X C = C2, plus a basis of ker_L(C) (as m-bit rows)."""
    rows = bits_to_rows(C, m, n)
    sp = GF2Span(rows, track=True)
    X = []
    for r in bits_to_rows(C2, m, n):
        resid, combo = sp.reduce(r)
        if resid:
            return None
        X.append(combo)
    return X, gf2_left_kernel(rows)


def pair_solutions(Cw: BinMatrix | int, Cw2: BinMatrix | int, m: int, n: int) -> PairSolutions | None:
    """Solve Cw2 = X Cw and Cw = X Cw2, then the alignment system on V.

    With P = A + V and P^-1 = B + N (row spaces of V, N in ker_L(Cw),
    ker_L(Cw2)), the s columns of (A + V) B selected by the column space of
    Cw2 must equal those of I.  Returns the remaining affine space for P, or
    None if the pair cannot be related by an invertible matrix.
    """
    c1 = Cw.bits if isinstance(Cw, BinMatrix) else Cw
    c2 = Cw2.bits if isinstance(Cw2, BinMatrix) else Cw2
    if c1 == c2 or c1 == 0 or c2 == 0:
        raise ValueError("inputs are GF(2)-collinear")
    r1, r2 = row_space(c1, m, n), row_space(c2, m, n)
    if len(r1) != len(r2) or gf2_rank(r1 + r2) != len(r1):
        return None
    s = len(r1)
    sol1 = _solve_left(c1, c2, m, n)
    sol2 = _solve_left(c2, c1, m, n)
    if sol1 is None or sol2 is None:
        return None
    A, K = sol1
    B, K2 = sol2
    Zcols = _annihilator(K2, m) if K2 else [1 << i for i in range(m)]
    Z = transpose_rows(Zcols, m)
    AB = gf2_matmul(A, B)
    rhs = gf2_matmul([ab ^ (1 << i) for i, ab in enumerate(AB)], Z)
    BZ = gf2_matmul(B, Z)
    coeff = gf2_matmul(K, BZ) if K else []  # row j: K_j B Z
    cols = transpose_rows(coeff, s) if coeff else [0] * s
    base, free = [], None
    for i in range(m):
        sol = gf2_solve(cols, len(K), rhs[i])
        if sol is None:
            return None
        base.append(A[i] ^ _combine_rows(sol.x, K))
        free = sol.kernel
    K_eff = [_combine_rows(kv, K) for kv in (free or [])]
    return PairSolutions(c1, c2, m, n, s, base, K_eff, tuple(r1))


def _commuting_candidates(p1: PairSolutions, p2: PairSolutions, max_free: int, max_guess: int = 8):
    """Members P1 of p1's space commuting with some member of p2's space.

    (A1 + U1 K1)(A2 + U2 K2) = (A2 + U2 K2)(A1 + U1 K1) is linear in (U1, U2)
    once the cross products G = K1 U2 and H = K2 U1 are guessed.
    """
    m = p1.m
    A1, K1, A2, K2 = p1.A, p1.K, p2.A, p2.K
    d1, d2 = len(K1), len(K2)
    if 2 * d1 * d2 > max_guess:
        return
    nu = m * (d1 + d2)
    mm = m * m
    rhs_mat = rows_to_bits([x ^ y for x, y in zip(gf2_matmul(A1, A2), gf2_matmul(A2, A1))], m)
    K1A2 = gf2_matmul(K1, A2) if K1 else []
    K2A1 = gf2_matmul(K2, A1) if K2 else []
    A1T = transpose_rows(A1, m)
    A2T = transpose_rows(A2, m)
    for guess in range(1 << (2 * d1 * d2)):
        G = [[(guess >> (p * d2 + q)) & 1 for q in range(d2)] for p in range(d1)]
        off = d1 * d2
        H = [[(guess >> (off + p * d1 + q)) & 1 for q in range(d1)] for p in range(d2)]
        cols = []
        for i in range(m):
            for j in range(d1):
                # U1 = E_ij: V1 A2 + A2 V1 + E_ij G K2
                rows = [0] * m
                rows[i] ^= K1A2[j]
                for r in iter_bits(A2T[i]):
                    rows[r] ^= K1[j]
                rows[i] ^= _combine_rows(sum(G[j][l] << l for l in range(d2)), K2)
                col = rows_to_bits(rows, m)
                for p in range(d2):  # H = K2 U1
                    if (K2[p] >> i) & 1:
                        col |= 1 << (mm + off + p * d1 + j)
                cols.append(col)
        for i in range(m):
            for j in range(d2):
                # U2 = E_ij: A1 V2 + V2 A1 + E_ij H K1
                rows = [0] * m
                rows[i] ^= K2A1[j]
                for r in iter_bits(A1T[i]):
                    rows[r] ^= K2[j]
                rows[i] ^= _combine_rows(sum(H[j][l] << l for l in range(d1)), K1)
                col = rows_to_bits(rows, m)
                for p in range(d1):  # G = K1 U2
                    if (K1[p] >> i) & 1:
                        col |= 1 << (mm + p * d2 + j)
                cols.append(col)
        rhs = rhs_mat
        for p in range(d1):
            for q in range(d2):
                rhs |= G[p][q] << (mm + p * d2 + q)
        for p in range(d2):
            for q in range(d1):
                rhs |= H[p][q] << (mm + off + p * d1 + q)
        neq = mm + 2 * d1 * d2
        sol = gf2_solve(transpose_rows(cols, neq), nu, rhs)
        if sol is None or len(sol.kernel) > max_free:
            continue
        for mask in range(1 << len(sol.kernel)):
            x = sol.x ^ _combine_rows(mask, sol.kernel)
            P = list(A1)
            for i in range(m):
                u = (x >> (i * d1)) & ((1 << d1) - 1)
                if u:
                    P[i] ^= _combine_rows(u, K1)
            yield P


def _passes_filters(P: Sequence[int], m: int, n: int, code: Sequence[int] | None, bound: int | None,
                    allow_subfield: bool = False) -> bool:
    if gf2_rank(P) < m:
        return False
    f = krylov_polynomial(P, 1)
    d = f.bit_length() - 1
    if not is_irreducible(f) or (d != m and not (allow_subfield and m % d == 0)):
        return False
    if code is not None:
        if bound is None:
            raise ValueError("bound is required with code")
        if not _power_span_bounded(P, code, m, n, bound):
            return False
    return True


def collinearity_recover(Cw: BinMatrix | int, Cw2: BinMatrix | int, m: int, n: int | None = None,
                         code: Sequence[int] | None = None, bound: int | None = None,
                         max_free: int = 12, partner: tuple | None = None) -> list[int] | None:
    """Try to recover a multiplication matrix P with Cw2 = P Cw.

    The alignment system of `pair_solutions` is implied by P Cw = Cw2 for any
    invertible P, so it leaves m (m - s) free bits.  They are resolved either
    by enumeration (at most 2^max_free points) or, given a `partner` pair
    (D, D2) from another row space, by requiring the two multipliers to
    commute.  A candidate is kept when GF(2)[P] is a degree-m field and, if
    `code` is given, its powers keep span(code) within `bound` dimensions.
    Returns P as row ints, or None.
    """
    if isinstance(Cw, BinMatrix):
        n = Cw.cols
    if n is None:
        raise ValueError("n is required for flattened inputs")
    sol = pair_solutions(Cw, Cw2, m, n)
    if sol is None:
        return None
    if partner is not None:
        other = partner if isinstance(partner, PairSolutions) else pair_solutions(partner[0], partner[1], m, n)
        if other is None:
            return None
        cands = _commuting_candidates(sol, other, max_free)
    else:
        cands = sol.candidates(max_free)
    for P in cands:
        if _passes_filters(P, m, n, code, bound):
            if code is None or stabilizes(algebra_closure(P, m), code, m, n, bound):
                return P
    return None


def _combine_rows(combo: int, vectors: Sequence[int]) -> int:
    out = 0
    for j, v in enumerate(vectors):
        if (combo >> j) & 1:
            out ^= v
    return out


# ---------------------------------------------------------------- attack

@dataclass
class AttackResult:
    success: bool
    iterations: int
    loops: int
    pairs: int
    algebra: Algebra | None = None
    P: list[int] | None = None
    s: int = 0
    seconds: float = 0.0

    @property
    def algebra_dimension(self) -> int:
        return self.algebra.dimension if self.algebra else 0


def _gray_sequence(d: int):
    """Index of the basis vector to toggle, visiting all 2^d - 1 nonzero masks."""
    for i in range(1, 1 << d):
        yield (i & -i).bit_length() - 1


def _column_pivots(rows: Sequence[int], m: int, n: int) -> list[int]:
    """m column indices on which the m x n matrix (rank m) is invertible."""
    cols = transpose_rows(rows, n)
    sp = GF2Span()
    piv = []
    for j, c in enumerate(cols):
        if sp.add(c) is not None:
            piv.append(j)
            if len(piv) == m:
                break
    return piv


def structural_attack(code: MatrixCode, params, budget: int, rng, s: int | None = None,
                      max_free: int = 12, memory: int = 16) -> AttackResult:
    """Recover the hidden extension-field stabilizer algebra of a public dual code.

    Iterates: elimination search for a word C of rank <= s (default n - a),
    the subspace W of code words sharing its row space, then collinearity
    recovery on every pair (C, C') with C' in W outside <C>.  Pairs whose
    multiplier is not unique are matched against up to `memory` earlier pairs
    from other row spaces.  Each search loop and each tested pair is one
    iteration.  Success means a field algebra of dimension m mapping the code
    into at most m (n - kappa + l_s) dimensions.
    """
    t0 = time.perf_counter()
    m, n = code.m, code.n
    a, _ = decompose(code.dim, m)
    s = n - a if s is None else s
    bound = m * (n - params.kappa + params.l_s)
    vectors = list(code.vectors)
    it = loops = pairs = 0
    partial: Algebra | None = None
    store: list[PairSolutions] = []

    def done(ok: bool, alg=None, P=None) -> AttackResult:
        return AttackResult(ok, it, loops, pairs, alg, P, s, time.perf_counter() - t0)

    def accept(P: list[int]) -> AttackResult | None:
        nonlocal partial
        if not _passes_filters(P, m, n, vectors, bound, allow_subfield=True):
            return None
        alg = algebra_closure(P, m)
        if not alg.is_field or not stabilizes(alg, vectors, m, n, bound):
            return None
        if partial is not None and alg.dimension < m:
            alg = algebra_join(partial, alg)
            if not alg.is_field or not stabilizes(alg, vectors, m, n, bound):
                return None
        if alg.dimension == m:
            return done(True, alg, P)
        partial = alg
        return None

    while it < budget:
        res = find_low_rank(code, s, 1, rng)
        loops += 1
        it += 1
        if not res.found:
            continue
        C = res.word.bits
        W = same_rowspace_mate(code, C, exclude_word=True)
        if not W:
            continue
        if res.word.rank() == m and n >= m:
            # unique multiplier P = C' C^-1, updated along a Gray code over W
            rowsC = bits_to_rows(C, m, n)
            piv = _column_pivots(rowsC, m, n)
            inv = gf2_inverse([_gather(r, piv) for r in rowsC], m)
            steps = [gf2_matmul([_gather(r, piv) for r in bits_to_rows(w, m, n)], inv) for w in W]
            for start in ([0] * m, _identity(m)):
                P = list(start)
                for j in _gray_sequence(len(W)):
                    if it >= budget:
                        return done(False)
                    P = [x ^ y for x, y in zip(P, steps[j])]
                    it += 1
                    pairs += 1
                    out = accept(P)
                    if out is not None:
                        return out
            continue
        for mask in range(1, 1 << len(W)):
            for eps in (0, 1):
                if it >= budget:
                    return done(False)
                C2 = _combine_rows(mask, W) ^ (C if eps else 0)
                it += 1
                pairs += 1
                sol = pair_solutions(C, C2, m, n)
                if sol is None:
                    continue
                if not sol.K:
                    out = accept(sol.A)
                    if out is not None:
                        return out
                    continue
                for other in store:
                    if other.rowspace == sol.rowspace:
                        continue
                    for P in _commuting_candidates(sol, other, max_free):
                        out = accept(P)
                        if out is not None:
                            return out
                if all(o.rowspace != sol.rowspace for o in store):
                    store.append(sol)
                    if len(store) > memory:
                        store.pop(0)
    return done(False)


def random_code_like(code: MatrixCode, rng) -> MatrixCode:
    return random_code(code.m, code.n, code.dim, rng)


@dataclass
class Calibration:
    m: int
    n: int
    k: int
    s: int
    searches: int
    successes: int
    loops: int
    expected_loops: float

    @property
    def mean_loops(self) -> float:
        return self.loops / self.successes if self.successes else float("inf")

    @property
    def ratio(self) -> float:
        return self.mean_loops / self.expected_loops


def expected_targets(m: int, n: int, k: int, s: int) -> float:
    """Expected number of nonzero words of rank <= s in a uniform k-dimensional code.

    The per-loop estimate describes a single search well only when this is
    comfortably above 1; near or below 1 many codes hold no target at all and
    the loop count is dominated by code-to-code variation.
    """
    return (2 ** k - 1) * (ball_size(m, n, 2, s) - 1) / 2 ** (m * n)


def calibrate_search(m: int, n: int, k: int, s: int, searches: int, rng, budget_factor: float = 64.0) -> Calibration:
    """Run `searches` low-rank searches, each on a fresh uniformly random code.

    Each search is capped at budget_factor / p loops (p the per-loop success
    probability on a random code); the mean loop count is total loops over
    successes.
    """
    p = SearchProfile(m, n, k, s).success_probability()
    cap = max(1, int(budget_factor / p))
    loops = succ = 0
    for _ in range(searches):
        res = find_low_rank(random_code(m, n, k, rng), s, cap, rng)
        loops += res.loops
        succ += res.found
    return Calibration(m, n, k, s, searches, succ, loops, 1 / p)
