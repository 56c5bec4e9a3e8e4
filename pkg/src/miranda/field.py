"""Arithmetic in GF(2^m) and linearized (q-)polynomials.

Elements are plain Python ints: bit i is the coefficient of x^i in the
polynomial basis fixed by the context modulus.  Hot code paths work on ints
directly through a ``GF2m`` context; ``ExtFieldElement`` is a thin wrapper
for readable call sites and tests.
"""
from __future__ import annotations

import functools
from array import array
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .matrank import BinMatrix, gf2_inverse, gf2_rank, columns_to_bits, bits_to_columns

TABLE_MAX_M = 24


# ---------------------------------------------------------------- polynomials

def _clmul(a: int, b: int) -> int:
    if a.bit_length() < b.bit_length():
        a, b = b, a
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly_mod(a: int, p: int) -> int:
    """Remainder of a modulo p as GF(2)[x] polynomials."""
    dp = p.bit_length()
    while a.bit_length() >= dp:
        a ^= p << (a.bit_length() - dp)
    return a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def _mulmod(a: int, b: int, p: int) -> int:
    return poly_mod(_clmul(a, b), p)


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(p: int) -> bool:
    """Rabin's irreducibility test for a GF(2)[x] polynomial given as int."""
    m = p.bit_length() - 1
    if m < 1:
        return False
    if m == 1:
        return True

    def frob_x(k: int) -> int:
        v = 2
        for _ in range(k):
            v = _mulmod(v, v, p)
        return v

    if frob_x(m) != 2:
        return False
    for r in _prime_factors(m):
        if poly_gcd(p, frob_x(m // r) ^ 2) != 1:
            return False
    return True


def default_modulus(m: int) -> int:
    """Lexicographically first irreducible polynomial of degree m."""
    if m < 1:
        raise ValueError("m must be positive")
    for p in range(1 << m, 1 << (m + 1)):
        if is_irreducible(p):
            return p
    raise AssertionError("unreachable: irreducibles exist in every degree")


# ---------------------------------------------------------------- field context

class GF2m:
    """Field context for GF(2^m).

    Small fields (m <= 24) use log/antilog tables, larger fields use a
    4-bit windowed carry-less product followed by reduction.
    """

    def __init__(self, m: int, modulus: int | None = None):
        if m < 1:
            raise ValueError("m must be positive")
        if modulus is None:
            modulus = default_modulus(m)
        if modulus.bit_length() - 1 != m or not is_irreducible(modulus):
            raise ValueError(f"modulus {modulus:#x} is not irreducible of degree {m}")
        self.m = m
        self.modulus = modulus
        self.order = (1 << m) - 1
        self.mask = self.order
        self._tables = m <= TABLE_MAX_M
        if self._tables:
            self._build_tables()
        else:
            self._build_reduction()

    def __repr__(self) -> str:
        return f"GF2m(m={self.m}, modulus={self.modulus:#x})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF2m) and (self.m, self.modulus) == (other.m, other.modulus)

    def __hash__(self) -> int:
        return hash((self.m, self.modulus))

    def __reduce__(self):
        return (field, (self.m, self.modulus))

    # -- setup

    def _find_generator(self) -> int:
        if self.m == 1:
            return 1
        fs = _prime_factors(self.order)
        g = 2
        while True:
            if all(self._slow_pow(g, self.order // f) != 1 for f in fs):
                return g
            g += 1

    def _slow_pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = _mulmod(r, a, self.modulus)
            a = _mulmod(a, a, self.modulus)
            e >>= 1
        return r

    def _build_tables(self) -> None:
        m, order, p = self.m, self.order, self.modulus
        g = self._find_generator()
        self.generator = g
        exp = np.zeros(2 * order + 1, dtype=np.uint32)
        exp[0] = 1
        # exp[k:2k] = exp[0:k] * g^k, multiplication by a constant is GF(2)-linear
        k, gk = 1, g
        while k < order:
            n2 = min(k, order - k)
            cols = [_mulmod(1 << b, gk, p) for b in range(m)]
            src = exp[:n2]
            out = np.zeros(n2, dtype=np.uint32)
            for b in range(m):
                out ^= ((src >> b) & 1) * np.uint32(cols[b])
            exp[k:k + n2] = out
            gk = _mulmod(gk, gk, p)
            k += n2
        exp[order:2 * order] = exp[:order]
        log = np.zeros(order + 1, dtype=np.uint32)
        log[exp[:order]] = np.arange(order, dtype=np.uint32)
        self._exp = array("I", exp.tobytes())
        self._log = array("I", log.tobytes())

    def _build_reduction(self) -> None:
        m, p = self.m, self.modulus
        # reduction table: for an 8-bit chunk c sitting at degrees m..m+7,
        # red[c] is c * x^m reduced mod p (degree < m+? handled by loop)
        self._red8 = [poly_mod(c << m, p) for c in range(256)]

    # -- arithmetic on raw ints

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        if self._tables:
            return self._exp[self._log[a] + self._log[b]]
        return self._reduce(self._wclmul(a, b))

    def _wclmul(self, a: int, b: int) -> int:
        tab = [0] * 16
        tab[1] = a
        for i in range(2, 16, 2):
            tab[i] = tab[i >> 1] << 1
            tab[i + 1] = tab[i] ^ a
        r = 0
        shift = (b.bit_length() + 3) & ~3
        while shift:
            shift -= 4
            r = (r << 4) ^ tab[(b >> shift) & 15]
        return r

    def _reduce(self, r: int) -> int:
        m = self.m
        red = self._red8
        while r.bit_length() > m:
            top = r.bit_length() - m
            if top >= 8:
                sh = top - 8
                c = (r >> (m + sh)) & 0xFF
                r ^= (c << (m + sh)) ^ (red[c] << sh)
            else:
                c = r >> m
                r ^= (c << m) ^ red[c]
        return r

    def sqr(self, a: int) -> int:
        return self.mul(a, a)

    def inv(self, a: int) -> int:
        if not a:
            raise ZeroDivisionError("inversion of zero in GF(2^m)")
        if self._tables:
            return self._exp[self.order - self._log[a]] if self._log[a] else 1
        return self.pow(a, self.order - 1)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        if not a:
            return 0 if e else 1
        if self._tables:
            return self._exp[(self._log[a] * e) % self.order]
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def frob(self, a: int, i: int) -> int:
        """a^(2^i); negative i gives the inverse Frobenius power."""
        i %= self.m
        if not a or not i:
            return a
        if self._tables:
            return self._exp[(self._log[a] << i) % self.order]
        for _ in range(i):
            a = self._reduce(_clmul(a, a))
        return a

    def trace(self, a: int) -> int:
        t, x = 0, a
        for _ in range(self.m):
            t ^= x
            x = self.frob(x, 1)
        return t & 1

    def mul_matrix(self, a: int) -> BinMatrix:
        """m x m matrix of x -> a*x in the polynomial basis (column j = a*x^j)."""
        cols = [self.mul(a, 1 << j) for j in range(self.m)]
        return BinMatrix.from_columns(cols, self.m)

    def random(self, rng) -> int:
        return rng.getrandbits(self.m)

    def random_nonzero(self, rng) -> int:
        while True:
            v = rng.getrandbits(self.m)
            if v:
                return v

    def element(self, v: int) -> "ExtFieldElement":
        return ExtFieldElement(self, v)


@functools.lru_cache(maxsize=None)
def field(m: int, modulus: int | None = None) -> GF2m:
    """Shared (cached) field context for GF(2^m)."""
    return GF2m(m, modulus)


# ---------------------------------------------------------------- wrapped elements

@dataclass(frozen=True)
class ExtFieldElement:
    ctx: GF2m
    value: int

    def __post_init__(self):
        if not 0 <= self.value < (1 << self.ctx.m):
            raise ValueError(f"value does not fit in GF(2^{self.ctx.m})")

    def _check(self, other: "ExtFieldElement") -> None:
        if self.ctx != other.ctx:
            raise ValueError("field context mismatch")

    @property
    def coeffs(self) -> list[int]:
        return [(self.value >> i) & 1 for i in range(self.ctx.m)]

    def __add__(self, other: "ExtFieldElement") -> "ExtFieldElement":
        self._check(other)
        return ExtFieldElement(self.ctx, self.value ^ other.value)

    __sub__ = __add__

    def __neg__(self) -> "ExtFieldElement":
        return self

    def __mul__(self, other: "ExtFieldElement") -> "ExtFieldElement":
        self._check(other)
        return ExtFieldElement(self.ctx, self.ctx.mul(self.value, other.value))

    def __truediv__(self, other: "ExtFieldElement") -> "ExtFieldElement":
        self._check(other)
        return ExtFieldElement(self.ctx, self.ctx.div(self.value, other.value))

    def __pow__(self, e: int) -> "ExtFieldElement":
        return ExtFieldElement(self.ctx, self.ctx.pow(self.value, e))

    def __bool__(self) -> bool:
        return bool(self.value)

    def inverse(self) -> "ExtFieldElement":
        return ExtFieldElement(self.ctx, self.ctx.inv(self.value))

    def frobenius(self, i: int) -> "ExtFieldElement":
        if i < 0:
            raise ValueError("frobenius exponent must be non-negative")
        return ExtFieldElement(self.ctx, self.ctx.frob(self.value, i))

    def __repr__(self) -> str:
        return f"GF(2^{self.ctx.m})({self.value:#0{(self.ctx.m + 3) // 4 + 2}x})"


def ext_add(a: ExtFieldElement, b: ExtFieldElement) -> ExtFieldElement:
    return a + b


def ext_mul(a: ExtFieldElement, b: ExtFieldElement) -> ExtFieldElement:
    return a * b


def ext_inv(a: ExtFieldElement) -> ExtFieldElement:
    return a.inverse()


def frobenius(a: ExtFieldElement, i: int) -> ExtFieldElement:
    return a.frobenius(i)


# ---------------------------------------------------------------- q-polynomials

class QPolynomial:
    """Linearized polynomial sum_i p_i X^(2^i) over a GF(2^m) context."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: GF2m, coeffs: Iterable[int | ExtFieldElement]):
        cs = [c.value if isinstance(c, ExtFieldElement) else int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.ctx = ctx
        self.coeffs = tuple(cs)

    @classmethod
    def identity(cls, ctx: GF2m) -> "QPolynomial":
        return cls(ctx, [1])

    @classmethod
    def zero(cls, ctx: GF2m) -> "QPolynomial":
        return cls(ctx, [])

    @property
    def qdeg(self) -> int:
        """q-degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __eq__(self, other) -> bool:
        return isinstance(other, QPolynomial) and self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.ctx, self.coeffs))

    def __repr__(self) -> str:
        return f"QPolynomial({list(self.coeffs)})"

    def __call__(self, x: int) -> int:
        return self.eval(x)

    def eval(self, x: int) -> int:
        ctx = self.ctx
        mul, frob = ctx.mul, ctx.frob
        r = 0
        xi = x
        for i, c in enumerate(self.coeffs):
            if i:
                xi = frob(xi, 1)
            if c:
                r ^= mul(c, xi)
        return r

    def __add__(self, other: "QPolynomial") -> "QPolynomial":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return QPolynomial(self.ctx, [(a[i] if i < len(a) else 0) ^ (b[i] if i < len(b) else 0)
                                      for i in range(n)])

    __sub__ = __add__

    def compose(self, other: "QPolynomial") -> "QPolynomial":
        """(self o other)(X) = self(other(X))."""
        ctx = self.ctx
        if not self.coeffs or not other.coeffs:
            return QPolynomial.zero(ctx)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, p in enumerate(self.coeffs):
            if not p:
                continue
            for j, q in enumerate(other.coeffs):
                if q:
                    out[i + j] ^= ctx.mul(p, ctx.frob(q, i))
        return QPolynomial(ctx, out)

    def left_divide(self, divisor: "QPolynomial") -> tuple["QPolynomial", "QPolynomial"]:
        """Return (Q, R) with self = divisor o Q + R and qdeg R < qdeg divisor."""
        ctx = self.ctx
        if not divisor.coeffs:
            raise ZeroDivisionError("division by the zero q-polynomial")
        t = divisor.qdeg
        lead_inv = ctx.inv(divisor.coeffs[-1])
        rem = list(self.coeffs)
        quot = [0] * max(0, len(rem) - t)
        for d in range(len(rem) - 1, t - 1, -1):
            c = rem[d]
            if not c:
                continue
            # divisor o (u X^[d-t]) has leading term v_t u^[t] X^[d]
            u = ctx.frob(ctx.mul(c, lead_inv), -t)
            quot[d - t] = u
            for k, v in enumerate(divisor.coeffs):
                if v:
                    rem[d - t + k] ^= ctx.mul(v, ctx.frob(u, k))
        return QPolynomial(ctx, quot), QPolynomial(ctx, rem[:t])


def qpoly_eval(P: QPolynomial, x: ExtFieldElement) -> ExtFieldElement:
    if P.ctx != x.ctx:
        raise ValueError("field context mismatch")
    return ExtFieldElement(P.ctx, P.eval(x.value))


def subspace_polynomial(ctx: GF2m, roots: Sequence[int]) -> QPolynomial:
    """Monic q-polynomial of q-degree len(roots) vanishing on span(roots).

    The roots must be GF(2)-linearly independent.
    """
    P = QPolynomial.identity(ctx)
    for r in roots:
        v = P.eval(r)
        if not v:
            raise ValueError("roots are linearly dependent")
        # (X^2 - v X) o P
        P = QPolynomial(ctx, [v, 1]).compose(P)
    return P


# ---------------------------------------------------------------- bases and M_B

class FieldBasis:
    """An ordered GF(2)-basis of GF(2^m) with fast coordinate maps."""

    def __init__(self, ctx: GF2m, elems: Sequence[int | ExtFieldElement]):
        vals = [e.value if isinstance(e, ExtFieldElement) else int(e) for e in elems]
        if len(vals) != ctx.m:
            raise ValueError(f"a basis of GF(2^{ctx.m}) needs {ctx.m} elements, got {len(vals)}")
        if gf2_rank(vals) != ctx.m:
            raise ValueError("basis elements are linearly dependent")
        self.ctx = ctx
        self.elems = tuple(vals)
        m = ctx.m
        # matrix with column j = elems[j]; its inverse maps field ints to coordinates
        inv_rows = gf2_inverse(_transpose_ints(vals, m), m)
        inv_cols = _transpose_ints(inv_rows, m)
        self._to_coords = _byte_tables(inv_cols)
        self._from_coords = _byte_tables(vals)

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldBasis) and self.ctx == other.ctx and self.elems == other.elems

    def __hash__(self) -> int:
        return hash((self.ctx, self.elems))

    def __len__(self) -> int:
        return len(self.elems)

    def coords(self, x: int) -> int:
        """Coordinates of x in this basis, packed as an m-bit int (bit i <-> elems[i])."""
        r, k = 0, 0
        tabs = self._to_coords
        while x:
            r ^= tabs[k][x & 0xFF]
            x >>= 8
            k += 1
        return r

    def element(self, c: int) -> int:
        """Inverse of coords."""
        r, k = 0, 0
        tabs = self._from_coords
        while c:
            r ^= tabs[k][c & 0xFF]
            c >>= 8
            k += 1
        return r

    def dual(self) -> "FieldBasis":
        """Trace-dual basis: Tr(b_i * d_j) = [i == j]."""
        ctx, m = self.ctx, self.ctx.m
        tr = [ctx.trace(1 << j) for j in range(m)]
        trace_form = sum(t << j for j, t in enumerate(tr))
        # row i of the Gram system: x -> Tr(b_i x) as a functional on polynomial coords
        rows = []
        for b in self.elems:
            f = 0
            for j in range(m):
                if _parity(ctx.mul(b, 1 << j) & trace_form):
                    f |= 1 << j
            rows.append(f)
        inv = gf2_inverse(rows, m)
        # column j of inv is the polynomial-basis vector of d_j
        return FieldBasis(ctx, _transpose_ints(inv, m))


def _parity(x: int) -> int:
    return x.bit_count() & 1


def _transpose_ints(rows: Sequence[int], n: int) -> list[int]:
    """Transpose a len(rows) x n bit matrix given as row ints."""
    cols = [0] * n
    for i, r in enumerate(rows):
        while r:
            low = r & -r
            cols[low.bit_length() - 1] |= 1 << i
            r ^= low
    return cols


def _byte_tables(vecs: Sequence[int]) -> list[list[int]]:
    """tables[k][byte] = XOR of vecs[8k + i] over set bits i of byte."""
    tabs = []
    for k in range(0, len(vecs), 8):
        chunk = list(vecs[k:k + 8])
        t = [0] * 256
        chunk += [0] * (8 - len(chunk))
        for v in range(1, 256):
            low = v & -v
            t[v] = t[v ^ low] ^ chunk[low.bit_length() - 1]
        tabs.append(t)
    return tabs


@functools.lru_cache(maxsize=None)
def polynomial_basis(ctx: GF2m) -> FieldBasis:
    return FieldBasis(ctx, [1 << i for i in range(ctx.m)])


def basis_of_extension(ctx: GF2m) -> list[ExtFieldElement]:
    """The polynomial basis 1, x, ..., x^(m-1) as field elements."""
    return [ExtFieldElement(ctx, 1 << i) for i in range(ctx.m)]


def random_basis(ctx: GF2m, rng, count: int | None = None) -> list[int]:
    """`count` (default m) uniformly random GF(2)-independent field elements."""
    count = ctx.m if count is None else count
    if count > ctx.m:
        raise ValueError("cannot draw more than m independent elements")
    while True:
        vals = [ctx.random(rng) for _ in range(count)]
        if gf2_rank(vals) == count:
            return vals


def vec_to_mat(v: Sequence[int | ExtFieldElement], basis: FieldBasis) -> BinMatrix:
    """M_B: column j of the result holds the coordinates of v_j in `basis`."""
    cols = [basis.coords(x.value if isinstance(x, ExtFieldElement) else x) for x in v]
    return BinMatrix(basis.ctx.m, len(cols), columns_to_bits(cols, basis.ctx.m, len(cols)))


def mat_to_vec(M: BinMatrix, basis: FieldBasis) -> list[int]:
    """Inverse of vec_to_mat; returns the field elements as ints."""
    if M.rows != basis.ctx.m:
        raise ValueError("row count must equal m")
    return [basis.element(c) for c in bits_to_columns(M.bits, M.rows, M.cols)]


def rank_weight(v: Sequence[int]) -> int:
    """Rank weight of a vector over GF(2^m): dimension of the GF(2)-span of its entries."""
    return gf2_rank([int(x) for x in v])


# ---------------------------------------------------------------- linear algebra over GF(2^m)

def ext_rref(ctx: GF2m, rows: Sequence[Sequence[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form over GF(2^m); rows may be longer than ncols
    (extra columns are carried along but never used as pivots)."""
    mul, inv = ctx.mul, ctx.inv
    A = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        row = A[r]
        s = inv(row[c])
        if s != 1:
            A[r] = row = [mul(s, v) if v else 0 for v in row]
        for i in range(len(A)):
            if i != r:
                f = A[i][c]
                if f:
                    other = A[i]
                    A[i] = [o ^ mul(f, v) if v else o for o, v in zip(other, row)]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A, pivots


def ext_solve(ctx: GF2m, A: Sequence[Sequence[int]], b: Sequence[int]) -> list[int] | None:
    """Solve A x = b over GF(2^m).  Returns the unique solution, or None when
    the system is inconsistent or under-determined."""
    if not A:
        return None
    ncols = len(A[0])
    R, piv = ext_rref(ctx, [list(row) + [bi] for row, bi in zip(A, b)], ncols)
    if len(piv) < ncols:
        return None
    for row in R[len(piv):]:
        if row[ncols]:
            return None
    return [R[i][ncols] for i in range(ncols)]


def ext_kernel(ctx: GF2m, A: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Basis of the right kernel of A over GF(2^m)."""
    R, piv = ext_rref(ctx, A, ncols)
    pivset = set(piv)
    out = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [0] * ncols
        v[f] = 1
        for i, p in enumerate(piv):
            v[p] = R[i][f]  # characteristic 2: -x = x
        out.append(v)
    return out
