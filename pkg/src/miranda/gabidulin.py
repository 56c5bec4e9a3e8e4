"""Gabidulin codes: encoding, unique decoding, and their matrix images."""
from __future__ import annotations

from functools import cached_property
from typing import Sequence

from .field import (GF2m, FieldBasis, QPolynomial, ext_kernel, ext_solve, field,
                    random_basis, vec_to_mat, mat_to_vec, rank_weight)
from .matrank import (BinMatrix, GF2Span, MatrixCode, columns_to_bits, bits_to_columns,
                      gf2_kernel)


class GabidulinCode:
    """Gab(g, kappa): evaluations of q-polynomials of q-degree < kappa at g."""

    def __init__(self, ctx: GF2m, g: Sequence[int], kappa: int):
        g = tuple(int(x) for x in g)
        n = len(g)
        if not 0 <= kappa <= n <= ctx.m:
            raise ValueError("need 0 <= kappa <= n <= m")
        if rank_weight(g) != n:
            raise ValueError("evaluation points must be GF(2)-linearly independent")
        self.ctx = ctx
        self.g = g
        self.n = n
        self.kappa = kappa

    @property
    def redundancy(self) -> int:
        return self.n - self.kappa

    @property
    def t(self) -> int:
        """Unique decoding radius floor((n - kappa) / 2)."""
        return (self.n - self.kappa) // 2

    @property
    def min_distance(self) -> int:
        return self.n - self.kappa + 1

    def __repr__(self) -> str:
        return f"GabidulinCode(m={self.ctx.m}, n={self.n}, kappa={self.kappa})"

    # -- parity check

    @cached_property
    def h(self) -> tuple[int, ...]:
        """Vector h with sum_j h_j g_j^[u] = 0 for u in [-(n-kappa-1), kappa-1].

        The rows h^[i], i < n - kappa, then span the dual code.
        """
        ctx, n, k, g = self.ctx, self.n, self.kappa, self.g
        if k == n:
            return tuple([0] * n)
        if n == ctx.m:
            # trace-dual basis g* satisfies sum_j g*_j^[k] g_j^[u] = [u == k]
            gd = FieldBasis(ctx, g).dual().elems
            return tuple(ctx.frob(x, k) for x in gd)
        rows = [[ctx.frob(gj, u) for gj in g] for u in range(-(n - k - 1), k)]
        ker = ext_kernel(ctx, rows, n)
        if len(ker) != 1:
            raise AssertionError("parity vector is not unique")
        return tuple(ker[0])

    @cached_property
    def H(self) -> tuple[tuple[int, ...], ...]:
        """Parity-check matrix: H[i][j] = h_j^[i] for i < n - kappa."""
        ctx = self.ctx
        return tuple(tuple(ctx.frob(hj, i) for hj in self.h) for i in range(self.redundancy))

    @cached_property
    def _h_span(self) -> GF2Span:
        return GF2Span(self.h, track=True)

    # -- encoding

    def encode(self, P: QPolynomial) -> list[int]:
        if P.qdeg >= self.kappa:
            raise ValueError("q-degree too large for this code")
        return [P.eval(x) for x in self.g]

    def encode_message(self, msg: Sequence[int]) -> list[int]:
        return self.encode(QPolynomial(self.ctx, msg))

    def random_codeword(self, rng) -> list[int]:
        return self.encode_message([self.ctx.random(rng) for _ in range(self.kappa)])

    def generator_rows(self) -> list[list[int]]:
        """Rows g^[u] for u < kappa (an F_{2^m}-basis of the code)."""
        return [[self.ctx.frob(x, u) for x in self.g] for u in range(self.kappa)]

    # -- syndromes and decoding

    def syndrome(self, y: Sequence[int]) -> list[int]:
        mul = self.ctx.mul
        out = []
        for row in self.H:
            s = 0
            for yj, hij in zip(y, row):
                if yj:
                    s ^= mul(yj, hij)
            out.append(s)
        return out

    def contains(self, y: Sequence[int]) -> bool:
        return not any(self.syndrome(y))

    def decode(self, y: Sequence[int], method: str = "syndrome") -> list[int] | None:
        """Error vector e with y - e in the code and rank(e) <= t, or None."""
        if len(y) != self.n:
            raise ValueError("received word has the wrong length")
        if method == "syndrome":
            return self.decode_syndrome(self.syndrome(y))
        if method == "reconstruction":
            return self._decode_reconstruction(y)
        raise ValueError(f"unknown decoding method {method!r}")

    def decode_syndrome(self, S: Sequence[int]) -> list[int] | None:
        """Rank-error decoding from the syndrome (S_i = sum_j e_j h_j^[i]).

        Every returned vector has been re-checked: its syndrome equals S and
        its rank weight is at most t.
        """
        ctx, n, t = self.ctx, self.n, self.t
        if not any(S):
            return [0] * n
        e = self._solve_error(S)
        if e is None:
            return None
        if rank_weight(e) > t or self.syndrome(e) != list(S):
            return None
        return e

    def _solve_error(self, S: Sequence[int]) -> list[int] | None:
        ctx, t = self.ctx, self.t
        frob, mul = ctx.frob, ctx.mul
        r_syn = len(S)
        lam = None
        rho = 0
        # smallest rho whose key equation is consistent gives the error span
        # polynomial; it is unique when the error rank is at most t
        for rho in range(1, t + 1):
            A = [[frob(S[i - u], u) for u in range(rho)] for i in range(rho, r_syn)]
            b = [frob(S[i - rho], rho) for i in range(rho, r_syn)]
            lam = ext_solve(ctx, A, b)
            if lam is not None:
                break
        if lam is None:
            return None
        span_poly = QPolynomial(ctx, list(lam) + [1])
        images = [span_poly.eval(1 << k) for k in range(ctx.m)]
        # kernel of the GF(2)-linear map: combination bits are field elements
        rows = [0] * ctx.m
        for k, img in enumerate(images):
            for i in range(ctx.m):
                if (img >> i) & 1:
                    rows[i] |= 1 << k
        betas = gf2_kernel(rows, ctx.m)
        if len(betas) != rho:
            return None
        # S_i^[-i] = sum_l beta_l^[-i] x_l
        A = [[frob(bl, -i) for bl in betas] for i in range(rho)]
        b = [frob(S[i], -i) for i in range(rho)]
        xs = ext_solve(ctx, A, b)
        if xs is None:
            return None
        e = [0] * self.n
        span = self._h_span
        for bl, xl in zip(betas, xs):
            resid, combo = span.reduce(xl)
            if resid:
                return None
            j = 0
            while combo:
                if combo & 1:
                    e[j] ^= bl
                combo >>= 1
                j += 1
        return e

    def _decode_reconstruction(self, y: Sequence[int]) -> list[int] | None:
        """Interpolation decoder: find V, F with V(y_j) = F(g_j), then F = V o f."""
        ctx, n, k, t = self.ctx, self.n, self.kappa, self.t
        frob = ctx.frob
        if k == n:
            return [0] * n
        nf = k + t
        rows = []
        for yj, gj in zip(y, self.g):
            rows.append([frob(yj, u) for u in range(t + 1)] + [frob(gj, u) for u in range(nf)])
        ker = ext_kernel(ctx, rows, t + 1 + nf)
        if not ker:
            return None
        sol = ker[0]
        V = QPolynomial(ctx, sol[:t + 1])
        F = QPolynomial(ctx, sol[t + 1:])
        if V.qdeg < 0:
            return None
        f, R = F.left_divide(V)
        if R.qdeg >= 0 or f.qdeg >= k:
            return None
        e = [yj ^ f.eval(gj) for yj, gj in zip(y, self.g)]
        if rank_weight(e) > t:
            return None
        return e


def gab_encode(code: GabidulinCode, P: QPolynomial) -> list[int]:
    return code.encode(P)


def gab_decode(y: Sequence[int], code: GabidulinCode, method: str = "syndrome") -> list[int] | None:
    return code.decode(y, method)


class MatrixGabidulin:
    """Matrix image M_B(Gab(g, kappa)) for a basis B of GF(2^m)."""

    def __init__(self, code: GabidulinCode, basis: FieldBasis):
        if basis.ctx != code.ctx:
            raise ValueError("field context mismatch")
        self.code = code
        self.basis = basis
        self.m = code.ctx.m
        self.n = code.n

    @property
    def ctx(self) -> GF2m:
        return self.code.ctx

    def to_matrix(self, v: Sequence[int]) -> BinMatrix:
        return vec_to_mat(v, self.basis)

    def to_vector(self, M: BinMatrix) -> list[int]:
        return mat_to_vec(M, self.basis)

    def vector_to_bits(self, v: Sequence[int]) -> int:
        coords = self.basis.coords
        return columns_to_bits([coords(x) for x in v], self.m, self.n)

    def bits_to_vector(self, bits: int) -> list[int]:
        elem = self.basis.element
        return [elem(c) for c in bits_to_columns(bits, self.m, self.n)]

    @cached_property
    def matbasis(self) -> MatrixCode:
        """GF(2)-basis {M_B(x^k g^[u])}, dimension kappa*m."""
        ctx = self.ctx
        vecs = []
        for row in self.code.generator_rows():
            for k in range(self.m):
                vecs.append(self.vector_to_bits([ctx.mul(1 << k, x) for x in row]))
        return MatrixCode(self.m, self.n, vecs, check=False)

    @cached_property
    def dual_matbasis(self) -> MatrixCode:
        """Basis of the trace dual of matbasis, dimension m(n - kappa).

        It is the image of the dual Gabidulin code under the trace-dual basis.
        """
        ctx = self.ctx
        dual = self.basis.dual()
        coords = dual.coords
        vecs = []
        for row in self.code.H:
            for k in range(self.m):
                cols = [coords(ctx.mul(1 << k, x)) for x in row]
                vecs.append(columns_to_bits(cols, self.m, self.n))
        return MatrixCode(self.m, self.n, vecs, check=False)

    def decode_matrix(self, Y: BinMatrix) -> BinMatrix | None:
        e = self.code.decode(self.to_vector(Y))
        return None if e is None else self.to_matrix(e)


def sample_gabidulin(m: int, kappa: int, rng, n: int | None = None) -> GabidulinCode:
    ctx = field(m)
    n = m if n is None else n
    return GabidulinCode(ctx, random_basis(ctx, rng, n), kappa)


def sample_matrix_gabidulin(m: int, kappa: int, rng, n: int | None = None) -> MatrixGabidulin:
    """Random evaluation vector g (independent entries) and independent random basis B."""
    code = sample_gabidulin(m, kappa, rng, n)
    basis = FieldBasis(code.ctx, random_basis(code.ctx, rng))
    return MatrixGabidulin(code, basis)
