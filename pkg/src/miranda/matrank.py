"""Linear algebra over GF(2) and matrix codes.

Bit-vectors are Python ints.  An m x n matrix is stored flattened row-major:
entry (i, j) is bit i*n + j, so column j of a row int is bit j (leftmost
column = least significant bit).  Codes are lists of flattened ints.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence


# ---------------------------------------------------------------- bit helpers

def parity(x: int) -> int:
    return x.bit_count() & 1


def iter_bits(x: int):
    """Indices of set bits, lowest first."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


_SPREAD_CACHE: dict[int, list[int]] = {}


def _spread_table(n: int) -> list[int]:
    """table[byte] places bit r of byte at position r*n."""
    t = _SPREAD_CACHE.get(n)
    if t is None:
        t = [0] * 256
        for v in range(1, 256):
            low = v & -v
            t[v] = t[v ^ low] | (1 << ((low.bit_length() - 1) * n))
        _SPREAD_CACHE[n] = t
    return t


def spread_column(c: int, n: int) -> int:
    """Flattened m x n matrix with the m-bit int c as its column 0."""
    t = _spread_table(n)
    r, k = 0, 0
    step = 8 * n
    while c:
        r |= t[c & 0xFF] << k
        c >>= 8
        k += step
    return r


def columns_to_bits(cols: Sequence[int], m: int, n: int) -> int:
    """Flatten a matrix given by its n column ints (each m bits)."""
    bits = 0
    for j, c in enumerate(cols):
        if c:
            bits |= spread_column(c, n) << j
    return bits


def bits_to_rows(bits: int, m: int, n: int) -> list[int]:
    mask = (1 << n) - 1
    return [(bits >> (i * n)) & mask for i in range(m)]


def rows_to_bits(rows: Sequence[int], n: int) -> int:
    bits = 0
    for i, r in enumerate(rows):
        bits |= r << (i * n)
    return bits


def bits_to_columns(bits: int, m: int, n: int) -> list[int]:
    cols = [0] * n
    mask = (1 << n) - 1
    for i in range(m):
        r = (bits >> (i * n)) & mask
        while r:
            low = r & -r
            cols[low.bit_length() - 1] |= 1 << i
            r ^= low
    return cols


# ---------------------------------------------------------------- elimination core

class GF2Span:
    """Incrementally built subspace of GF(2)^N in reduced echelon form.

    Pivots are lowest set bits.  With ``track=True`` every stored row carries
    the combination (as an int over insertion indices) of inserted vectors
    that produced it.
    """

    __slots__ = ("rows", "combos", "mask", "track", "count", "last_relation")

    def __init__(self, vectors: Iterable[int] = (), track: bool = False):
        self.rows: dict[int, int] = {}
        self.combos: dict[int, int] = {}
        self.mask = 0
        self.track = track
        self.count = 0
        self.last_relation = 0
        for v in vectors:
            self.add(v)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, v: int, combo: int = 0) -> tuple[int, int]:
        rows, combos, track = self.rows, self.combos, self.track
        hit = v & self.mask
        while hit:
            p = (hit & -hit).bit_length() - 1
            v ^= rows[p]
            if track:
                combo ^= combos[p]
            hit = v & self.mask
        return v, combo

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def add(self, v: int) -> int | None:
        """Insert v.  Returns the new pivot, or None if v was dependent.

        With tracking, a dependent insertion leaves its relation in
        ``last_relation``.
        """
        combo = (1 << self.count) if self.track else 0
        self.count += 1
        v, combo = self.reduce(v, combo)
        if not v:
            self.last_relation = combo
            return None
        p = (v & -v).bit_length() - 1
        bit = 1 << p
        rows, combos = self.rows, self.combos
        for q, r in rows.items():
            if r & bit:
                rows[q] = r ^ v
                if self.track:
                    combos[q] ^= combo
        rows[p] = v
        if self.track:
            combos[p] = combo
        self.mask |= bit
        return p

    def basis(self) -> list[int]:
        return [self.rows[p] for p in sorted(self.rows)]

    def pivots(self) -> list[int]:
        return sorted(self.rows)



def gf2_rank(vectors: Iterable[int]) -> int:
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis)


def gf2_rref(vectors: Iterable[int]) -> tuple[list[int], list[int]]:
    """Reduced row echelon form (lowest-bit pivots) and pivot positions."""
    sp = GF2Span(vectors)
    piv = sp.pivots()
    return [sp.rows[p] for p in piv], piv


class LinearSolution(NamedTuple):
    x: int
    kernel: list[int]


def gf2_solve(rows: Sequence[int], ncols: int, b: int) -> LinearSolution | None:
    """Solve A x = b where A has the given row ints (bit j = column j).

    Returns one solution (free variables zero) and a kernel basis, or None
    when the system is inconsistent.
    """
    sp = GF2Span()
    for i, r in enumerate(rows):
        sp.add(r | (((b >> i) & 1) << ncols))
    x = 0
    pivots = []
    for p, r in sp.rows.items():
        if p >= ncols:
            return None
        pivots.append(p)
        if r >> ncols:
            x |= 1 << p
    pivset = set(pivots)
    kernel = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = 1 << f
        for p in pivots:
            if (sp.rows[p] >> f) & 1:
                v |= 1 << p
        kernel.append(v)
    return LinearSolution(x, kernel)


def gf2_kernel(rows: Sequence[int], ncols: int) -> list[int]:
    """Basis of {x : A x = 0}."""
    sol = gf2_solve(rows, ncols, 0)
    assert sol is not None
    return sol.kernel


def gf2_left_kernel(vectors: Sequence[int]) -> list[int]:
    """Basis of combinations c (bit i <-> vectors[i]) with sum c_i v_i = 0."""
    sp = GF2Span(track=True)
    out = []
    for v in vectors:
        if sp.add(v) is None:
            out.append(sp.last_relation)
    return out


def gf2_inverse(rows: Sequence[int], n: int) -> list[int]:
    """Inverse of a square n x n matrix given by row ints."""
    if len(rows) != n:
        raise ValueError("matrix is not square")
    sp = GF2Span(r | (1 << (n + i)) for i, r in enumerate(rows))
    if sp.pivots() != list(range(n)):
        raise ValueError("matrix is singular")
    return [sp.rows[i] >> n for i in range(n)]


def gf2_matmul(a_rows: Sequence[int], b_rows: Sequence[int]) -> list[int]:
    """Product of matrices given as row ints: row i of AB = xor of rows of B."""
    out = []
    for r in a_rows:
        acc = 0
        while r:
            low = r & -r
            acc ^= b_rows[low.bit_length() - 1]
            r ^= low
        out.append(acc)
    return out


def transpose_rows(rows: Sequence[int], ncols: int) -> list[int]:
    cols = [0] * ncols
    for i, r in enumerate(rows):
        while r:
            low = r & -r
            cols[low.bit_length() - 1] |= 1 << i
            r ^= low
    return cols


def random_invertible(n: int, rng) -> list[int]:
    """Uniform element of GL_n(GF(2)) as row ints."""
    while True:
        rows = [rng.getrandbits(n) for _ in range(n)]
        if gf2_rank(rows) == n:
            return rows


def random_full_rank(k: int, n: int, rng) -> list[int]:
    """Uniform k x n matrix of rank k (k <= n) as row ints."""
    if k > n:
        raise ValueError("k must not exceed n")
    while True:
        rows = [rng.getrandbits(n) for _ in range(k)]
        if gf2_rank(rows) == k:
            return rows


# ---------------------------------------------------------------- matrices

@dataclass(frozen=True)
class BinMatrix:
    """m x n matrix over GF(2); `bits` is the row-major flattening."""

    rows: int
    cols: int
    bits: int = 0

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimension")
        if self.bits < 0 or self.bits.bit_length() > self.rows * self.cols:
            raise ValueError("bit array does not fit the shape")

    @classmethod
    def zeros(cls, m: int, n: int) -> "BinMatrix":
        return cls(m, n, 0)

    @classmethod
    def identity(cls, n: int) -> "BinMatrix":
        return cls.from_rows([1 << i for i in range(n)], n)

    @classmethod
    def from_rows(cls, rows: Sequence[int], n: int) -> "BinMatrix":
        return cls(len(rows), n, rows_to_bits(rows, n))

    @classmethod
    def from_columns(cls, cols: Sequence[int], m: int) -> "BinMatrix":
        return cls(m, len(cols), columns_to_bits(cols, m, len(cols)))

    @classmethod
    def from_list(cls, data: Sequence[Sequence[int]]) -> "BinMatrix":
        m = len(data)
        n = len(data[0]) if m else 0
        rows = []
        for row in data:
            if len(row) != n:
                raise ValueError("ragged matrix")
            rows.append(sum((int(v) & 1) << j for j, v in enumerate(row)))
        return cls.from_rows(rows, n)

    @classmethod
    def random(cls, m: int, n: int, rng) -> "BinMatrix":
        return cls(m, n, rng.getrandbits(m * n))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row(self, i: int) -> int:
        return (self.bits >> (i * self.cols)) & ((1 << self.cols) - 1)

    def row_ints(self) -> list[int]:
        return bits_to_rows(self.bits, self.rows, self.cols)

    def column_ints(self) -> list[int]:
        return bits_to_columns(self.bits, self.rows, self.cols)

    def get(self, i: int, j: int) -> int:
        return (self.bits >> (i * self.cols + j)) & 1

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self.get(*ij)

    def to_list(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.row_ints()]

    def transpose(self) -> "BinMatrix":
        return BinMatrix.from_rows(self.column_ints(), self.rows)

    @property
    def T(self) -> "BinMatrix":
        return self.transpose()

    def _same_shape(self, other: "BinMatrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "BinMatrix") -> "BinMatrix":
        self._same_shape(other)
        return BinMatrix(self.rows, self.cols, self.bits ^ other.bits)

    __sub__ = __add__
    __xor__ = __add__

    def __matmul__(self, other: "BinMatrix") -> "BinMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        return BinMatrix.from_rows(gf2_matmul(self.row_ints(), other.row_ints()), other.cols)

    def is_zero(self) -> bool:
        return self.bits == 0

    def __bool__(self) -> bool:
        return self.bits != 0

    def rank(self) -> int:
        return gf2_rank(self.row_ints())

    def __repr__(self) -> str:
        body = "; ".join("".join(str(v) for v in row) for row in self.to_list())
        return f"BinMatrix({self.rows}x{self.cols}: {body})"


def rank(M: BinMatrix) -> int:
    return M.rank()


def bits_rank(bits: int, m: int, n: int) -> int:
    """Rank of a flattened m x n matrix."""
    return gf2_rank(bits_to_rows(bits, m, n))


def rref(M: BinMatrix) -> tuple[BinMatrix, list[int]]:
    """Reduced row echelon form (leftmost pivots); zero rows are dropped to the bottom."""
    rows, piv = gf2_rref(M.row_ints())
    rows = rows + [0] * (M.rows - len(rows))
    return BinMatrix.from_rows(rows, M.cols), piv


def solve(A: BinMatrix, b: int | Sequence[int]) -> LinearSolution | None:
    """Solve A x = b.  b may be an int (bit i = entry i) or a 0/1 sequence."""
    if not isinstance(b, int):
        if len(b) != A.rows:
            raise ValueError("right-hand side has the wrong length")
        b = sum((int(v) & 1) << i for i, v in enumerate(b))
    elif b.bit_length() > A.rows:
        raise ValueError("right-hand side has the wrong length")
    return gf2_solve(A.row_ints(), A.cols, b)


def trace_pairing(X: BinMatrix, B: BinMatrix) -> int:
    """tr(X B^T) over GF(2), i.e. parity of the entrywise product."""
    X._same_shape(B)
    return parity(X.bits & B.bits)


def syndrome_bits(x: int, duals: Sequence[int]) -> int:
    """Syndrome of a flattened matrix against flattened duals; bit i <-> duals[i]."""
    s = 0
    for i, b in enumerate(duals):
        if (x & b).bit_count() & 1:
            s |= 1 << i
    return s


def syndrome(X: BinMatrix, duals: Sequence[BinMatrix]) -> int:
    for B in duals:
        X._same_shape(B)
    return syndrome_bits(X.bits, [B.bits for B in duals])


# ---------------------------------------------------------------- matrix codes

class MatrixCode:
    """GF(2)-linear code of m x n matrices, stored as a basis of flattened ints."""

    __slots__ = ("m", "n", "vectors", "_span")

    def __init__(self, m: int, n: int, basis: Iterable[int | BinMatrix], check: bool = True):
        vecs = []
        for b in basis:
            if isinstance(b, BinMatrix):
                if b.shape != (m, n):
                    raise ValueError(f"basis element has shape {b.shape}, expected {(m, n)}")
                vecs.append(b.bits)
            else:
                vecs.append(int(b))
        self.m, self.n = m, n
        self.vectors = tuple(vecs)
        self._span = None
        if check:
            if any(v.bit_length() > m * n for v in vecs):
                raise ValueError("basis element does not fit the shape")
            if gf2_rank(vecs) != len(vecs):
                raise ValueError("basis elements are linearly dependent")

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def length(self) -> int:
        return self.m * self.n

    @property
    def basis(self) -> list[BinMatrix]:
        return [BinMatrix(self.m, self.n, v) for v in self.vectors]

    def span(self) -> GF2Span:
        if self._span is None:
            self._span = GF2Span(self.vectors)
        return self._span

    def contains(self, X: BinMatrix | int) -> bool:
        x = X.bits if isinstance(X, BinMatrix) else X
        return self.span().contains(x)

    def same_span(self, other: "MatrixCode") -> bool:
        return (self.m, self.n, self.dim) == (other.m, other.n, other.dim) and all(
            self.contains(v) for v in other.vectors)

    def codeword(self, coeffs: int) -> int:
        """Flattened codeword sum_i coeffs_i basis_i."""
        acc = 0
        for i in iter_bits(coeffs):
            acc ^= self.vectors[i]
        return acc

    def random_word(self, rng) -> int:
        return self.codeword(rng.getrandbits(self.dim))

    def __repr__(self) -> str:
        return f"MatrixCode([{self.m}x{self.n}, {self.dim}])"


def dual_basis(C: MatrixCode) -> MatrixCode:
    """Basis of {X : tr(X B^T) = 0 for every B in C}; dimension mn - k."""
    return MatrixCode(C.m, C.n, gf2_kernel(C.vectors, C.m * C.n), check=False)


def complete_basis(sub: MatrixCode, sup: MatrixCode) -> list[BinMatrix]:
    """Elements of sup's basis extending sub's basis to a basis of span(sup)."""
    if (sub.m, sub.n) != (sup.m, sup.n):
        raise ValueError("shape mismatch")
    sp = GF2Span(sub.vectors)
    if sp.dim != sub.dim:
        raise ValueError("sub basis is dependent")
    sup_span = sup.span()
    for v in sub.vectors:
        if not sup_span.contains(v):
            raise ValueError("sub is not contained in super")
    out = []
    for v in sup.vectors:
        if sp.add(v) is not None:
            out.append(BinMatrix(sup.m, sup.n, v))
    return out


def change_basis(vectors: Sequence[int], T_rows: Sequence[int]) -> list[int]:
    """New basis sum_j T[i][j] vectors[j] for each row i of T."""
    return gf2_matmul(T_rows, vectors)


def random_code(m: int, n: int, k: int, rng) -> MatrixCode:
    """Uniformly random k-dimensional code with a uniform ordered basis."""
    if not 0 <= k <= m * n:
        raise ValueError("dimension overflow")
    while True:
        vecs = [rng.getrandbits(m * n) for _ in range(k)]
        if gf2_rank(vecs) == k:
            return MatrixCode(m, n, vecs, check=False)


def random_complement_code(avoid: MatrixCode, l_a: int, rng) -> MatrixCode:
    """Random l_a-dimensional code meeting `avoid` only in zero."""
    m, n = avoid.m, avoid.n
    if l_a < 0 or l_a + avoid.dim > m * n:
        raise ValueError("dimension overflow: no complement of that size exists")
    while True:
        vecs = [rng.getrandbits(m * n) for _ in range(l_a)]
        if gf2_rank(list(avoid.vectors) + vecs) == avoid.dim + l_a:
            return MatrixCode(m, n, vecs, check=False)


def random_subcode(C: MatrixCode, l_s: int, rng) -> MatrixCode:
    """Uniformly random subcode of codimension l_s."""
    if not 0 <= l_s <= C.dim:
        raise ValueError("codimension too large")
    if l_s == 0:
        return C
    T = random_full_rank(C.dim - l_s, C.dim, rng)
    return MatrixCode(C.m, C.n, change_basis(C.vectors, T), check=False)


def random_basis(C: MatrixCode, rng) -> MatrixCode:
    """Same code, basis multiplied by a uniform invertible matrix."""
    T = random_invertible(C.dim, rng)
    return MatrixCode(C.m, C.n, change_basis(C.vectors, T), check=False)


def in_ball(X: BinMatrix, t: int) -> bool:
    return X.rank() <= t
