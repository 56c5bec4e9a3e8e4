"""Byte-exact encodings of keys and signatures.

All bit strings are packed LSB-first: bit i of the stream is bit (i % 8) of
byte i // 8, with zero padding at the tail.  Key files start with an 8-byte
magic, a little-endian u16 format version and a little-endian u16 parameter
id (from the registry).  Signatures are headerless so that a signature file
is exactly sig_size_bytes long.
"""
from __future__ import annotations

import hashlib
import itertools
import math
import struct
from dataclasses import dataclass
from typing import Sequence

from .analysis.counting import pk_size_bytes, sig_size_bytes, sk_size_bytes
from .analysis.registry import Registry, default_registry
from .field import FieldBasis, field
from .gabidulin import GabidulinCode, MatrixGabidulin
from .keys import ParameterSet, PublicKey, Trapdoor, systematic_positions
from .matrank import BinMatrix, GF2Span, columns_to_bits, gf2_inverse, gf2_matmul, gf2_rank
from .rng import ShakeRandom, make_rng

PK_MAGIC = b"MRNDA-PK"
SK_MAGIC = b"MRNDA-SK"
FORMAT_VERSION = 1
HEADER = struct.Struct("<8sHH")
PIVOT_TAG = b"miranda/pivots/v1"


class WireError(ValueError):
    """Malformed or mismatched encoding."""


class EncodingError(RuntimeError):
    """No pivot set in the table admits an invertible minor."""


# ---------------------------------------------------------------- bit streams

class BitWriter:
    def __init__(self):
        self.value = 0
        self.nbits = 0

    def write(self, v: int, width: int) -> None:
        if v >> width:
            raise ValueError("value does not fit the field width")
        self.value |= v << self.nbits
        self.nbits += width

    def to_bytes(self) -> bytes:
        return self.value.to_bytes((self.nbits + 7) // 8, "little")


class BitReader:
    def __init__(self, data: bytes, nbits: int):
        if len(data) != (nbits + 7) // 8:
            raise WireError(f"expected {(nbits + 7) // 8} bytes, got {len(data)}")
        self.value = int.from_bytes(data, "little")
        if self.value >> nbits:
            raise WireError("non-zero padding bits")
        self.pos = 0

    def read(self, width: int) -> int:
        v = (self.value >> self.pos) & ((1 << width) - 1)
        self.pos += width
        return v


# ---------------------------------------------------------------- pivot table

def pivot_table(params: ParameterSet) -> list[tuple[int, ...]]:
    """2^idx_bits row subsets of size t (0-based), derived from SHAKE-256 of the name.

    When fewer than 2^idx_bits subsets exist, all of them appear (in a
    hashed order) and the list repeats cyclically.
    """
    size = 1 << params.idx_bits
    m, t = params.m, params.t
    rng = ShakeRandom(PIVOT_TAG + b"\x00" + params.name.encode(), domain=PIVOT_TAG)
    total = math.comb(m, t)
    if total <= size:
        subsets = list(itertools.combinations(range(m), t))
        rng.shuffle(subsets)
        return [subsets[i % total] for i in range(size)]
    seen: set[tuple[int, ...]] = set()
    out = []
    while len(out) < size:
        sub = tuple(sorted(rng.sample(range(m), t)))
        if sub not in seen:
            seen.add(sub)
            out.append(sub)
    return out


_pivot_cache: dict[ParameterSet, list[tuple[int, ...]]] = {}


def _pivots(params: ParameterSet) -> list[tuple[int, ...]]:
    tab = _pivot_cache.get(params)
    if tab is None:
        tab = _pivot_cache[params] = pivot_table(params)
    return tab


# ---------------------------------------------------------------- signatures

@dataclass(frozen=True)
class Signature:
    support: BinMatrix  # m x t, identity on the rows of pivot_table[index]
    index: int
    salt: bytes


def _sig_bits(params: ParameterSet) -> int:
    t = params.t
    return t * (params.m - t) + params.idx_bits + params.lam


def support_basis(E: BinMatrix, t: int, rng=None) -> list[int]:
    """t independent columns spanning a space that contains the column space of E.

    Rank-deficient supports are completed with uniformly random columns.
    """
    sp = GF2Span()
    cols = [c for c in E.column_ints() if sp.add(c) is not None]
    if len(cols) > t:
        raise ValueError("error matrix rank exceeds t")
    if len(cols) < t:
        rng = make_rng() if rng is None else rng
        while len(cols) < t:
            c = rng.getrandbits(E.rows)
            if sp.add(c) is not None:
                cols.append(c)
    return cols


def _rows_of(cols: Sequence[int], m: int) -> list[int]:
    """Row ints (t bits each) of the m x t matrix with the given column ints."""
    rows = [0] * m
    for k, c in enumerate(cols):
        while c:
            low = c & -c
            rows[low.bit_length() - 1] |= 1 << k
            c ^= low
    return rows


def reduce_support(cols: Sequence[int], params: ParameterSet) -> tuple[int, list[int]]:
    """(index, rows) with rows[pivot_table[index]] equal to the identity."""
    m, t = params.m, params.t
    rows = _rows_of(cols, m)
    for idx, subset in enumerate(_pivots(params)):
        minor = [rows[i] for i in subset]
        if gf2_rank(minor) != t:
            continue
        inv = gf2_inverse(minor, t)
        # right-multiply by inv: new row = row @ inv
        return idx, gf2_matmul(rows, inv)
    raise EncodingError("no pivot set of the table gives an invertible minor; resalt")


def encode_support(cols: Sequence[int], salt: bytes, params: ParameterSet) -> bytes:
    if len(salt) != params.salt_bytes:
        raise ValueError("salt has the wrong length")
    m, t = params.m, params.t
    if t == 0:
        idx, rows = 0, [0] * m
    else:
        idx, rows = reduce_support(cols, params)
    piv = set(_pivots(params)[idx]) if t else set()
    w = BitWriter()
    for i in range(m):
        if i not in piv:
            w.write(rows[i], t)
    w.write(idx, params.idx_bits)
    w.write(int.from_bytes(salt, "little"), params.lam)
    out = w.to_bytes()
    assert len(out) == sig_size_bytes(params)
    return out


def encode_signature(E: BinMatrix, salt: bytes, params: ParameterSet, rng=None) -> bytes:
    if E.shape != (params.m, params.n):
        raise ValueError("error matrix has the wrong shape")
    return encode_support(support_basis(E, params.t, rng), salt, params)


def decode_signature(data: bytes, params: ParameterSet) -> Signature:
    m, t = params.m, params.t
    r = BitReader(bytes(data), _sig_bits(params))
    payload = [r.read(t) for _ in range(m - t)]
    idx = r.read(params.idx_bits)
    salt = r.read(params.lam).to_bytes(params.salt_bytes, "little")
    piv = _pivots(params)[idx] if t else ()
    rows = [0] * m
    it = iter(payload)
    pos = {p: k for k, p in enumerate(piv)}
    for i in range(m):
        rows[i] = (1 << pos[i]) if i in pos else next(it)
    cols = [0] * t
    for i, row in enumerate(rows):
        for k in range(t):
            if (row >> k) & 1:
                cols[k] |= 1 << i
    support = BinMatrix(m, t, columns_to_bits(cols, m, t))
    return Signature(support, idx, salt)


def signature_to_support_cols(sig: Signature) -> list[int]:
    return sig.support.column_ints()


# ---------------------------------------------------------------- keys

def _header(magic: bytes, pid: int) -> bytes:
    return HEADER.pack(magic, FORMAT_VERSION, pid)


def _read_header(data: bytes, magic: bytes, registry: Registry) -> tuple[ParameterSet, bytes]:
    if len(data) < HEADER.size:
        raise WireError("truncated header")
    mg, ver, pid = HEADER.unpack_from(data)
    if mg != magic:
        raise WireError("bad magic")
    if ver != FORMAT_VERSION:
        raise WireError(f"unsupported format version {ver}")
    try:
        params = registry.by_id(pid).params
    except ValueError as exc:
        raise WireError(str(exc)) from None
    return params, data[HEADER.size:]


def encode_public_key(pk: PublicKey, registry: Registry | None = None) -> bytes:
    params = pk.params
    pid = (registry or default_registry()).id_of(params)
    k = params.code_dim
    mask = (1 << k) - 1
    pos = systematic_positions(params)
    w = BitWriter()
    for i, d in enumerate(pk.duals):
        if d >> k != 1 << i or pos[i] != k + i:
            raise ValueError("public key is not in systematic form")
        w.write(d & mask, k)
    body = w.to_bytes()
    assert len(body) == pk_size_bytes(params)
    return _header(PK_MAGIC, pid) + body


def decode_public_key(data: bytes, registry: Registry | None = None) -> PublicKey:
    params, body = _read_header(bytes(data), PK_MAGIC, registry or default_registry())
    k, r = params.code_dim, params.syn_len
    rd = BitReader(body, k * r)
    duals = tuple(rd.read(k) | (1 << (k + i)) for i in range(r))
    return PublicKey(params, duals)


def encode_secret_key(sk: Trapdoor, params: ParameterSet, registry: Registry | None = None) -> bytes:
    pid = (registry or default_registry()).id_of(params)
    m, n = params.m, params.n
    if len(sk.extra) != params.l_a:
        raise ValueError("trapdoor does not match the parameters")
    w = BitWriter()
    for x in sk.g:
        w.write(x, m)
    for x in sk.basis.elems:
        w.write(x, m)
    for x in sk.extra:
        w.write(x, m * n)
    body = w.to_bytes()
    assert len(body) == sk_size_bytes(params)
    return _header(SK_MAGIC, pid) + body


def decode_secret_key(data: bytes, registry: Registry | None = None) -> tuple[ParameterSet, Trapdoor]:
    params, body = _read_header(bytes(data), SK_MAGIC, registry or default_registry())
    m, n = params.m, params.n
    rd = BitReader(body, n * m + m * m + params.l_a * m * n)
    g = [rd.read(m) for _ in range(n)]
    B = [rd.read(m) for _ in range(m)]
    extra = tuple(rd.read(m * n) for _ in range(params.l_a))
    ctx = field(m)
    try:
        gab = MatrixGabidulin(GabidulinCode(ctx, g, params.kappa), FieldBasis(ctx, B))
    except ValueError as exc:
        raise WireError(f"invalid secret key: {exc}") from None
    return params, Trapdoor(gab, extra)


def key_fingerprint(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:16]
