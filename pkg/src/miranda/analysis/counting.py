"""Exact rank-metric counts, densities, sizes and the Gilbert-Varshamov radius."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "gaussian_binomial", "sphere_size", "ball_size", "sphere_size_log2_approx", "log2_int",
    "first_column_count", "density_log2", "gv_radius", "sig_size_bytes", "pk_size_bytes",
    "sk_size_bytes", "expected_trials_log2", "rank_profile_probability",
    "rank_profile_probability_log2_approx", "rank_at_most_probability",
]


def log2_int(x: int | Fraction) -> float:
    """log2 of a (possibly huge) positive integer or fraction, accurate for any size."""
    if isinstance(x, Fraction):
        return log2_int(x.numerator) - log2_int(x.denominator)
    if x <= 0:
        raise ValueError("log2 of a non-positive number")
    shift = max(0, x.bit_length() - 64)
    return math.log2(x >> shift) + shift


@lru_cache(maxsize=None)
def gaussian_binomial(n: int, k: int, q: int = 2) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


@lru_cache(maxsize=None)
def sphere_size(m: int, n: int, q: int, s: int) -> int:
    """Number of m x n matrices over F_q of rank exactly s."""
    if not 0 <= s <= min(m, n):
        raise ValueError("rank out of range")
    out = gaussian_binomial(n, s, q)
    for i in range(s):
        out *= q ** m - q ** i
    return out


def ball_size(m: int, n: int, q: int, t: int) -> int:
    """Number of m x n matrices over F_q of rank at most t."""
    if t < 0:
        raise ValueError("radius out of range")
    return sum(sphere_size(m, n, q, s) for s in range(min(t, m, n) + 1))


def sphere_size_log2_approx(m: int, n: int, s: int, q: int = 2) -> float:
    """log2 of the estimate q^{s(m+n-s)}."""
    return s * (m + n - s) * math.log2(q)


def first_column_count(u: int, v: int, s: int, q: int = 2) -> int:
    """Rank-s u x v matrices whose first column is a fixed nonzero vector."""
    num = sphere_size(u, v, q, s) - (sphere_size(u, v - 1, q, s) if s <= v - 1 else 0)
    den = q ** u - 1
    if num % den:
        raise ArithmeticError("count is not an integer")
    return num // den


# ---------------------------------------------------------------- parameter-level formulas

def density_log2(params, mode: str = "exact") -> float:
    """log2 of the density of decodable extended syndromes.

    mode "exact" uses the exact ball size; "table" uses the sphere estimate
    q^{t(2m-t)}, which is what the published parameter tables round from.
    """
    m, t = params.m, params.t
    expo = m * (params.n - params.kappa) + params.l_s
    if mode == "exact":
        return log2_int(ball_size(m, m, 2, t)) - expo
    if mode == "table":
        return sphere_size_log2_approx(m, m, t) - expo
    raise ValueError(f"unknown density mode {mode!r}")


def expected_trials_log2(params, mode: str = "exact") -> float:
    return -density_log2(params, mode)


def gv_radius(m: int, n: int, dim: int) -> float:
    """Asymptotic Gilbert-Varshamov radius m(1 - sqrt(dim/(mn)))."""
    if not 0 <= dim <= m * n:
        raise ValueError("dimension out of range")
    return m * (1 - math.sqrt(dim / (m * n)))


def sig_size_bytes(params) -> int:
    t, m = params.t, params.m
    return -(-(t * (m - t) + params.idx_bits + params.lam) // 8)


def pk_size_bytes(params) -> int:
    return -(-(params.code_dim * params.syn_len) // 8)


def sk_size_bytes(params) -> int:
    """Body of a serialized trapdoor: g, the basis B, and the l_a completing matrices."""
    m, n = params.m, params.n
    return -(-(n * m + m * m + params.l_a * m * n) // 8)


# ---------------------------------------------------------------- low-rank search profile

def _check_profile(m: int, n: int, a: int, b: int, s: int) -> None:
    if not 0 < b <= m:
        raise ValueError("need 0 < b <= m")
    if a < 0 or s < 0 or s >= n - a:
        raise ValueError("need 0 <= s < n - a")


def rank_profile_probability(m: int, n: int, q: int, a: int, b: int, s: int,
                             exact: bool = False, variant: str = "derived") -> float | Fraction:
    """Probability that a uniform matrix with the search zero-profile has rank s.

    The profile: a zero leftmost columns and b-1 zero top entries in column a+1.
    variant "derived" follows the total-probability derivation (second term
    over q^{m(n-a-1)}); "stated" uses q^{m(n-a)} in that denominator.
    """
    _check_profile(m, n, a, b, s)
    w = n - a
    s_small = sphere_size(m, w - 1, q, s) if s <= w - 1 else 0
    s_big = sphere_size(m, w, q, s) if s <= min(m, w) else 0
    first = Fraction(s_small, q ** (m * (w - 1))) * Fraction(q ** (b - 1), q ** m)
    if variant == "derived":
        den = (q ** m - 1) * q ** (m * (w - 1))
    elif variant == "stated":
        den = (q ** m - 1) * q ** (m * w)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    second = Fraction(s_big - s_small, den) * (1 - Fraction(q ** (b - 1), q ** m))
    p = first + second
    return p if exact else float(p) if p > Fraction(1, 2 ** 1000) else 2.0 ** log2_int(p)


def rank_at_most_probability(m: int, n: int, q: int, a: int, b: int, s: int,
                             exact: bool = False) -> float | Fraction:
    """Probability that the profiled matrix is nonzero of rank at most s (s = 1..)."""
    p = sum((rank_profile_probability(m, n, q, a, b, r, exact=True) for r in range(1, s + 1)),
            Fraction(0))
    return p if exact else float(p)


def rank_profile_probability_log2_approx(m: int, n: int, a: int, b: int, s: int, q: int = 2) -> float:
    _check_profile(m, n, a, b, s)
    return (s * (m + n - a - s) + m * (a - n) + max(0, b - 1 - s)) * math.log2(q)
