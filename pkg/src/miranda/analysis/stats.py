"""Statistical utilities: distances, uniformity tests, ball enumeration/sampling
and the Monte-Carlo checks behind the non-leakage argument."""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from scipy import stats as _sps

from ..matrank import gf2_rank, random_full_rank, random_invertible, syndrome_bits
from .counting import ball_size, sphere_size

ENUM_GUARD = 1 << 24


def statistical_distance(p: Mapping | Sequence[float], u: Mapping | Sequence[float]) -> float:
    """Half the L1 distance between two distributions (dicts or aligned sequences)."""
    if isinstance(p, Mapping) or isinstance(u, Mapping):
        p = dict(p) if isinstance(p, Mapping) else dict(enumerate(p))
        u = dict(u) if isinstance(u, Mapping) else dict(enumerate(u))
        keys = set(p) | set(u)
        return 0.5 * sum(abs(p.get(k, 0.0) - u.get(k, 0.0)) for k in keys)
    if len(p) != len(u):
        raise ValueError("distributions must share a support")
    return 0.5 * sum(abs(a - b) for a, b in zip(p, u))


def empirical_distribution(samples: Iterable) -> dict:
    c = Counter(samples)
    total = sum(c.values())
    return {k: v / total for k, v in c.items()}


@dataclass
class ChiSquare:
    statistic: float
    dof: int
    pvalue: float

    def within_sigma(self, k: float = 3.0) -> bool:
        """|chi2 - dof| <= k * sqrt(2 dof) (normal approximation of the chi-square law)."""
        return abs(self.statistic - self.dof) <= k * math.sqrt(2 * self.dof)


def chi_square_uniform(counts: Sequence[int]) -> ChiSquare:
    counts = list(counts)
    if len(counts) < 2:
        return ChiSquare(0.0, 0, 1.0)
    res = _sps.chisquare(counts)
    return ChiSquare(float(res.statistic), len(counts) - 1, float(res.pvalue))


# ---------------------------------------------------------------- ball enumeration

def _column_echelon_bases(m: int, r: int) -> Iterator[list[int]]:
    """One canonical basis (r column ints) per r-dimensional subspace of F_2^m.

    Basis vector k has its lowest set bit at pivot p_k, and no other basis
    vector has bit p_k set.
    """
    for piv in itertools.combinations(range(m), r):
        free = []  # (k, bit) positions that may be set
        for k, p in enumerate(piv):
            for bit in range(p + 1, m):
                if bit not in piv:
                    free.append((k, bit))
        for mask in range(1 << len(free)):
            cols = [1 << p for p in piv]
            for idx, (k, bit) in enumerate(free):
                if (mask >> idx) & 1:
                    cols[k] |= 1 << bit
            yield cols


def _full_row_rank(r: int, n: int) -> list[list[int]]:
    """All r x n binary matrices (as row ints) of rank r."""
    out = []
    for rows in itertools.product(range(1, 1 << n), repeat=r):
        if gf2_rank(rows) == r:
            out.append(list(rows))
    return out


def enumerate_sphere(m: int, n: int, s: int) -> Iterator[int]:
    """Every m x n matrix (flattened) of rank exactly s, each once."""
    if s == 0:
        yield 0
        return
    coeffs = _full_row_rank(s, n)
    for cols in _column_echelon_bases(m, s):
        spread = [_spread_n(c, n) for c in cols]
        for A in coeffs:
            # E = S A: column j of E is the sum of S_k over k with A[k][j] = 1
            bits = 0
            for sk, row in zip(spread, A):
                j = 0
                while row:
                    if row & 1:
                        bits ^= sk << j
                    row >>= 1
                    j += 1
            yield bits


def _spread_n(c: int, n: int) -> int:
    out, i = 0, 0
    while c:
        if c & 1:
            out |= 1 << (i * n)
        c >>= 1
        i += 1
    return out


def enumerate_ball(m: int, n: int, t: int, guard: int = ENUM_GUARD) -> Iterator[int]:
    if ball_size(m, n, 2, t) > guard:
        raise ValueError("ball too large to enumerate")
    for s in range(min(t, m, n) + 1):
        yield from enumerate_sphere(m, n, s)


def random_rank_matrix(m: int, n: int, r: int, rng) -> int:
    """Uniform m x n matrix of rank r (flattened): S A with S, A uniform of full rank r."""
    if r == 0:
        return 0
    S = random_full_rank(r, m, rng)  # r rows of m bits = columns of S
    A = random_full_rank(r, n, rng)
    bits = 0
    for col, row in zip(S, A):
        sc = _spread_n(col, n)
        j = 0
        while row:
            if row & 1:
                bits ^= sc << j
            row >>= 1
            j += 1
    return bits


class BallSampler:
    """Uniform sampling from the rank ball of radius t."""

    def __init__(self, m: int, n: int, t: int):
        self.m, self.n, self.t = m, n, t
        self.weights = [sphere_size(m, n, 2, s) for s in range(min(t, m, n) + 1)]
        self.total = sum(self.weights)

    def sample(self, rng) -> int:
        x = rng.randrange(self.total)
        for s, w in enumerate(self.weights):
            if x < w:
                return random_rank_matrix(self.m, self.n, s, rng)
            x -= w
        raise AssertionError


# ---------------------------------------------------------------- preimages

def preimage_map(duals: Sequence[int], m: int, n: int, t: int) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for E in enumerate_ball(m, n, t):
        out.setdefault(syndrome_bits(E, duals), []).append(E)
    return out


def enumerate_preimages(s: int, pk, t: int | None = None) -> list[int]:
    """All E with rank <= t and syndrome(E, pk.duals) = s, by a full ball scan."""
    p = pk.params
    t = p.t if t is None else t
    return [E for E in enumerate_ball(p.m, p.n, t) if syndrome_bits(E, pk.duals) == s]


def extended_syndrome_injective(pk, sk) -> bool:
    """Is E -> (s, t) (syndrome against duals and extra) injective on the ball?"""
    p = pk.params
    rows = list(pk.duals) + list(sk.extra)
    seen = set()
    for E in enumerate_ball(p.m, p.n, p.t):
        x = syndrome_bits(E, rows)
        if x in seen:
            return False
        seen.add(x)
    return True


# ---------------------------------------------------------------- collision bias

def collision_probability_closed_form(params) -> float:
    """Exact collision probability of two uniform ball elements under a random
    Add-and-Remove dual basis, for codes whose minimum distance exceeds 2t."""
    N = params.ext_len
    B = ball_size(params.m, params.n, 2, params.t)
    return (2 ** params.l_a - 1) / (2 ** N - 1) * (1 - 1 / B) + 1 / B


def collision_bias_closed_form(params) -> float:
    return collision_probability_closed_form(params) * 2 ** params.syn_len - 1


@dataclass
class CollisionReport:
    pairs: int
    keys: int
    probability: float
    stderr: float
    epsilon: float
    epsilon_stderr: float
    expected_probability: float
    expected_epsilon: float

    @property
    def z(self) -> float:
        return (self.probability - self.expected_probability) / self.stderr if self.stderr else 0.0

    def within_sigma(self, k: float = 3.0) -> bool:
        return abs(self.z) <= k


def collision_bias_estimate(params, trials: int, rng, keys: int = 100) -> CollisionReport:
    """Monte-Carlo estimate of P(syndrome(X) = syndrome(Y)) over fresh keys.

    `trials` pairs are split evenly over `keys` independent key generations;
    the standard error is taken from the per-key batch means.
    """
    from ..keys import keygen

    per = max(1, trials // keys)
    sampler = BallSampler(params.m, params.n, params.t)
    means = []
    for _ in range(keys):
        pk = keygen(params, rng=rng).pk
        hits = 0
        for _ in range(per):
            X, Y = sampler.sample(rng), sampler.sample(rng)
            if syndrome_bits(X ^ Y, pk.duals) == 0:
                hits += 1
        means.append(hits / per)
    p = sum(means) / keys
    var = sum((x - p) ** 2 for x in means) / max(1, keys - 1)
    se = math.sqrt(var / keys)
    if se == 0:
        se = math.sqrt(max(p * (1 - p), 1e-12) / (per * keys))
    scale = 2 ** params.syn_len
    exp_p = collision_probability_closed_form(params)
    return CollisionReport(per * keys, keys, p, se, p * scale - 1, se * scale, exp_p, exp_p * scale - 1)


# ---------------------------------------------------------------- probFund

@dataclass
class ProbFundReport:
    trials: int
    buckets: int
    zero_count: int
    chi2: ChiSquare
    counts: list[int] = field(repr=False, default_factory=list)

    @property
    def passed(self) -> bool:
        return self.zero_count == 0 and self.chi2.within_sigma(3.0)


def probfund_check(m: int, kappa: int, X: int | None, trials: int, rng, pool: int = 256) -> ProbFundReport:
    """Syndrome of a fixed low-rank X against uniformly random dual bases of
    random matrix Gabidulin codes [m x m, kappa m].

    A pool of independent codes is drawn once; each trial picks a code from
    the pool and a uniformly random basis of its dual.
    """
    from ..gabidulin import sample_matrix_gabidulin

    n = m
    r = m * (n - kappa)
    if X is None:
        X = random_rank_matrix(m, n, 1, rng)
    base = []
    for _ in range(pool):
        D = sample_matrix_gabidulin(m, kappa, rng).dual_matbasis.vectors
        base.append(syndrome_bits(X, D))
    counts = [0] * (1 << r)
    for _ in range(trials):
        s0 = base[rng.randrange(pool)]
        T = random_invertible(r, rng)
        # dual basis B'_i = sum_j T[i][j] B_j, so s'_i = <T_i, s0>
        s = 0
        for i, row in enumerate(T):
            if (row & s0).bit_count() & 1:
                s |= 1 << i
        counts[s] += 1
    return ProbFundReport(trials, len(counts), counts[0], chi_square_uniform(counts[1:]), counts)


# ---------------------------------------------------------------- audits

class GuardExceeded(ValueError):
    """The parameter set is too large for an exhaustive audit."""


def _guard(params, guard: int = ENUM_GUARD) -> None:
    size = ball_size(params.m, params.n, 2, params.t)
    if size > guard:
        raise GuardExceeded(f"{params.name}: ball of {size} elements exceeds the enumeration guard of {guard}")


def uniformity_audit(params, rng, syndromes: int = 5, factor: int = 50, samples: int | None = None,
                     alpha: float = 1e-3, keypair=None) -> dict:
    """Chi-square test of the preimage sampler against the exact preimage sets.

    For each of `syndromes` random syndromes the full preimage set is
    enumerated; `factor` times its size samples are drawn (or samples /
    syndromes when `samples` is given).  Passes when every p-value > alpha
    and the extended-syndrome map is injective on the ball.
    """
    from ..fdh import PreimageSampler
    from ..keys import keygen

    _guard(params)
    kp = keypair or keygen(params, rng=rng)
    sampler = PreimageSampler(kp.pk, kp.sk)
    pmap = preimage_map(kp.pk.duals, params.m, params.n, params.t)
    rows = []
    for _ in range(syndromes):
        s = rng.getrandbits(params.syn_len)
        pre = pmap.get(s, [])
        index = {E: i for i, E in enumerate(pre)}
        draws = samples // syndromes if samples else factor * len(pre)
        counts = [0] * len(pre)
        failures = outside = 0
        for _ in range(draws):
            res = sampler.sample(s, rng)
            if res is None:
                failures += 1
                continue
            i = index.get(res[0].bits)
            if i is None:
                outside += 1
            else:
                counts[i] += 1
        chi = chi_square_uniform(counts)
        rows.append({"syndrome": s, "preimages": len(pre), "samples": draws, "failures": failures,
                     "outside": outside, "chi2": chi.statistic, "dof": chi.dof, "pvalue": chi.pvalue,
                     "pass": outside == 0 and len(pre) > 0 and chi.pvalue > alpha})
    injective = extended_syndrome_injective(kp.pk, kp.sk)
    return {"mode": "uniformity", "params": params.name, "alpha": alpha, "syndromes": rows,
            "injective": injective, "pass": injective and all(r["pass"] for r in rows)}


def collision_audit(params, trials: int, rng, keys: int = 100, sigmas: float = 3.0) -> dict:
    _guard(params)
    rep = collision_bias_estimate(params, trials, rng, keys=keys)
    return {"mode": "collision", "params": params.name, "pairs": rep.pairs, "keys": rep.keys,
            "probability": rep.probability, "stderr": rep.stderr, "expected": rep.expected_probability,
            "epsilon": rep.epsilon, "epsilon_expected": rep.expected_epsilon, "z": rep.z,
            "pass": rep.within_sigma(sigmas)}


def probfund_audit(trials: int, rng, m: int = 4, kappa: int = 2) -> dict:
    rep = probfund_check(m, kappa, None, trials, rng)
    return {"mode": "probfund", "m": m, "kappa": kappa, "trials": trials, "buckets": rep.buckets,
            "zero_count": rep.zero_count, "chi2": rep.chi2.statistic, "dof": rep.chi2.dof,
            "pvalue": rep.chi2.pvalue, "pass": rep.passed}


def trials_audit(params, signatures: int, rng, tolerance: float = 4.0, workers: int = 1) -> dict:
    """Mean preimage-sampler trials per signature against 2^-density."""
    from ..fdh import PreimageSampler, sign
    from ..keys import keygen
    from .counting import density_log2

    kp = keygen(params, rng=rng)
    sampler = PreimageSampler(kp.pk, kp.sk)
    total = 0
    for i in range(signatures):
        total += sign(i.to_bytes(8, "little"), kp.sk, kp.pk, rng=rng, sampler=sampler, workers=workers).trials
    mean = total / signatures
    expected = 2.0 ** -density_log2(params)
    return {"mode": "trials", "params": params.name, "signatures": signatures, "mean_trials": mean,
            "expected_trials": expected, "ratio": mean / expected,
            "pass": expected / tolerance <= mean <= expected * tolerance}
