"""Attack cost formulas (log2 of operation counts over F_q, big-O constants taken as 1)."""
from __future__ import annotations

import math
from dataclasses import dataclass

OMEGA = 2.8


def decompose(k: int, m: int) -> tuple[int, int]:
    """k = a*m + b with 0 < b <= m."""
    if k <= 0:
        raise ValueError("dimension must be positive")
    a = (k - 1) // m
    return a, k - a * m


def _log2_sum(*terms: float) -> float:
    """log2 of a sum of terms given by their log2."""
    top = max(terms)
    return top + math.log2(sum(2.0 ** (x - top) for x in terms))


@dataclass(frozen=True)
class AttackCostParams:
    """Decomposition used by the structural attack on the dual public code."""
    m: int
    n: int
    r: int
    k: int
    a: int
    b: int
    lam_p: int
    mu: int
    l_a: int
    l_s: int
    omega: float = OMEGA

    @classmethod
    def from_params(cls, params, omega: float = OMEGA) -> "AttackCostParams":
        m, n = params.m, params.n
        r = n - params.kappa
        diff = params.l_a - params.l_s
        lam_p, mu = divmod(diff, m)
        a, b = r - lam_p - 1, m - mu
        k = a * m + b
        if k != params.syn_len:
            raise ValueError("inconsistent decomposition")
        return cls(m, n, r, k, a, b, lam_p, mu, params.l_a, params.l_s, omega)

    @property
    def s_range(self) -> range:
        return range(self.n - self.r + 1, self.n - self.a + 1)


def single_loop_cost_log2(m: int, n: int, k: int, omega: float = OMEGA) -> float:
    """k m^w + m n k^(w-1)."""
    return _log2_sum(math.log2(k) + omega * math.log2(m),
                     math.log2(m * n) + (omega - 1) * math.log2(k))


def low_weight_search_cost_log2(m: int, n: int, k: int, s: int, q: int = 2,
                                omega: float = OMEGA) -> float:
    """Average cost of the randomized low-rank search for a rank-s word."""
    a, b = decompose(k, m)
    if not 0 <= s <= n - a:
        raise ValueError("target rank out of range")
    expo = m * (n - a) - s * (m + n - a - s) + min(0, s - b + 1)
    return single_loop_cost_log2(m, n, k, omega) + expo * math.log2(q)


def distinguisher_cost_log2(params, q: int = 2, with_poly: bool = False,
                            omega: float = OMEGA) -> float:
    """Exponent r(lambda+1+m-n) + min(0, mu-r+1) of the low-rank distinguisher on D^perp."""
    m, n = params.m, params.n
    r = n - params.kappa
    lam, mu = divmod(params.l_a, m)
    expo = (r * (lam + 1 + m - n) + min(0, mu - r + 1)) * math.log2(q)
    if with_poly:
        k = m * r - params.l_a
        expo += single_loop_cost_log2(m, n, k, omega)
    return expo


def structural_attack_cost_log2(params, s: int | None = None, q: int = 2,
                                omega: float = OMEGA) -> dict:
    """Cost of the structural attack.

    With s given, returns {"s": s, "log2": cost}.  Without, returns the
    minimum over the admissible range plus the per-s breakdown.
    """
    c = AttackCostParams.from_params(params, omega)
    if s is None:
        rows = [structural_attack_cost_log2(params, s_, q, omega) for s_ in c.s_range]
        if not rows:
            raise ValueError("empty target-rank range")
        best = min(rows, key=lambda r: r["log2"])
        return {"s": best["s"], "log2": best["log2"], "per_s": rows}
    m, n, k, a, b, w = c.m, c.n, c.k, c.a, c.b, omega
    lq = math.log2(q)
    step3 = (w + 1) * math.log2(m) + (w - 1) * math.log2(n)
    if s == n - a:
        poly = _log2_sum((w - 1) * math.log2(k) + math.log2(m * n),
                         math.log2(k) + w * math.log2(m), step3)
        expo = c.l_a + c.l_s - m - b
        return {"s": s, "case": 1, "exponent": expo,
                "log2": poly - math.log2(b) + expo * lq}
    if c.n - c.r + 1 <= s < n - a:
        P = c.l_s + c.l_a + 2 - m + (m - s) * (n - a - s) - max(0, b - 1 - s)
        p = m * (a + s - n) + b - 2
        poly = _log2_sum((w - 1) * math.log2(k) + 2 * math.log2(m),
                         math.log2(k) + w * math.log2(m), p * lq + step3)
        return {"s": s, "case": 2, "exponent": P, "p_exponent": p,
                "log2": poly + P * lq}
    raise ValueError("target rank outside [n-r+1, n-a]")


def forge_cost_log2(params, q: int = 2, omega: float = OMEGA) -> float:
    """Kernel-search estimate for forging (an estimator choice, not a published formula).

    The MinRank instance has K = code_dim + 1 matrices; guessing ceil(K/m)
    kernel vectors succeeds with probability q^{-t ceil(K/m)}, and the
    q^{l_a - l_s - t^2} expected solutions each offer a chance.
    """
    K = params.code_dim + 1
    t = params.t
    guesses = -(-K // params.m)
    mult = max(0, params.l_a - params.l_s - t * t)
    return (t * guesses - mult) * math.log2(q) + omega * math.log2(K)
