"""Acceptance criteria.  Each test prints one PASS/FAIL line with its measurements."""
from __future__ import annotations

import math
import random
import time
from collections import Counter

import pytest

from miranda.analysis import stats
from miranda.analysis.counting import ball_size, first_column_count, sphere_size
from miranda.analysis.registry import check_tables, get_params
from miranda.cryptanalysis import (RANDOM_LIKE, STRUCTURED, SearchProfile, calibrate_search, distinguish,
                                   expected_targets, find_low_rank, random_code_like, stabilizes,
                                   structural_attack)
from miranda.fdh import PreimageSampler, Verdict, sign, verify
from miranda.field import field, random_basis, rank_weight
from miranda.gabidulin import GabidulinCode
from miranda.keys import keygen
from miranda.matrank import bits_rank, gf2_rank, random_code
from miranda.wire import decode_signature, encode_signature

# tolerances
TABLE_RUNTIME = 1.0
SIG_TOLERANCE = 1
DENS_TOLERANCE = 1
E2E_RUNTIME = 60.0
TRIALS_WINDOW = (4, 64)
UNIFORMITY_ALPHA = 1e-3
UNIFORMITY_FACTOR = 50
DECODER_TRIALS = 10 ** 4
CALIBRATION_FACTOR = 4
CALIBRATION_SEARCHES = 1000
MIN_TARGETS = 3.0
DISTINGUISH_RUNTIME = 300.0
ATTACK_BUDGET = 10 ** 4
ATTACK_MIN_KEYS = 8
SIGMAS = 3.0
PROBFUND_TRIALS = 10 ** 5


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}")
    return emit


def test_criterion_1_tables(report):
    t0 = time.perf_counter()
    rows = check_tables()
    dt = time.perf_counter() - t0
    table1 = {149, 151, 281, 293, 307, 467, 479, 331, 673}
    table2 = {89, 97, 101, 139}
    by_m = {}
    for r in rows:
        by_m.setdefault(r["m"], []).append(r)
    failures = []
    for m in table1 | table2:
        for r in by_m[m]:
            c = r["checks"]
            if not (c["sigma"] and c["pk"] and c["dens"]):
                failures.append(r["name"])
            assert abs(r["sigma"] - r["printed_sigma"]) <= SIG_TOLERANCE
            assert abs(r["dens"] - r["printed_dens"]) <= DENS_TOLERANCE
    sigma67 = by_m[67][0]["sigma"]
    sigma239 = by_m[239][0]["sigma"]
    deviations = sorted(r["name"] for r in rows if r["status"] == "KNOWN-DEVIATION")
    ok = (not failures and sigma67 == 63 and sigma239 == 143 and dt < TABLE_RUNTIME
          and {by_m[67][0]["status"], by_m[239][0]["status"]} == {"KNOWN-DEVIATION"})
    report(1, ok, f"rows={len(rows)} failures={failures} sigma(67)={sigma67} sigma(239)={sigma239} "
                  f"known-deviation={deviations} runtime={dt:.3f}s")
    assert ok


def test_criterion_2_end_to_end(report):
    p = get_params("toy-24")
    t0 = time.perf_counter()
    rng = random.Random(2024)
    kp = keygen(p, rng=rng)
    sampler = PreimageSampler(kp.pk, kp.sk)
    accepted = rejected = trials = 0
    for i in range(100):
        msg = b"acceptance message %03d" % i
        raw = sign(msg, kp.sk, kp.pk, rng=rng, sampler=sampler)
        trials += raw.trials
        sig = decode_signature(encode_signature(raw.E, raw.salt, p, rng), p)
        accepted += verify(msg, sig, kp.pk) is Verdict.ACCEPT
        pos = rng.randrange(len(msg))
        bad = msg[:pos] + bytes([msg[pos] ^ (1 + rng.randrange(255))]) + msg[pos + 1:]
        rejected += not verify(bad, sig, kp.pk).accepted
    dt = time.perf_counter() - t0
    mean = trials / 100
    ok = (accepted == 100 and rejected == 100 and TRIALS_WINDOW[0] <= mean <= TRIALS_WINDOW[1]
          and dt < E2E_RUNTIME)
    report(2, ok, f"roundtrips={accepted}/100 tamper_rejects={rejected}/100 mean_trials={mean:.2f} "
                  f"runtime={dt:.1f}s")
    assert ok


@pytest.mark.slow
def test_criterion_3_non_leakage(report):
    p = get_params("micro-8")
    t0 = time.perf_counter()
    res = stats.uniformity_audit(p, random.Random(3), syndromes=5, factor=UNIFORMITY_FACTOR,
                                 alpha=UNIFORMITY_ALPHA)
    dt = time.perf_counter() - t0
    pvals = [round(r["pvalue"], 4) for r in res["syndromes"]]
    sizes = [r["preimages"] for r in res["syndromes"]]
    ok = res["pass"] and ball_size(8, 8, 2, 1) <= 65026 and dt < 600
    report(3, ok, f"preimage_sets={sizes} pvalues={pvals} injective={res['injective']} runtime={dt:.1f}s")
    assert ok


def _plant(ctx, n: int, r: int, rng) -> list[int]:
    supp = random_basis(ctx, rng, r) if r else []
    while True:
        rows = [rng.getrandbits(n) for _ in range(r)]
        if gf2_rank(rows) == r:
            break
    e = [0] * n
    for b, row in zip(supp, rows):
        for j in range(n):
            if (row >> j) & 1:
                e[j] ^= b
    return e


@pytest.mark.slow
def test_criterion_4_decoder(report):
    rng = random.Random(4)
    F = field(24)
    C = GabidulinCode(F, random_basis(F, rng, 24), 16)
    t = C.t
    assert t == 4
    recovered = {}
    for r in range(t + 1):
        hits = 0
        for _ in range(DECODER_TRIALS):
            e = _plant(F, 24, r, rng)
            c = C.random_codeword(rng)
            hits += C.decode([a ^ b for a, b in zip(c, e)]) == e
        recovered[r] = hits
    violations = outputs = 0
    for _ in range(DECODER_TRIALS):
        e = _plant(F, 24, t + 1, rng)
        c = C.random_codeword(rng)
        y = [a ^ b for a, b in zip(c, e)]
        out = C.decode(y)
        if out is None:
            continue
        outputs += 1
        if rank_weight(out) > t or not C.contains([a ^ b for a, b in zip(y, out)]):
            violations += 1
    ok = all(v == DECODER_TRIALS for v in recovered.values()) and violations == 0
    report(4, ok, f"recovered={recovered} rank5_outputs={outputs} contract_violations={violations}")
    assert ok


def _enumeration_mismatches() -> int:
    bad = 0
    for m in range(1, 17):
        for n in range(1, 17):
            if m * n > 16:
                continue
            hist = Counter(bits_rank(x, m, n) for x in range(1 << (m * n)))
            for s in range(min(m, n) + 1):
                elems = set(stats.enumerate_sphere(m, n, s))
                bad += sphere_size(m, n, 2, s) != hist[s] or len(elems) != hist[s]
                bad += ball_size(m, n, 2, s) != sum(hist[r] for r in range(s + 1))
    return bad


def test_criterion_5_counting(report):
    mismatches = _enumeration_mismatches()
    u, v, s = 3, 3, 2
    firsts = Counter()
    for x in range(1 << (u * v)):
        if bits_rank(x, u, v) == s:
            firsts[sum(((x >> (i * v)) & 1) << i for i in range(u))] += 1
    lemma = {firsts[c] for c in range(1, 1 << u)} == {first_column_count(u, v, s)}
    ok = mismatches == 0 and lemma
    report(5, ok, f"mismatches={mismatches} first_column_count_ok={lemma} "
                  f"(count={first_column_count(u, v, s)})")
    assert ok


GRID = [(4, 4, 5, 2), (5, 5, 13, 2), (6, 6, 10, 3), (6, 6, 20, 2), (4, 6, 9, 3), (6, 6, 8, 4), (5, 5, 7, 3)]


@pytest.mark.slow
def test_criterion_6_calibration(report):
    rng = random.Random(6)
    cells = []
    ok = True
    for m, n, k, s in GRID:
        assert m * n <= 36 and expected_targets(m, n, k, s) >= MIN_TARGETS
        cal = calibrate_search(m, n, k, s, CALIBRATION_SEARCHES, rng)
        good = 1 / CALIBRATION_FACTOR <= cal.ratio <= CALIBRATION_FACTOR
        ok &= good
        cells.append(f"{(m, n, k, s)}:{cal.ratio:.2f}")
    one_loop = 0
    for _ in range(100):
        C = random_code(5, 5, 12, rng)
        prof = SearchProfile(5, 5, 12, 1)
        res = find_low_rank(C, 5 - prof.a, 1, rng)
        one_loop += res.found and res.loops == 1
    ok &= one_loop == 100
    report(6, ok, f"ratios {' '.join(cells)} s=n-a_one_loop={one_loop}/100")
    assert ok


def test_criterion_7_distinguisher(report):
    p = get_params("toy-16")
    rng = random.Random(7)
    t0 = time.perf_counter()
    correct = 0
    for i in range(20):
        D = keygen(p, rng=rng).pk.dual_code()
        correct += distinguish(D, p, None, rng)[0] == STRUCTURED
        correct += distinguish(random_code_like(D, rng), p, None, rng)[0] == RANDOM_LIKE
    dt = time.perf_counter() - t0
    ok = correct == 40 and dt < DISTINGUISH_RUNTIME
    report(7, ok, f"correct={correct}/40 runtime={dt:.1f}s")
    assert ok


@pytest.mark.slow
def test_criterion_8_structural_attack(report):
    p = get_params("weak-12")
    rng = random.Random(8)
    recovered, iters = 0, []
    spurious = 0
    for _ in range(10):
        kp = keygen(p, rng=rng)
        res = structural_attack(kp.pk.dual_code(), p, ATTACK_BUDGET, rng)
        sec = kp.sk.gab.dual_matbasis
        if res.success and res.algebra_dimension == p.m and stabilizes(res.algebra, sec.vectors, p.m, p.n, sec.dim):
            recovered += 1
            iters.append(res.iterations)
        code = random_code_like(kp.pk.dual_code(), rng)
        spurious += structural_attack(code, p, ATTACK_BUDGET, rng).success
    ok = recovered >= ATTACK_MIN_KEYS and spurious == 0
    report(8, ok, f"recovered={recovered}/10 iterations={iters} spurious={spurious}/10")
    assert ok


def test_criterion_9_probfund_and_collision(report):
    rng = random.Random(9)
    pf = stats.probfund_check(4, 2, None, PROBFUND_TRIALS, rng)
    z_pf = (pf.chi2.statistic - pf.chi2.dof) / math.sqrt(2 * pf.chi2.dof)
    col = stats.collision_bias_estimate(get_params("micro-8"), 20000, rng, keys=100)
    ok = pf.passed and col.within_sigma(SIGMAS)
    report(9, ok, f"probfund zero={pf.zero_count} chi2={pf.chi2.statistic:.1f}/{pf.chi2.dof} z={z_pf:.2f}; "
                  f"collision eps={col.epsilon:.4g} expected={col.expected_epsilon:.4g} z={col.z:.2f}")
    assert ok
