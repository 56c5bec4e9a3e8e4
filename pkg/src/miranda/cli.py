"""Command-line interface: keygen, sign, verify, parameter reports, audits and attacks.

Exit codes: 0 success (or accept), 1 invalid parameters, 2 I/O error,
3 signature rejected, 4 malformed signature.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .analysis.counting import density_log2, expected_trials_log2, pk_size_bytes, sig_size_bytes, sk_size_bytes
from .analysis.registry import Registry, check_tables, load_registry, rows_to_csv
from .keys import InvalidParameters, ParameterSet, keygen
from .rng import make_rng

EXIT_OK = 0
EXIT_PARAMS = 1
EXIT_IO = 2
EXIT_REJECT = 3
EXIT_MALFORMED = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------- helpers

def _registry(args) -> Registry:
    try:
        return load_registry(args.param_file or None)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read parameter file: {exc}") from None
    except (InvalidParameters, ValueError) as exc:
        raise CliError(EXIT_PARAMS, str(exc)) from None


def _inline_params(text: str) -> ParameterSet:
    """'name:m=12,kappa=10,t=1,l_a=13,l_s=0' or without the name prefix."""
    name, _, body = text.rpartition(":")
    fields = {}
    for item in body.split(","):
        key, eq, val = item.partition("=")
        if not eq:
            raise InvalidParameters(f"bad inline parameter {item!r}")
        fields[key.strip()] = int(val)
    m = fields.pop("m")
    return ParameterSet(name=name or "inline", m=m, n=fields.pop("n", m), kappa=fields.pop("kappa"),
                        t=fields.pop("t"), l_a=fields.pop("l_a"), l_s=fields.pop("l_s", 0),
                        lam=fields.pop("lambda", 128))


def _params(args, registry: Registry | None = None, allow_inline: bool = False) -> ParameterSet:
    text = args.param_set
    try:
        if "=" in text:
            if not allow_inline:
                raise InvalidParameters("inline parameters cannot be serialized; use a registered name")
            return _inline_params(text).validate()
        return (registry or _registry(args)).get(text).validate()
    except (InvalidParameters, KeyError, ValueError) as exc:
        raise CliError(EXIT_PARAMS, f"invalid parameter set: {exc}") from None


def _seed(args):
    if args.seed is None and args.deterministic:
        return 0
    return args.seed


def _rng(args, label: str = ""):
    seed = _seed(args)
    if seed is None:
        return make_rng(None)
    return make_rng(f"{seed}/{label}" if label else str(seed))


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from None


def _write(path: str, data: bytes | str) -> None:
    try:
        p = Path(path)
        if isinstance(data, str):
            p.write_text(data)
        else:
            p.write_bytes(data)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from None


def _emit(args, report: dict, human: list[str]) -> None:
    if not args.deterministic:
        report = dict(report, timestamp=time.strftime("%Y-%m-%dT%H:%M:%S"))
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    if args.report:
        _write(args.report, text + "\n")
    if args.json:
        print(text)
    else:
        for line in human:
            print(line)


def _table(rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]


# ---------------------------------------------------------------- keygen / sign / verify

def cmd_keygen(args) -> int:
    from .wire import encode_public_key, encode_secret_key

    registry = _registry(args)
    params = _params(args, registry)
    seed = _seed(args)
    t0 = time.perf_counter()
    kp = keygen(params, seed=str(seed) if seed is not None else None)
    pk = encode_public_key(kp.pk, registry)
    sk = encode_secret_key(kp.sk, params, registry)
    _write(args.out_pk, pk)
    _write(args.out_sk, sk)
    report = {"params": params.to_dict(), "public_dim": params.code_dim, "dual_dim": params.syn_len,
              "pk_bytes": len(pk), "sk_bytes": len(sk), "density_log2": density_log2(params),
              "expected_trials_log2": expected_trials_log2(params)}
    if not args.deterministic:
        report["seconds"] = round(time.perf_counter() - t0, 3)
    _emit(args, report, [
        f"parameter set     {params.name} (m={params.m}, n={params.n}, kappa={params.kappa}, "
        f"t={params.t}, l_a={params.l_a}, l_s={params.l_s})",
        f"public code dim   {params.code_dim}",
        f"dual basis size   {params.syn_len}",
        f"pk file           {args.out_pk} ({len(pk)} bytes)",
        f"sk file           {args.out_sk} ({len(sk)} bytes)",
        f"density (log2)    {density_log2(params):.2f}",
        f"expected trials   2^{expected_trials_log2(params):.2f}",
    ])
    return EXIT_OK


def _load_keys(args, registry: Registry, need_sk: bool):
    from .wire import WireError, decode_public_key, decode_secret_key

    try:
        pk = decode_public_key(_read(args.pk), registry)
        sk = None
        if need_sk:
            params, sk = decode_secret_key(_read(args.sk), registry)
            if params != pk.params:
                raise CliError(EXIT_PARAMS, "public and secret key use different parameter sets")
    except WireError as exc:
        raise CliError(EXIT_IO, f"invalid key file: {exc}") from None
    return pk, sk


def cmd_sign(args) -> int:
    from .fdh import PreimageSampler, SigningError, sign
    from .wire import encode_signature

    registry = _registry(args)
    pk, sk = _load_keys(args, registry, need_sk=True)
    msg = _read(args.message)
    rng = _rng(args, "sign")
    try:
        raw = sign(msg, sk, pk, rng=rng, sampler=PreimageSampler(pk, sk), workers=args.threads)
    except SigningError as exc:
        raise CliError(EXIT_PARAMS, str(exc)) from None
    data = encode_signature(raw.E, raw.salt, pk.params, rng)
    _write(args.out, data)
    _emit(args, {"signature_bytes": len(data), "trials": raw.trials, "params": pk.params.name},
          [f"signature         {args.out} ({len(data)} bytes, {raw.trials} sampler trials)"])
    return EXIT_OK


def cmd_verify(args) -> int:
    from .fdh import Verdict, verify
    from .wire import WireError, decode_signature

    registry = _registry(args)
    pk, _ = _load_keys(args, registry, need_sk=False)
    msg = _read(args.message)
    data = _read(args.sig)
    try:
        sig = decode_signature(data, pk.params)
        verdict = verify(msg, sig, pk)
    except (WireError, ValueError, IndexError) as exc:
        verdict = Verdict.MALFORMED
        reason = f"malformed: {exc}"
    else:
        reason = verdict.value
    _emit(args, {"verdict": verdict.name, "reason": reason}, [reason])
    if verdict is Verdict.ACCEPT:
        return EXIT_OK
    return EXIT_MALFORMED if verdict is Verdict.MALFORMED else EXIT_REJECT


# ---------------------------------------------------------------- params

def cmd_params(args) -> int:
    registry = _registry(args)
    if args.action == "list":
        rows = [["name", "id", "table", "m", "kappa", "t", "l_a", "l_s", "lambda"]]
        for e in registry:
            p = e.params
            rows.append([p.name, str(e.id), e.table, str(p.m), str(p.kappa), str(p.t), str(p.l_a),
                         str(p.l_s), str(p.lam)])
        _emit(args, {"params": [r[0] for r in rows[1:]]}, _table(rows))
        return EXIT_OK
    if args.action == "show":
        if not args.name:
            raise CliError(EXIT_PARAMS, "params show needs a parameter set name")
        args.param_set = args.name
        p = _params(args, registry, allow_inline=True)
        info = dict(p.to_dict(), code_dim=p.code_dim, syn_len=p.syn_len, ext_len=p.ext_len,
                    idx_bits=p.idx_bits, sig_bytes=sig_size_bytes(p), pk_bytes=pk_size_bytes(p),
                    sk_bytes=sk_size_bytes(p), density_log2=density_log2(p),
                    density_table_log2=density_log2(p, mode="table"))
        _emit(args, info, [f"{k:<20}{v}" for k, v in info.items()])
        return EXIT_OK
    rows = check_tables(registry)
    if args.csv:
        _write(args.csv, rows_to_csv(rows))
    human = _table([["name", "m", "status", "dens", "printed", "sigma", "printed", "pk bytes", "printed"]] + [
        [r["name"], str(r["m"]), r["status"], f"{r['dens']:.2f}", str(r["printed_dens"]), str(r["sigma"]),
         str(r["printed_sigma"]), str(r["pk"]), str(r["printed_pk"])] for r in rows])
    _emit(args, {"rows": rows}, human)
    return EXIT_OK if all(r["status"] != "FAIL" for r in rows) else EXIT_PARAMS


# ---------------------------------------------------------------- audit

def cmd_audit(args) -> int:
    from .analysis import stats

    rng = _rng(args, f"audit/{args.mode}")
    try:
        if args.mode == "probfund":
            report = stats.probfund_audit(args.trials or 10 ** 5, rng, m=args.m, kappa=args.kappa)
        else:
            params = _params(args, allow_inline=True)
            if args.mode == "uniformity":
                report = stats.uniformity_audit(params, rng, syndromes=args.syndromes,
                                                samples=args.trials, alpha=args.alpha)
            elif args.mode == "collision":
                report = stats.collision_audit(params, args.trials or 200_000, rng, keys=args.keys)
            else:
                if params.m * params.n > 1024:
                    raise stats.GuardExceeded(f"{params.name}: trials audit is limited to mn <= 1024")
                report = stats.trials_audit(params, args.trials or 100, rng, workers=args.threads)
    except stats.GuardExceeded as exc:
        raise CliError(EXIT_PARAMS, f"refused: {exc}") from None
    human = [f"{k:<18}{v}" for k, v in report.items() if not isinstance(v, list)]
    for row in report.get("syndromes", []):
        human.append(f"  syndrome {row['syndrome']:>6}: {row['preimages']} preimages, "
                     f"{row['samples']} samples, p = {row['pvalue']:.4g} {'PASS' if row['pass'] else 'FAIL'}")
    human.append("PASS" if report["pass"] else "FAIL")
    _emit(args, report, human)
    return EXIT_OK


# ---------------------------------------------------------------- attack

def _attack_rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    keys = sorted({k for r in rows for k in r})
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _parallel(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def cmd_attack(args) -> int:
    from . import cryptanalysis as ca
    from .matrank import random_code

    params = _params(args, allow_inline=True)
    base = _seed(args)
    base = "os" if base is None else base

    def seeded(label: str):
        return make_rng(f"{base}/attack/{args.mode}/{label}") if _seed(args) is not None else make_rng(None)

    rows: list[dict] = []
    if args.mode == "lowrank":
        def one(i):
            rng = seeded(f"key{i}")
            code = keygen(params, rng=rng).pk.dual_code()
            a, _ = ca.decompose(code.dim, code.m)
            s = args.s if args.s is not None else code.n - a
            t0 = time.perf_counter()
            res = ca.find_low_rank(code, s, args.budget or 10 ** 4, rng)
            return {"trial": i, "s": s, "found": res.found, "loops": res.loops,
                    "rank": res.word.rank() if res.found else None, "seconds": time.perf_counter() - t0}
        rows = _parallel(one, range(args.count), args.threads)
        summary = {"found": sum(r["found"] for r in rows), "mean_loops": sum(r["loops"] for r in rows) / len(rows)}
    elif args.mode == "distinguish":
        def one(item):
            i, structured = item
            rng = seeded(f"{'key' if structured else 'rand'}{i}")
            code = keygen(params, rng=rng).pk.dual_code()
            if not structured:
                code = random_code(code.m, code.n, code.dim, rng)
            t0 = time.perf_counter()
            label, res = ca.distinguish(code, params, args.budget, rng, factor=args.factor)
            truth = ca.STRUCTURED if structured else ca.RANDOM_LIKE
            return {"trial": i, "truth": truth, "label": label, "correct": label == truth,
                    "loops": res.loops, "seconds": time.perf_counter() - t0}
        items = [(i, True) for i in range(args.count)] + [(i, False) for i in range(args.count)]
        rows = _parallel(one, items, args.threads)
        summary = {"correct": sum(r["correct"] for r in rows), "total": len(rows)}
    else:
        def one(item):
            i, structured = item
            rng = seeded(f"{'key' if structured else 'rand'}{i}")
            code = keygen(params, rng=rng).pk.dual_code()
            if not structured:
                code = random_code(code.m, code.n, code.dim, rng)
            res = ca.structural_attack(code, params, args.budget or 10 ** 4, rng)
            return {"trial": i, "input": "key" if structured else "random", "success": res.success,
                    "algebra_dim": res.algebra_dimension, "iterations": res.iterations,
                    "loops": res.loops, "pairs": res.pairs, "seconds": res.seconds}
        items = [(i, True) for i in range(args.count)] + [(i, False) for i in range(args.random)]
        rows = _parallel(one, items, args.threads)
        summary = {"recovered_keys": sum(r["success"] for r in rows if r["input"] == "key"),
                   "keys": args.count,
                   "spurious_random": sum(r["success"] for r in rows if r["input"] == "random"),
                   "random": args.random}
    if args.deterministic:
        for r in rows:
            r.pop("seconds", None)
    if args.csv:
        _write(args.csv, _attack_rows_csv(rows))
    report = {"mode": args.mode, "params": params.name, "summary": summary, "rows": rows}
    human = _table([[str(k) for k in rows[0]]] + [[_fmt(v) for v in r.values()] for r in rows]) if rows else []
    human += [f"{k}: {v}" for k, v in summary.items()]
    _emit(args, report, human)
    return EXIT_OK


def _fmt(v) -> str:
    return f"{v:.3f}" if isinstance(v, float) else str(v)


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", help="seed for all randomness (default: OS entropy)")
    common.add_argument("--deterministic", action="store_true",
                        help="suppress timestamps and timings; seed defaults to 0")
    common.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    common.add_argument("--param-file", action="append", default=[],
                        help="extra parameter registry file (repeatable; also $MIRANDA_PARAM_PATH)")
    common.add_argument("--json", action="store_true", help="print the JSON report instead of text")
    common.add_argument("--report", help="also write the JSON report to this file")

    p = argparse.ArgumentParser(prog="miranda", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    k = sub.add_parser("keygen", parents=[common], help="generate a key pair")
    k.add_argument("--param-set", required=True)
    k.add_argument("--out-pk", required=True)
    k.add_argument("--out-sk", required=True)
    k.set_defaults(func=cmd_keygen)

    s = sub.add_parser("sign", parents=[common], help="sign a message file")
    s.add_argument("--pk", required=True)
    s.add_argument("--sk", required=True)
    s.add_argument("--message", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sign)

    v = sub.add_parser("verify", parents=[common], help="verify a signature (exit 0 accept, 3 reject, 4 malformed)")
    v.add_argument("--pk", required=True)
    v.add_argument("--message", required=True)
    v.add_argument("--sig", required=True)
    v.set_defaults(func=cmd_verify)

    pr = sub.add_parser("params", parents=[common], help="list, show or regress parameter sets")
    pr.add_argument("action", choices=["list", "show", "check-tables"])
    pr.add_argument("name", nargs="?")
    pr.add_argument("--csv", help="write the check-tables report as CSV")
    pr.set_defaults(func=cmd_params)

    a = sub.add_parser("audit", parents=[common], help="statistical audits at desk scale")
    a.add_argument("--mode", required=True, choices=["uniformity", "collision", "probfund", "trials"])
    a.add_argument("--param-set", default="micro-8")
    a.add_argument("--trials", type=int, help="samples / pairs / signatures (mode dependent)")
    a.add_argument("--syndromes", type=int, default=5)
    a.add_argument("--alpha", type=float, default=1e-3)
    a.add_argument("--keys", type=int, default=100, help="fresh keys for the collision audit")
    a.add_argument("--m", type=int, default=4, help="probfund: extension degree (n = m)")
    a.add_argument("--kappa", type=int, default=2, help="probfund: Gabidulin dimension")
    a.set_defaults(func=cmd_audit)

    t = sub.add_parser("attack", parents=[common], help="cryptanalysis experiments at toy scale")
    t.add_argument("--mode", required=True, choices=["lowrank", "distinguish", "structural"])
    t.add_argument("--param-set", default="toy-16")
    t.add_argument("--count", type=int, default=1, help="number of keys")
    t.add_argument("--random", type=int, default=0, help="structural: number of random codes")
    t.add_argument("--budget", type=int, help="loop / iteration budget")
    t.add_argument("--factor", type=float, default=10.0, help="distinguish: budget multiple of the expectation")
    t.add_argument("-s", type=int, help="lowrank: target rank (default n - a)")
    t.add_argument("--csv", help="write per-trial rows as CSV")
    t.set_defaults(func=cmd_attack)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
