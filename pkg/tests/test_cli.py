from __future__ import annotations

import json

import pytest

from miranda.cli import EXIT_IO, EXIT_MALFORMED, EXIT_OK, EXIT_PARAMS, EXIT_REJECT, main


def run(*argv) -> int:
    return main([str(a) for a in argv])


@pytest.fixture
def keys(tmp_path):
    pk, sk = tmp_path / "k.pk", tmp_path / "k.sk"
    assert run("keygen", "--param-set", "toy-16", "--out-pk", pk, "--out-sk", sk,
               "--seed", 1, "--deterministic") == EXIT_OK
    return pk, sk


def test_keygen_deterministic(tmp_path, keys):
    pk, sk = keys
    pk2, sk2 = tmp_path / "b.pk", tmp_path / "b.sk"
    assert run("keygen", "--param-set", "toy-16", "--out-pk", pk2, "--out-sk", sk2, "--deterministic") == EXIT_OK
    pk3, sk3 = tmp_path / "c.pk", tmp_path / "c.sk"
    assert run("keygen", "--param-set", "toy-16", "--out-pk", pk3, "--out-sk", sk3,
               "--seed", 1, "--deterministic") == EXIT_OK
    assert pk.read_bytes() == pk3.read_bytes() and sk.read_bytes() == sk3.read_bytes()
    assert pk.read_bytes() != pk2.read_bytes()


def test_unknown_set_writes_nothing(tmp_path):
    pk, sk = tmp_path / "x.pk", tmp_path / "x.sk"
    assert run("keygen", "--param-set", "nope", "--out-pk", pk, "--out-sk", sk) == EXIT_PARAMS
    assert not pk.exists() and not sk.exists()


def test_sign_verify_exit_codes(tmp_path, keys):
    pk, sk = keys
    msg, bad, sig = tmp_path / "m", tmp_path / "m2", tmp_path / "m.sig"
    msg.write_bytes(b"hello\n")
    bad.write_bytes(b"hellp\n")
    assert run("sign", "--pk", pk, "--sk", sk, "--message", msg, "--out", sig, "--seed", 2) == EXIT_OK
    assert run("verify", "--pk", pk, "--message", msg, "--sig", sig) == EXIT_OK
    assert run("verify", "--pk", pk, "--message", bad, "--sig", sig) == EXIT_REJECT
    trunc = tmp_path / "t.sig"
    trunc.write_bytes(sig.read_bytes()[:-1])
    assert run("verify", "--pk", pk, "--message", msg, "--sig", trunc) == EXIT_MALFORMED
    assert run("verify", "--pk", pk, "--message", tmp_path / "missing", "--sig", sig) == EXIT_IO
    assert run("verify", "--pk", sk, "--message", msg, "--sig", sig) == EXIT_IO


def test_params_commands(tmp_path, capsys):
    assert run("params", "list") == EXIT_OK
    assert "toy-24" in capsys.readouterr().out
    assert run("params", "show", "toy-24", "--json") == EXIT_OK
    shown = json.loads(capsys.readouterr().out)
    assert shown["sig_bytes"] == 23
    csv = tmp_path / "t.csv"
    assert run("params", "check-tables", "--csv", csv) == EXIT_OK
    text = csv.read_text()
    assert "KNOWN-DEVIATION" in text and "FAIL" not in text
    assert run("params", "show") == EXIT_PARAMS
    assert run("params", "show", "x:m=8,kappa=6,t=1,l_a=8,l_s=0") == EXIT_OK


def test_param_file(tmp_path, capsys):
    f = tmp_path / "p.toml"
    f.write_text('[[param]]\nname = "mine"\nid = 900\nm = 8\nkappa = 6\nt = 1\nl_a = 8\nl_s = 0\n')
    assert run("params", "show", "mine", "--param-file", f) == EXIT_OK
    assert run("params", "show", "mine") == EXIT_PARAMS
    assert run("params", "list", "--param-file", tmp_path / "missing.toml") == EXIT_IO


def test_audit(tmp_path, capsys):
    rep = tmp_path / "r.json"
    assert run("audit", "--mode", "probfund", "--trials", 5000, "--seed", 1, "--report", rep) == EXIT_OK
    data = json.loads(rep.read_text())
    assert data["zero_count"] == 0 and data["buckets"] == 256
    assert run("audit", "--mode", "uniformity", "--param-set", "miranda-128a") == EXIT_PARAMS
    assert "refused" in capsys.readouterr().err


def test_attack(tmp_path, capsys):
    assert run("attack", "--mode", "lowrank", "--count", 2, "--seed", 1, "--json") == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["summary"]["found"] == 2 and out["summary"]["mean_loops"] == 1
    csv = tmp_path / "s.csv"
    assert run("attack", "--mode", "structural", "--param-set", "weak-12", "--count", 1, "--random", 1,
               "--budget", 2000, "--seed", 3, "--csv", csv, "--deterministic") == EXIT_OK
    lines = csv.read_text().splitlines()
    assert len(lines) == 3
    assert "recovered_keys: 1" in capsys.readouterr().out
    assert run("attack", "--mode", "distinguish", "--count", 1, "--seed", 4, "--json") == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert all(r["correct"] for r in out["rows"])
