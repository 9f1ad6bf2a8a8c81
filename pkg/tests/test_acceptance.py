"""Acceptance criteria, one pass/fail line each.

Tolerances are exact for every value.  Time budgets are checked against
wall clock.  Criterion 4 and the n=7 case need KLQ_EXTENDED=1 (long runs).
"""

import json
import os
import random
import subprocess
import sys
import time

import pytest

from klq import cli
from klq.affine_an import guess_weight, resolve_case, run_case
from klq.coxeter import build_system, coset_graph, type_a
from klq.engine import EngineOptions, compute_target
from klq.oracle import build_table, compare, coset_reps
from klq.selftest import SMALL_SYSTEMS, all_parabolics, check_target

from conftest import ACCEPTANCE_LINES

EXTENDED = os.environ.get("KLQ_EXTENDED") == "1"

# P^J_{e,y} for n=8, weight (6,7,7,7,7,7,7,6), coefficients of q^0 .. q^41
N8_P_E = [
    1, 26, 294, 2107, 11300, 49052, 180463, 580355, 1667234, 4347162, 10411073,
    23109923, 47878089, 93076435, 170488857, 295159975, 484075798, 753257475,
    1113178197, 1563002756, 2084968629, 2640964839, 3173587791, 3613245907,
    3891194815, 3955903667, 3787877798, 3407386353, 2871480057, 2260164853,
    1656221777, 1125993513, 707571983, 409222372, 216672871, 104312889,
    45208788, 17370114, 5782048, 1600603, 329119, 36672,
]


def report(name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_c1_oracle_equivalence():
    start = time.perf_counter()
    total = 0
    bad = []
    for name, cartan in SMALL_SYSTEMS.items():
        for S in all_parabolics(cartan):
            levels = coset_reps(S, 64)
            table = build_table(S, len(levels) - 1)
            for level in levels:
                for y in level:
                    total += 1
                    r = compare(S, y, table)
                    if not r.equal:
                        bad.append(f"{name} {r.y_word}: {r.first_divergence}")
    elapsed = time.perf_counter() - start
    report("C1 oracle equivalence", not bad and elapsed < 120,
           f"{total} targets over all J, {len(bad)} mismatches, {elapsed:.1f}s (limit 120s)")


def test_c2_classical_value_as_stated():
    # stated: P_{s1 s3, s2 s1 s3 s2} = 1 + q in S_4
    S = type_a(3)
    start = time.perf_counter()
    r = compute_target(S, S.indices([2, 1, 3, 2]))
    elapsed = time.perf_counter() - start
    got = r.P(S.indices([1, 3]))
    report("C2 P_{s1s3, s2s1s3s2} = 1 + q", got == [1, 1] and elapsed < 1,
           f"engine gives {got} in {elapsed:.3f}s (limit 1s)")


def test_c2_classical_values_match_oracle():
    # the same target checked entry by entry against the recursion; the
    # singular locus of 3412 is {x <= s2}, so P_{s2,y} = P_{e,y} = 1 + q
    S = type_a(3)
    start = time.perf_counter()
    y_word = S.indices([2, 1, 3, 2])
    r = compute_target(S, y_word)
    elapsed = time.perf_counter() - start
    y = r.y
    same = compare(S, y, build_table(S, 4)).equal
    ok = (same and r.P(S.indices([2])) == [1, 1] and r.P(()) == [1, 1]
          and r.P(S.indices([1, 3])) == [1] and elapsed < 1)
    report("C2 S4 target s2s1s3s2 against the oracle", ok,
           f"oracle equal={same}, P_(2)={r.P(S.indices([2]))}, P_(1,3)={r.P(S.indices([1, 3]))}, "
           f"{elapsed:.3f}s")


@pytest.mark.parametrize("n,p,weight,mu", [
    (4, 5, (2, 3, 3, 2), 2),
    (5, 6, (3, 4, 4, 4, 3), 3),
    (3, 4, (2, 1, 2), 1),
    (3, 4, (1, 2, 1), 1),
], ids=["n4", "n5", "n3-listed", "n3-formula"])
def test_c3_affine_values(n, p, weight, mu):
    start = time.perf_counter()
    try:
        rep = run_case(n, p, weight)
        got = rep.mu
        detail = f"length {rep.case.y.length}, mu = {got}"
    except Exception as exc:
        got = None
        detail = f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    report(f"C3 n={n} p={p} weight {weight} -> mu = {mu}", got == mu and elapsed < 600,
           f"{detail}, {elapsed:.1f}s (limit 600s)")


@pytest.mark.skipif(not EXTENDED, reason="set KLQ_EXTENDED=1; long run")
@pytest.mark.extended
def test_c3_n7():
    rep = run_case(7, 8, (5, 6, 6, 6, 6, 6, 5))
    report("C3 n=7 p=8 weight (5,6,6,6,6,6,5) -> mu = 469", rep.mu == 469, f"mu = {rep.mu}")


@pytest.mark.skipif(not EXTENDED, reason="set KLQ_EXTENDED=1; days of CPU time")
@pytest.mark.extended
def test_c4_n8():
    assert guess_weight(8) == (6, 7, 7, 7, 7, 7, 7, 6)
    workers = int(os.environ.get("KLQ_WORKERS", "1"))
    rep = run_case(8, 9, guess_weight(8), EngineOptions(workers=workers))
    report("C4 n=8 p=9 weight (6,7,7,7,7,7,7,6)", rep.mu == 36672 and rep.P_e == N8_P_E,
           f"mu = {rep.mu}, P_e matches display: {rep.P_e == N8_P_E}")


def test_c5_invariant_suite():
    start = time.perf_counter()
    total = 0
    problems = []
    for name, cartan in SMALL_SYSTEMS.items():
        for S in all_parabolics(cartan):
            graph = coset_graph(S)
            for level in coset_reps(S, 64):
                for y in level:
                    total += 1
                    # raises on parity, top coefficient, g symmetry, negativity, degree bound
                    problems += [f"{name}: {m}" for m in check_target(S, graph.canonical_word(y))]
    elapsed = time.perf_counter() - start
    report("C5 invariant suite", not problems and elapsed < 60,
           f"{total} runs, {len(problems)} failures, {elapsed:.1f}s (limit 60s)")


def _cli_bytes(tmp_path, argv, name):
    out = tmp_path / name
    assert cli.main(list(argv) + ["--output", str(out)]) == cli.EXIT_OK
    return out.read_bytes()


def test_c6_kill_resume_and_threads(tmp_path, monkeypatch):
    argv = "compute --type affine-A --n 4 --J 1..4 --weight 2,3,3,2 --p 5".split()
    want = _cli_bytes(tmp_path, argv, "straight.json")
    waves = json.loads(want)["stats"]["waves"]
    kill_at = random.Random().randint(1, waves - 1)

    real = cli._options

    def killing(spec, job):
        opts = real(spec, job)

        def stop(state):
            if state.waves == kill_at:
                os.kill(os.getpid(), 15)  # SIGTERM becomes a stop request
        opts.on_wave = stop
        return opts

    ck = tmp_path / "ck.json"
    out = tmp_path / "resumed.json"
    monkeypatch.setattr(cli, "_options", killing)
    code = cli.main(argv + ["--checkpoint", str(ck), "--output", str(out)])
    monkeypatch.setattr(cli, "_options", real)
    resumed_ok = code == cli.EXIT_INTERRUPTED and cli.main(["resume", "--checkpoint", str(ck)]) == 0
    same_resume = resumed_ok and out.read_bytes() == want

    one = _cli_bytes(tmp_path, argv + ["--threads", "1"], "t1.json")
    eight = _cli_bytes(tmp_path, argv + ["--threads", "8"], "t8.json")
    report("C6 determinism and checkpointing", same_resume and one == eight == want,
           f"killed at wave {kill_at}/{waves}, resumed identical={same_resume}, "
           f"1 vs 8 workers identical={one == eight}")


def test_c7_memory_contract():
    # fresh interpreter so nothing else has imported the oracle
    code = """
import json, sys
from klq.affine_an import run_case
from klq.engine import EngineOptions
rep = run_case(5, 6, (3, 4, 4, 4, 3), EngineOptions(audit_memory=True))
print(json.dumps({"audit": rep.result.stats["memory_audit"], "mu": rep.mu,
                  "oracle_loaded": "klq.oracle" in sys.modules}))
"""
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    doc = json.loads(proc.stdout.strip().splitlines()[-1])
    audit = doc["audit"]
    ok = audit["violations"] == 0 and not doc["oracle_loaded"] and doc["mu"] == 3
    report("C7 memory contract", ok,
           f"max live vectors {audit['max_live']}, violations {audit['violations']}, "
           f"basis table module loaded={doc['oracle_loaded']}")
