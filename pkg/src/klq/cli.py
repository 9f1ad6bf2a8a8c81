"""Command-line front end.

Exit codes: 0 ok, 2 usage, 3 invalid input, 4 corrupt checkpoint,
5 internal invariant violation, 130 interrupted (checkpoint written).
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import Sequence

from . import __version__
from .affine_an import AffineError, is_p_restricted, resolve_case
from .coxeter import CoxeterError, CoxeterSystem, system_from_json
from .engine import (
    CheckpointError, EngineOptions, Interrupted, InternalInvariantViolation, KLResult,
    checkpoint_resume, extract_result, initial_state, run_waves,
)
from .laurent import NegativeExponent, OddExponent

log = logging.getLogger("klq")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_CHECKPOINT = 4
EXIT_INTERNAL = 5
EXIT_INTERRUPTED = 130

DEFAULT_CHECKPOINT_INTERVAL = 600.0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class JobSpec:
    command: str
    system: dict | None = None
    word: tuple[int, ...] | None = None
    weight: tuple[int, ...] | None = None
    p: int | None = None
    output: str | None = None
    mu_only: bool = False
    checkpoint: str | None = None
    checkpoint_interval: float = DEFAULT_CHECKPOINT_INTERVAL
    threads: int = 1
    cache: int = 0
    allow_unrestricted: bool = False
    all_J: bool = False
    max_length: int | None = None
    verbose: int = 0


def _int_list(text: str, flag: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return tuple(range(int(lo), int(hi) + 1))
        return tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated integers or a range a..b, got {text!r}") from None


def _build_parser() -> _Parser:
    parser = _Parser(prog="klq", description="Targeted parabolic Kazhdan-Lusztig basis elements.")
    parser.add_argument("--version", action="version", version=f"klq {__version__}")
    sub = parser.add_subparsers(dest="command")

    def system_flags(p):
        p.add_argument("--type", choices=["A", "affine-A"], help="named system type")
        p.add_argument("--n", type=int, help="rank parameter for --type")
        p.add_argument("--cartan", help="JSON system file")
        p.add_argument("--J", help="parabolic subset, e.g. 1..4 or 1,3 (generator labels)")

    def run_flags(p):
        p.add_argument("--output", "-o", help="result JSON path (default: stdout)")
        p.add_argument("--threads", type=int, default=1, help="worker processes per wave")
        p.add_argument("--cache", type=int, default=0, help="bounded D' cache size (default off)")
        p.add_argument("--checkpoint", help="checkpoint file")
        p.add_argument("--checkpoint-interval", type=float, help="seconds between checkpoints")
        p.add_argument("-v", "--verbose", action="count", default=0)

    c = sub.add_parser("compute", help="compute one basis element")
    system_flags(c)
    c.add_argument("--word", help="reduced word of y (generator labels)")
    c.add_argument("--weight", help="dominant weight w0 y.(-2rho), affine-A only")
    c.add_argument("--p", type=int, help="prime-like parameter p >= n+1 (default n+1)")
    c.add_argument("--mu-only", action="store_true", help="omit the P polynomials from the output")
    c.add_argument("--allow-unrestricted", action="store_true")
    run_flags(c)

    r = sub.add_parser("resume", help="continue a checkpointed job")
    r.add_argument("--checkpoint", required=True)
    r.add_argument("--output", "-o")
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--cache", type=int, default=0)
    r.add_argument("--checkpoint-interval", type=float)
    r.add_argument("-v", "--verbose", action="count", default=0)

    o = sub.add_parser("oracle-check", help="compare the engine with the recursion oracle")
    system_flags(o)
    o.add_argument("--all-J", action="store_true", help="check every parabolic subset")
    o.add_argument("--max-length", type=int, help="length bound (required for infinite groups)")
    o.add_argument("-v", "--verbose", action="count", default=0)

    s = sub.add_parser("selftest", help="run the invariant suite on small systems")
    s.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def _system_spec(args) -> dict:
    if args.cartan and args.type:
        raise UsageError("--cartan and --type are mutually exclusive")
    if args.cartan:
        try:
            with open(args.cartan) as fh:
                data = json.load(fh)
        except (OSError, ValueError) as exc:
            raise CoxeterError(f"--cartan: cannot read {args.cartan}: {exc}") from None
        if not isinstance(data, dict):
            raise CoxeterError("--cartan: system file must hold a JSON object")
        if args.J is not None:
            data["J"] = list(_int_list(args.J, "--J"))
        return data
    if not args.type:
        raise UsageError("one of --type or --cartan is required")
    if args.n is None or args.n < 1:
        raise UsageError("--n: a positive integer is required with --type")
    if args.J is not None:
        J = list(_int_list(args.J, "--J"))
    else:
        J = list(range(1, args.n + 1)) if args.type == "affine-A" else []
    return {"type": args.type, "n": args.n, "J": J}


def parse_args(argv: Sequence[str]) -> JobSpec:
    args = _build_parser().parse_args(list(argv))
    if args.command is None:
        raise UsageError("a subcommand is required: compute, resume, oracle-check, selftest")
    spec = JobSpec(args.command, verbose=getattr(args, "verbose", 0))
    if args.command in ("compute", "resume"):
        if args.threads < 1:
            raise UsageError("--threads: must be at least 1")
        if args.cache < 0:
            raise UsageError("--cache: must be non-negative")
        spec.threads = args.threads
        spec.cache = args.cache
        spec.output = args.output
        spec.checkpoint = args.checkpoint
        interval = args.checkpoint_interval
        if interval is None:
            env = os.environ.get("KLQ_CHECKPOINT_INTERVAL")
            try:
                interval = float(env) if env else DEFAULT_CHECKPOINT_INTERVAL
            except ValueError:
                raise UsageError(f"KLQ_CHECKPOINT_INTERVAL: not a number: {env!r}") from None
        if interval < 0:
            raise UsageError("--checkpoint-interval: must be non-negative")
        spec.checkpoint_interval = interval
    if args.command == "compute":
        if (args.word is None) == (args.weight is None):
            raise UsageError("--word and --weight: exactly one target is required")
        spec.system = _system_spec(args)
        spec.mu_only = args.mu_only
        spec.allow_unrestricted = args.allow_unrestricted
        if args.word is not None:
            if args.p is not None:
                raise UsageError("--p: only meaningful with --weight")
            spec.word = _int_list(args.word, "--word")
        else:
            if spec.system.get("type") != "affine-A":
                raise UsageError("--weight: requires --type affine-A")
            spec.weight = _int_list(args.weight, "--weight")
            spec.p = args.p
    elif args.command == "oracle-check":
        spec.system = _system_spec(args)
        spec.all_J = args.all_J
        spec.max_length = args.max_length
    return spec


def format_result(doc: dict) -> str:
    """JSON with one list item per line; deterministic for equal inputs."""
    lines = []
    for key, value in doc.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            body = ",\n  ".join(json.dumps(item) for item in value)
            lines.append(f"{json.dumps(key)}: [\n  {body}\n ]")
        else:
            lines.append(f"{json.dumps(key)}: {json.dumps(value)}")
    return "{\n " + ",\n ".join(lines) + "\n}\n"


def _write_result(result: KLResult, spec: JobSpec, extra: dict) -> None:
    text = format_result(result.to_json(spec.mu_only, extra))
    if spec.output:
        tmp = spec.output + ".tmp"
        with open(tmp, "w") as fh:
            fh.write(text)
        os.replace(tmp, spec.output)
    else:
        sys.stdout.write(text)


def _options(spec: JobSpec, job: dict) -> EngineOptions:
    return EngineOptions(workers=spec.threads, cache_size=spec.cache,
                         checkpoint_path=spec.checkpoint,
                         checkpoint_interval=spec.checkpoint_interval, job=job)


def _run_compute(spec: JobSpec) -> int:
    sys_ = system_from_json(spec.system)
    extra: dict = {}
    if spec.weight is not None:
        n = spec.system["n"]
        if sorted(sys_.J) != list(range(1, n + 1)):
            raise CoxeterError("--weight: requires J = 1..n")
        case = resolve_case(n, spec.p, spec.weight)
        if not is_p_restricted(case.target_weight, case.p) and not spec.allow_unrestricted:
            raise AffineError(f"--weight: {case.target_weight} is not {case.p}-restricted "
                              "(pass --allow-unrestricted)")
        word = case.y_word
        extra["affine"] = {"n": n, "p": case.p, "weight": list(case.target_weight)}
    else:
        word = sys_.indices(spec.word)
    job = {"system": spec.system, "extra": extra, "mu_only": spec.mu_only, "output": spec.output}
    state = initial_state(sys_, word)
    run_waves(state, _options(spec, job))
    result = extract_result(state)
    _finish(result, spec, extra)
    return EXIT_OK


def _finish(result: KLResult, spec: JobSpec, extra: dict) -> None:
    if "affine" in extra:
        extra["affine"]["mu_e"] = str(result.mu.get((), 0))
        log.info("mu(w0, w0 y) = %s", extra["affine"]["mu_e"])
    _write_result(result, spec, extra)


def _run_resume(spec: JobSpec) -> int:
    state, job = checkpoint_resume(spec.checkpoint)
    spec.mu_only = bool(job.get("mu_only"))
    if spec.output is None:
        spec.output = job.get("output")
    extra = job.get("extra", {})
    job = dict(job, output=spec.output)
    run_waves(state, _options(spec, job))
    _finish(extract_result(state), spec, extra)
    return EXIT_OK


def _oracle_systems(spec: JobSpec) -> list[CoxeterSystem]:
    base = system_from_json(spec.system)
    if not spec.all_J:
        return [base]
    out = []
    for k in range(base.rank + 1):
        for J in itertools.combinations(base.labels, k):
            out.append(system_from_json(dict(base.to_json(), J=list(J))))
    return out


def _run_oracle_check(spec: JobSpec) -> int:
    from .oracle import build_table, coset_reps, compare
    total = 0
    for sys_ in _oracle_systems(spec):
        bound = spec.max_length
        if bound is None:
            levels = coset_reps(sys_, 64)
            if len(levels) > 64:
                raise UsageError("--max-length: required for this (infinite or large) group")
            bound = len(levels) - 1
        levels = coset_reps(sys_, bound)
        table = build_table(sys_, bound)
        for level in levels:
            for y in level:
                report = compare(sys_, y, table)
                total += 1
                if not report.equal:
                    print(f"MISMATCH J={sorted(sys_.labels[j] for j in sys_.J)} "
                          f"y={sys_.word_labels(report.y_word)}: {report.first_divergence}")
                    return EXIT_INTERNAL
    print(f"all {total} targets match")
    return EXIT_OK


def _run_selftest(spec: JobSpec) -> int:
    from .selftest import run_selftest
    failures = run_selftest(print)
    return EXIT_INTERNAL if failures else EXIT_OK


def run(spec: JobSpec) -> int:
    handler = {
        "compute": _run_compute, "resume": _run_resume,
        "oracle-check": _run_oracle_check, "selftest": _run_selftest,
    }[spec.command]
    return handler(spec)


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        spec = parse_args(argv)
        logging.basicConfig(level=logging.WARNING - 10 * min(spec.verbose, 2),
                            format="%(asctime)s %(name)s %(levelname)s %(message)s")
        return run(spec)
    except UsageError as exc:
        print(f"klq: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CheckpointError as exc:
        print(f"klq: checkpoint error: {exc}", file=sys.stderr)
        return EXIT_CHECKPOINT
    except Interrupted as exc:
        print(f"klq: interrupted: {exc}", file=sys.stderr)
        return EXIT_INTERRUPTED
    except (InternalInvariantViolation, OddExponent, NegativeExponent) as exc:
        print(f"klq: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except CoxeterError as exc:
        print(f"klq: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
