"""Targeted computation of one parabolic canonical basis element ``^J C'_y``.

The working vector ``fat`` starts as ``D'`` of a reduced word of ``y``.
Each wave takes every ``x < y`` of maximal length whose coefficient still
has a term of non-negative degree in ``t``, and subtracts
``g_x * D'_x`` with ``g_x = f_{>=0}(t) + f_{>0}(t^-1)``.  When no such
``x`` remains, ``fat`` is the canonical basis element.  No other basis
element is ever formed.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import logging
import os
import signal
import tempfile
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .coxeter import (
    CoxeterSystem, GroupElement, NotCosetRep, coset_graph, is_min_coset_rep,
    system_from_json, word_to_element,
)
from .heckemod import ModuleVector, census, d_prime, scaled_d_prime_sum
from .laurent import LaurentPoly, make_g, mu_coefficient, to_q_polynomial

__all__ = [
    "EngineError", "InternalInvariantViolation", "InternalParityViolation",
    "CheckpointError", "CorruptCheckpoint", "FingerprintMismatch", "VersionMismatch",
    "Interrupted", "EngineOptions", "EngineState", "KLResult",
    "initial_state", "find_offenders", "run_waves", "extract_result",
    "compute_target", "checkpoint_save", "checkpoint_resume", "resume",
]

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "klq-checkpoint"
CHECKPOINT_VERSION = 1


class EngineError(RuntimeError):
    pass


class InternalInvariantViolation(EngineError):
    pass


class InternalParityViolation(InternalInvariantViolation):
    pass


class CheckpointError(EngineError):
    pass


class CorruptCheckpoint(CheckpointError):
    pass


class FingerprintMismatch(CheckpointError):
    pass


class VersionMismatch(CheckpointError):
    pass


class Interrupted(EngineError):
    """Raised after a stop request; a checkpoint was written if configured."""


@dataclass
class EngineOptions:
    workers: int = 1
    cache_size: int = 0
    checkpoint_path: str | os.PathLike | None = None
    checkpoint_interval: float = 600.0
    check_invariants: bool = True
    audit_memory: bool = False
    log_interval: float = 60.0
    on_wave: Callable[["EngineState"], None] | None = None
    job: dict | None = None


@dataclass
class EngineState:
    sys: CoxeterSystem
    target_word: tuple[int, ...]
    y: GroupElement
    fat: ModuleVector
    wave_floor: int
    in_wave: bool = False
    waves: int = 0
    corrections: int = 0
    peak_support: int = 0
    stop_requested: bool = field(default=False, compare=False)
    memory_audit: dict | None = field(default=None, compare=False)

    @property
    def fingerprint(self) -> str:
        return job_fingerprint(self.sys, self.target_word)

    def same_as(self, other: "EngineState") -> bool:
        return (self.fingerprint == other.fingerprint and self.fat == other.fat
                and self.counters() == other.counters())

    def counters(self) -> dict:
        return {
            "wave_floor": self.wave_floor, "in_wave": self.in_wave, "waves": self.waves,
            "corrections": self.corrections, "peak_support": self.peak_support,
        }


@dataclass
class KLResult:
    sys: CoxeterSystem
    y: GroupElement
    y_word: tuple[int, ...]
    entries: dict[tuple[int, ...], tuple[GroupElement, list[int]]]
    mu: dict[tuple[int, ...], int]
    stats: dict = field(default_factory=dict)

    def P(self, x_word: Sequence[int]) -> list[int]:
        """q-coefficients of P^J_{x,y}; ``[]`` if x is outside the support."""
        hit = self.entries.get(tuple(x_word))
        return list(hit[1]) if hit else []

    def same_polynomials(self, other: "KLResult") -> bool:
        mine = {k: v[1] for k, v in self.entries.items()}
        theirs = {k: v[1] for k, v in other.entries.items()}
        return mine == theirs and self.mu == other.mu

    def to_json(self, mu_only: bool = False, extra: dict | None = None) -> dict:
        labels = self.sys.word_labels
        out = {
            "system": self.sys.to_json(),
            "J": [self.sys.labels[j] for j in sorted(self.sys.J)],
            "y_word": list(labels(self.y_word)),
            "length": self.y.length,
        }
        if extra:
            out.update(extra)
        if not mu_only:
            out["entries"] = [
                {"x_word": list(labels(w)), "length": x.length,
                 "P_coeffs": [str(c) for c in P]}
                for w, (x, P) in sorted(self.entries.items(), key=lambda kv: (kv[1][0].length, kv[0]))
            ]
        out["mu"] = [
            {"x_word": list(labels(w)), "value": str(m)}
            for w, m in sorted(self.mu.items(), key=lambda kv: (len(kv[0]), kv[0])) if m
        ]
        out["stats"] = {k: self.stats[k] for k in ("waves", "corrections", "peak_support")
                        if k in self.stats}
        return out


def job_fingerprint(sys_: CoxeterSystem, target_word: Sequence[int]) -> str:
    h = hashlib.sha256()
    h.update(sys_.fingerprint().encode())
    h.update(repr(tuple(target_word)).encode())
    return h.hexdigest()


def _resolve_target(sys_: CoxeterSystem, y_word: Sequence[int]) -> GroupElement:
    y, _ = word_to_element(sys_, y_word, require_reduced=True)
    if not is_min_coset_rep(sys_, y):
        raise NotCosetRep(f"target {sys_.word_labels(y_word)} is not a minimal coset representative")
    return coset_graph(sys_).intern(y)


def initial_state(sys_: CoxeterSystem, y_word: Sequence[int]) -> EngineState:
    y_word = tuple(y_word)
    y = _resolve_target(sys_, y_word)
    fat = d_prime(sys_, y_word)
    return EngineState(sys_, y_word, y, fat, wave_floor=y.length - 1, peak_support=len(fat))


def find_offenders(fat: ModuleVector, y: GroupElement,
                   max_length: int | None = None) -> list[tuple[GroupElement, LaurentPoly]]:
    """Offending ``(x, f_x)`` of maximal length, ordered by canonical word."""
    graph = coset_graph(fat.sys)
    best = -1
    found: list[tuple[GroupElement, LaurentPoly]] = []
    for x, f in fat.items():
        n = x.length
        if n < best or x == y or (max_length is not None and n > max_length):
            continue
        if f.has_nonnegative_term():
            if n > best:
                best = n
                found = []
            found.append((x, f))
    found.sort(key=lambda xf: graph.canonical_word(xf[0]))
    return found


def _check_parity(state: EngineState) -> None:
    ly = state.y.length
    for x, f in state.fat.items():
        if not f.parity_ok((ly - x.length) % 2):
            raise InternalParityViolation(f"coefficient {f} at length {x.length} breaks parity")
    if state.fat[state.y] != LaurentPoly.one():
        raise InternalInvariantViolation("coefficient of the target is no longer 1")


def _wave_chunk(sys_: CoxeterSystem, jobs, cache_size: int) -> ModuleVector:
    return scaled_d_prime_sum(sys_, jobs, cache_size)


def _chunks(items: list, n: int) -> list[list]:
    size = -(-len(items) // n)
    return [items[i:i + size] for i in range(0, len(items), size)]


class _StopSignals:
    """Turn SIGINT/SIGTERM into a stop request while the engine runs."""

    def __init__(self, state: EngineState, enabled: bool):
        self.state = state
        self.enabled = enabled and threading.current_thread() is threading.main_thread()
        self.saved = {}

    def _handler(self, signum, frame):
        self.state.stop_requested = True

    def __enter__(self):
        if self.enabled:
            for sig in (signal.SIGINT, signal.SIGTERM):
                self.saved[sig] = signal.signal(sig, self._handler)
        return self

    def __exit__(self, *exc):
        for sig, old in self.saved.items():
            signal.signal(sig, old)


def run_waves(state: EngineState, options: EngineOptions | None = None) -> EngineState:
    """Run correction waves until ``state.fat`` is the canonical basis element."""
    opts = options or EngineOptions()
    sys_ = state.sys
    graph = coset_graph(sys_)
    last_save = time.monotonic()
    last_log = time.monotonic()
    pool = None
    audit = _MemoryAudit(state) if opts.audit_memory else None

    def save():
        if opts.checkpoint_path is not None:
            checkpoint_save(state, opts.checkpoint_path, job=opts.job)

    def stop_if_requested():
        if state.stop_requested:
            save()
            raise Interrupted(f"stopped at wave {state.waves}, floor {state.wave_floor}")

    try:
        with _StopSignals(state, opts.checkpoint_path is not None):
            if opts.check_invariants:
                _check_parity(state)
            while True:
                stop_if_requested()
                offenders = find_offenders(state.fat, state.y)
                if not offenders:
                    break
                L = offenders[0][0].length
                if L > state.wave_floor:
                    raise InternalInvariantViolation(
                        f"offender at length {L} above floor {state.wave_floor}")
                if not (state.in_wave and L == state.wave_floor):
                    state.waves += 1
                state.in_wave = True
                state.wave_floor = L
                jobs = []
                for x, f in offenders:
                    g = make_g(f)
                    if opts.check_invariants and not g.is_bar_symmetric():
                        raise InternalInvariantViolation("correction polynomial is not bar-symmetric")
                    jobs.append((graph.canonical_word(x), g))
                if audit:
                    audit.wave_size = len(jobs)
                if time.monotonic() - last_log >= opts.log_interval or log.isEnabledFor(logging.DEBUG):
                    log.info("wave %d: length %d, %d offenders, support %d",
                             state.waves, L, len(jobs), len(state.fat))
                    last_log = time.monotonic()

                if opts.workers > 1 and len(jobs) > 1:
                    if pool is None:
                        pool = concurrent.futures.ProcessPoolExecutor(max_workers=opts.workers)
                    chunks = _chunks(jobs, min(len(jobs), opts.workers))
                    futures = [pool.submit(_wave_chunk, sys_, chunk, opts.cache_size) for chunk in chunks]
                    one = LaurentPoly.one()
                    for fut, chunk in zip(futures, chunks):
                        part = fut.result()
                        state.fat.sub_scaled(one, part)
                        del part
                        state.corrections += len(chunk)
                else:
                    for word, g in jobs:
                        if opts.cache_size:
                            corr = scaled_d_prime_sum(sys_, [(word, LaurentPoly.one())], opts.cache_size)
                        else:
                            corr = d_prime(sys_, word)
                        state.fat.sub_scaled(g, corr)
                        del corr
                        state.corrections += 1
                        stop_if_requested()

                state.in_wave = False
                state.wave_floor = L - 1
                state.peak_support = max(state.peak_support, len(state.fat))
                if audit:
                    audit.wave_size = 0
                if opts.check_invariants:
                    _check_parity(state)
                if opts.on_wave is not None:
                    opts.on_wave(state)
                if time.monotonic() - last_save >= opts.checkpoint_interval:
                    save()
                    last_save = time.monotonic()
    finally:
        if pool is not None:
            pool.shutdown()
        if audit:
            audit.close()
    if audit:
        state.memory_audit = audit.report()
    return state


class _MemoryAudit:
    """Asserts live vectors <= 1 + current wave size on every allocation."""

    def __init__(self, state: EngineState):
        self.state = state
        self.wave_size = 0
        self.baseline = census.live - 1  # vectors alive outside the engine
        self.max_live = census.live - self.baseline
        self.max_excess = 0
        self.violations = 0
        census.listener = self._observe

    def _observe(self, live: int):
        live -= self.baseline
        self.max_live = max(self.max_live, live)
        excess = live - (1 + self.wave_size)
        self.max_excess = max(self.max_excess, excess)
        if excess > 0:
            self.violations += 1

    def close(self):
        census.listener = None

    def report(self) -> dict:
        return {"max_live": self.max_live, "violations": self.violations,
                "max_excess": self.max_excess}


def extract_result(state: EngineState, elapsed: float | None = None) -> KLResult:
    sys_ = state.sys
    graph = coset_graph(sys_)
    y = state.y
    ly = y.length
    entries = {}
    mu = {}
    for x, f in state.fat.items():
        w = graph.canonical_word(x)
        ldiff = ly - x.length
        if x != y:
            if not f.is_strictly_negative():
                raise InternalInvariantViolation(f"coefficient of {sys_.word_labels(w)} not strictly negative")
            mu[w] = mu_coefficient(f)
        P = to_q_polynomial(f, ldiff)
        if x != y and 2 * (len(P) - 1) > ldiff - 1:
            raise InternalInvariantViolation(f"degree bound fails for {sys_.word_labels(w)}")
        entries[w] = (x, P)
    stats = {"waves": state.waves, "corrections": state.corrections,
             "peak_support": state.peak_support}
    if elapsed is not None:
        stats["elapsed_seconds"] = elapsed
    if state.memory_audit is not None:
        stats["memory_audit"] = state.memory_audit
    return KLResult(sys_, y, state.target_word, entries, mu, stats)


def compute_target(sys_: CoxeterSystem, y_word: Sequence[int],
                   options: EngineOptions | None = None) -> KLResult:
    """All ``P^J_{x,y}`` and mu-coefficients for the element with reduced word ``y_word``."""
    start = time.perf_counter()
    state = initial_state(sys_, y_word)
    run_waves(state, options)
    return extract_result(state, time.perf_counter() - start)


def resume(path, options: EngineOptions | None = None, sys_: CoxeterSystem | None = None,
           y_word: Sequence[int] | None = None) -> KLResult:
    start = time.perf_counter()
    state, job = checkpoint_resume(path, sys_, y_word)
    opts = options or EngineOptions()
    if opts.job is None:
        opts.job = job
    run_waves(state, opts)
    return extract_result(state, time.perf_counter() - start)


# checkpoints

def _checksum(body: dict) -> str:
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


def checkpoint_save(state: EngineState, path, job: dict | None = None) -> None:
    """Write ``state`` atomically (temp file + rename)."""
    graph = coset_graph(state.sys)
    body = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "fingerprint": state.fingerprint,
        "system": state.sys.to_json(),
        "target_word": list(state.target_word),
        "job": job or {},
        "counters": state.counters(),
        "fat": state.fat.to_json(graph),
    }
    doc = {"checksum": _checksum(body), "body": body}
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".klq-ckpt-", dir=folder)
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh, sort_keys=True)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    log.debug("checkpoint written to %s", path)


def checkpoint_resume(path, sys_: CoxeterSystem | None = None,
                      y_word: Sequence[int] | None = None) -> tuple[EngineState, dict]:
    """Load a checkpoint; ``sys_``/``y_word``, when given, must match it."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
        body = doc["body"]
        if doc["checksum"] != _checksum(body):
            raise CorruptCheckpoint(f"{path}: checksum mismatch")
        if body.get("format") != CHECKPOINT_FORMAT:
            raise CorruptCheckpoint(f"{path}: not a klq checkpoint")
    except (OSError, ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, CheckpointError):
            raise
        raise CorruptCheckpoint(f"{path}: {exc}") from exc
    if body.get("version") != CHECKPOINT_VERSION:
        raise VersionMismatch(f"{path}: version {body.get('version')}, expected {CHECKPOINT_VERSION}")
    try:
        stored_sys = system_from_json(body["system"])
        target = tuple(body["target_word"])
        if job_fingerprint(stored_sys, target) != body["fingerprint"]:
            raise CorruptCheckpoint(f"{path}: fingerprint does not match stored system")
        if sys_ is not None or y_word is not None:
            want = job_fingerprint(sys_ or stored_sys, tuple(y_word) if y_word is not None else target)
            if want != body["fingerprint"]:
                raise FingerprintMismatch(f"{path}: checkpoint belongs to a different job")
        y = _resolve_target(stored_sys, target)
        fat = ModuleVector.from_json(stored_sys, body["fat"])
        c = body["counters"]
        state = EngineState(stored_sys, target, y, fat, wave_floor=c["wave_floor"],
                            in_wave=c["in_wave"], waves=c["waves"],
                            corrections=c["corrections"], peak_support=c["peak_support"])
    except CheckpointError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptCheckpoint(f"{path}: {exc}") from exc
    return state, body["job"]
