"""General-linear-position verification.

A window is in general linear position (GLP) when every N-element subset of
its N² time-frequency shifts is linearly independent, i.e. every N×N minor
of the full system matrix is nonzero.  This module enumerates supports
(exhaustively or by seeded sampling), evaluates the minors in batches, and
aggregates a deterministic report.

Soundness convention for the exact backend: a nonzero residue mod p proves
the minor nonzero; a zero residue is only "zero mod p" and is escalated
across `num_primes` independent primes — a support is reported dependent
only when every prime agrees.  Reports are bit-identical regardless of the
worker count.
"""

from __future__ import annotations

import csv
import itertools
import math
import random
import time
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np

from .backends import (
    DEFAULT_NUM_PRIMES,
    det_batch_float,
    det_batch_nonzero_mod,
    det_float,
    det_mod,
    embedding_primes,
)
from .operators import TimeFreqIndex, Window, gabor_matrix, system_matrix

DEFAULT_CHUNK = 65_536


@dataclass(frozen=True)
class SupportEnumeration:
    """Stream of size-N supports, as sorted tuples of column indices.

    Columns are numbered 0..N²-1 in lexicographic (κ,λ) order.  Exhaustive
    mode yields all C(N², N) combinations in lexicographic order; sampled
    mode yields `count` distinct supports drawn reproducibly from `seed`.
    """

    n: int
    mode: str = "exhaustive"  # "exhaustive" | "sampled"
    count: int | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("exhaustive", "sampled"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "sampled":
            if not self.count or self.count < 1:
                raise ValueError("sampled mode requires count >= 1")
            if self.seed is None:
                raise ValueError("sampled mode requires a seed")
            if self.count > self.total_available():
                raise ValueError("cannot sample more supports than exist")

    def total_available(self) -> int:
        return math.comb(self.n * self.n, self.n)

    def total(self) -> int:
        return self.total_available() if self.mode == "exhaustive" else int(self.count)

    def supports(self):
        if self.mode == "exhaustive":
            yield from itertools.combinations(range(self.n * self.n), self.n)
        else:
            rng = random.Random(self.seed)
            seen: set[tuple[int, ...]] = set()
            cols = range(self.n * self.n)
            while len(seen) < self.count:
                s = tuple(sorted(rng.sample(cols, self.n)))
                if s not in seen:
                    seen.add(s)
                    yield s

    def chunks(self, size: int = DEFAULT_CHUNK):
        it = self.supports()
        while True:
            block = list(itertools.islice(it, size))
            if not block:
                return
            yield np.array(block, dtype=np.int64)


def columns_to_support(cols, n: int) -> tuple[TimeFreqIndex, ...]:
    return tuple((int(c) // n, int(c) % n) for c in cols)


# ---------------------------------------------------------------------------
# single-support check
# ---------------------------------------------------------------------------


@dataclass
class SupportVerdict:
    support: tuple[TimeFreqIndex, ...]
    independent: bool
    residues: dict[int, int] | None = None  # exact backend: prime -> det residue
    det_modulus: float | None = None  # float backend
    witness: np.ndarray | None = field(default=None, repr=False)


def _exact_windows(window: Window, num_primes: int) -> list[Window]:
    """The window re-embedded under the `num_primes` smallest usable primes."""
    ctx = window.backend.context
    if num_primes <= 1:
        return [window]
    try:
        ctxs = embedding_primes(ctx.order, num_primes, min_bits=ctx.prime.bit_length() - 1)
        ctxs = [c for c in ctxs if c.prime != ctx.prime]
        return [window] + [window.reembed(c) for c in ctxs[: num_primes - 1]]
    except ValueError:
        # no re-embedding recipe: single-prime verdicts only
        return [window]


def _float_witness(matrix: np.ndarray) -> np.ndarray:
    """Numerical null vector of the columns (least singular direction)."""
    _, _, vh = np.linalg.svd(np.asarray(matrix, dtype=np.complex128))
    return np.conj(vh[-1])


def check_support(
    window: Window, support, num_primes: int = DEFAULT_NUM_PRIMES
) -> SupportVerdict:
    """Verdict for one support; ordering of the support does not matter."""
    n = window.n
    support = tuple(sorted((int(k) % n, int(l) % n) for k, l in support))
    if len(support) != n or len(set(support)) != n:
        raise ValueError(f"support must consist of {n} distinct indices")
    if window.backend.kind == "exact":
        residues: dict[int, int] = {}
        for w in _exact_windows(window, num_primes):
            mat = gabor_matrix(w, support).matrix
            r = det_mod(mat.tolist(), w.backend.prime)
            residues[w.backend.prime] = r
            if r != 0:
                return SupportVerdict(support, True, residues=residues)
        return SupportVerdict(support, False, residues=residues)
    mat = gabor_matrix(window, support).matrix
    det = window.backend.determinant(mat)
    modulus = float(abs(complex(det)))
    if window.backend.det_is_zero(det, mat):
        return SupportVerdict(support, False, det_modulus=modulus, witness=_float_witness(mat))
    return SupportVerdict(support, True, det_modulus=modulus)


# ---------------------------------------------------------------------------
# batch engine (shared by in-process and worker paths)
# ---------------------------------------------------------------------------


def _exact_payload(window: Window, num_primes: int):
    wins = _exact_windows(window, num_primes)
    return [(system_matrix(w), w.backend.prime) for w in wins]


def _scan_chunk_exact(sel: np.ndarray, embeddings) -> tuple[int, list, list[int]]:
    cols0, p0 = embeddings[0]
    n = cols0.shape[0]
    mats = cols0[:, sel].transpose(1, 0, 2)
    if p0 < 1 << 31:
        ok = det_batch_nonzero_mod(mats, p0)
    else:
        # int64 batching would overflow; fall back to scalar elimination
        ok = np.array([det_mod(m.tolist(), p0) != 0 for m in mats], dtype=bool)
    failures = []
    primes_hit: list[int] = []
    for row in np.nonzero(~ok)[0]:
        colsel = sel[row]
        residues = {}
        dependent = True
        for colsmat, p in embeddings:
            mat = colsmat[:, colsel]
            r = det_mod(mat.tolist(), p)
            residues[int(p)] = int(r)
            if p not in primes_hit:
                primes_hit.append(int(p))
            if r != 0:
                dependent = False
                break
        if dependent:
            failures.append((tuple(int(c) for c in colsel), residues))
    return len(sel), failures, primes_hit


def _scan_chunk_float(sel: np.ndarray, cols: np.ndarray, eps: float) -> tuple[int, list, list[int]]:
    mats = cols[:, sel].transpose(1, 0, 2)
    dets = det_batch_float(mats)
    scales = np.abs(mats).max(axis=(1, 2))
    flagged = np.abs(dets) <= eps * scales
    failures = []
    for row in np.nonzero(flagged)[0]:
        colsel = tuple(int(c) for c in sel[row])
        mat = mats[row]
        det = det_float(mat)
        if abs(complex(det)) <= eps * float(np.abs(mat).max()):
            failures.append((colsel, float(abs(complex(det))), _float_witness(mat)))
    return len(sel), failures, []


_WORKER: dict = {}


def _worker_init(kind, payload):
    _WORKER["kind"] = kind
    _WORKER["payload"] = payload


def _worker_scan(sel: np.ndarray):
    if _WORKER["kind"] == "exact":
        return _scan_chunk_exact(sel, _WORKER["payload"])
    cols, eps = _WORKER["payload"]
    return _scan_chunk_float(sel, cols, eps)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class DependentSupport:
    support: tuple[TimeFreqIndex, ...]
    residues: dict[int, int] | None = None
    det_modulus: float | None = None
    witness: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out: dict = {"support": [list(idx) for idx in self.support]}
        if self.residues is not None:
            out["residues"] = {str(p): r for p, r in self.residues.items()}
        if self.det_modulus is not None:
            out["det_modulus"] = self.det_modulus
        if self.witness is not None:
            out["witness"] = [[float(z.real), float(z.imag)] for z in self.witness]
        return out


@dataclass
class VerificationReport:
    n: int
    backend: str
    window_kind: str
    mode: str
    supports_tested: int
    dependent: list[DependentSupport]
    primes_used: list[int]
    elapsed_seconds: float
    sample_count: int | None = None
    sample_seed: int | None = None

    @property
    def verdict(self) -> str:
        if self.dependent:
            return "dependent-found"
        return "glp-certified" if self.mode == "exhaustive" else "glp-on-sample"

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "backend": self.backend,
            "window_kind": self.window_kind,
            "mode": self.mode,
            "supports_tested": self.supports_tested,
            "dependent": len(self.dependent),
            "dependent_supports": [d.to_dict() for d in self.dependent],
            "primes_used": self.primes_used,
            "verdict": self.verdict,
        }
        if self.sample_count is not None:
            out["sample_count"] = self.sample_count
            out["sample_seed"] = self.sample_seed
        return out


def verify_glp(
    window: Window,
    enumeration: SupportEnumeration,
    workers: int = 1,
    num_primes: int = DEFAULT_NUM_PRIMES,
    chunk_size: int = DEFAULT_CHUNK,
    progress=None,
) -> VerificationReport:
    """Test linear independence of every enumerated support.

    The result is a pure function of (window, enumeration, backend, primes);
    workers only partition the stream of supports, and failures are re-sorted
    at the end, so the report does not depend on the worker count.
    """
    n = window.n
    if enumeration.n != n:
        raise ValueError("enumeration dimension does not match the window")
    start = time.perf_counter()
    exact = window.backend.kind == "exact"
    if exact:
        embeddings = _exact_payload(window, num_primes)
        payload = embeddings
        base_primes = [int(embeddings[0][1])]
    else:
        payload = (system_matrix(window), window.backend.eps)
        base_primes = []

    tested = 0
    raw_failures: list = []
    primes_used: list[int] = list(base_primes)

    def absorb(result):
        nonlocal tested
        count, failures, primes_hit = result
        tested += count
        raw_failures.extend(failures)
        for p in primes_hit:
            if p not in primes_used:
                primes_used.append(p)
        if progress:
            progress(tested)

    if workers <= 1:
        for sel in enumeration.chunks(chunk_size):
            if exact:
                absorb(_scan_chunk_exact(sel, payload))
            else:
                absorb(_scan_chunk_float(sel, payload[0], payload[1]))
    else:
        kind = "exact" if exact else "float"
        with Pool(workers, initializer=_worker_init, initargs=(kind, payload)) as pool:
            for result in pool.imap(_worker_scan, enumeration.chunks(chunk_size)):
                absorb(result)

    dependent = []
    for fail in sorted(raw_failures, key=lambda f: f[0]):
        support = columns_to_support(fail[0], n)
        if exact:
            dependent.append(DependentSupport(support, residues=fail[1]))
        else:
            dependent.append(DependentSupport(support, det_modulus=fail[1], witness=fail[2]))

    elapsed = time.perf_counter() - start
    return VerificationReport(
        n=n,
        backend=window.backend.kind,
        window_kind=window.kind,
        mode=enumeration.mode,
        supports_tested=tested,
        dependent=dependent,
        primes_used=sorted(primes_used),
        elapsed_seconds=elapsed,
        sample_count=enumeration.count if enumeration.mode == "sampled" else None,
        sample_seed=enumeration.seed if enumeration.mode == "sampled" else None,
    )


def write_witness_csv(report: VerificationReport, path) -> None:
    """One CSV row per dependent support: n, support, backend, determinant data."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "support", "backend", "determinant"])
        for dep in report.dependent:
            support = ";".join(f"{k},{l}" for k, l in dep.support)
            if dep.residues is not None:
                det = "|".join(f"{p}:{r}" for p, r in sorted(dep.residues.items()))
            else:
                det = repr(dep.det_modulus)
            writer.writerow([report.n, support, report.backend, det])


# ---------------------------------------------------------------------------
# Fourier minor spot-checks (prime dimensions)
# ---------------------------------------------------------------------------


@dataclass
class FourierCheckReport:
    p: int
    minors_tested: int
    failures: list[tuple]
    primes_used: list[int]
    elapsed_seconds: float

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "minors_tested": self.minors_tested,
            "failures": [list(map(list, f)) for f in self.failures],
            "primes_used": self.primes_used,
            "passed": self.passed,
        }


def fourier_minor_check(
    p: int,
    min_bits: int = 20,
    num_primes: int = DEFAULT_NUM_PRIMES,
    max_p: int = 7,
) -> FourierCheckReport:
    """Exhaustively verify that every square minor of the p×p DFT matrix is
    nonzero, for prime p (an instance check of Chebotarev's theorem).

    The number of minors is C(2p, p) - 1, so p is capped at `max_p`.
    """
    from .backends import is_prime

    if not is_prime(p):
        raise ValueError("dimension must be prime")
    if p > max_p:
        raise ValueError(f"exhaustive minor check capped at p = {max_p}")
    start = time.perf_counter()
    ctxs = embedding_primes(p, num_primes, min_bits)
    tables = []
    for ctx in ctxs:
        om = ctx.root_of_unity(p)
        tables.append(
            (
                [[pow(om, j * k, ctx.prime) for k in range(p)] for j in range(p)],
                ctx.prime,
            )
        )
    tested = 0
    failures = []
    primes_used = [tables[0][1]]
    for order in range(1, p + 1):
        for rows in itertools.combinations(range(p), order):
            for cols in itertools.combinations(range(p), order):
                tested += 1
                dependent = True
                for F, q in tables:
                    sub = [[F[r][c] for c in cols] for r in rows]
                    if det_mod(sub, q) != 0:
                        dependent = False
                        break
                    if q not in primes_used:
                        primes_used.append(q)
                if dependent:
                    failures.append((rows, cols))
    elapsed = time.perf_counter() - start
    return FourierCheckReport(p, tested, failures, sorted(set(primes_used)), elapsed)
