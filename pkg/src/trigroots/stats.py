"""Monte Carlo sweeps over root counts and the estimators built on them.

A sweep is a deterministic function of (ensemble, n, domain, path, seed,
trials): trial i draws its coefficients from the counter-based stream
(seed, i) and the records are emitted in trial order whatever the number of
worker threads.
"""
from __future__ import annotations

import json
import math
import os
import time
from collections.abc import Iterable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats as sps

from .ensembles import EnsembleSpec, sample_coeffs
from .rootcount import count_certified, screened_counts
from .trigpoly import TrigPoly

DOMAINS = {"torus": None, "half": "half", "negative": "negative"}
PATHS = ("fast", "certified")
AUDIT_EVERY = 100
AUDIT_TOLERANCE = 1e-3
DEFAULT_EPS = (0.02, 0.05, 0.1, 0.2, 0.3, 0.5)


class AuditError(RuntimeError):
    """Fast and certified counts disagreed on too many audited trials."""


class SweepIOError(OSError):
    def __init__(self, message, last_durable):
        super().__init__(message)
        self.last_durable = last_durable


@dataclass(frozen=True)
class RunRecord:
    master_seed: int
    trial_index: int
    n: int
    ensemble: str
    domain: str
    count: int
    certified: bool
    count_path: str
    wall_time: float | None = None

    def __post_init__(self):
        if self.count < 0 or self.count > 2 * self.n + 2:
            raise ValueError(f"count {self.count} outside [0, 2n+2]")

    def to_json(self) -> str:
        d = asdict(self)
        if d["wall_time"] is None:
            del d["wall_time"]
        return json.dumps(d, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})

    @property
    def group(self):
        return (self.n, self.ensemble, self.domain)


@dataclass
class AuditLog:
    audited: int = 0
    disagreements: int = 0
    fallbacks: int = 0

    @property
    def rate(self) -> float:
        return self.disagreements / self.audited if self.audited else 0.0


def _chunk_records(spec: EnsembleSpec, n: int, domain: str, path: str, seed: int,
                   indices: np.ndarray, audit: bool, timed: bool):
    """Counts for one chunk of trial indices.  Pure in its arguments."""
    t0 = time.perf_counter()
    rows = sample_coeffs(spec, n, seed, indices)
    a, b = rows[:, :n], rows[:, n:]
    dom = DOMAINS[domain]
    out, audited, bad, fallbacks = [], 0, 0, 0
    if path == "fast":
        counts, ok = screened_counts(a, b, domain=dom)
    else:
        counts = np.zeros(indices.size, dtype=np.int64)
        ok = np.zeros(indices.size, dtype=bool)
    for j, t in enumerate(indices.tolist()):
        rec_path = path
        c, cert = int(counts[j]), bool(ok[j])
        need_cert = path == "certified" or not cert
        if need_cert or (audit and t % AUDIT_EVERY == 0):
            cc = count_certified(TrigPoly(a[j], b[j]), dom)
            if need_cert:
                fallbacks += path == "fast"
                c, cert, rec_path = cc.count, cc.certified, "certified"
            else:
                audited += 1
                bad += int(cc.certified and cc.count != c)
        out.append((t, c, cert, rec_path))
    per = (time.perf_counter() - t0) / max(1, indices.size) if timed else None
    recs = [
        RunRecord(seed, t, n, spec.label, domain, c, cert, p, per)
        for t, c, cert, p in out
    ]
    return recs, audited, bad, fallbacks


def run_sweep(spec, n: int, trials: int, domain: str = "torus", path: str = "fast",
              seed: int = 0, threads: int = 1, sink: str | os.PathLike | None = None,
              chunk: int = 256, audit: bool = True, timed: bool = False,
              start: int = 0, header: dict | None = None,
              audit_log: AuditLog | None = None) -> Iterator[RunRecord]:
    """Stream RunRecords for trial indices start .. start+trials-1.

    ``path='fast'`` uses the Hermite-screened grid counter (every count it
    reports as certified is exact), falling back to subdivision when it
    cannot decide; every 100th trial is also recounted by subdivision and the
    sweep aborts if more than 0.1% of audited trials disagree.  With
    ``sink`` the records are appended to a JSONL file and trial indices already
    present there are skipped, which makes an interrupted sweep resumable.
    """
    spec = EnsembleSpec.parse(spec)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if domain not in DOMAINS:
        raise ValueError(f"domain must be one of {', '.join(DOMAINS)}")
    if path not in PATHS:
        raise ValueError(f"path must be one of {', '.join(PATHS)}")
    log = audit_log if audit_log is not None else AuditLog()

    todo = np.arange(start, start + trials, dtype=np.int64)
    fh = None
    if sink is not None:
        done = set()
        if os.path.exists(sink):
            _, old = read_jsonl(sink)
            done = {r.trial_index for r in old
                    if (r.master_seed, r.n, r.ensemble, r.domain) == (seed, n, spec.label, domain)}
        todo = todo[~np.isin(todo, np.fromiter(done, dtype=np.int64, count=len(done)))]
        try:
            new_file = not os.path.exists(sink) or os.path.getsize(sink) == 0
            fh = open(sink, "a", encoding="utf-8")
            if new_file and header is not None:
                fh.write(json.dumps({"header": header}, sort_keys=True) + "\n")
                fh.flush()
        except OSError as exc:
            raise SweepIOError(f"cannot open sink {sink}: {exc}", None) from exc

    chunks = [todo[i : i + chunk] for i in range(0, todo.size, chunk)]

    def work(idx):
        return _chunk_records(spec, n, domain, path, seed, idx, audit, timed)

    last = None
    executor = ThreadPoolExecutor(max_workers=max(1, threads)) if threads > 1 else None
    try:
        results = executor.map(work, chunks) if executor else map(work, chunks)
        for recs, audited, bad, fallbacks in results:
            log.audited += audited
            log.disagreements += bad
            log.fallbacks += fallbacks
            if log.audited and log.rate > AUDIT_TOLERANCE:
                raise AuditError(
                    f"{log.disagreements} of {log.audited} audited trials disagree "
                    f"(> {AUDIT_TOLERANCE:.1%})"
                )
            if fh is not None:
                try:
                    fh.write("".join(r.to_json() + "\n" for r in recs))
                    fh.flush()
                except OSError as exc:
                    raise SweepIOError(f"write to {sink} failed: {exc}", last) from exc
            last = recs[-1].trial_index
            yield from recs
    finally:
        if executor is not None:
            executor.shutdown(wait=False, cancel_futures=True)
        if fh is not None:
            fh.close()


def collect(spec, n, trials, **kw) -> list[RunRecord]:
    return list(run_sweep(spec, n, trials, **kw))


# -- persistence --------------------------------------------------------------

def write_jsonl(records: Iterable[RunRecord], path, header: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header is not None:
            fh.write(json.dumps({"header": header}, sort_keys=True) + "\n")
        for r in records:
            fh.write(r.to_json() + "\n")


def read_jsonl(path) -> tuple[dict | None, list[RunRecord]]:
    header, recs = None, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            d = json.loads(line)
            if "header" in d and len(d) == 1:
                header = d["header"]
            else:
                recs.append(RunRecord.from_dict(d))
    return header, recs


# -- estimators ---------------------------------------------------------------

def _counts(records) -> np.ndarray:
    return np.array([r.count for r in records], dtype=np.float64)


def _check_homogeneous(records):
    groups = {r.group for r in records}
    if len(groups) > 1:
        raise ValueError(f"records mix several (n, ensemble, domain) groups: {sorted(groups)}")
    return groups.pop() if groups else None


def variance_se(x: np.ndarray) -> float:
    """Plug-in standard error of the unbiased sample variance."""
    T = x.size
    d = x - x.mean()
    m2 = float(np.mean(d * d))
    m4 = float(np.mean(d**4))
    s2 = m2 * T / (T - 1)
    return math.sqrt(max(m4 - s2 * s2 * (T - 3) / (T - 1), 0.0) / T)


def bootstrap_variance_se(x: np.ndarray, reps: int = 200, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, x.size, size=(reps, x.size))
    return float(np.std(np.var(x[idx], axis=1, ddof=1), ddof=1))


@dataclass
class SummaryStats:
    trials: int
    mean: float
    mean_se: float
    variance: float
    variance_se: float
    skew: float
    excess_kurtosis: float
    tails: dict = field(default_factory=dict)
    ks: float = 0.0
    n: int | None = None
    ensemble: str | None = None
    domain: str | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tails"] = {f"{e:g}": v for e, v in self.tails.items()}
        return d


def summarize(records, eps_list=DEFAULT_EPS, bootstrap: bool = False) -> SummaryStats:
    records = list(records)
    if len(records) < 30:
        raise ValueError("summarize needs at least 30 records")
    n, ens, dom = _check_homogeneous(records)
    x = _counts(records)
    T = x.size
    mean = float(x.mean())
    var = float(x.var(ddof=1))
    if var > 0:
        skew = float(sps.skew(x))
        kurt = float(sps.kurtosis(x))
        ks = float(sps.kstest((x - mean) / math.sqrt(var), "norm").statistic)
    else:
        skew = kurt = 0.0
        ks = 0.5  # a point mass sits at the median of its fitted normal
    vse = bootstrap_variance_se(x) if bootstrap else variance_se(x)
    tails = {e: p for e, (p, _, _) in tail_curve(records, eps_list).items()}
    return SummaryStats(T, mean, math.sqrt(var / T), var, vse, skew, kurt, tails, ks, n, ens, dom)


def tail_curve(records, eps_list, center: float | None = None) -> dict:
    """eps -> (P(|N - mean| >= eps n), binomial SE, one-sided 95% upper bound).

    The upper bound is the rule of three 3/T for zero-event cells and
    p + 1.645 SE otherwise.
    """
    records = list(records)
    if not records:
        raise ValueError("tail_curve needs records")
    _check_homogeneous(records)
    n = records[0].n
    x = _counts(records)
    T = x.size
    mu = float(x.mean()) if center is None else float(center)
    dev = np.abs(x - mu)
    out = {}
    for e in sorted(float(v) for v in eps_list):
        k = int(np.count_nonzero(dev >= e * n))
        p = k / T
        se = math.sqrt(p * (1 - p) / T)
        out[e] = (p, se, 3.0 / T if k == 0 else min(1.0, p + 1.645 * se))
    return out


def kurtosis_contrast(records_a, records_b) -> tuple[float, float]:
    """Var_A/n - Var_B/n on [0, pi] with the combined standard error."""
    records_a, records_b = list(records_a), list(records_b)
    ga, gb = _check_homogeneous(records_a), _check_homogeneous(records_b)
    if ga[2] != "half" or gb[2] != "half":
        raise ValueError("kurtosis contrast is defined for counts on [0, pi] (domain 'half')")
    if ga[0] != gb[0]:
        raise ValueError("record sets have different degrees")
    n = ga[0]
    xa, xb = _counts(records_a), _counts(records_b)
    diff = float(xa.var(ddof=1) - xb.var(ddof=1)) / n
    se = math.hypot(variance_se(xa), variance_se(xb)) / n
    return diff, se


def persistence_counter(records) -> tuple[int, float | None]:
    """(# trials without roots, rule-of-three 95% bound when that number is 0)."""
    records = list(records)
    zeros = sum(1 for r in records if r.count == 0)
    T = len(records)
    return zeros, (3.0 / T if zeros == 0 and T else None)


def rule_of_three(trials: int) -> float:
    return 3.0 / trials


def qualls_mean(n: int) -> float:
    """Expected torus root count for Gaussian coefficients."""
    return 2.0 * math.sqrt((2 * n + 1) * (n + 1) / 6.0)
