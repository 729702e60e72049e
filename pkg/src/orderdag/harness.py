"""Monte-Carlo experiments: metric sweeps, coupled-pair invariant campaigns,
successive-difference checks and the asymptotic bound reproduction."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import multiprocessing
import struct
from dataclasses import asdict, dataclass, field, fields

from . import kernels
from .bounds import BoundReport, asymptotic_interval, diff_lower_bound, rhs
from .equivalence import DEFAULT_CAP, essential_graph, mec_size
from .metrics import (
    DEFAULT_EXACT_LIMIT,
    DEFAULT_SUBSET_BUDGET,
    MetricRecord,
    measure,
    metric_I,
    metric_Lr,
    metric_Xr_exact,
)
from .sampler import SampleConfig, derive_seed, sample_coupled, sample_order_dag

log = logging.getLogger(__name__)

_CHUNK = 64


def cell_seed(master: int, rho: float) -> int:
    """Seed shared by all cells with this density.

    The vertex count is deliberately left out: sample ``k`` at ``n`` and at
    ``n + 1`` are then coupled, so curves in ``n`` are pathwise monotone.
    """
    return derive_seed(master, struct.unpack("<Q", struct.pack("<d", float(rho)))[0])


@dataclass
class SweepConfig:
    n_values: list[int] = field(default_factory=lambda: [3, 5, 10, 30])
    rho_values: list[float] = field(default_factory=lambda: [0.1, 0.2, 0.5, 0.7])
    r_values: list[int] = field(default_factory=lambda: [0, 1, 2])
    samples: int = 2000
    seed: int = 0
    cap: int = DEFAULT_CAP
    exact_limit: int = DEFAULT_EXACT_LIMIT
    subset_budget: int = DEFAULT_SUBSET_BUDGET
    workers: int = 1

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if any(n < 1 for n in self.n_values):
            raise ValueError("vertex counts must be positive")
        if any(not 0.0 <= p <= 1.0 for p in self.rho_values):
            raise ValueError("densities must lie in [0, 1]")
        if any(r < 0 for r in self.r_values):
            raise ValueError("intervention budgets must be non-negative")
        self.r_values = sorted(set(self.r_values) | {0})

    @classmethod
    def from_dict(cls, data: dict) -> SweepConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class CellSummary:
    n: int
    rho: float
    r: int
    metric: str
    count: int
    mean: float
    variance: float
    ci_halfwidth: float
    exact_count: int
    inexact_count: int
    capped_count: int
    failures: int


SUMMARY_COLUMNS = [f.name for f in fields(CellSummary)]


@dataclass
class SweepResult:
    summaries: list[CellSummary]
    records: list[MetricRecord]
    failures: list[tuple[int, float, int, str]]


def _measure_chunk(task) -> tuple[list[MetricRecord], list[tuple[int, float, int, str]]]:
    n, rho, seed, start, stop, r_values, cap, exact_limit, budget = task
    out, failed = [], []
    for index in range(start, stop):
        g = sample_order_dag(SampleConfig(n, rho, seed, index))
        try:
            out.append(measure(g, r_values, rho=rho, seed=seed, index=index, cap=cap,
                               exact_limit=exact_limit, subset_budget=budget))
        except Exception as exc:  # recorded, never silently dropped
            failed.append((n, rho, index, f"{type(exc).__name__}: {exc}"))
    return out, failed


def _map(func, tasks, workers: int):
    if workers <= 1:
        return [func(t) for t in tasks]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(workers) as pool:
        return list(pool.imap(func, tasks, chunksize=1))


def sample_stats(values: list[float]) -> tuple[int, float, float, float]:
    s = len(values)
    if s == 0:
        return 0, math.nan, math.nan, math.nan
    mean = math.fsum(values) / s
    if s < 2:
        return s, mean, math.nan, math.nan
    var = math.fsum((v - mean) ** 2 for v in values) / (s - 1)
    return s, mean, var, 2.0 * math.sqrt(var / s)


def summarize(n: int, rho: float, r_values, records: list[MetricRecord], failures: int
              ) -> list[CellSummary]:
    rows = []

    def add(r, metric, pairs):
        # pairs: (value, exact, capped); capped values are left out of the statistics
        vals = [v for v, _, capped in pairs if not capped]
        s, mean, var, half = sample_stats(vals)
        rows.append(CellSummary(n, rho, r, metric, s, mean, var, half,
                                sum(1 for _, e, _ in pairs if e),
                                sum(1 for _, e, _ in pairs if not e),
                                sum(1 for _, _, c in pairs if c), failures))

    add(0, "I", [(rec.I, rec.I_exact, False) for rec in records])
    add(0, "I_A", [(rec.I_A, False, False) for rec in records])
    for r in r_values:
        add(r, "X", [(rec.per_r[r].X, rec.per_r[r].exact, False) for rec in records])
        add(r, "isuEss", [(rec.per_r[r].isuEss, rec.per_r[r].exact, False) for rec in records])
        add(r, "log2L", [(rec.per_r[r].log2L, rec.per_r[r].exact, rec.per_r[r].capped)
                         for rec in records])
        add(r, "Y", [(rec.greedy[r].X, False, False) for rec in records])
        add(r, "isuEss_A", [(rec.greedy[r].isuEss, False, False) for rec in records])
        add(r, "log2L_A", [(rec.greedy[r].log2L, False, rec.greedy[r].capped) for rec in records])
    return rows


def run_sweep(cfg: SweepConfig) -> SweepResult:
    summaries: list[CellSummary] = []
    all_records: list[MetricRecord] = []
    all_failures = []
    for rho in cfg.rho_values:
        seed = cell_seed(cfg.seed, rho)
        for n in cfg.n_values:
            tasks = [(n, rho, seed, a, min(a + _CHUNK, cfg.samples), cfg.r_values, cfg.cap,
                      cfg.exact_limit, cfg.subset_budget)
                     for a in range(0, cfg.samples, _CHUNK)]
            records, failures = [], []
            for recs, failed in _map(_measure_chunk, tasks, cfg.workers):
                records += recs
                failures += failed
            log.info("cell n=%d rho=%g: %d records, %d failures", n, rho, len(records), len(failures))
            summaries += summarize(n, rho, cfg.r_values, records, len(failures))
            all_records += records
            all_failures += failures
    return SweepResult(summaries, all_records, all_failures)


# result files ---------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_results(table: list[CellSummary], fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for row in table:
            w.writerow([_fmt(getattr(row, c)) for c in SUMMARY_COLUMNS])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([asdict(row) for row in table], indent=1) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def parse_results(text: str, fmt: str = "csv") -> list[CellSummary]:
    types = {f.name: f.type for f in fields(CellSummary)}
    conv = {"int": int, "float": float, "str": str}
    if fmt == "json":
        return [CellSummary(**row) for row in json.loads(text)]
    rows = list(csv.DictReader(io.StringIO(text)))
    return [CellSummary(**{k: conv[types[k]](v) for k, v in row.items()}) for row in rows]


def emit_records(records: list[MetricRecord]) -> str:
    """Per-sample rows (long-format input for box plots)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if records:
        w.writerow(records[0].columns())
    for rec in records:
        w.writerow([_fmt(v) for v in rec.row()])
    return buf.getvalue()


# coupled-pair invariants ------------------------------------------------------

@dataclass
class CouplingConfig:
    n_values: list[int] = field(default_factory=lambda: [4, 6, 8])
    rho_values: list[float] = field(default_factory=lambda: [0.2, 0.5, 0.8])
    r_values: list[int] = field(default_factory=lambda: [0, 1, 2])
    pairs: int = 1000
    seed: int = 0
    cap: int = DEFAULT_CAP
    exact_limit: int = 64
    subset_budget: int = 10**6
    workers: int = 1


@dataclass
class Violation:
    n: int
    rho: float
    r: int
    index: int
    relation: str
    small: object
    big: object


def _pair_metrics(g, r_values, cap, exact_limit, budget) -> dict:
    ess = essential_graph(g)
    size = mec_size(ess, cap)
    i_val, i_exact = metric_I(g, exact_limit)
    out = {"ess": ess, "X": ess.num_undirected, "L": size.value, "L_exact": not size.capped,
           "I": i_val, "I_exact": i_exact, "r": {}}
    for r in r_values:
        x_r, targets = metric_Xr_exact(g, min(r, g.n), budget)
        lr = metric_Lr(g, targets, cap)
        out["r"][r] = (x_r, int(x_r == 0), lr.value, not lr.capped)
    return out


def _couple_chunk(task) -> list[Violation]:
    n, rho, seed, start, stop, r_values, cap, exact_limit, budget = task
    found = []
    for k in range(start, stop):
        pair = sample_coupled(SampleConfig(n, rho, seed, k))
        a = _pair_metrics(pair.g_small, r_values, cap, exact_limit, budget)
        b = _pair_metrics(pair.g_big, r_values, cap, exact_limit, budget)

        def check(r, name, ok, small, big):
            if not ok:
                found.append(Violation(n, rho, r, k, name, small, big))

        check(0, "X_{n+1} >= X_n", b["X"] >= a["X"], a["X"], b["X"])
        if a["L_exact"] and b["L_exact"]:
            check(0, "L_{n+1} >= L_n", b["L"] >= a["L"], a["L"], b["L"])
        if a["I_exact"] and b["I_exact"]:
            check(0, "I_{n+1} >= I_n", b["I"] >= a["I"], a["I"], b["I"])
        small_und = a["ess"].undirected
        missing = small_und - b["ess"].undirected
        check(0, "undirected edges of Ess(G_n) stay undirected", not missing,
              sorted(small_und), sorted(missing))
        for r in r_values:
            xa, ua, la, la_ok = a["r"][r]
            xb, ub, lb, lb_ok = b["r"][r]
            check(r, "X_{n+1}(r) >= X_n(r)", xb >= xa, xa, xb)
            check(r, "isuEss_{n+1}(r) <= isuEss_n(r)", ub <= ua, ua, ub)
            if la_ok and lb_ok:
                check(r, "L_{n+1}(r) >= L_n(r)", lb >= la, la, lb)
    return found


def run_coupling_campaign(cfg: CouplingConfig) -> list[Violation]:
    violations: list[Violation] = []
    for rho in cfg.rho_values:
        seed = cell_seed(cfg.seed, rho)
        for n in cfg.n_values:
            tasks = [(n, rho, seed, a, min(a + _CHUNK, cfg.pairs), sorted(set(cfg.r_values)),
                      cfg.cap, cfg.exact_limit, cfg.subset_budget)
                     for a in range(0, cfg.pairs, _CHUNK)]
            for found in _map(_couple_chunk, tasks, cfg.workers):
                violations += found
    return violations


# successive differences and the asymptotic bound -------------------------------

def undirected_count_samples(n: int, rho: float, samples: int, seed: int) -> list[int]:
    out: list[int] = []
    step = 10000
    for a in range(0, samples, step):
        out += kernels.sample_undirected_counts(seed, n, rho, a, min(step, samples - a))
    return out


@dataclass
class DifferenceCheck:
    n: int
    rho: float
    samples: int
    mean_diff: float
    sigma: float
    lower_bound: float
    upper_bound: float

    @property
    def ok(self) -> bool:
        return (self.lower_bound - 3 * self.sigma <= self.mean_diff
                <= self.upper_bound + 3 * self.sigma)


def successive_differences(n_values, rho: float, samples: int, master_seed: int = 0
                           ) -> list[DifferenceCheck]:
    """Estimate E[X_{n+1}] - E[X_n] from coupled samples (paired differences).

    Each estimate is compared with [diff_lower_bound(rho, n+1), rhs(rho, n)].
    """
    seed = cell_seed(master_seed, rho)
    ns = sorted(set(n_values) | {n + 1 for n in n_values})
    counts = {n: undirected_count_samples(n, rho, samples, seed) for n in ns}
    out = []
    for n in sorted(n_values):
        diffs = [b - a for a, b in zip(counts[n], counts[n + 1])]
        _, mean, var, _ = sample_stats(diffs)
        out.append(DifferenceCheck(n, rho, samples, mean, math.sqrt(var / samples),
                                   diff_lower_bound(rho, n + 1), rhs(rho, n)))
    return out


def reproduce_asymptotic_bound(samples: int = 100000, n: int = 30, rho: float = 0.5,
                               delta: float = 0.01, range_override: float | None = None,
                               master_seed: int = 0) -> BoundReport:
    """Sample X_n, then bound E[X_inf] (and hence E[log2 L_inf]) from above."""
    counts = undirected_count_samples(n, rho, samples, cell_seed(master_seed, rho))
    s, mean, var, _ = sample_stats([float(c) for c in counts])
    return asymptotic_interval("X", n, rho, mean, var, s, delta=delta, B=range_override)


def record_invariant_violations(records: list[MetricRecord]) -> list[str]:
    """Per-sample checks: log2 L <= X, log2 L_r <= X_r, X_r non-increasing in r."""
    bad = []
    for rec in records:
        tag = f"n={rec.n} rho={rec.rho} index={rec.index}"
        if not rec.L_capped and rec.log2L > rec.X + 1e-12:
            bad.append(f"{tag}: log2L={rec.log2L} > X={rec.X}")
        prev = None
        for r in sorted(rec.per_r):
            m = rec.per_r[r]
            if m.exact and not m.capped and m.log2L > m.X + 1e-12:
                bad.append(f"{tag}: log2L_r{r}={m.log2L} > X_r{r}={m.X}")
            if m.exact and prev is not None and m.X > prev:
                bad.append(f"{tag}: X_r{r}={m.X} exceeds the value at a smaller budget")
            if m.exact:
                prev = m.X
    return bad
