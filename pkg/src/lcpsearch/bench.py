"""Benchmark scenarios, latency statistics, and the materialization memory wall.

Four scenarios are provided, each fully determined by a config + seed:

- ``sustained``: a query loop over a pre-built prefix index, reporting
  nearest-rank latency percentiles and throughput;
- ``gnc``: a step loop where every simulation step issues one top-k query
  against a static set of historical patterns;
- ``tal_sweep``: full scan versus bucketed range scans across a ladder of
  bucket counts, reporting the work-unit reduction per rung;
- ``memo``: cold-versus-hot comparison of a memoized query set.

Reports split into a deterministic ``results`` section (work counters,
reductions, determinism checks) and a ``wall_clock`` section (latency,
throughput, elapsed) that is expected to vary between runs.  Wall-clock
values are informational only; work-unit values are the ones tests assert.
Every report embeds its config and seed so a run can be replayed exactly.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .core import ConfigError, Dataset, InvalidStateError
from .datagen import generate_dataset, generate_queries
from .tal import build_tal
from .trie import QueryCache, TrieIndex, build, memoized_query
from .work import WorkReport, work_reduction

GIB = 1 << 30
MATERIALIZATION_ENTRY_BYTES = 2  # half-precision similarity entries
DEFAULT_BUDGET_BYTES = 80 * GIB
SCHEMA_VERSION = "1"

SCENARIOS = ("sustained", "gnc", "tal_sweep", "memo")


# ---------------------------------------------------------------------------
# Latency statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatencyStats:
    """Nearest-rank percentiles over a complete latency sample, in seconds."""

    p50: float
    p95: float
    p99: float
    qps: float
    total_queries: int

    @classmethod
    def from_samples(cls, samples, elapsed_s: float) -> "LatencyStats":
        arr = np.sort(np.asarray(list(samples), dtype=np.float64))
        n = arr.size
        if n == 0:
            return cls(0.0, 0.0, 0.0, 0.0, 0)

        def rank(p: float) -> float:
            return float(arr[max(1, math.ceil(p / 100.0 * n)) - 1])

        qps = n / elapsed_s if elapsed_s > 0 else 0.0
        return cls(p50=rank(50), p95=rank(95), p99=rank(99), qps=qps, total_queries=n)

    def as_dict(self) -> dict:
        return {
            "p50_ms": self.p50 * 1e3,
            "p95_ms": self.p95 * 1e3,
            "p99_ms": self.p99 * 1e3,
            "qps": self.qps,
            "total_queries": self.total_queries,
        }


# ---------------------------------------------------------------------------
# Memory wall
# ---------------------------------------------------------------------------

def format_byte_size(num_bytes: int) -> str:
    """GiB rendering used in feasibility tables; >= 1000 GiB shown as TiB.

    The TiB figure is the GiB value divided by 1000, matching the common
    report convention of thousand-GiB steps.
    """
    gib = num_bytes / GIB
    if gib >= 1000.0:
        return f"{gib / 1000.0:.2f} TiB"
    return f"{gib:.2f} GiB"


@dataclass(frozen=True)
class MemoryEstimate:
    """Cost of materializing all pairwise similarities versus an index."""

    n: int
    materialization_bytes: int
    budget_bytes: int
    feasible: bool
    index_bytes_measured: int | None = None
    ratio: float | None = None

    @property
    def materialization_display(self) -> str:
        return format_byte_size(self.materialization_bytes)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["materialization_display"] = self.materialization_display
        return d


def memory_wall(n: int, budget_bytes: int = DEFAULT_BUDGET_BYTES, index_bytes: int | None = None) -> MemoryEstimate:
    """Exact pairwise-materialization size ``n*n*2`` bytes against a budget."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    mat = n * n * MATERIALIZATION_ENTRY_BYTES
    ratio = (mat / index_bytes) if index_bytes else None
    return MemoryEstimate(
        n=n,
        materialization_bytes=mat,
        budget_bytes=budget_bytes,
        feasible=mat <= budget_bytes,
        index_bytes_measured=index_bytes,
        ratio=ratio,
    )


# ---------------------------------------------------------------------------
# Scenario configuration and report
# ---------------------------------------------------------------------------

@dataclass
class ScenarioConfig:
    scenario: str
    seed: int
    n_items: int = 100_000
    seq_len: int = 64
    alphabet: int = 2
    k: int = 10
    mode: str = "complete"
    query_count: int = 1000
    duration_s: float | None = None
    steps: int = 1000
    bucket_counts: tuple[int, ...] = (1, 4, 16, 64, 256)
    prefix_len: int | None = None
    distribution: str = "uniform"
    workers: int = 1
    index_path: str | None = None

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if self.seed is None:
            raise ConfigError("seed is mandatory: every run must be replayable")
        positives = {
            "n_items": self.n_items,
            "seq_len": self.seq_len,
            "alphabet": self.alphabet,
            "k": self.k,
            "query_count": self.query_count,
            "steps": self.steps,
            "workers": self.workers,
        }
        for name, value in positives.items():
            if int(value) < 1:
                raise ConfigError(f"{name} must be positive, got {value}")
        if self.duration_s is not None and self.duration_s <= 0:
            raise ConfigError(f"duration_s must be positive, got {self.duration_s}")
        if self.mode not in ("strict", "complete"):
            raise ConfigError(f"mode must be strict or complete, got {self.mode!r}")
        if any(int(b) < 1 for b in self.bucket_counts):
            raise ConfigError("bucket counts must be positive")
        if self.index_path is not None and self.prefix_len is not None:
            raise ConfigError("prefix_len queries need the raw dataset, not a loaded index")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["bucket_counts"] = list(self.bucket_counts)
        return d


@dataclass
class ScenarioReport:
    scenario: str
    config: dict
    results: dict
    wall_clock: dict
    schema_version: str = SCHEMA_VERSION

    def to_machine(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "scenario": self.scenario,
            "config": self.config,
            "results": self.results,
            "wall_clock": self.wall_clock,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_machine(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [
            "lcpsearch scenario report",
            f"schema: {self.schema_version}",
            f"scenario: {self.scenario}",
        ]
        for section in ("config", "results", "wall_clock"):
            lines.append("")
            lines.append(f"[{section}]")
            lines.extend(_render_kv(getattr(self, section)))
        return "\n".join(lines) + "\n"


def _render_kv(data: dict, prefix: str = "") -> list[str]:
    lines = []
    for key in sorted(data):
        value = data[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            lines.extend(_render_kv(value, prefix=f"{name}."))
        elif isinstance(value, (list, tuple)):
            for i, item in enumerate(value):
                if isinstance(item, dict):
                    lines.extend(_render_kv(item, prefix=f"{name}.{i}."))
                else:
                    lines.append(f"{name}.{i}: {item}")
        elif isinstance(value, float):
            lines.append(f"{name}: {value:.6g}")
        else:
            lines.append(f"{name}: {value}")
    return lines


# ---------------------------------------------------------------------------
# Scenario execution
# ---------------------------------------------------------------------------

def _query_stream(index: TrieIndex, queries: np.ndarray, k: int, mode: str, workers: int):
    """Run every query once, fanned across workers; merge in worker-id order."""

    def run_worker(wid: int) -> tuple[WorkReport, list[float]]:
        report = index.new_work_report()
        latencies: list[float] = []
        for q in queries[wid::workers]:
            t0 = time.perf_counter()
            index.query(q, k, mode, work=report)
            latencies.append(time.perf_counter() - t0)
        return report, latencies

    t_start = time.perf_counter()
    if workers == 1:
        outputs = [run_worker(0)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(run_worker, range(workers)))
    elapsed = time.perf_counter() - t_start

    total = outputs[0][0]
    latencies = list(outputs[0][1])
    for report, lats in outputs[1:]:
        total = total.combine(report)
        latencies.extend(lats)
    return total, latencies, elapsed


def _determinism_check(run_bytes, count: int) -> dict:
    """Re-run a 1% sample of queries twice and byte-compare the results."""
    sample = list(range(0, count, 100)) or ([0] if count else [])
    ok = all(run_bytes(i) == run_bytes(i) for i in sample)
    return {"sampled_queries": len(sample), "byte_identical": bool(ok)}


def _load_or_build_index(config: ScenarioConfig) -> tuple[TrieIndex, Dataset | None]:
    if config.index_path is not None:
        import os

        from .storage import read_index

        if not os.path.exists(config.index_path):
            raise InvalidStateError(f"index snapshot not found: {config.index_path}")
        return read_index(config.index_path), None
    dataset = generate_dataset(
        config.n_items, config.seq_len, config.alphabet, config.seed, config.distribution
    )
    return build(dataset), dataset


def _scenario_sustained(config: ScenarioConfig) -> ScenarioReport:
    index, dataset = _load_or_build_index(config)
    meta = dataset if dataset is not None else index
    qseed = config.seed + 1
    if dataset is not None:
        queries = generate_queries(dataset, config.query_count, qseed, config.prefix_len)
    else:
        queries = generate_queries(
            Dataset.from_rows(np.zeros((0, index.length), dtype=np.uint16), index.sigma),
            config.query_count,
            qseed,
        )

    if config.duration_s is None:
        work, lats, elapsed = _query_stream(index, queries, config.k, config.mode, config.workers)
        volatile_counts = False
    else:
        # Duration-bound mode: cycle the query batch until the deadline.
        work = index.new_work_report()
        lats = []
        deadline = time.perf_counter() + config.duration_s
        t0 = time.perf_counter()
        i = 0
        while time.perf_counter() < deadline:
            q = queries[i % len(queries)]
            ts = time.perf_counter()
            index.query(q, config.k, config.mode, work=work)
            lats.append(time.perf_counter() - ts)
            i += 1
        elapsed = time.perf_counter() - t0
        volatile_counts = True

    stats = LatencyStats.from_samples(lats, elapsed)
    det = _determinism_check(
        lambda i: index.query(queries[i % len(queries)], config.k, config.mode).to_bytes(),
        len(queries),
    )
    results: dict = {"determinism": det, "index_nodes": index.node_count, "index_bytes": index.nbytes}
    wall: dict = {"latency": stats.as_dict(), "elapsed_s": elapsed}
    target = wall if volatile_counts else results
    target["work"] = work.as_dict()
    target["energy_work_units_per_query"] = work.energy_work_units / max(1, work.queries)
    return ScenarioReport("sustained", config.as_dict(), results, wall)


def _scenario_gnc(config: ScenarioConfig) -> ScenarioReport:
    # Historical patterns are pre-generated and static for the whole run; each
    # simulation step issues one top-k query for the current sensor reading.
    index, dataset = _load_or_build_index(config)
    if dataset is None:
        raise ConfigError("gnc scenario generates its own history; remove index_path")
    readings = generate_queries(dataset, config.steps, config.seed + 1, config.prefix_len)

    work = index.new_work_report()
    lats = []
    t0 = time.perf_counter()
    for step in range(config.steps):
        ts = time.perf_counter()
        index.query(readings[step], config.k, config.mode, work=work)
        lats.append(time.perf_counter() - ts)
    elapsed = time.perf_counter() - t0
    stats = LatencyStats.from_samples(lats, elapsed)

    det = _determinism_check(
        lambda i: index.query(readings[i], config.k, config.mode).to_bytes(),
        config.steps,
    )
    results = {
        "steps": config.steps,
        "work": work.as_dict(),
        "energy_work_units_per_step": work.energy_work_units / config.steps,
        "determinism": det,
    }
    wall = {
        "latency": stats.as_dict(),
        "elapsed_s": elapsed,
        "steps_per_second": config.steps / elapsed if elapsed > 0 else 0.0,
    }
    return ScenarioReport("gnc", config.as_dict(), results, wall)


def _scenario_tal_sweep(config: ScenarioConfig) -> ScenarioReport:
    dataset = generate_dataset(
        config.n_items, config.seq_len, config.alphabet, config.seed, config.distribution
    )
    queries = generate_queries(dataset, config.query_count, config.seed + 1, config.prefix_len)

    baseline = build_tal(dataset, 1)
    base_work = baseline.new_work_report()
    t0 = time.perf_counter()
    for q in queries:
        baseline.query(q, config.k, work=base_work)
    base_elapsed = time.perf_counter() - t0

    rows = []
    wall_rows = []
    for b in config.bucket_counts:
        engine = build_tal(dataset, int(b))
        work = engine.new_work_report()
        ts = time.perf_counter()
        for q in queries:
            engine.query(q, config.k, work=work)
        b_elapsed = time.perf_counter() - ts
        red = work_reduction(base_work, work)
        rows.append(
            {
                "bucket_count": int(b),
                "effective_buckets": engine.bucket_count,
                "bucket_depth": engine.bucket_depth,
                "work": work.as_dict(),
                "reduction": red.ratio if math.isfinite(red.ratio) else "inf",
                "tal_work_zero": red.tal_work_zero,
            }
        )
        wall_rows.append({"bucket_count": int(b), "elapsed_s": b_elapsed})

    sample_engine = build_tal(dataset, int(config.bucket_counts[-1]))
    det = _determinism_check(
        lambda i: sample_engine.query(queries[i], config.k)[0].to_bytes(),
        len(queries),
    )
    results = {
        "baseline_work": base_work.as_dict(),
        "sweep": rows,
        "determinism": det,
    }
    wall = {"baseline_elapsed_s": base_elapsed, "sweep": wall_rows}
    return ScenarioReport("tal_sweep", config.as_dict(), results, wall)


def _scenario_memo(config: ScenarioConfig) -> ScenarioReport:
    index, dataset = _load_or_build_index(config)
    if dataset is None:
        raise ConfigError("memo scenario generates its own dataset; remove index_path")
    queries = generate_queries(dataset, config.query_count, config.seed + 1, config.prefix_len)
    cache = QueryCache()

    cold_work = index.new_work_report()
    t0 = time.perf_counter()
    cold = [
        memoized_query(index, q, config.k, config.mode, cache, work=cold_work) for q in queries
    ]
    cold_elapsed = time.perf_counter() - t0

    hot_work = index.new_work_report()
    t1 = time.perf_counter()
    hot = [
        memoized_query(index, q, config.k, config.mode, cache, work=hot_work) for q in queries
    ]
    hot_elapsed = time.perf_counter() - t1

    identical = all(a.to_bytes() == b.to_bytes() for a, b in zip(cold, hot))
    results = {
        "cold_work": cold_work.as_dict(),
        "hot_work": hot_work.as_dict(),
        "hot_scan_work_zero": hot_work.symbols_compared == 0
        and hot_work.items_scanned == 0
        and hot_work.nodes_visited == 0,
        "hot_results_byte_identical": bool(identical),
        "cache_entries": len(cache),
    }
    wall = {
        "cold_elapsed_s": cold_elapsed,
        "hot_elapsed_s": hot_elapsed,
        "speedup": (cold_elapsed / hot_elapsed) if hot_elapsed > 0 else float("inf"),
    }
    return ScenarioReport("memo", config.as_dict(), results, wall)


_RUNNERS = {
    "sustained": _scenario_sustained,
    "gnc": _scenario_gnc,
    "tal_sweep": _scenario_tal_sweep,
    "memo": _scenario_memo,
}


def run_scenario(config: ScenarioConfig) -> ScenarioReport:
    """Execute one scenario and return its report."""
    return _RUNNERS[config.scenario](config)
