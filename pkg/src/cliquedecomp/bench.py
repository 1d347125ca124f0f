"""Benchmark harness: run solver configurations over a corpus directory.

A corpus is a directory holding instance files, ground-truth sidecars, and a
``manifest.csv`` naming them (written by the generator).  The harness runs
every (instance, configuration) pair, emits one CSV record each, and prints
per-k summary tables: median ratios (with quartiles) of LP runs, kernel
size, and wall time of each configuration against the first one, plus
timeout counts.  Parallelism with --jobs spreads whole instances across
processes; a single solve is never split, so its counters stay exact.
"""

from __future__ import annotations

import concurrent.futures
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .io_formats import (
    BENCH_FIELDS,
    parse_instance,
    parse_manifest,
    write_bench_csv,
)
from .pipeline import solve_instance
from .search import SolveConfig

__all__ = [
    "BenchConfig",
    "PRESETS",
    "parse_config_list",
    "run_bench",
    "summarize",
]


@dataclass(frozen=True)
class BenchConfig:
    """One named solver configuration for the harness."""

    name: str
    kernel: str = "decaf"
    ordering: str = "push_front"
    srule1: bool = True
    srule2: bool = True
    symmetry: bool = False
    lp_mode: str = "rational"

    def solve_config(self, timeout: float | None) -> SolveConfig:
        return SolveConfig(
            ordering=self.ordering,
            srule1=self.srule1,
            srule2=self.srule2,
            column_symmetry_breaking=self.symmetry,
            lp_mode=self.lp_mode,
            timeout=timeout,
        )

    @property
    def srules_label(self) -> str:
        rules = []
        if self.ordering == "push_front":
            rules.append("0")
        if self.srule1:
            rules.append("1")
        if self.srule2:
            rules.append("2")
        return "".join(rules) or "none"

    @property
    def name_key(self) -> tuple:
        return (self.kernel, self.ordering, self.srules_label)


PRESETS = {
    "decaf": BenchConfig(name="decaf", kernel="decaf", ordering="push_front",
                         srule1=True, srule2=True),
    "cricca": BenchConfig(name="cricca", kernel="cricca", ordering="arbitrary",
                          srule1=False, srule2=False),
    "cricca-star": BenchConfig(name="cricca-star", kernel="cricca", ordering="push_front",
                               srule1=False, srule2=False),
}

_SRULE_FLAGS = {
    "none": ("arbitrary", False, False),
    "0": ("push_front", False, False),
    "01": ("push_front", True, False),
    "012": ("push_front", True, True),
}


def parse_config_list(spec: str) -> list[BenchConfig]:
    """Parse a comma-separated list of presets or key=value bundles.

    A bundle looks like ``kernel=decaf;order=push_back;srules=01;symmetry=on``
    with any subset of keys; srules picks the rule set (its "0" component
    sets the default ordering, which an explicit order= overrides).
    """
    configs = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if part in PRESETS:
            configs.append(PRESETS[part])
            continue
        kernel, ordering, srule1, srule2, symmetry = "decaf", None, True, True, False
        lp_mode = "rational"
        for item in part.split(";"):
            if "=" not in item:
                raise ValueError(f"bad config item {item!r} in {part!r}")
            key, value = item.split("=", 1)
            key, value = key.strip(), value.strip()
            if key == "kernel":
                kernel = value
            elif key == "order":
                ordering = value
            elif key == "srules":
                if value not in _SRULE_FLAGS:
                    raise ValueError(f"bad srules value {value!r}")
                default_order, srule1, srule2 = _SRULE_FLAGS[value]
                if ordering is None:
                    ordering = default_order
            elif key == "symmetry":
                symmetry = value in ("on", "true", "1", "yes")
            elif key == "lp":
                lp_mode = value
            else:
                raise ValueError(f"unknown config key {key!r}")
        configs.append(
            BenchConfig(
                name=part,
                kernel=kernel,
                ordering=ordering or "push_front",
                srule1=srule1,
                srule2=srule2,
                symmetry=symmetry,
                lp_mode=lp_mode,
            )
        )
    if not configs:
        raise ValueError("empty configuration list")
    return configs


def _run_one(args) -> dict:
    row, config, timeout = args
    record = {
        "instance_id": row["instance_id"],
        "n": row["n"],
        "m": row["m"],
        "k_true": row["k_true"],
        "k_in": row["k_in"],
        "kernel_variant": config.kernel,
        "n_kernel": "",
        "ordering": config.ordering,
        "srules": config.srules_label,
        "lp_runs": 0,
        "signatures_tested": 0,
        "backtracks": 0,
        "outcome": "error",
        "wall_ms": 0,
    }
    try:
        with open(row["file"], encoding="utf-8") as fh:
            graph, annotations = parse_instance(fh.read())
        result = solve_instance(
            graph,
            int(row["k_in"]),
            annotations=annotations,
            kernel_variant=config.kernel,
            config=config.solve_config(timeout),
        )
        record.update(
            n_kernel=result.n_kernel,
            lp_runs=result.stats.lp_runs,
            signatures_tested=result.stats.signatures_tested,
            backtracks=result.stats.backtracks,
            outcome=result.outcome,
            wall_ms=int(result.wall_time * 1000),
        )
        expected = row.get("expected", "unlabeled")
        if expected in ("yes", "no") and result.outcome in ("yes", "no"):
            if expected != result.outcome:
                record["outcome"] = f"mismatch({result.outcome}!={expected})"
    except Exception as exc:  # keep the harness alive on per-instance failures
        record["outcome"] = "error"
        record["error"] = f"{type(exc).__name__}: {exc}"
    return record


def run_bench(
    corpus_dir: str,
    configs: Sequence[BenchConfig],
    timeout: float | None = None,
    jobs: int = 1,
) -> list[dict]:
    """One record per (manifest row, configuration), in deterministic order."""
    manifest_path = os.path.join(corpus_dir, "manifest.csv")
    with open(manifest_path, encoding="utf-8") as fh:
        rows = parse_manifest(fh.read())
    for row in rows:
        if not os.path.isabs(row["file"]):
            row["file"] = os.path.join(corpus_dir, row["file"])
    tasks = [(row, config, timeout) for row in rows for config in configs]
    if jobs <= 1:
        records = [_run_one(task) for task in tasks]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_one, tasks))
    return records


def _quartiles(values: list[Fraction]) -> tuple[Fraction, Fraction, Fraction]:
    ordered = sorted(values)
    n = len(ordered)

    def at(p: Fraction) -> Fraction:
        if n == 1:
            return ordered[0]
        idx = p * (n - 1)
        lo = int(idx)
        frac = idx - lo
        if lo + 1 >= n:
            return ordered[-1]
        return ordered[lo] * (1 - frac) + ordered[lo + 1] * frac

    return at(Fraction(1, 4)), at(Fraction(1, 2)), at(Fraction(3, 4))


def summarize(records: Sequence[dict], configs: Sequence[BenchConfig]) -> str:
    """Per-k median/quartile ratios of every configuration against the first."""
    base = configs[0]
    by_key: dict[tuple[str, str], dict] = {}
    for record in records:
        by_key[(record["instance_id"], str(record["k_in"]), record_config_name(record))] = record

    lines = [f"baseline: {base.name}"]
    k_values = sorted({int(r["k_true"]) for r in records})
    for metric, field_name in (("lp-run", "lp_runs"), ("kernel-size", "n_kernel"),
                               ("wall-time", "wall_ms")):
        lines.append(f"\n{metric} ratio vs {base.name} (q1/median/q3):")
        for config in configs[1:]:
            for k in k_values:
                ratios: list[Fraction] = []
                for record in records:
                    if record_config_name(record) != config.name_key:
                        continue
                    if int(record["k_true"]) != k:
                        continue
                    other = by_key.get(
                        (record["instance_id"], str(record["k_in"]), base.name_key)
                    )
                    if other is None:
                        continue
                    a = _as_int(record.get(field_name))
                    b = _as_int(other.get(field_name))
                    if a is None or b is None or b == 0 or a == 0:
                        continue
                    ratios.append(Fraction(a, b))
                if ratios:
                    q1, q2, q3 = _quartiles(ratios)
                    lines.append(
                        f"  {config.name:<40} k={k}: "
                        f"{float(q1):.4g} / {float(q2):.4g} / {float(q3):.4g}  (n={len(ratios)})"
                    )
    lines.append("\ntimeouts per configuration and k:")
    for config in configs:
        counts = []
        for k in k_values:
            timeouts = sum(
                1
                for r in records
                if record_config_name(r) == config.name_key
                and int(r["k_true"]) == k
                and r["outcome"] == "timeout"
            )
            counts.append(f"k={k}:{timeouts}")
        lines.append(f"  {config.name:<40} " + " ".join(counts))
    mismatches = [r for r in records if str(r["outcome"]).startswith("mismatch")]
    errors = [r for r in records if r["outcome"] == "error"]
    lines.append(f"\nmismatches vs expected labels: {len(mismatches)}; errors: {len(errors)}")
    return "\n".join(lines) + "\n"


def record_config_name(record: dict) -> tuple:
    return (record["kernel_variant"], record["ordering"], record["srules"])


def _as_int(value) -> int | None:
    try:
        return int(value)
    except (TypeError, ValueError):
        return None
