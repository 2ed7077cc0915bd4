"""Benchmark matrix over (instance, variant, frequency) with a summary table.

CSV columns are fixed by :data:`CSV_COLUMNS`.  Wall-clock time is left out of
the CSV unless ``with_timing`` is set, so two runs with the same seed write
byte-identical files as long as no run is cut short by the time limit.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .bnb import SOURCES, BnbConfig, normalize_variant, parse_frequency
from .gf2 import Gf2Matrix
from .instances import read_instance
from .models import normalize_instance
from .solver import solve_min_distance

CSV_COLUMNS = (
    "instance", "variant", "frequency", "status", "objective", "dual_bound", "gap_percent", "nodes",
    *(f"cuts_{s}" for s in SOURCES), *(f"calls_{s}" for s in SOURCES), "seed",
)
INSTANCE_SUFFIXES = (".alist", ".dense", ".mat")


@dataclass
class BenchRecord:
    instance: str
    variant: str
    frequency: str
    status: str
    objective: float
    dual_bound: float
    gap_percent: float
    nodes: int
    time_seconds: float
    cuts_by_source: dict[str, int] = field(default_factory=dict)
    separator_calls_by_source: dict[str, int] = field(default_factory=dict)
    seed: int = 0

    @property
    def solved(self) -> bool:
        return self.status == "optimal" and self.gap_percent == 0.0

    def csv_row(self, with_timing: bool = False) -> list[str]:
        row = [self.instance, self.variant, self.frequency, self.status, _fmt(self.objective),
               _fmt(self.dual_bound), _fmt(self.gap_percent), str(self.nodes)]
        row += [str(self.cuts_by_source.get(s, 0)) for s in SOURCES]
        row += [str(self.separator_calls_by_source.get(s, 0)) for s in SOURCES]
        row.append(str(self.seed))
        if with_timing:
            row.append(f"{self.time_seconds:.3f}")
        return row


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return f"{v:.6g}"


def shifted_geom_mean(values: Iterable[float], shift: float) -> float:
    """``exp(mean(ln(v + shift))) - shift``."""
    v = np.asarray(list(values), dtype=float)
    if v.size == 0:
        raise ValueError("shifted geometric mean of an empty sequence")
    if shift < 0 or np.any(v < 0):
        raise ValueError("values and shift must be nonnegative")
    if shift == 0 and np.any(v == 0):
        return 0.0
    return float(np.exp(np.mean(np.log(v + shift))) - shift)


def run_cell(name: str, H: Gf2Matrix, variant: str, frequency: str, config: BnbConfig) -> BenchRecord:
    inst = normalize_instance(H, name)
    cfg = BnbConfig(**{**config.__dict__, "separation_variant": variant, "separation_frequency": frequency})
    res, _ = solve_min_distance(inst, cfg)
    st = res.stats
    return BenchRecord(name, cfg.separation_variant, frequency, res.status, res.objective_value,
                       res.dual_bound, st.final_gap_percent, st.nodes_processed, st.wall_time,
                       dict(st.cuts_added_by_source), dict(st.separator_calls_by_source), cfg.random_seed)


def _run_cell_args(args) -> BenchRecord:
    return run_cell(*args)


def load_instance_dir(directory: str | os.PathLike) -> list[tuple[str, Gf2Matrix]]:
    d = Path(directory)
    if not d.is_dir():
        raise ValueError(f"{d} is not a directory")
    files = sorted(p for p in d.iterdir() if p.suffix.lower() in INSTANCE_SUFFIXES)
    if not files:
        raise ValueError(f"no instance files ({', '.join(INSTANCE_SUFFIXES)}) in {d}")
    return [(p.stem, read_instance(p)) for p in files]


def run_matrix(instances: Sequence[tuple[str, Gf2Matrix]], variants: Sequence[str],
               frequencies: Sequence[str], config: BnbConfig, workers: int = 1) -> list[BenchRecord]:
    """One record per cell, in canonical (instance, variant, frequency) order.

    The ``none`` variant ignores the frequency, so it is run once with ``always``.
    """
    if not instances:
        raise ValueError("no instances to benchmark")
    for f in frequencies:
        parse_frequency(f)
    cells = []
    for name, H in instances:
        for v in variants:
            v = normalize_variant(v)
            for f in (["always"] if v == "none" else frequencies):
                cells.append((name, H, v, f, config))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_cell_args, cells))
    else:
        records = [run_cell(*c) for c in cells]
    return records


def write_csv(records: Sequence[BenchRecord], with_timing: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(CSV_COLUMNS) + (["time_seconds"] if with_timing else []))
    for r in records:
        w.writerow(r.csv_row(with_timing))
    return buf.getvalue()


@dataclass
class SummaryRow:
    variant: str
    frequency: str
    instances: int
    mean_gap: float
    no_incumbent: int
    solved: int
    sgm_nodes: float
    sgm_time: float


def summarize(records: Sequence[BenchRecord]) -> list[SummaryRow]:
    """Per (variant, frequency): mean gap over rows with a finite gap, solved count,
    shifted geometric means of nodes (shift 100) and time (shift 10)."""
    groups: dict[tuple[str, str], list[BenchRecord]] = {}
    for r in records:
        groups.setdefault((r.variant, r.frequency), []).append(r)
    out = []
    for (v, f), rs in groups.items():
        gaps = [r.gap_percent for r in rs if math.isfinite(r.gap_percent)]
        out.append(SummaryRow(
            v, f, len(rs),
            float(np.mean(gaps)) if gaps else math.inf,
            len(rs) - len(gaps),
            sum(r.solved for r in rs),
            shifted_geom_mean([r.nodes for r in rs], 100.0),
            shifted_geom_mean([r.time_seconds for r in rs], 10.0),
        ))
    return out


def format_summary(rows: Sequence[SummaryRow]) -> str:
    lines = [f"{'variant':<8} {'freq':<8} {'gap(%)':>8} {'solved':>8} {'nodes':>10} {'time(s)':>9}"]
    footnote = False
    for s in rows:
        gap = "inf" if math.isinf(s.mean_gap) else f"{s.mean_gap:.2f}"
        if s.no_incumbent:
            gap += "*"
            footnote = True
        lines.append(f"{s.variant:<8} {s.frequency:<8} {gap:>8} {s.solved:>4}/{s.instances:<3} "
                     f"{s.sgm_nodes:>10.1f} {s.sgm_time:>9.2f}")
    if footnote:
        lines.append("* some runs ended without an incumbent; their infinite gap is left out of the mean")
    return "\n".join(lines)
