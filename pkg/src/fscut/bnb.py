"""Branch-and-cut for mixed integer linear models.

Best-bound node selection with short depth-first plunges, most-fractional
branching, a rounding heuristic and an optional cut callback.  A single solve
is deterministic: identical inputs give identical node counts.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Protocol

import numpy as np

from .lp import LpModel, LpSolverError, solve_arrays

VARIANTS = ("none", "zs", "zse", "zs+e", "zs++e")
SOURCES = ("known-check", "rpc-heur-A", "rpc-heur-B", "rpc-exact")

_VARIANT_ALIASES = {"zs": "zs", "zse": "zse", "zs+e": "zs+e", "zs++e": "zs++e", "none": "none",
                    "default": "none"}


def normalize_variant(name: str) -> str:
    key = name.strip().lower()
    if key not in _VARIANT_ALIASES:
        raise ValueError(f"unknown separation variant {name!r}; expected one of {', '.join(VARIANTS)}")
    return _VARIANT_ALIASES[key]


def parse_frequency(freq: str) -> tuple[str, int]:
    """``'root'``, ``'always'`` or ``'every<k>'`` (bare ``'every'`` means k = 5)."""
    f = freq.strip().lower().replace("-", "").replace("_", "")
    if f in ("root", "rootonly"):
        return "root", 0
    if f == "always":
        return "always", 1
    if f.startswith("every"):
        rest = f[len("every"):]
        k = int(rest) if rest else 5
        if k < 1:
            raise ValueError("separation period must be positive")
        return "every", k
    raise ValueError(f"unknown separation frequency {freq!r}")


def frequency_allows(freq: str, depth: int) -> bool:
    kind, k = parse_frequency(freq)
    if kind == "root":
        return depth == 0
    if kind == "always":
        return True
    return depth % k == 0


class MilpModel:
    """An :class:`LpModel` plus integrality flags and named variable blocks.

    ``binary`` marks the variables declared binary; by default every integer
    variable with bounds [0, 1] counts.  Branching treats binaries first.
    """

    def __init__(self, lp: LpModel, integer, blocks: dict[str, range],
                 objective_is_integral: bool = False, binary=None):
        integer = np.asarray(integer, dtype=bool).reshape(-1)
        if integer.shape[0] != lp.num_vars:
            raise ValueError("integrality flags must match the variable count")
        seen = np.zeros(lp.num_vars, dtype=int)
        for name, rng in blocks.items():
            if rng.start < 0 or rng.stop > lp.num_vars:
                raise ValueError(f"block {name!r} out of range")
            seen[rng.start:rng.stop] += 1
        if np.any(seen != 1):
            raise ValueError("variable blocks must be disjoint and cover all variables")
        self.lp = lp
        self.integer = integer
        self.blocks = dict(blocks)
        self.objective_is_integral = objective_is_integral
        unit = integer & (lp.lower_bounds == 0) & (lp.upper_bounds == 1)
        if binary is None:
            self.binary = unit
        else:
            self.binary = np.asarray(binary, dtype=bool).reshape(-1)
            if self.binary.shape[0] != lp.num_vars or np.any(self.binary & ~unit):
                raise ValueError("declared binaries must be integer variables with bounds [0, 1]")

    @property
    def num_vars(self) -> int:
        return self.lp.num_vars

    def block(self, name: str, x) -> np.ndarray:
        return np.asarray(x)[self.blocks[name].start:self.blocks[name].stop]

    def count(self) -> tuple[int, int]:
        """(binary variables, other integer variables)."""
        nb = int(self.binary.sum())
        return nb, int(self.integer.sum()) - nb


@dataclass
class BnbConfig:
    time_limit: float = 60.0
    node_limit: int = 1_000_000
    integrality_tolerance: float = 1e-6
    violation_threshold: float = 1e-6
    node_selection: str = "best-bound"
    separation_variant: str = "none"
    separation_frequency: str = "always"
    early_stop_on_positive_objective: bool = False
    objective_is_integral: Optional[bool] = None
    random_seed: int = 0
    plunge_depth: int = 3
    max_cuts_per_round: int = 50
    max_cut_rounds: int = 20
    heuristic_b_budget: int = 200
    exact_mode: str = "full"
    exact_time_limit: float = 10.0
    exact_node_limit: int = 10_000
    record_trace: bool = False

    def __post_init__(self):
        if self.time_limit <= 0 or self.node_limit <= 0:
            raise ValueError("limits must be positive")
        if self.violation_threshold <= 0:
            raise ValueError("violation threshold must be positive")
        if self.node_selection not in ("best-bound", "depth-first"):
            raise ValueError(f"unknown node selection {self.node_selection!r}")
        if self.exact_mode not in ("full", "early-stop"):
            raise ValueError(f"unknown exact separation mode {self.exact_mode!r}")
        self.separation_variant = normalize_variant(self.separation_variant)
        parse_frequency(self.separation_frequency)


def _zero_counts() -> dict[str, int]:
    return {s: 0 for s in SOURCES}


@dataclass
class SolveStats:
    nodes_processed: int = 0
    wall_time: float = 0.0
    lp_iterations: int = 0
    cuts_added_by_source: dict[str, int] = field(default_factory=_zero_counts)
    separator_calls_by_source: dict[str, int] = field(default_factory=_zero_counts)
    separator_successes_by_source: dict[str, int] = field(default_factory=_zero_counts)
    final_gap_percent: float = math.inf
    max_depth: int = 0
    incumbents_found: int = 0
    dual_bound_trace: list[float] = field(default_factory=list)


@dataclass
class MilpResult:
    status: str  # optimal | feasible-limit-hit | limit-hit-no-incumbent | infeasible | early-stopped
    incumbent: Optional[np.ndarray]
    objective_value: float
    dual_bound: float
    stats: SolveStats


class CutRow(NamedTuple):
    coefficients: np.ndarray
    sense: str
    rhs: float
    source: str


class Separator(Protocol):
    def __call__(self, point: np.ndarray, depth: int, stats: SolveStats) -> list[CutRow]: ...


def gap_percent(primal: float, dual: float, sense: str = "min") -> float:
    """``(upper - lower) / lower * 100``; 0 when closed, inf without an incumbent."""
    if not math.isfinite(primal):
        return math.inf
    upper, lower = (primal, dual) if sense == "min" else (dual, primal)
    diff = upper - lower
    if diff <= 1e-9:
        return 0.0
    if lower == 0 or not math.isfinite(lower):
        return math.inf
    return diff / abs(lower) * 100.0


def node_bound(lp_value: float, config: BnbConfig, objective_is_integral: bool | None = None) -> float:
    """Bound used for pruning in a minimization; rounded up for integral objectives."""
    integral = config.objective_is_integral if objective_is_integral is None else objective_is_integral
    if integral:
        return float(math.ceil(lp_value - 1e-6))
    return lp_value


def select_branching_variable(lp_point, model: MilpModel, config: BnbConfig) -> int:
    """Most-fractional integer variable, lowest index on ties.

    Binary variables are preferred; general integers are only considered once
    every binary is integral.
    """
    x = np.asarray(lp_point, dtype=float)
    frac = x - np.floor(x)
    dist = np.minimum(frac, 1.0 - frac)
    tol = config.integrality_tolerance
    for mask in (model.binary, model.integer & ~model.binary):
        cand = mask & (dist > tol)
        if cand.any():
            score = np.where(cand, np.abs(frac - 0.5), np.inf)
            return int(np.argmin(score))
    raise ValueError("no fractional integer variable: the point is integral")


@dataclass
class _Node:
    lb: np.ndarray
    ub: np.ndarray
    depth: int
    bound: float


class _Solver:
    def __init__(self, model: MilpModel, config: BnbConfig, separator: Optional[Separator]):
        self.model = model
        self.config = config
        self.separator = separator
        lp = model.lp
        self.sign = 1.0 if lp.sense == "min" else -1.0
        self.c = self.sign * lp.objective
        self.offset = self.sign * lp.objective_offset
        self.integral_obj = (model.objective_is_integral if config.objective_is_integral is None
                             else config.objective_is_integral)
        self.base_A = lp.A
        self.base_senses = list(lp.senses)
        self.base_rhs = lp.rhs
        self.cut_rows: list[np.ndarray] = []
        self.cut_senses: list[str] = []
        self.cut_rhs: list[float] = []
        self.cut_keys: set[bytes] = set()
        self._stack_cache = None
        self.stats = SolveStats()
        self.inc_value = math.inf
        self.incumbent: Optional[np.ndarray] = None
        self.tried_roundings: set[bytes] = set()
        self.tol = config.integrality_tolerance

    # LP plumbing

    def _rows(self):
        if self._stack_cache is None:
            if self.cut_rows:
                A = np.vstack([self.base_A, np.array(self.cut_rows)])
                senses = self.base_senses + self.cut_senses
                rhs = np.concatenate([self.base_rhs, self.cut_rhs])
            else:
                A, senses, rhs = self.base_A, self.base_senses, self.base_rhs
            self._stack_cache = (A, senses, rhs)
        return self._stack_cache

    def _solve_lp(self, lb, ub):
        A, senses, rhs = self._rows()
        res = solve_arrays(self.c, A, senses, rhs, lb, ub)
        self.stats.lp_iterations += res.iteration_count
        if res.status == "optimal":
            res.objective_value = float(self.c @ res.primal_solution) + self.offset
        return res

    def _add_cut(self, row: CutRow, x) -> bool:
        a = np.asarray(row.coefficients, dtype=float)
        key = a.tobytes() + row.sense.encode() + np.float64(row.rhs).tobytes()
        if key in self.cut_keys:
            return False
        act = float(a @ x)
        viol = act - row.rhs if row.sense == "<=" else row.rhs - act if row.sense == ">=" else abs(act - row.rhs)
        if viol <= self.config.violation_threshold:
            return False
        self.cut_keys.add(key)
        self.cut_rows.append(a)
        self.cut_senses.append(row.sense)
        self.cut_rhs.append(float(row.rhs))
        self._stack_cache = None
        self.stats.cuts_added_by_source[row.source] = self.stats.cuts_added_by_source.get(row.source, 0) + 1
        return True

    # helpers

    def _is_integral(self, x) -> bool:
        xi = x[self.model.integer]
        return bool(np.all(np.abs(xi - np.round(xi)) <= self.tol))

    def _feasible(self, x) -> bool:
        lp = self.model.lp
        if np.any(x < lp.lower_bounds - 1e-6) or np.any(x > lp.upper_bounds + 1e-6):
            return False
        A, senses, rhs = self._rows()
        act = A @ x
        for a, s, b in zip(act, senses, rhs):
            if (s == "<=" and a > b + 1e-6) or (s == ">=" and a < b - 1e-6) or (s == "=" and abs(a - b) > 1e-6):
                return False
        return True

    def _offer(self, x) -> bool:
        x = x.copy()
        x[self.model.integer] = np.round(x[self.model.integer])
        if not self._feasible(x):
            return False
        val = float(self.c @ x) + self.offset
        if val < self.inc_value - 1e-9:
            self.inc_value = val
            self.incumbent = x
            self.stats.incumbents_found += 1
            return True
        return False

    def _bound(self, lp_value: float) -> float:
        return node_bound(lp_value, self.config, self.integral_obj)

    def _prunable(self, bound: float) -> bool:
        return bound >= self.inc_value - 1e-9

    def _early_stop_hit(self) -> bool:
        if not self.config.early_stop_on_positive_objective or self.incumbent is None:
            return False
        return -self.inc_value > self.config.violation_threshold

    def _rounding_heuristic(self, x):
        """Round the binaries, then recover the other variables from a reduced LP."""
        model = self.model
        rounded = np.where(x[model.binary] >= 0.5, 1.0, 0.0)
        key = rounded.tobytes()
        if key in self.tried_roundings:
            return
        self.tried_roundings.add(key)
        A, senses, rhs = self._rows()
        rest = ~model.binary
        rhs_r = rhs - A[:, model.binary] @ rounded
        A_r = A[:, rest]
        touched = np.any(A_r != 0, axis=1)
        for b, s, ok in zip(rhs_r, senses, touched):
            if ok:
                continue
            if (s == "<=" and b < -1e-9) or (s == ">=" and b > 1e-9) or (s == "=" and abs(b) > 1e-9):
                return
        cand = np.empty_like(x)
        cand[model.binary] = rounded
        if rest.any():
            keep = np.flatnonzero(touched)
            res = solve_arrays(self.c[rest], A_r[keep], [senses[i] for i in keep], rhs_r[keep],
                               model.lp.lower_bounds[rest], model.lp.upper_bounds[rest])
            self.stats.lp_iterations += res.iteration_count
            if res.status != "optimal":
                return
            cand[rest] = res.primal_solution
        if self._is_integral(cand):
            self._offer(cand)

    # main loop

    def _process(self, node: _Node):
        """Solve one node; return children (preferred first) or an empty list."""
        st = self.stats
        st.nodes_processed += 1
        st.max_depth = max(st.max_depth, node.depth)
        res = self._solve_lp(node.lb, node.ub)
        if res.status == "infeasible":
            return []
        if res.status == "unbounded":
            raise LpSolverError("LP relaxation is unbounded")
        x = res.primal_solution
        bound = self._bound(res.objective_value)
        if self._prunable(bound):
            return []
        if self._is_integral(x):
            self._offer(x)
            return []

        if self.separator is not None:
            for _ in range(self.config.max_cut_rounds):
                rows = self.separator(x, node.depth, st)
                added = sum(self._add_cut(r, x) for r in rows)
                if not added:
                    break
                res = self._solve_lp(node.lb, node.ub)
                if res.status != "optimal":
                    return []
                x = res.primal_solution
                bound = self._bound(res.objective_value)
                if self._prunable(bound):
                    return []
                if self._is_integral(x):
                    self._offer(x)
                    return []

        self._rounding_heuristic(x)
        if self._early_stop_hit() or self._prunable(bound):
            return []

        j = select_branching_variable(x, self.model, self.config)
        v = x[j]
        down = _Node(node.lb, node.ub.copy(), node.depth + 1, bound)
        down.ub[j] = math.floor(v)
        up = _Node(node.lb.copy(), node.ub, node.depth + 1, bound)
        up.lb[j] = math.ceil(v)
        return [up, down] if v - math.floor(v) >= 0.5 else [down, up]

    def run(self) -> MilpResult:
        cfg = self.config
        start = time.perf_counter()
        lp = self.model.lp
        root = _Node(lp.lower_bounds.copy(), lp.upper_bounds.copy(), 0, -math.inf)
        heap: list = []
        stack: list[_Node] = []
        counter = 0
        plunge: Optional[_Node] = None
        plunge_len = 0
        best_first = cfg.node_selection == "best-bound"
        if best_first:
            heap.append((root.bound, 0, root))
        else:
            stack.append(root)
        limit_hit = False
        early = False

        def open_bound():
            vals = [n.bound for n in stack]
            if heap:
                vals.append(heap[0][0])
            if plunge is not None:
                vals.append(plunge.bound)
            return min(vals) if vals else math.inf

        while True:
            if plunge is not None:
                node, plunge = plunge, None
            elif best_first and heap:
                node = heapq.heappop(heap)[2]
            elif not best_first and stack:
                node = stack.pop()
            else:
                break
            if self._prunable(node.bound):
                continue
            if (self.stats.nodes_processed >= cfg.node_limit
                    or time.perf_counter() - start >= cfg.time_limit):
                # put it back so the dual bound accounts for it
                if best_first:
                    heapq.heappush(heap, (node.bound, -1, node))
                else:
                    stack.append(node)
                limit_hit = True
                break
            children = self._process(node)
            if cfg.record_trace:
                cur = min(open_bound(), *(c.bound for c in children)) if children else open_bound()
                self.stats.dual_bound_trace.append(self.sign * min(cur, self.inc_value))
            if self._early_stop_hit():
                early = True
                break
            if not children:
                plunge_len = 0
                continue
            if best_first:
                first, second = children
                counter += 1
                heapq.heappush(heap, (second.bound, counter, second))
                if plunge_len < cfg.plunge_depth:
                    plunge = first
                    plunge_len += 1
                else:
                    counter += 1
                    heapq.heappush(heap, (first.bound, counter, first))
                    plunge_len = 0
            else:
                stack.append(children[1])
                stack.append(children[0])

        st = self.stats
        st.wall_time = time.perf_counter() - start
        remaining = open_bound()
        if not limit_hit and not early:
            remaining = math.inf
        dual_min = min(remaining, self.inc_value)
        if self.incumbent is None:
            if limit_hit:
                status = "limit-hit-no-incumbent"
            else:
                status = "infeasible"
        elif early:
            status = "early-stopped"
        elif limit_hit and remaining < self.inc_value - 1e-9:
            status = "feasible-limit-hit"
        else:
            status = "optimal"
            dual_min = self.inc_value
        obj = self.sign * self.inc_value if self.incumbent is not None else math.nan
        dual = self.sign * dual_min
        st.final_gap_percent = gap_percent(obj if self.incumbent is not None else math.inf, dual, lp.sense)
        return MilpResult(status, self.incumbent, obj, dual, st)


def solve_milp(model: MilpModel, config: BnbConfig | None = None,
               separator: Optional[Callable] = None) -> MilpResult:
    """Branch-and-cut on ``model``; ``separator`` is called at fractional nodes."""
    return _Solver(model, config or BnbConfig(), separator).run()
