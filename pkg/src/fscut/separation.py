"""Forbidden-set cut separation.

For a parity check ``h`` and an odd ``S`` contained in ``supp(h)`` the
inequality ``sum_S x - sum_{supp(h) minus S} x <= |S| - 1`` holds for every
codeword.  Its violation at ``x`` equals ``1 - sum_supp x + sum_S (2x - 1)``,
so the best ``S`` for a fixed ``h`` takes every coordinate above one half and
fixes parity with the cheapest single toggle.

Sources of checks, tried in this order by :func:`orchestrate`:

``known-check``  rows of H plus checks already accepted into the pool
``rpc-heur-A``   rows of H re-diagonalised on the most fractional columns
``rpc-heur-B``   pairwise row sums ranked by an optimistic violation bound
``rpc-exact``    the separation IP, solved by a nested branch-and-bound
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional

import numpy as np

from . import gf2
from .bnb import BnbConfig, CutRow, SolveStats, frequency_allows, normalize_variant, solve_milp
from .gf2 import BudgetExceededError, Gf2Vector
from .models import CodeInstance, SeparationPoint, as_point, build_rpc_separation_model, fs_inequality_row

EPS_VIOL = 1e-6
BRUTE_FORCE_RANK = 12


@dataclass(frozen=True)
class FsCut:
    h: Gf2Vector
    S: tuple[int, ...]
    violation: float
    source: str

    def row(self, n: int | None = None):
        return fs_inequality_row(self.h, self.S, n)

    @property
    def key(self) -> tuple[int, tuple[int, ...]]:
        return self.h.bits, self.S


@dataclass
class SeparationOutcome:
    status: str  # cut-found | none-violated | limit-hit
    cuts: list[FsCut] = field(default_factory=list)
    best_violation: float = -math.inf
    separator_time: float = 0.0
    best_h: Optional[Gf2Vector] = None
    best_S: tuple[int, ...] = ()
    inner_status: str = ""
    inner_nodes: int = 0


class ParityCheckPool:
    """Original rows of H followed by accepted redundant checks, without duplicates."""

    def __init__(self, inst: CodeInstance):
        self.n = inst.n
        self.checks: list[Gf2Vector] = []
        self.dedup_index: set[int] = set()
        self.num_original = 0
        for r in inst.H.rows:
            self.add(Gf2Vector(r, self.n))
        self.num_original = len(self.checks)

    def add(self, h: Gf2Vector) -> bool:
        if h.bits == 0 or h.bits in self.dedup_index:
            return False
        self.dedup_index.add(h.bits)
        self.checks.append(h)
        return True

    def __len__(self) -> int:
        return len(self.checks)

    def __iter__(self):
        return iter(self.checks)


def _x(pt) -> np.ndarray:
    return as_point(pt).x_star


def fs_violation(h: Gf2Vector, S: Iterable[int], pt) -> float:
    """``-|S| + 1 + sum_S x - sum_{supp(h) minus S} x``; positive means violated."""
    x = _x(pt)
    S = tuple(sorted(set(S)))
    supp = h.support
    if not S or len(S) % 2 == 0:
        raise ValueError("S must be a nonempty odd subset")
    if not set(supp).issuperset(S):
        raise ValueError("S must be contained in the support of h")
    if len(x) != h.length:
        raise ValueError("point and check have different lengths")
    in_s = float(x[list(S)].sum())
    rest = float(x[list(supp)].sum()) - in_s
    return 1.0 - len(S) + in_s - rest


def best_odd_subset(h: Gf2Vector, x: np.ndarray) -> tuple[tuple[int, ...], float]:
    """Odd ``S`` in ``supp(h)`` maximising the violation, and that violation."""
    supp = h.support
    if not supp:
        raise ValueError("h must be nonzero")
    S = [j for j in supp if x[j] > 0.5]
    if len(S) % 2 == 0:
        # cheapest single toggle; strict < keeps the lowest index on ties
        best_j, best_cost = supp[0], math.inf
        for j in supp:
            cost = abs(2.0 * x[j] - 1.0)
            if cost < best_cost:
                best_j, best_cost = j, cost
        if best_j in S:
            S.remove(best_j)
        else:
            S.append(best_j)
            S.sort()
    S = tuple(S)
    return S, fs_violation(h, S, x)


def exact_fs_for_check(h: Gf2Vector, pt, eps_viol: float = EPS_VIOL,
                       source: str = "known-check") -> Optional[FsCut]:
    if h.bits == 0:
        raise ValueError("h must be nonzero")
    S, viol = best_odd_subset(h, _x(pt))
    if viol > eps_viol:
        return FsCut(h, S, viol, source)
    return None


def _outcome(cuts: list[FsCut], best: float, t0: float, max_cuts: int | None = None,
             best_pair=None) -> SeparationOutcome:
    cuts.sort(key=lambda c: -c.violation)
    if max_cuts is not None:
        cuts = cuts[:max_cuts]
    out = SeparationOutcome("cut-found" if cuts else "none-violated", cuts, best,
                            time.perf_counter() - t0)
    if cuts:
        out.best_h, out.best_S = cuts[0].h, cuts[0].S
    elif best_pair is not None:
        out.best_h, out.best_S = best_pair
    return out


def separate_known_checks(pool: ParityCheckPool, pt, eps_viol: float = EPS_VIOL,
                          max_cuts: int = 50) -> SeparationOutcome:
    t0 = time.perf_counter()
    x = _x(pt)
    cuts = []
    best = -math.inf
    for h in pool:
        S, v = best_odd_subset(h, x)
        best = max(best, v)
        if v > eps_viol:
            cuts.append(FsCut(h, S, v, "known-check"))
    return _outcome(cuts, best, t0, max_cuts)


def _fractionality_order(x: np.ndarray) -> list[int]:
    return sorted(range(len(x)), key=lambda j: (abs(x[j] - 0.5), j))


def rpc_heuristic_A(inst: CodeInstance, pt, eps_viol: float = EPS_VIOL,
                    int_tol: float = 1e-6) -> SeparationOutcome:
    """Eliminate H on its most fractional columns, then separate every resulting row.

    Pivoting on fractional columns leaves each such column covered by a single
    row, which tends to concentrate the row supports where the point is
    fractional and so exposes violated inequalities.
    """
    t0 = time.perf_counter()
    x = _x(pt)
    rows = list(inst.H.rows)
    used = [False] * len(rows)
    for j in _fractionality_order(x):
        if x[j] <= int_tol or x[j] >= 1 - int_tol:
            break
        bit = 1 << j
        p = next((i for i in range(len(rows)) if not used[i] and rows[i] & bit), None)
        if p is None:
            continue
        used[p] = True
        for i in range(len(rows)):
            if i != p and rows[i] & bit:
                rows[i] ^= rows[p]
    cuts = []
    best = -math.inf
    seen = set()
    for r in rows:
        if r == 0 or r in seen:
            continue
        seen.add(r)
        h = Gf2Vector(r, inst.n)
        S, v = best_odd_subset(h, x)
        best = max(best, v)
        if v > eps_viol:
            cuts.append(FsCut(h, S, v, "rpc-heur-A"))
    for c in cuts:
        _assert_dual(inst, c.h)
    return _outcome(cuts, best, t0)


def _violation_upper_bound(bits: int, dist: np.ndarray) -> float:
    """``1 - sum_supp min(x, 1 - x)``: the violation if parity came for free."""
    return 1.0 - float(sum(dist[j] for j in gf2.bit_indices(bits)))


def rpc_heuristic_B(inst: CodeInstance, pt, eps_viol: float = EPS_VIOL, K: int = 200) -> SeparationOutcome:
    """Test the K most promising sums of two overlapping rows of H."""
    t0 = time.perf_counter()
    if K <= 0:
        return SeparationOutcome("none-violated", [], -math.inf, time.perf_counter() - t0)
    x = _x(pt)
    dist = np.minimum(x, 1.0 - x)
    rows = inst.H.rows
    scored = []
    seen = set()
    for i, j in combinations(range(len(rows)), 2):
        if not rows[i] & rows[j]:
            continue
        comb = rows[i] ^ rows[j]
        if comb == 0 or comb in seen:
            continue
        seen.add(comb)
        scored.append((-_violation_upper_bound(comb, dist), i, j, comb))
    scored.sort()
    cuts = []
    best = -math.inf
    for _, _, _, comb in scored[:K]:
        h = Gf2Vector(comb, inst.n)
        S, v = best_odd_subset(h, x)
        best = max(best, v)
        if v > eps_viol:
            cuts.append(FsCut(h, S, v, "rpc-heur-B"))
    for c in cuts:
        _assert_dual(inst, c.h)
    return _outcome(cuts, best, t0)


def _assert_dual(inst: CodeInstance, h: Gf2Vector):
    for g in inst.generator_rows():
        if (g & h.bits).bit_count() & 1:
            raise AssertionError(f"check {h} is not a dual codeword")


def exact_rpc_separation(inst: CodeInstance, pt, mode: str = "full", eps_viol: float = EPS_VIOL,
                         time_limit: float = 10.0, node_limit: int = 10_000) -> SeparationOutcome:
    """Solve the separation IP by branch-and-bound (no cuts inside).

    ``full`` proves the most violated cut; ``early-stop`` returns at the first
    incumbent with positive violation.
    """
    if mode not in ("full", "early-stop"):
        raise ValueError(f"unknown mode {mode!r}")
    t0 = time.perf_counter()
    x = _x(pt)
    model = build_rpc_separation_model(inst, x)
    cfg = BnbConfig(time_limit=time_limit, node_limit=node_limit, violation_threshold=eps_viol,
                    early_stop_on_positive_objective=(mode == "early-stop"))
    res = solve_milp(model, cfg)
    elapsed = lambda: time.perf_counter() - t0  # noqa: E731
    if res.incumbent is None:
        # the IP always has a feasible point, so this only happens on a limit
        return SeparationOutcome("limit-hit", [], -math.inf, elapsed())
    hv = np.round(model.block("h", res.incumbent)).astype(int)
    sv = np.round(model.block("s", res.incumbent)).astype(int)
    h = Gf2Vector.from_iterable(hv)
    S = tuple(int(j) for j in np.flatnonzero(sv))
    viol = fs_violation(h, S, x)
    if viol > eps_viol:
        _assert_dual(inst, h)
        out = SeparationOutcome("cut-found", [FsCut(h, S, viol, "rpc-exact")], viol, elapsed(), h, S)
    elif res.status in ("optimal", "early-stopped"):
        out = SeparationOutcome("none-violated", [], viol, elapsed(), h, S)
    else:
        out = SeparationOutcome("limit-hit", [], viol, elapsed(), h, S)
    out.inner_status = res.status
    out.inner_nodes = res.stats.nodes_processed
    return out


def brute_force_best_fs_cut(inst: CodeInstance, pt, eps_viol: float = EPS_VIOL,
                            max_rank: int = BRUTE_FORCE_RANK) -> SeparationOutcome:
    """Best FS inequality over every nonzero dual codeword, by exhaustion."""
    t0 = time.perf_counter()
    x = _x(pt)
    if len(x) != inst.n:
        raise ValueError(f"point has length {len(x)}, expected {inst.n}")
    best = -math.inf
    best_pair = None
    try:
        duals = gf2.enumerate_dual_codewords(inst.H, budget=max_rank)
    except BudgetExceededError as exc:
        raise BudgetExceededError(f"brute-force separation refused: {exc}") from None
    for h in duals:
        if h.bits == 0:
            continue
        S, v = best_odd_subset(h, x)
        if v > best:
            best, best_pair = v, (h, S)
    cuts = []
    if best > eps_viol:
        cuts.append(FsCut(best_pair[0], best_pair[1], best, "oracle"))
    return _outcome(cuts, best, t0, best_pair=best_pair)


_STAGES = {
    "none": (),
    "zs": ("known-check",),
    "zse": ("known-check", "rpc-exact"),
    "zs+e": ("known-check", "rpc-heur-A", "rpc-exact"),
    "zs++e": ("known-check", "rpc-heur-A", "rpc-heur-B", "rpc-exact"),
}


def variant_stages(variant: str) -> tuple[str, ...]:
    return _STAGES[normalize_variant(variant)]


def orchestrate(variant: str, frequency: str, depth: int, inst: CodeInstance, pool: ParityCheckPool,
                pt, config: BnbConfig, stats: SolveStats | None = None) -> SeparationOutcome:
    """Run the stages of ``variant`` in order until one yields cuts.

    Nothing runs when ``depth`` fails the frequency gate.  Checks behind cuts
    from the redundant-check stages are added to ``pool``.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    t0 = time.perf_counter()
    stages = variant_stages(variant)
    if not stages or not frequency_allows(frequency, depth):
        return SeparationOutcome("none-violated", [], -math.inf, 0.0)
    eps = config.violation_threshold
    best = -math.inf
    limit = False
    for stage in stages:
        if stats is not None:
            stats.separator_calls_by_source[stage] += 1
        if stage == "known-check":
            out = separate_known_checks(pool, pt, eps, config.max_cuts_per_round)
        elif stage == "rpc-heur-A":
            out = rpc_heuristic_A(inst, pt, eps)
        elif stage == "rpc-heur-B":
            out = rpc_heuristic_B(inst, pt, eps, config.heuristic_b_budget)
        else:
            out = exact_rpc_separation(inst, pt, config.exact_mode, eps,
                                       config.exact_time_limit, config.exact_node_limit)
            limit = out.status == "limit-hit"
        best = max(best, out.best_violation)
        if out.cuts:
            cuts = out.cuts[:config.max_cuts_per_round]
            if stats is not None:
                stats.separator_successes_by_source[stage] += 1
            if stage != "known-check":
                for c in cuts:
                    pool.add(c.h)
            return SeparationOutcome("cut-found", cuts, best, time.perf_counter() - t0,
                                     cuts[0].h, cuts[0].S)
    return SeparationOutcome("limit-hit" if limit else "none-violated", [], best,
                             time.perf_counter() - t0)


class FsSeparator:
    """Cut callback for :func:`fscut.bnb.solve_milp` on models with an ``x`` block.

    Keeps the parity-check pool for one solve and a log of every emitted cut
    together with the point it was generated for.
    """

    def __init__(self, inst: CodeInstance, config: BnbConfig, x_block: range | None = None,
                 num_vars: int | None = None):
        self.inst = inst
        self.config = config
        self.pool = ParityCheckPool(inst)
        self.x_block = x_block if x_block is not None else range(0, inst.n)
        self.num_vars = num_vars
        self.emitted: list[tuple[FsCut, np.ndarray]] = []
        self._seen: set = set()

    def __call__(self, point, depth: int, stats: SolveStats) -> list[CutRow]:
        x = np.clip(np.asarray(point, dtype=float)[self.x_block.start:self.x_block.stop], 0.0, 1.0)
        out = orchestrate(self.config.separation_variant, self.config.separation_frequency, depth,
                          self.inst, self.pool, x, self.config, stats)
        nv = self.num_vars if self.num_vars is not None else len(point)
        rows = []
        for cut in out.cuts:
            if cut.key in self._seen:
                continue
            self._seen.add(cut.key)
            self.emitted.append((cut, x.copy()))
            a_x, sense, rhs = cut.row(self.inst.n)
            a = np.zeros(nv)
            a[self.x_block.start:self.x_block.stop] = a_x
            rows.append(CutRow(a, sense, rhs, cut.source))
        return rows
