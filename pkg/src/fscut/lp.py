"""Dense bounded-variable primal simplex.

Every row gets a slack (``<=``: ``+s``, ``>=``: ``-s``) so the working system
is ``A y = b`` with ``l <= y <= u``.  Phase 1 starts from artificial
variables with nonbasic structurals at their lower bounds; phase 2 keeps the
artificials in the tableau fixed at zero.  Dantzig pricing switches to Bland's
rule after a run of degenerate pivots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-10
PHASE1_TOL = 1e-8
DEGENERATE_STEPS_BEFORE_BLAND = 50
REINVERT_EVERY = 100

SENSES = ("<=", "=", ">=")


class LpSolverError(RuntimeError):
    """Numerical failure or iteration limit; distinct from infeasibility."""


@dataclass(frozen=True, eq=False)
class LpModel:
    """``min/max c^T x + offset`` subject to ``A x (senses) rhs`` and ``lb <= x <= ub``."""

    objective: np.ndarray
    A: np.ndarray
    senses: tuple[str, ...]
    rhs: np.ndarray
    lower_bounds: np.ndarray
    upper_bounds: np.ndarray
    sense: str = "min"
    objective_offset: float = 0.0
    var_names: tuple[str, ...] | None = None

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float)
        n = c.shape[0]
        A = np.asarray(self.A, dtype=float).reshape(-1, n)
        rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        lb = np.asarray(self.lower_bounds, dtype=float).reshape(-1)
        ub = np.asarray(self.upper_bounds, dtype=float).reshape(-1)
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "lower_bounds", lb)
        object.__setattr__(self, "upper_bounds", ub)
        object.__setattr__(self, "senses", tuple(self.senses))
        if self.sense not in ("min", "max"):
            raise ValueError(f"objective sense must be 'min' or 'max', got {self.sense!r}")
        if A.shape[0] != len(self.senses) or A.shape[0] != rhs.shape[0]:
            raise ValueError("rows, senses and rhs disagree in length")
        if lb.shape[0] != n or ub.shape[0] != n:
            raise ValueError("bound vectors must match the variable count")
        bad = [s for s in self.senses if s not in SENSES]
        if bad:
            raise ValueError(f"unknown row relation {bad[0]!r}")
        if np.any(lb > ub):
            raise ValueError("lower bound exceeds upper bound")
        if np.any(~np.isfinite(lb)):
            raise ValueError("lower bounds must be finite")
        if self.var_names is not None and len(self.var_names) != n:
            raise ValueError("var_names length mismatch")

    @property
    def num_vars(self) -> int:
        return self.objective.shape[0]

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]

    @property
    def rows(self) -> list[tuple[np.ndarray, str, float]]:
        return [(self.A[i], self.senses[i], float(self.rhs[i])) for i in range(self.num_rows)]

    def with_bounds(self, lower_bounds, upper_bounds) -> "LpModel":
        return replace(self, lower_bounds=lower_bounds, upper_bounds=upper_bounds)

    def objective_at(self, x) -> float:
        return float(self.objective @ np.asarray(x, dtype=float)) + self.objective_offset


@dataclass
class LpResult:
    status: str  # optimal | infeasible | unbounded
    primal_solution: np.ndarray | None = None
    objective_value: float = math.nan
    iteration_count: int = 0
    basis: tuple[int, ...] | None = field(default=None, repr=False)


def append_row(model: LpModel, coefficients, sense: str, rhs: float) -> LpModel:
    """Return a copy of ``model`` with one more row; existing rows are untouched."""
    a = np.asarray(coefficients, dtype=float).reshape(-1)
    if a.shape[0] != model.num_vars:
        raise ValueError(f"row has {a.shape[0]} coefficients, model has {model.num_vars} variables")
    if sense not in SENSES:
        raise ValueError(f"unknown row relation {sense!r}")
    return replace(
        model,
        A=np.vstack([model.A, a[None, :]]),
        senses=model.senses + (sense,),
        rhs=np.append(model.rhs, float(rhs)),
    )


def solve_lp(model: LpModel, max_iterations: int | None = None) -> LpResult:
    c = model.objective if model.sense == "min" else -model.objective
    res = solve_arrays(
        c, model.A, model.senses, model.rhs, model.lower_bounds, model.upper_bounds,
        max_iterations=max_iterations,
    )
    if res.status == "optimal":
        res.objective_value = model.objective_at(res.primal_solution)
    return res


def solve_arrays(c, A, senses, rhs, lb, ub, max_iterations=None) -> LpResult:
    """Minimize ``c^T x`` over the given rows and bounds (no offset handling)."""
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    lb = np.asarray(lb, dtype=float)
    ub = np.asarray(ub, dtype=float)
    n = c.shape[0]
    m = A.shape[0]
    if np.any(lb > ub + FEAS_TOL):
        return LpResult("infeasible")

    slack_sign = np.array([1.0 if s == "<=" else -1.0 if s == ">=" else 0.0 for s in senses])
    slack_rows = np.flatnonzero(slack_sign)
    ns = slack_rows.shape[0]
    N = n + ns
    x0 = lb.copy()
    resid = rhs - A @ x0
    # crash basis: a slack is basic wherever it can absorb the residual
    slack_ok = (slack_sign[slack_rows] * resid[slack_rows]) >= 0
    art_rows = np.setdiff1d(np.arange(m), slack_rows[slack_ok])
    na = art_rows.shape[0]

    full = np.zeros((m, N + na))
    full[:, :n] = A
    full[slack_rows, n + np.arange(ns)] = slack_sign[slack_rows]
    sigma = np.where(resid[art_rows] >= 0, 1.0, -1.0)
    full[art_rows, N + np.arange(na)] = sigma

    lo = np.concatenate([lb, np.zeros(ns), np.zeros(na)])
    hi = np.concatenate([ub, np.full(ns, np.inf), np.full(na, np.inf)])
    x = np.concatenate([x0, np.zeros(ns), np.abs(resid[art_rows])])
    basis = [0] * m
    for k, i in enumerate(slack_rows):
        if slack_ok[k]:
            basis[i] = n + k
            x[n + k] = slack_sign[i] * resid[i]
    for k, i in enumerate(art_rows):
        basis[i] = N + k

    simplex = _Simplex(full, rhs, lo, hi, x, basis, max_iterations)
    if na:
        cost1 = np.concatenate([np.zeros(N), np.ones(na)])
        simplex.run(cost1)
        if simplex.x[N:].sum() > PHASE1_TOL * max(1.0, float(np.abs(rhs).max(initial=0.0))):
            return LpResult("infeasible", iteration_count=simplex.iterations)
        simplex.drop_artificials(N)
    cost2 = np.concatenate([c, np.zeros(simplex.ncols - n)])
    status = simplex.run(cost2)
    if status == "unbounded":
        return LpResult("unbounded", iteration_count=simplex.iterations)

    simplex.refresh(values_only=True)
    sol = np.clip(simplex.x[:n], lb, ub)
    return LpResult(
        "optimal",
        primal_solution=sol,
        objective_value=float(c @ sol),
        iteration_count=simplex.iterations,
        basis=tuple(simplex.basis),
    )


class _Simplex:
    """Tableau state shared by both phases.

    The starting basis consists of unit columns (slacks and artificials with
    coefficient +1 or -1), so its inverse is diagonal.
    """

    def __init__(self, full, rhs, lo, hi, x, basis, max_iterations):
        self.full = full
        self.rhs = rhs
        self.lo = lo
        self.hi = hi
        self.x = x
        self.basis = list(basis)
        self.m, self.ncols = full.shape
        if self.m:
            diag = full[np.arange(self.m), np.array(self.basis, dtype=int)]
            self.T = full / diag[:, None]
        else:
            self.T = full.copy()
        self.iterations = 0
        self.max_iterations = max_iterations or 50 * (self.m + self.ncols) + 1000
        self.is_basic = np.zeros(self.ncols, dtype=bool)
        self.is_basic[self.basis] = True
        self._since_reinvert = 0

    def drop_artificials(self, first_art: int):
        """Fix basic artificials at zero and delete the nonbasic ones."""
        keep = np.ones(self.ncols, dtype=bool)
        keep[first_art:] = self.is_basic[first_art:]
        self.hi[first_art:] = 0.0
        self.x[first_art:] = 0.0
        remap = np.cumsum(keep) - 1
        self.full = self.full[:, keep]
        self.T = self.T[:, keep]
        self.lo = self.lo[keep]
        self.hi = self.hi[keep]
        self.x = self.x[keep]
        self.is_basic = self.is_basic[keep]
        self.basis = [int(remap[b]) for b in self.basis]
        self.ncols = self.full.shape[1]
        self.refresh()

    def refresh(self, values_only: bool = False):
        """Recompute basic values (and the tableau) from the original columns."""
        if self.m == 0:
            return
        B = self.full[:, self.basis]
        nonbasic = ~self.is_basic
        r = self.rhs - self.full[:, nonbasic] @ self.x[nonbasic]
        try:
            if values_only:
                self.x[self.basis] = np.linalg.solve(B, r)
            else:
                sol = np.linalg.solve(B, np.column_stack([self.full, r]))
                self.T = sol[:, :-1]
                self.x[self.basis] = sol[:, -1]
        except np.linalg.LinAlgError as exc:
            raise LpSolverError("singular basis during reinversion") from exc
        self._since_reinvert = 0

    def run(self, cost) -> str:
        degenerate = 0
        bland = False
        basis = self.basis
        d = self._reduced_costs(cost)
        finite_hi = np.isfinite(self.hi)
        movable = self.hi > self.lo
        while True:
            if self.iterations >= self.max_iterations:
                raise LpSolverError(f"simplex iteration limit {self.max_iterations} reached")
            T = self.T
            at_upper = (~self.is_basic) & finite_hi & (self.x >= self.hi - FEAS_TOL)
            at_lower = (~self.is_basic) & ~at_upper
            cand_up = at_lower & movable & (d < -OPT_TOL)
            cand_dn = at_upper & movable & (d > OPT_TOL)
            cand = cand_up | cand_dn
            if not cand.any():
                # guard against drift in the incrementally updated costs
                d_exact = self._reduced_costs(cost)
                if np.allclose(d, d_exact, atol=OPT_TOL):
                    return "optimal"
                d = d_exact
                continue
            if bland:
                q = int(np.flatnonzero(cand)[0])
            else:
                q = int(np.argmax(np.where(cand, np.abs(d), -1.0)))
            delta = 1.0 if cand_up[q] else -1.0

            col = T[:, q]
            xb = self.x[basis]
            step = delta * col
            ratios = np.full(self.m, np.inf)
            dec = step > PIVOT_TOL
            inc = step < -PIVOT_TOL
            if dec.any():
                lob = self.lo[basis]
                ratios[dec] = (xb[dec] - lob[dec]) / step[dec]
            if inc.any():
                hib = self.hi[basis]
                fin = inc & np.isfinite(hib)
                ratios[fin] = (hib[fin] - xb[fin]) / (-step[fin])
            np.maximum(ratios, 0.0, out=ratios)
            flip = self.hi[q] - self.lo[q]
            tmin = ratios.min() if self.m else np.inf
            if not np.isfinite(tmin) and not np.isfinite(flip):
                return "unbounded"
            self.iterations += 1

            if flip <= tmin:
                t = flip
                self.x[basis] = xb - t * step
                self.x[q] = self.hi[q] if delta > 0 else self.lo[q]
                degenerate = degenerate + 1 if t <= FEAS_TOL else 0
                continue

            t = tmin
            ties = np.flatnonzero(ratios <= tmin + 1e-12)
            if bland:
                r = int(min(ties, key=lambda i: basis[i]))
            else:
                r = int(ties[np.argmax(np.abs(col[ties]))])
            leaving = basis[r]
            leave_to_upper = step[r] < 0
            self.x[basis] = xb - t * step
            self.x[q] = self.x[q] + delta * t
            self.x[leaving] = self.hi[leaving] if leave_to_upper else self.lo[leaving]

            piv = col[r]
            T[r] /= piv
            pivot_row = T[r]
            rows = np.flatnonzero(col)
            rows = rows[rows != r]
            if rows.shape[0]:
                T[rows] -= np.outer(col[rows], pivot_row)
            d = d - d[q] * pivot_row
            d[q] = 0.0
            basis[r] = q
            self.is_basic[leaving] = False
            self.is_basic[q] = True

            if t <= FEAS_TOL:
                degenerate += 1
                if degenerate >= DEGENERATE_STEPS_BEFORE_BLAND:
                    bland = True
            else:
                degenerate = 0
            self._since_reinvert += 1
            if self._since_reinvert >= REINVERT_EVERY:
                self.refresh()
                d = self._reduced_costs(cost)

    def _reduced_costs(self, cost) -> np.ndarray:
        if not self.m:
            return cost.copy()
        d = cost - cost[self.basis] @ self.T
        d[self.is_basic] = 0.0
        return d


def write_lp(model: LpModel, integer: Sequence[bool] | None = None, name: str = "model") -> str:
    """Render ``model`` as a CPLEX-style LP file."""
    n = model.num_vars
    names = model.var_names or tuple(f"v{j}" for j in range(n))

    def expr(coefs) -> str:
        parts = []
        for j in np.flatnonzero(coefs):
            a = float(coefs[j])
            sign = "-" if a < 0 else "+"
            mag = abs(a)
            term = names[j] if mag == 1 else f"{_num(mag)} {names[j]}"
            parts.append(f"{sign} {term}")
        if not parts:
            return "0 " + names[0] if n else "0"
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[1:]

    lines = [f"\\ {name}", "Maximize" if model.sense == "max" else "Minimize"]
    obj = expr(model.objective)
    if model.objective_offset:
        obj += f" {'+' if model.objective_offset > 0 else '-'} {_num(abs(model.objective_offset))} constant"
    lines.append(f" obj: {obj}")
    lines.append("Subject To")
    for i, (a, s, b) in enumerate(model.rows):
        lines.append(f" c{i}: {expr(a)} {s} {_num(b)}")
    lines.append("Bounds")
    is_int = list(integer) if integer is not None else [False] * n
    for j in range(n):
        lo, hi = model.lower_bounds[j], model.upper_bounds[j]
        if lo == 0 and hi == 1 and is_int[j]:
            continue
        hi_s = "+inf" if not np.isfinite(hi) else _num(hi)
        lines.append(f" {_num(lo)} <= {names[j]} <= {hi_s}")
    if model.objective_offset:
        lines.append(" constant = 1")
    gens = [names[j] for j in range(n) if is_int[j] and not (model.lower_bounds[j] == 0 and model.upper_bounds[j] == 1)]
    bins = [names[j] for j in range(n) if is_int[j] and model.lower_bounds[j] == 0 and model.upper_bounds[j] == 1]
    if gens:
        lines.append("Generals")
        lines.append(" " + " ".join(gens))
    if bins:
        lines.append("Binaries")
        lines.append(" " + " ".join(bins))
    lines.append("End")
    return "\n".join(lines) + "\n"


def _num(v: float) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)
