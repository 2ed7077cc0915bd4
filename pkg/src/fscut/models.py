"""Optimization models for a binary linear code.

* the minimum-distance IP: ``min 1^T x`` s.t. ``Hx - 2z = 0``, ``1^T x >= 1``
* the maximum-likelihood decoding variant with a cost vector
* the RPC separation IP, in generator-matrix form and in ``H^T w`` form
* the girth reduction used as a test fixture for the separation IP
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import gf2
from .bnb import MilpModel
from .gf2 import Gf2Matrix, Gf2Vector, TrivialCodeError
from .lp import LpModel


@dataclass(frozen=True)
class CodeInstance:
    """A code given by a full-row-rank parity-check matrix and a cached generator.

    ``G`` is ``n x (n - m)`` with ``H G = 0``.
    """

    name: str
    H: Gf2Matrix
    G: Optional[Gf2Matrix] = None

    @property
    def n(self) -> int:
        return self.H.num_cols

    @property
    def m(self) -> int:
        return self.H.num_rows

    @property
    def k(self) -> int:
        return self.n - self.m

    def generator_rows(self) -> list[int]:
        """Codeword basis as bit-packed length-n vectors (the columns of ``G``)."""
        if self.G is None:
            return gf2.nullspace_vectors(self.H)
        return list(self.G.transpose().rows)

    def is_codeword(self, x) -> bool:
        v = x if isinstance(x, Gf2Vector) else Gf2Vector.from_iterable(np.round(np.asarray(x)).astype(int))
        return all((r & v.bits).bit_count() % 2 == 0 for r in self.H.rows)


@dataclass(frozen=True)
class SeparationPoint:
    x_star: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x_star, dtype=float).reshape(-1)
        if np.any(x < -1e-12) or np.any(x > 1 + 1e-12) or not np.all(np.isfinite(x)):
            raise ValueError("separation point must lie in [0, 1]^n")
        object.__setattr__(self, "x_star", np.clip(x, 0.0, 1.0))

    def __len__(self) -> int:
        return self.x_star.shape[0]


def as_point(pt) -> SeparationPoint:
    return pt if isinstance(pt, SeparationPoint) else SeparationPoint(np.asarray(pt, dtype=float))


def normalize_instance(H_raw: Gf2Matrix, name: str = "") -> CodeInstance:
    """Drop linearly dependent rows (keeping the earliest) and cache a generator."""
    if H_raw.is_zero():
        raise ValueError("parity-check matrix must be nonzero")
    keep = gf2.independent_row_indices(H_raw)
    if len(keep) == H_raw.num_cols:
        raise TrivialCodeError("rank equals block length: the code is trivial and has no minimum distance")
    H = Gf2Matrix(len(keep), H_raw.num_cols, tuple(H_raw.rows[i] for i in keep))
    return CodeInstance(name, H, gf2.nullspace_basis(H))


def _h_array(inst: CodeInstance) -> np.ndarray:
    return inst.H.to_array().astype(float)


def build_mindist_model(inst: CodeInstance) -> MilpModel:
    """Minimum-distance IP over variables ``x`` (binary, n) and ``z`` (integer, m)."""
    n, m = inst.n, inst.m
    Hm = _h_array(inst)
    A = np.zeros((m + 1, n + m))
    A[:m, :n] = Hm
    A[:m, n:] = -2.0 * np.eye(m)
    A[m, :n] = 1.0
    senses = ("=",) * m + (">=",)
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    zub = np.floor(Hm.sum(axis=1) / 2)
    lp = LpModel(
        objective=np.concatenate([np.ones(n), np.zeros(m)]),
        A=A, senses=senses, rhs=rhs,
        lower_bounds=np.zeros(n + m),
        upper_bounds=np.concatenate([np.ones(n), zub]),
        sense="min",
        var_names=tuple(f"x{j}" for j in range(n)) + tuple(f"z{i}" for i in range(m)),
    )
    return MilpModel(lp, np.ones(n + m, dtype=bool), {"x": range(0, n), "z": range(n, n + m)},
                     objective_is_integral=True, binary=np.arange(n + m) < n)


def build_mld_model(inst: CodeInstance, gamma) -> MilpModel:
    """Same parity system with cost ``gamma``; the zero codeword stays admissible."""
    gamma = np.asarray(gamma, dtype=float).reshape(-1)
    if gamma.shape[0] != inst.n:
        raise ValueError(f"cost vector has length {gamma.shape[0]}, expected {inst.n}")
    base = build_mindist_model(inst)
    n, m = inst.n, inst.m
    lp = LpModel(
        objective=np.concatenate([gamma, np.zeros(m)]),
        A=base.lp.A[:m], senses=base.lp.senses[:m], rhs=base.lp.rhs[:m],
        lower_bounds=base.lp.lower_bounds, upper_bounds=base.lp.upper_bounds,
        sense="min", var_names=base.lp.var_names,
    )
    return MilpModel(lp, base.integer, base.blocks, objective_is_integral=False, binary=base.binary)


def _separation_objective(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients on (s, h) of ``(2x - 1)^T s - x^T h``."""
    return 2.0 * x - 1.0, -x


def build_rpc_separation_model(inst: CodeInstance, pt) -> MilpModel:
    """Maximally violated FS cut over all dual codewords, via ``G^T h = 0 mod 2``.

    Variable order: ``h`` (n), ``s`` (n), ``zh`` (n - m), ``zs`` (1).
    """
    pt = as_point(pt)
    n = inst.n
    if len(pt) != n:
        raise ValueError(f"point has length {len(pt)}, expected {n}")
    G = inst.G if inst.G is not None else gf2.nullspace_basis(inst.H)
    Gt = G.transpose().to_array().astype(float)  # (n - m) x n
    k = Gt.shape[0]
    nv = 2 * n + k + 1
    hs, ss, zhs, zss = 0, n, 2 * n, 2 * n + k
    rows = []
    senses = []
    rhs = []
    for i in range(k):
        a = np.zeros(nv)
        a[hs:hs + n] = Gt[i]
        a[zhs + i] = -2.0
        rows.append(a)
        senses.append("=")
        rhs.append(0.0)
    a = np.zeros(nv)
    a[ss:ss + n] = 1.0
    a[zss] = -2.0
    rows.append(a)
    senses.append("=")
    rhs.append(1.0)
    for j in range(n):
        a = np.zeros(nv)
        a[ss + j] = 1.0
        a[hs + j] = -1.0
        rows.append(a)
        senses.append("<=")
        rhs.append(0.0)
    cs, ch = _separation_objective(pt.x_star)
    c = np.zeros(nv)
    c[hs:hs + n] = ch
    c[ss:ss + n] = cs
    ub = np.concatenate([np.ones(2 * n), np.floor(Gt.sum(axis=1) / 2), [n // 2]])
    lp = LpModel(
        objective=c, A=np.array(rows).reshape(-1, nv), senses=tuple(senses), rhs=np.array(rhs),
        lower_bounds=np.zeros(nv), upper_bounds=ub, sense="max", objective_offset=1.0,
        var_names=tuple(f"h{j}" for j in range(n)) + tuple(f"s{j}" for j in range(n))
        + tuple(f"zh{i}" for i in range(k)) + ("zs",),
    )
    blocks = {"h": range(hs, ss), "s": range(ss, zhs), "zh": range(zhs, zss), "zs": range(zss, nv)}
    return MilpModel(lp, np.ones(nv, dtype=bool), blocks, objective_is_integral=False,
                     binary=np.arange(nv) < zhs)


def build_rpc_separation_model_alt(inst: CodeInstance, pt) -> MilpModel:
    """Same problem with ``h = H^T w - 2 zh``; needs no generator matrix.

    Variable order: ``h`` (n), ``s`` (n), ``w`` (m), ``zh`` (n), ``zs`` (1).
    """
    pt = as_point(pt)
    n, m = inst.n, inst.m
    if len(pt) != n:
        raise ValueError(f"point has length {len(pt)}, expected {n}")
    Hm = _h_array(inst)
    nv = 3 * n + m + 1
    hs, ss, ws, zhs, zss = 0, n, 2 * n, 2 * n + m, 3 * n + m
    rows, senses, rhs = [], [], []
    for j in range(n):
        a = np.zeros(nv)
        a[hs + j] = 1.0
        a[ws:ws + m] = -Hm[:, j]
        a[zhs + j] = 2.0
        rows.append(a)
        senses.append("=")
        rhs.append(0.0)
    a = np.zeros(nv)
    a[ss:ss + n] = 1.0
    a[zss] = -2.0
    rows.append(a)
    senses.append("=")
    rhs.append(1.0)
    for j in range(n):
        a = np.zeros(nv)
        a[ss + j] = 1.0
        a[hs + j] = -1.0
        rows.append(a)
        senses.append("<=")
        rhs.append(0.0)
    cs, ch = _separation_objective(pt.x_star)
    c = np.zeros(nv)
    c[hs:hs + n] = ch
    c[ss:ss + n] = cs
    ub = np.concatenate([np.ones(2 * n + m), np.floor(Hm.sum(axis=0) / 2), [n // 2]])
    lp = LpModel(
        objective=c, A=np.array(rows), senses=tuple(senses), rhs=np.array(rhs),
        lower_bounds=np.zeros(nv), upper_bounds=ub, sense="max", objective_offset=1.0,
        var_names=tuple(f"h{j}" for j in range(n)) + tuple(f"s{j}" for j in range(n))
        + tuple(f"w{i}" for i in range(m)) + tuple(f"zh{j}" for j in range(n)) + ("zs",),
    )
    blocks = {"h": range(hs, ss), "s": range(ss, ws), "w": range(ws, zhs),
              "zh": range(zhs, zss), "zs": range(zss, nv)}
    return MilpModel(lp, np.ones(nv, dtype=bool), blocks, objective_is_integral=False,
                     binary=np.arange(nv) < zhs)


def build_girth_reduction(A: Gf2Matrix) -> tuple[CodeInstance, SeparationPoint]:
    """Separation instance whose optimum is ``1 - girth(A) / 2``.

    The rows of ``A`` become the generator (``G = A^T``), so the admissible
    checks ``h`` are exactly the nonzero vectors with ``A h = 0``, and the
    point is the all-halves vector.
    """
    r = gf2.rank(A)
    if r != A.num_rows or r >= A.num_cols:
        raise ValueError("A must have full row rank and fewer rows than columns")
    H = gf2.nullspace_basis(A).transpose()
    inst = CodeInstance(f"girth-reduction-{A.num_rows}x{A.num_cols}", H, A.transpose())
    return inst, SeparationPoint(np.full(A.num_cols, 0.5))


def fs_inequality_row(h: Gf2Vector, S: Iterable[int], n: int | None = None) -> tuple[np.ndarray, str, float]:
    """Coefficients of ``sum_S x - sum_{supp(h) minus S} x <= |S| - 1``."""
    n = h.length if n is None else n
    S = sorted(set(S))
    supp = set(h.support)
    if not S or len(S) % 2 == 0:
        raise ValueError("S must be a nonempty odd subset")
    if not supp.issuperset(S):
        raise ValueError("S must be contained in the support of h")
    if max(supp) >= n:
        raise ValueError("h does not fit in n variables")
    a = np.zeros(n)
    for j in supp:
        a[j] = -1.0
    a[S] = 1.0
    return a, "<=", float(len(S) - 1)
