"""Reading, writing and generating parity-check matrices.

Two text formats are understood:

* alist: ``n m`` / max degrees / column degrees / row degrees / per-column
  row lists / per-row column lists, all 1-based.  Zero padding inside the
  lists is accepted on input and never written.
* dense: an ``m n`` header followed by m lines of 0/1 characters
  (whitespace between characters optional).
"""

from __future__ import annotations

import math
import os
from pathlib import Path

import numpy as np

from . import gf2
from .gf2 import Gf2Matrix


class InstanceParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _numbered_lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if s:
            yield i, s


def _ints(line_no: int, s: str) -> list[int]:
    try:
        return [int(t) for t in s.split()]
    except ValueError:
        raise InstanceParseError(f"expected integers, got {s!r}", line_no) from None


def parse_alist(text: str) -> Gf2Matrix:
    lines = list(_numbered_lines(text))
    pos = 0

    def take(count_hint: str) -> tuple[int, list[int]]:
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 0
            raise InstanceParseError(f"unexpected end of input while reading {count_hint}", last + 1)
        ln, s = lines[pos]
        pos += 1
        return ln, _ints(ln, s)

    def take_list(count_hint: str, degree: int) -> tuple[int, list[int]]:
        # an empty list is written as a blank line (skipped) or as a padding line of zeros
        if degree == 0:
            if pos < len(lines) and all(t == "0" for t in lines[pos][1].split()):
                return take(count_hint)
            return (lines[pos - 1][0] if pos else 0), []
        return take(count_hint)

    ln, hdr = take("the size header")
    if len(hdr) != 2:
        raise InstanceParseError("header must be 'n m'", ln)
    n, m = hdr
    if n <= 0 or m <= 0:
        raise InstanceParseError("n and m must be positive", ln)
    ln, maxdeg = take("the maximum degrees")
    if len(maxdeg) != 2:
        raise InstanceParseError("expected 'max_col_degree max_row_degree'", ln)
    max_col, max_row = maxdeg
    ln, col_deg = take("the column degrees")
    if len(col_deg) != n:
        raise InstanceParseError(f"expected {n} column degrees, got {len(col_deg)}", ln)
    if any(d < 0 or d > max_col for d in col_deg):
        raise InstanceParseError("column degree outside [0, max_col_degree]", ln)
    ln, row_deg = take("the row degrees")
    if len(row_deg) != m:
        raise InstanceParseError(f"expected {m} row degrees, got {len(row_deg)}", ln)
    if any(d < 0 or d > max_row for d in row_deg):
        raise InstanceParseError("row degree outside [0, max_row_degree]", ln)
    if sum(col_deg) != sum(row_deg):
        raise InstanceParseError("column and row degree sums differ", ln)

    rows = [0] * m
    for j in range(n):
        ln, ids = take_list(f"the row list of column {j + 1}", col_deg[j])
        ids = [i for i in ids if i != 0]
        if len(ids) != col_deg[j]:
            raise InstanceParseError(f"column {j + 1} lists {len(ids)} rows, degree says {col_deg[j]}", ln)
        for i in ids:
            if not 1 <= i <= m:
                raise InstanceParseError(f"row index {i} out of range 1..{m}", ln)
            if rows[i - 1] >> j & 1:
                raise InstanceParseError(f"row {i} repeated in column {j + 1}", ln)
            rows[i - 1] |= 1 << j
    for i in range(m):
        ln, ids = take_list(f"the column list of row {i + 1}", row_deg[i])
        ids = [j for j in ids if j != 0]
        if len(ids) != row_deg[i]:
            raise InstanceParseError(f"row {i + 1} lists {len(ids)} columns, degree says {row_deg[i]}", ln)
        got = 0
        for j in ids:
            if not 1 <= j <= n:
                raise InstanceParseError(f"column index {j} out of range 1..{n}", ln)
            got |= 1 << (j - 1)
        if got != rows[i]:
            raise InstanceParseError(f"row {i + 1} disagrees with the column lists", ln)
    if pos != len(lines):
        raise InstanceParseError("trailing content after the row lists", lines[pos][0])
    return Gf2Matrix(m, n, tuple(rows))


def write_alist(M: Gf2Matrix) -> str:
    n, m = M.num_cols, M.num_rows
    col_lists = [[i + 1 for i in range(m) if M.rows[i] >> j & 1] for j in range(n)]
    row_lists = [[j + 1 for j in gf2.bit_indices(r)] for r in M.rows]
    col_deg = [len(c) for c in col_lists]
    row_deg = [len(r) for r in row_lists]
    out = [
        f"{n} {m}",
        f"{max(col_deg, default=0)} {max(row_deg, default=0)}",
        " ".join(map(str, col_deg)),
        " ".join(map(str, row_deg)),
    ]
    out += [" ".join(map(str, c)) for c in col_lists]
    out += [" ".join(map(str, r)) for r in row_lists]
    return "\n".join(out) + "\n"


def parse_dense(text: str) -> Gf2Matrix:
    lines = list(_numbered_lines(text))
    if not lines:
        raise InstanceParseError("empty input", 1)
    ln, hdr = lines[0][0], _ints(*lines[0])
    if len(hdr) != 2:
        raise InstanceParseError("header must be 'm n'", ln)
    m, n = hdr
    body = lines[1:]
    if len(body) != m:
        raise InstanceParseError(f"expected {m} matrix rows, found {len(body)}", body[-1][0] if body else ln)
    rows = []
    for ln, s in body:
        bits = s.replace(" ", "").replace("\t", "")
        if len(bits) != n or set(bits) - {"0", "1"}:
            raise InstanceParseError(f"expected {n} characters from {{0,1}}", ln)
        rows.append(sum(1 << j for j, ch in enumerate(bits) if ch == "1"))
    return Gf2Matrix(m, n, tuple(rows))


def write_dense(M: Gf2Matrix) -> str:
    return f"{M.num_rows} {M.num_cols}\n" + "".join(str(M.row(i)) + "\n" for i in range(M.num_rows))


def parse_instance_text(text: str, fmt: str | None = None) -> Gf2Matrix:
    """Parse either format; without ``fmt`` the dense layout is detected by its 0/1 rows."""
    if fmt is None:
        lines = [s for _, s in _numbered_lines(text)]
        dense = len(lines) >= 2 and all(set(s.replace(" ", "")) <= {"0", "1"} for s in lines[1:]) \
            and len(lines[1].replace(" ", "")) > 1 and len(lines[0].split()) == 2
        try:
            m, n = (int(t) for t in lines[0].split()) if lines else (0, 0)
            dense = dense and len(lines) == m + 1 and all(len(s.replace(" ", "")) == n for s in lines[1:])
        except ValueError:
            dense = False
        fmt = "dense" if dense else "alist"
    if fmt == "alist":
        return parse_alist(text)
    if fmt == "dense":
        return parse_dense(text)
    raise ValueError(f"unknown instance format {fmt!r}")


def read_instance(path: str | os.PathLike) -> Gf2Matrix:
    p = Path(path)
    text = p.read_text()
    suffix = p.suffix.lower()
    fmt = "alist" if suffix == ".alist" else "dense" if suffix in (".dense", ".mat") else None
    return parse_instance_text(text, fmt)


def write_instance(M: Gf2Matrix, path: str | os.PathLike) -> None:
    p = Path(path)
    p.write_text(write_dense(M) if p.suffix.lower() in (".dense", ".mat") else write_alist(M))


# generators

def hamming(r: int) -> Gf2Matrix:
    if r < 2:
        raise ValueError("hamming(r) needs r >= 2")
    n = (1 << r) - 1
    rows = [sum((((j + 1) >> i) & 1) << j for j in range(n)) for i in range(r)]
    return Gf2Matrix(r, n, tuple(rows))


def ext_hamming(r: int) -> Gf2Matrix:
    H = hamming(r)
    n = H.num_cols + 1
    return Gf2Matrix(r + 1, n, H.rows + ((1 << n) - 1,))


def repetition(n: int) -> Gf2Matrix:
    if n < 2:
        raise ValueError("repetition(n) needs n >= 2")
    return Gf2Matrix(n - 1, n, tuple((1 << i) | (1 << (i + 1)) for i in range(n - 1)))


def spc(n: int) -> Gf2Matrix:
    if n < 2:
        raise ValueError("spc(n) needs n >= 2")
    return Gf2Matrix(1, n, ((1 << n) - 1,))


def random_ldpc(n: int, m: int, col_deg: int, seed: int) -> Gf2Matrix:
    """Column-regular random matrix; resampled until the code is nontrivial.

    Columns are drawn without repetition while enough distinct patterns
    exist, so the code has no weight-2 codewords.
    """
    if n < 2 or m < 1 or not 1 <= col_deg <= m:
        raise ValueError("random-ldpc needs n >= 2, m >= 1 and 1 <= col_deg <= m")
    rng = np.random.default_rng(seed)
    distinct = math.comb(m, col_deg) >= n
    for _ in range(1000):
        rows = [0] * m
        used = set()
        for j in range(n):
            while True:
                pattern = tuple(sorted(int(i) for i in rng.choice(m, size=col_deg, replace=False)))
                if not distinct or pattern not in used:
                    break
            used.add(pattern)
            for i in pattern:
                rows[i] |= 1 << j
        M = Gf2Matrix(m, n, tuple(rows))
        if gf2.rank(M) < n:
            return M
    raise ValueError("could not sample a nontrivial code")


_BUILTINS = {
    "hamming": (hamming, ("r",)),
    "ext-hamming": (ext_hamming, ("r",)),
    "repetition": (repetition, ("n",)),
    "spc": (spc, ("n",)),
    "random-ldpc": (random_ldpc, ("n", "m", "col_deg", "seed")),
}


def builtin_instance(name: str, *params: int) -> Gf2Matrix:
    """``builtin_instance("hamming", 3)``, ``builtin_instance("random-ldpc", 16, 8, 3, 1)``."""
    if name not in _BUILTINS:
        raise ValueError(f"unknown builtin {name!r}; choose from {', '.join(_BUILTINS)}")
    fn, names = _BUILTINS[name]
    if len(params) != len(names):
        raise ValueError(f"{name} takes parameters ({', '.join(names)})")
    return fn(*(int(p) for p in params))


def parse_builtin_spec(spec: str) -> tuple[str, tuple[int, ...]]:
    """``"random-ldpc(16,8,3,1)"`` -> ``("random-ldpc", (16, 8, 3, 1))``."""
    s = spec.strip()
    if "(" not in s or not s.endswith(")"):
        raise ValueError(f"builtin spec must look like name(p1,...), got {spec!r}")
    name, args = s[:-1].split("(", 1)
    params = tuple(int(a) for a in args.split(",") if a.strip())
    return name.strip(), params


def builtin_name(name: str, params: tuple[int, ...]) -> str:
    return f"{name}({','.join(map(str, params))})"


# The desk-scale suite used by the benchmark and the acceptance tests.
BUNDLED_SUITE: tuple[tuple[str, tuple[int, ...]], ...] = (
    ("hamming", (3,)),
    ("ext-hamming", (3,)),
    ("repetition", (3,)),
    ("repetition", (4,)),
    ("repetition", (5,)),
    ("repetition", (6,)),
    ("spc", (5,)),
    ("random-ldpc", (12, 6, 3, 1)),
    ("random-ldpc", (14, 7, 3, 2)),
    ("random-ldpc", (16, 12, 3, 1)),
    ("random-ldpc", (16, 8, 4, 1)),
    ("random-ldpc", (18, 9, 3, 4)),
    ("random-ldpc", (20, 10, 3, 5)),
    ("random-ldpc", (24, 18, 3, 1)),
)


def bundled_suite() -> list[tuple[str, Gf2Matrix]]:
    return [(builtin_name(n, p), builtin_instance(n, *p)) for n, p in BUNDLED_SUITE]


def write_bundled_suite(directory: str | os.PathLike) -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    out = []
    for name, M in bundled_suite():
        fname = name.replace("(", "_").replace(")", "").replace(",", "_") + ".alist"
        p = d / fname
        p.write_text(write_alist(M))
        out.append(p)
    return out
