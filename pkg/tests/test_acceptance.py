"""Acceptance criteria, one test per criterion.

Each test appends a PASS/FAIL line to the terminal summary.  Oracles are
independent of the code under test: codeword enumeration for minimum
distance, exhaustive odd-subset and dual-codeword scans for separation.
"""

import itertools
import math
import time
from collections import defaultdict

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from fscut import gf2
from fscut.bench import shifted_geom_mean
from fscut.bnb import VARIANTS, BnbConfig, solve_milp
from fscut.cli import main
from fscut.gf2 import Gf2Matrix, Gf2Vector
from fscut.instances import bundled_suite, ext_hamming, hamming, random_ldpc, write_bundled_suite
from fscut.lp import solve_lp
from fscut.models import (build_girth_reduction, build_mindist_model, build_rpc_separation_model,
                          build_rpc_separation_model_alt, normalize_instance)
from fscut.separation import brute_force_best_fs_cut, exact_fs_for_check, exact_rpc_separation, fs_violation
from fscut.solver import solve_min_distance

FREQUENCIES = ("root", "always", "every5")
SUITE = [normalize_instance(H, name) for name, H in bundled_suite()]

# (instance, cut, point) for every cut produced while checking criteria 1-4
EMITTED: list = []


def report(number: int, ok: bool, detail: str):
    ACCEPTANCE_LINES.append(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def mat(rows):
    return Gf2Matrix.from_array(np.array(rows))


@pytest.fixture(scope="module")
def matrix_runs():
    """Every bundled instance under every variant x frequency (none runs once)."""
    t0 = time.perf_counter()
    runs = []
    for inst in SUITE:
        d = gf2.min_weight_oracle(inst.H)[0]
        for v in VARIANTS:
            for f in (("always",) if v == "none" else FREQUENCIES):
                res, sep = solve_min_distance(inst, BnbConfig(separation_variant=v, separation_frequency=f))
                runs.append((inst, v, f, d, res))
                if sep is not None:
                    EMITTED.extend((inst, cut, x) for cut, x in sep.emitted)
    return runs, time.perf_counter() - t0


def test_c01_min_distance_matrix(matrix_runs):
    runs, elapsed = matrix_runs
    bad = [(i.name, v, f, r.status, r.objective_value, d) for i, v, f, d, r in runs
           if r.status != "optimal" or r.objective_value != d]
    ok = not bad and elapsed < 600
    report(1, ok, f"{len(runs)} runs on {len(SUITE)} instances, {len(bad)} mismatches, {elapsed:.0f} s (limit 600 s)")
    assert not bad, bad
    assert elapsed < 600


def test_c02_exact_fs_vs_brute_force():
    rng = np.random.default_rng(20240202)
    worst = 0.0
    multi = 0
    for _ in range(1000):
        n = int(rng.integers(1, 21))
        k = int(rng.integers(1, min(n, 16) + 1))
        supp = rng.choice(n, size=k, replace=False)
        hv = np.zeros(n, dtype=int)
        hv[supp] = 1
        h = Gf2Vector.from_iterable(hv)
        x = rng.random(n)
        values = [fs_violation(h, S, x) for r in range(1, k + 1, 2)
                  for S in itertools.combinations(sorted(int(j) for j in supp), r)]
        cut = exact_fs_for_check(h, x, eps_viol=-math.inf)
        worst = max(worst, abs(cut.violation - max(values)))
        multi += sum(v > 0 for v in values) > 1
    ok = worst <= 1e-9 and multi == 0
    report(2, ok, f"1000 trials, max |diff| {worst:.1e}, trials with >1 violated subset: {multi}")
    assert ok


SMALL_RANK = [
    normalize_instance(hamming(3), "hamming(3)"),
    normalize_instance(ext_hamming(3), "ext-hamming(3)"),
    normalize_instance(random_ldpc(12, 6, 3, 1), "random-ldpc(12,6,3,1)"),
    normalize_instance(random_ldpc(14, 7, 3, 2), "random-ldpc(14,7,3,2)"),
    normalize_instance(random_ldpc(16, 12, 3, 1), "random-ldpc(16,12,3,1)"),
    normalize_instance(random_ldpc(10, 5, 3, 7), "random-ldpc(10,5,3,7)"),
]


def test_c03_separation_ip_vs_brute_force():
    rng = np.random.default_rng(33)
    worst = 0.0
    trials = 0
    for inst in SMALL_RANK:
        assert inst.m <= 12
        points = [rng.random(inst.n) for _ in range(20)] + [np.full(inst.n, 0.5)]
        for x in points:
            ex = exact_rpc_separation(inst, x, "full", time_limit=600, node_limit=10**6)
            bf = brute_force_best_fs_cut(inst, x)
            assert ex.inner_status == "optimal"
            worst = max(worst, abs(ex.best_violation - bf.best_violation))
            EMITTED.extend((inst, c, x) for c in ex.cuts)
            trials += 1
    ok = worst <= 1e-9
    report(3, ok, f"{len(SMALL_RANK)} instances, {trials} points, max |diff| {worst:.1e}")
    assert ok


GIRTH_FIXTURES = [
    [[1, 1, 0]],
    [[1, 1, 1]],
    [[1, 1, 0], [0, 1, 1]],
    [[1, 1, 1, 1]],
    [[1, 0, 1, 1, 0, 0], [0, 1, 1, 0, 1, 0], [1, 1, 0, 0, 0, 1]],
    hamming(3).to_array().tolist(),
    [[1, 1, 0, 1, 0, 0, 0, 1], [0, 1, 1, 0, 1, 0, 0, 1], [0, 0, 1, 1, 0, 1, 0, 1], [1, 0, 0, 0, 1, 1, 1, 1]],
]


def test_c04_girth_identity():
    lines = []
    ok = True
    for rows in GIRTH_FIXTURES:
        A = mat(rows)
        inst, pt = build_girth_reduction(A)
        d = gf2.min_weight_oracle(A)[0]
        res = solve_milp(build_rpc_separation_model(inst, pt), BnbConfig(time_limit=600))
        ex = exact_rpc_separation(inst, pt, time_limit=600, node_limit=10**6)
        EMITTED.extend((inst, c, pt.x_star) for c in ex.cuts)
        good = res.status == "optimal" and res.objective_value == 1 - d / 2 and ex.best_violation == 1 - d / 2
        ok &= good
        lines.append(f"{A.num_rows}x{A.num_cols}:d={d}:{res.objective_value + 0.0:+.1f}")
    assert any(r == [[1, 1, 1]] for r in GIRTH_FIXTURES) and any(r == [[1, 1, 0], [0, 1, 1]] for r in GIRTH_FIXTURES)
    report(4, ok, f"{len(GIRTH_FIXTURES)} fixtures exact: " + " ".join(lines))
    assert ok


def test_c05_cut_soundness(matrix_runs):
    # runs after criteria 1-4 have filled EMITTED
    assert EMITTED, "no cuts were produced"
    words_cache = {}
    failures = 0
    checked_validity = 0
    for inst, cut, x in EMITTED:
        dual_ok = all((g & cut.h.bits).bit_count() % 2 == 0 for g in inst.generator_rows())
        viol_ok = fs_violation(cut.h, cut.S, x) > 1e-6
        valid = True
        if inst.k <= 16:
            key = (inst.name, inst.H.rows)
            if key not in words_cache:
                words_cache[key] = np.array([c.to_array() for c in gf2.enumerate_codewords(inst.H)])
            a, _, b = cut.row(inst.n)
            valid = bool(np.all(words_cache[key] @ a <= b + 1e-12))
            checked_validity += 1
        failures += not (dual_ok and viol_ok and valid)
    report(5, failures == 0, f"{len(EMITTED)} cuts checked ({checked_validity} against all codewords), "
                             f"{failures} unsound")
    assert failures == 0


def test_c06_formulation_equivalence():
    rng = np.random.default_rng(66)
    worst = 0.0
    for seed in range(10):
        n = int(rng.integers(6, 17))
        m = int(rng.integers(3, n // 2 + 2))
        inst = normalize_instance(random_ldpc(n, m, 3 if m >= 3 else m, seed))
        x = rng.random(inst.n)
        cfg = BnbConfig(time_limit=600, node_limit=10**6)
        a = solve_milp(build_rpc_separation_model(inst, x), cfg)
        b = solve_milp(build_rpc_separation_model_alt(inst, x), cfg)
        assert a.status == b.status == "optimal"
        worst = max(worst, abs(a.objective_value - b.objective_value))
    report(6, worst <= 1e-9, f"10 random instances (n <= 16), max |diff| {worst:.1e}")
    assert worst <= 1e-9


def test_c07_root_lp():
    values = [solve_lp(build_mindist_model(inst).lp).objective_value for inst in SUITE]
    worst = max(abs(v - 1.0) for v in values)
    report(7, worst <= 1e-9, f"{len(SUITE)} instances, max |value - 1| {worst:.1e}")
    assert worst <= 1e-9


def test_c08_early_stop():
    rng = np.random.default_rng(88)
    inst = normalize_instance(random_ldpc(12, 6, 3, 1))
    words = [c.to_array().astype(float) for c in gf2.enumerate_codewords(inst.H)]
    positive, nonpositive = [], []
    while len(positive) < 20:
        x = rng.random(inst.n)
        if brute_force_best_fs_cut(inst, x).best_violation > 1e-3:
            positive.append(x)
    while len(nonpositive) < 20:
        # points of the codeword polytope satisfy every FS inequality
        lam = rng.dirichlet(np.ones(3))
        x = sum(l * words[i] for l, i in zip(lam, rng.choice(len(words), 3, replace=False)))
        assert brute_force_best_fs_cut(inst, x).best_violation <= 1e-9
        nonpositive.append(np.clip(x, 0, 1))
    pos_ok = 0
    for x in positive:
        out = exact_rpc_separation(inst, x, "early-stop", time_limit=600, node_limit=10**6)
        pos_ok += out.status == "cut-found" and out.cuts[0].violation > 1e-6
    neg_ok = 0
    for x in nonpositive:
        out = exact_rpc_separation(inst, x, "early-stop", time_limit=600, node_limit=10**6)
        neg_ok += out.status == "none-violated"
    ok = pos_ok == 20 and neg_ok == 20
    report(8, ok, f"positive-optimum points with a cut: {pos_ok}/20, nonpositive points none-violated: {neg_ok}/20")
    assert ok


def test_c09_directional(matrix_runs):
    stats = {}
    for variant in ("none", "zs"):
        solved, nodes = 0, []
        for inst in SUITE:
            res, _ = solve_min_distance(inst, BnbConfig(time_limit=10, separation_variant=variant,
                                                        separation_frequency="always"))
            solved += res.status == "optimal"
            nodes.append(res.stats.nodes_processed)
        stats[variant] = (solved, shifted_geom_mean(nodes, 100))
    ok = stats["zs"][0] >= stats["none"][0] and stats["zs"][1] <= stats["none"][1]
    calls = defaultdict(lambda: defaultdict(int))
    runs, _ = matrix_runs
    for _, v, f, _, res in runs:
        for src, c in res.stats.separator_calls_by_source.items():
            calls[f"{v}/{f}"][src] += c
    exact_under_zspp = sum(calls[f"zs++e/{f}"]["rpc-exact"] for f in FREQUENCIES)
    report(9, ok, f"none: solved {stats['none'][0]}, sgm nodes {stats['none'][1]:.1f}; "
                  f"zs-always: solved {stats['zs'][0]}, sgm nodes {stats['zs'][1]:.1f}")
    for key in sorted(calls):
        ACCEPTANCE_LINES.append(f"             stage calls {key:<14} " +
                                " ".join(f"{s}={c}" for s, c in calls[key].items()))
    ACCEPTANCE_LINES.append(f"             exact separation calls under zs++e: {exact_under_zspp}")
    assert ok


def test_c10_bench_determinism(tmp_path, capsys):
    write_bundled_suite(tmp_path / "suite")
    blobs = []
    for k in range(2):
        out = tmp_path / f"bench{k}.csv"
        code = main(["bench", "--instances", str(tmp_path / "suite"), "--variants", "none,zs,zs+e",
                     "--frequencies", "root,every5", "--seed", "7", "--out", str(out)])
        assert code == 0
        blobs.append(out.read_bytes())
    capsys.readouterr()
    ok = blobs[0] == blobs[1]
    rows = len(blobs[0].splitlines()) - 1
    report(10, ok, f"two bench runs, {rows} rows each, byte-identical: {ok}")
    assert ok
