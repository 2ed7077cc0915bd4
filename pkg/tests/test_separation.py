import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fscut import gf2
from fscut.bnb import BnbConfig, SolveStats
from fscut.gf2 import BudgetExceededError, Gf2Matrix, Gf2Vector
from fscut.instances import hamming, random_ldpc, repetition
from fscut.lp import solve_lp
from fscut.models import build_girth_reduction, build_mindist_model, normalize_instance
from fscut.separation import (FsCut, ParityCheckPool, brute_force_best_fs_cut, exact_fs_for_check,
                              exact_rpc_separation, fs_violation, orchestrate, rpc_heuristic_A, rpc_heuristic_B,
                              separate_known_checks)
from fscut.solver import solve_min_distance

HAM = normalize_instance(hamming(3))


def mat(rows):
    return Gf2Matrix.from_array(np.array(rows))


def vec(bits):
    return Gf2Vector.from_iterable(bits)


def all_odd_subset_violations(h: Gf2Vector, x) -> list[float]:
    supp = h.support
    return [fs_violation(h, S, x) for r in range(1, len(supp) + 1, 2) for S in itertools.combinations(supp, r)]


def assert_sound(inst, cut: FsCut, x, eps=1e-6):
    assert all((g & cut.h.bits).bit_count() % 2 == 0 for g in inst.generator_rows())
    assert fs_violation(cut.h, cut.S, x) > eps
    assert abs(fs_violation(cut.h, cut.S, x) - cut.violation) <= 1e-12
    if inst.k <= 16:
        a, _, b = cut.row(inst.n)
        for c in gf2.enumerate_codewords(inst.H):
            assert a @ c.to_array() <= b


class TestFsViolation:
    @pytest.mark.parametrize("h,S,x,expected", [
        ([1, 1, 1, 0], {0, 1, 2}, [0.9, 0.8, 0.7, 0], 0.4),
        ([1, 1, 0, 0], {0}, [1, 1, 0, 0], 0.0),
        ([1, 1, 0], {0}, [0.6, 0.3, 0.5], 0.3),
    ])
    def test_examples(self, h, S, x, expected):
        assert fs_violation(vec(h), S, x) == pytest.approx(expected, abs=1e-12)

    def test_even_subset_rejected(self):
        with pytest.raises(ValueError):
            fs_violation(vec([1, 1, 0]), {0, 1}, [0.5] * 3)


class TestExactForCheck:
    def test_all_above_half(self):
        cut = exact_fs_for_check(vec([1, 1, 1, 0]), [0.9, 0.8, 0.7, 0])
        assert cut.S == (0, 1, 2) and cut.violation == pytest.approx(0.4)

    def test_parity_toggle(self):
        cut = exact_fs_for_check(vec([1, 1, 1, 0]), [0.9, 0.8, 0, 0])
        assert cut.S == (0,) and cut.violation == pytest.approx(0.1)

    def test_codeword_has_no_cut(self):
        assert exact_fs_for_check(vec([1, 1, 0, 0]), [1, 1, 0, 0]) is None

    def test_tie_goes_to_lowest_index(self):
        # all toggles cost 0.2; the one at index 0 is taken
        cut = exact_fs_for_check(vec([1, 1, 1]), [0.6, 0.6, 0.4], eps_viol=-10)
        assert cut.S == (1,)

    def test_exactness_and_uniqueness(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            n = int(rng.integers(1, 17))
            hv = rng.integers(0, 2, n)
            if not hv.any():
                hv[rng.integers(n)] = 1
            h = vec(hv)
            x = rng.random(n)
            values = all_odd_subset_violations(h, x)
            cut = exact_fs_for_check(h, x, eps_viol=-np.inf)
            assert abs(cut.violation - max(values)) <= 1e-9
            assert sum(v > 0 for v in values) <= 1


class TestKnownChecks:
    SPC3 = normalize_instance(mat([[1, 1, 1]]))

    def test_single_cut(self):
        out = separate_known_checks(ParityCheckPool(self.SPC3), [0.9, 0.9, 0.9])
        assert out.status == "cut-found" and len(out.cuts) == 1
        assert out.cuts[0].S == (0, 1, 2) and out.cuts[0].violation == pytest.approx(0.7)

    def test_codeword(self):
        assert separate_known_checks(ParityCheckPool(HAM), [1, 1, 1, 0, 0, 0, 0]).status == "none-violated"

    def test_truncation_keeps_most_violated(self):
        inst = normalize_instance(mat([[1, 1, 0, 0], [0, 0, 1, 1]]))
        x = [0.9, 0.2, 0.7, 0.1]  # violations 0.7 and 0.6
        both = separate_known_checks(ParityCheckPool(inst), x)
        assert len(both.cuts) == 2
        one = separate_known_checks(ParityCheckPool(inst), x, max_cuts=1)
        assert len(one.cuts) == 1 and one.cuts[0].h.support == (0, 1)


class TestHeuristics:
    def test_integral_point(self):
        for c in gf2.enumerate_codewords(HAM.H):
            x = c.to_array().astype(float)
            assert not rpc_heuristic_A(HAM, x).cuts
            assert not rpc_heuristic_B(HAM, x).cuts

    def test_a_on_hamming_after_zs_round(self):
        model = build_mindist_model(HAM)
        x = solve_lp(model.lp).primal_solution[:7]
        out = rpc_heuristic_A(HAM, x)
        for cut in out.cuts:
            assert_sound(HAM, cut, x)

    def test_b_budget_zero(self):
        out = rpc_heuristic_B(HAM, np.full(7, 0.5), K=0)
        assert out.status == "none-violated" and not out.cuts

    def test_b_cuts_are_row_pairs(self):
        inst = normalize_instance(random_ldpc(12, 6, 3, 3))
        rows = inst.H.rows
        pairs = {a ^ b for a, b in itertools.combinations(rows, 2)}
        rng = np.random.default_rng(0)
        for _ in range(30):
            x = rng.random(inst.n)
            for cut in rpc_heuristic_B(inst, x).cuts:
                assert cut.h.bits in pairs
                assert_sound(inst, cut, x)


class TestExactSeparation:
    def test_girth_d1(self):
        inst, pt = build_girth_reduction(mat([[1, 1, 0]]))
        out = exact_rpc_separation(inst, pt)
        assert out.status == "cut-found" and out.best_violation == pytest.approx(0.5, abs=1e-12)

    def test_girth_d2(self):
        inst, pt = build_girth_reduction(mat([[1, 1, 1]]))
        out = exact_rpc_separation(inst, pt)
        assert out.status == "none-violated" and out.best_violation == pytest.approx(0.0, abs=1e-12)

    def test_codeword_point(self):
        out = exact_rpc_separation(HAM, [1, 1, 1, 0, 0, 0, 0])
        assert out.status == "none-violated" and out.best_violation <= 1e-9
        assert brute_force_best_fs_cut(HAM, [1, 1, 1, 0, 0, 0, 0]).best_violation <= 0

    def test_early_stop(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            x = rng.random(7)
            full = exact_rpc_separation(HAM, x)
            early = exact_rpc_separation(HAM, x, mode="early-stop")
            assert (full.status == "cut-found") == (early.status == "cut-found")
            if early.cuts:
                assert_sound(HAM, early.cuts[0], x)

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            exact_rpc_separation(HAM, np.zeros(7), mode="fast")


class TestBruteForce:
    def test_spc(self):
        out = brute_force_best_fs_cut(normalize_instance(mat([[1, 1, 1]])), [0.9, 0.9, 0.9])
        assert out.best_violation == pytest.approx(0.7) and out.best_h.support == (0, 1, 2)

    def test_repetition_halves(self):
        # duals 110, 011, 101 all have weight 2; |S| = 1 gives 1 - 1 + 0.5 - 0.5 = 0
        out = brute_force_best_fs_cut(normalize_instance(mat([[1, 1, 0], [0, 1, 1]])), [0.5] * 3)
        assert out.status == "none-violated" and out.best_violation == pytest.approx(0.0, abs=1e-12)

    def test_girth_reduction_halves(self):
        # the reduction of A = [[1,1,0],[0,1,1]] has the single dual codeword 111
        inst, pt = build_girth_reduction(mat([[1, 1, 0], [0, 1, 1]]))
        out = brute_force_best_fs_cut(inst, pt)
        assert out.status == "none-violated" and out.best_violation == pytest.approx(-0.5, abs=1e-12)

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            brute_force_best_fs_cut(normalize_instance(repetition(15)), np.full(15, 0.5))


class TestOrchestrate:
    CFG = BnbConfig()

    def test_frequency_gate(self):
        stats = SolveStats()
        out = orchestrate("zs", "every5", 7, HAM, ParityCheckPool(HAM), np.full(7, 0.5), self.CFG, stats)
        assert out.status == "none-violated" and sum(stats.separator_calls_by_source.values()) == 0

    def test_short_circuit(self):
        inst = normalize_instance(mat([[1, 1, 1]]))
        stats = SolveStats()
        out = orchestrate("zs++e", "always", 0, inst, ParityCheckPool(inst), [0.9] * 3, self.CFG, stats)
        assert out.status == "cut-found"
        assert stats.separator_calls_by_source == {"known-check": 1, "rpc-heur-A": 0, "rpc-heur-B": 0,
                                                   "rpc-exact": 0}

    def test_zse_at_codeword(self):
        stats = SolveStats()
        x = [1, 1, 1, 0, 0, 0, 0]
        out = orchestrate("zse", "always", 0, HAM, ParityCheckPool(HAM), x, self.CFG, stats)
        assert out.status == "none-violated"
        assert stats.separator_calls_by_source["known-check"] == 1
        assert stats.separator_calls_by_source["rpc-exact"] == 1
        assert not brute_force_best_fs_cut(HAM, x).cuts

    def test_none_variant(self):
        out = orchestrate("none", "always", 0, HAM, ParityCheckPool(HAM), np.full(7, 0.5), self.CFG)
        assert out.status == "none-violated" and not out.cuts

    def test_pool_hygiene_and_dominance(self):
        inst = normalize_instance(random_ldpc(12, 6, 3, 1))
        pool = ParityCheckPool(inst)
        rng = np.random.default_rng(9)
        for _ in range(15):
            x = rng.random(inst.n)
            for variant in ("zs", "zse", "zs+e", "zs++e"):
                out = orchestrate(variant, "always", 0, inst, pool, x, self.CFG)
                for c in out.cuts:
                    assert_sound(inst, c, x)
            bits = [h.bits for h in pool]
            assert len(bits) == len(set(bits))
            exact = exact_rpc_separation(inst, x).best_violation
            for other in (separate_known_checks(ParityCheckPool(inst), x), rpc_heuristic_A(inst, x),
                          rpc_heuristic_B(inst, x)):
                assert exact >= other.best_violation - 1e-9


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["zs", "zse", "zs+e", "zs++e"]))
def test_cuts_emitted_during_solves_are_sound(seed, variant):
    inst = normalize_instance(random_ldpc(10, 5, 3, seed))
    res, sep = solve_min_distance(inst, BnbConfig(separation_variant=variant, separation_frequency="always"))
    assert res.status == "optimal"
    assert res.objective_value == gf2.min_weight_oracle(inst.H)[0]
    for cut, x in sep.emitted:
        assert_sound(inst, cut, x)
