"""Command-line interface: ``fscut solve|separate|bench|oracle|generate|export-lp``.

Instances are alist or dense files; ``--builtin 'hamming(3)'`` names a
generated one instead.  Index sets are printed 1-based, like alist files.
Input errors exit with status 2.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import gf2, instances
from .bench import format_summary, load_instance_dir, run_matrix, summarize, write_csv
from .bnb import VARIANTS, BnbConfig
from .gf2 import BudgetExceededError, TrivialCodeError
from .lp import write_lp
from .models import CodeInstance, SeparationPoint, build_mindist_model, normalize_instance
from .separation import (ParityCheckPool, brute_force_best_fs_cut, exact_rpc_separation, rpc_heuristic_A,
                         rpc_heuristic_B, separate_known_checks)
from .solver import solve_min_distance, solve_mld

SEPARATE_METHODS = ("zs", "rpc-a", "rpc-b", "exact", "exact-early", "oracle")


class InputError(Exception):
    pass


def _load_instance(args) -> CodeInstance:
    try:
        if args.builtin:
            name, params = instances.parse_builtin_spec(args.builtin)
            H = instances.builtin_instance(name, *params)
            label = instances.builtin_name(name, params)
        elif args.instance:
            H = instances.read_instance(args.instance)
            label = Path(args.instance).stem
        else:
            raise InputError("give --instance PATH or --builtin NAME(PARAMS)")
        return normalize_instance(H, label)
    except OSError as exc:
        raise InputError(f"cannot read instance: {exc}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None


def read_vector(path: str) -> np.ndarray:
    """Reals separated by commas and/or whitespace (including newlines)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    tokens = text.replace(",", " ").split()
    try:
        return np.array([float(t) for t in tokens])
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _config(args, **extra) -> BnbConfig:
    return BnbConfig(time_limit=args.time_limit, node_limit=args.node_limit, random_seed=args.seed, **extra)


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.6g}"


def _one_based(idx) -> str:
    return "{" + ",".join(str(int(j) + 1) for j in idx) + "}"


def cmd_solve(args) -> int:
    inst = _load_instance(args)
    cfg = _config(args, separation_variant=args.variant, separation_frequency=args.sepa_freq)
    if args.objective:
        gamma = read_vector(args.objective)
        if gamma.shape[0] != inst.n:
            raise InputError(f"objective has {gamma.shape[0]} entries, instance has n = {inst.n}")
        res, _ = solve_mld(inst, gamma, cfg)
    else:
        res, _ = solve_min_distance(inst, cfg)
    st = res.stats
    obj = res.objective_value
    shown = str(int(round(obj))) if math.isfinite(obj) and abs(obj - round(obj)) < 1e-9 else _fmt(obj)
    print(f"{res.status} {shown}")
    print(f"dual_bound {_fmt(res.dual_bound)}")
    print(f"gap_percent {_fmt(st.final_gap_percent)}")
    print(f"nodes {st.nodes_processed}")
    print(f"time {st.wall_time:.3f}")
    print("cuts " + " ".join(f"{k}={v}" for k, v in st.cuts_added_by_source.items()))
    if res.incumbent is not None:
        x = np.round(res.incumbent[:inst.n]).astype(int)
        print("codeword " + "".join(map(str, x)))
    return 0


def cmd_separate(args) -> int:
    inst = _load_instance(args)
    if not args.point:
        raise InputError("separate needs --point FILE")
    x = read_vector(args.point)
    if x.shape[0] != inst.n:
        raise InputError(f"point has {x.shape[0]} entries, instance has n = {inst.n}")
    try:
        pt = SeparationPoint(x)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    m = args.method
    if m == "zs":
        out = separate_known_checks(ParityCheckPool(inst), pt)
    elif m == "rpc-a":
        out = rpc_heuristic_A(inst, pt)
    elif m == "rpc-b":
        out = rpc_heuristic_B(inst, pt)
    elif m in ("exact", "exact-early"):
        out = exact_rpc_separation(inst, pt, "full" if m == "exact" else "early-stop",
                                   time_limit=args.time_limit, node_limit=args.node_limit)
    else:
        try:
            out = brute_force_best_fs_cut(inst, pt)
        except BudgetExceededError as exc:
            raise InputError(str(exc)) from None
    print(out.status.replace("-", " "))
    print(f"violation {_fmt(out.best_violation)}")
    if out.best_h is not None:
        print(f"h {_one_based(out.best_h.support)}")
        print(f"S {_one_based(out.best_S)}")
    print(f"cuts {len(out.cuts)}")
    print(f"time {out.separator_time:.3f}")
    return 0


def cmd_bench(args) -> int:
    try:
        suite = load_instance_dir(args.instances) if args.instances else [
            (name.replace("(", "_").replace(")", "").replace(",", "_"), H)
            for name, H in instances.bundled_suite()]
    except OSError as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    variants = [v for v in args.variants.split(",") if v]
    freqs = [f for f in args.frequencies.split(",") if f]
    try:
        records = run_matrix(suite, variants, freqs, _config(args), workers=args.workers)
    except (TrivialCodeError, ValueError) as exc:
        raise InputError(str(exc)) from None
    text = write_csv(records, with_timing=args.with_timing)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(format_summary(summarize(records)), file=sys.stderr if not args.out else sys.stdout)
    return 0


def cmd_oracle(args) -> int:
    inst = _load_instance(args)
    try:
        d, w = gf2.min_weight_oracle(inst.H)
    except BudgetExceededError as exc:
        raise InputError(str(exc)) from None
    print(f"min_distance {d}")
    print(f"codeword {w}")
    return 0


def cmd_generate(args) -> int:
    if args.suite:
        for p in instances.write_bundled_suite(args.out):
            print(p)
        return 0
    if not args.builtin or not args.out:
        raise InputError("generate needs --builtin NAME(PARAMS) and --out FILE, or --suite --out DIR")
    try:
        name, params = instances.parse_builtin_spec(args.builtin)
        H = instances.builtin_instance(name, *params)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    instances.write_instance(H, args.out)
    print(args.out)
    return 0


def cmd_export_lp(args) -> int:
    inst = _load_instance(args)
    model = build_mindist_model(inst)
    text = write_lp(model.lp, model.integer, name=inst.name or "mindist")
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fscut", description="Minimum distance of binary linear codes by branch-and-cut.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, instance=True):
        if instance:
            sp.add_argument("--instance", help="alist or dense instance file")
            sp.add_argument("--builtin", help="generated instance, e.g. 'hamming(3)' or 'random-ldpc(16,8,3,1)'")
        sp.add_argument("--time-limit", type=float, default=60.0)
        sp.add_argument("--node-limit", type=int, default=1_000_000)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("solve", help="minimum distance (or MLD with --objective)")
    common(sp)
    sp.add_argument("--variant", default="none", choices=VARIANTS)
    sp.add_argument("--sepa-freq", default="always", help="root, always or every<k>")
    sp.add_argument("--objective", help="cost vector file; solves the decoding problem instead")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("separate", help="separate one point")
    common(sp)
    sp.add_argument("--point", help="file of n reals in [0, 1]")
    sp.add_argument("--method", default="zs", choices=SEPARATE_METHODS)
    sp.set_defaults(func=cmd_separate, time_limit=10.0, node_limit=10_000)

    sp = sub.add_parser("bench", help="variant x frequency matrix over a directory of instances")
    common(sp, instance=False)
    sp.add_argument("--instances", help="directory of instance files (default: the bundled suite)")
    sp.add_argument("--variants", default=",".join(VARIANTS))
    sp.add_argument("--frequencies", default="root,always,every5")
    sp.add_argument("--out", help="CSV path (default: stdout)")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--with-timing", action="store_true", help="add a time column to the CSV")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("oracle", help="minimum distance by codeword enumeration")
    common(sp)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("generate", help="write a generated instance or the bundled suite")
    sp.add_argument("--builtin")
    sp.add_argument("--suite", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("export-lp", help="write the minimum-distance IP in LP format")
    common(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_export_lp)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TrivialCodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
