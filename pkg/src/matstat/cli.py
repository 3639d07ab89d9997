"""Command-line front end: counting, lattice, and dependence tools.

Matrix files are JSON: {"matrix": [[...], ...]} for a single matrix and
{"matrices": [[[...], ...], ...]} for a tuple (bare arrays also accepted).
Grid runs write results (csv/json) plus a .manifest.json sidecar; every
run also prints a one-line manifest to stderr for reproducibility.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import counting, experiments, kernels, lattices, multdep, numtheory
from .exact import IntMatrix, MonicIntPoly
from .experiments import ExperimentSpec

__all__ = ["main"]


def _parse_ints(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise SystemExit(f"error: expected comma-separated integers, got {text!r}") from exc


def _parse_poly(text: str) -> MonicIntPoly:
    coeffs = _parse_ints(text)
    if len(coeffs) < 2:
        raise SystemExit("error: polynomial needs degree >= 1 (c0,...,1)")
    if coeffs[-1] != 1:
        raise SystemExit("error: polynomial must be monic (last coefficient 1)")
    return MonicIntPoly(coeffs[:-1])


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _as_matrix(obj) -> IntMatrix:
    if isinstance(obj, dict):
        obj = obj.get("matrix", obj)
    return IntMatrix(obj)


def _load_matrix(path: str) -> IntMatrix:
    return _as_matrix(_load_json(path))


def _load_tuple(path: str) -> List[IntMatrix]:
    obj = _load_json(path)
    if isinstance(obj, dict):
        obj = obj.get("matrices", obj)
    if not isinstance(obj, list) or not obj:
        raise SystemExit(f"error: {path} does not hold a matrix tuple")
    return [IntMatrix(m) for m in obj]


def _dump_tuple(mats: Sequence[IntMatrix], path: Optional[str]):
    payload = json.dumps(
        {"matrices": [[list(r) for r in m.rows] for m in mats]},
        sort_keys=True,
    )
    if path:
        with open(path, "w") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)


def _manifest_line(command: str, **fields):
    info = {
        "command": command,
        "backend": kernels.current_backend(),
        "versions": {
            "matstat": _pkg_version(),
            "python": sys.version.split()[0],
        },
    }
    info.update(fields)
    print(json.dumps({"manifest": info}, sort_keys=True), file=sys.stderr)


def _pkg_version() -> str:
    from . import __version__

    return __version__


def _print_count(args, label: str, count: int, extra: Optional[dict] = None):
    if args.format == "json":
        row = {"kind": label, "count": str(count)}
        if extra:
            row.update({k: str(v) for k, v in extra.items()})
        print(json.dumps(row, sort_keys=True))
    else:
        print(f"{label} = {count}")
        for k, v in (extra or {}).items():
            print(f"{k} = {v}")


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_count(args) -> int:
    common = dict(parts=args.parts, threads=args.threads, budget=args.budget)
    if args.what == "universe":
        _print_count(args, "universe", counting.universe_size(args.n, args.H))
    elif args.what == "charpoly":
        f = _parse_poly(args.f)
        if f.degree != args.n:
            raise SystemExit("error: charpoly degree must equal n")
        if args.n == 2 and args.method != "naive":
            count = counting.count_charpoly_fast2(args.H, f)
        else:
            count = counting.count_charpoly(args.n, args.H, f, **common)
        _print_count(args, "charpoly-count", count, {"f": f})
    elif args.what == "det":
        count = counting.count_with_det(
            args.n, args.H, args.d, method=args.method, **common
        )
        _print_count(args, "det-count", count)
    elif args.what == "dettrace":
        if args.t2 is None:
            count = counting.count_det_trace(
                args.n, args.H, args.d, args.t, method=args.method, **common
            )
        else:
            count = counting.count_det_trace2(
                args.n, args.H, args.d, args.t, args.t2, method=args.method,
                **common,
            )
        _print_count(args, "det-trace-count", count)
    elif args.what == "bordered":
        u, v = counting.count_singular_bordered(
            args.n, args.K, method=args.method, **common
        )
        _print_count(args, "bordered-u", u, {"bordered-v": v})
    elif args.what == "maxcharpoly":
        f, count = counting.max_charpoly_count(args.n, args.H, **common)
        _print_count(args, "max-charpoly-count", count, {"argmax": f})
    elif args.what == "centralizer":
        a = _load_matrix(args.matrix)
        count = counting.centralizer_count(a, args.H, node_cap=args.budget)
        _print_count(args, "centralizer-count", count)
    else:  # pragma: no cover
        raise SystemExit(f"error: unknown counter {args.what}")
    _manifest_line(
        "count " + args.what, n=args.n,
        budget=args.budget, parts=args.parts, threads=args.threads,
    )
    return 0


def _cmd_multdep(args) -> int:
    if args.what == "construct":
        if args.mode == "torsion":
            orders = _parse_ints(args.orders)
            a, m = multdep.construct_torsion_block(orders)
            _dump_tuple([a], args.out)
            print(f"dimension = {a.n}", file=sys.stderr)
            print(f"identity exponent = {m}", file=sys.stderr)
        else:
            blocks = _load_tuple(args.blocks)
            built = (
                multdep.construct_even(blocks)
                if args.mode == "even"
                else multdep.construct_odd(blocks)
            )
            _dump_tuple(built, args.out)
            k = multdep.alternating_relation_vector(len(built))
            print(f"relation = {','.join(map(str, k))}", file=sys.stderr)
        _manifest_line("multdep construct", mode=args.mode)
        return 0

    mats = _load_tuple(args.tuple)
    if args.what == "check":
        if args.k is not None:
            k = _parse_ints(args.k)
            ok = multdep.check_relation(mats, k)
            print(f"relation holds = {ok}")
            _manifest_line("multdep check", s=len(mats))
            return 0 if ok else 1
        k = multdep.find_dependence(mats, bound=args.bound)
        if k is None:
            print("dependent = False")
            _manifest_line("multdep check", s=len(mats), bound=args.bound)
            return 1
        print("dependent = True")
        print(f"witness = {','.join(map(str, k))}")
        _manifest_line("multdep check", s=len(mats), bound=args.bound)
    elif args.what == "rank":
        r = multdep.tuple_rank(mats, args.bound)
        print(f"rank = {r}")
        maximal = multdep.is_maximal_rank_dependent(mats, args.bound)
        print(f"maximal-rank dependent = {maximal}")
        _manifest_line("multdep rank", s=len(mats), bound=args.bound)
    elif args.what == "word":
        w = multdep.find_kernel_word(mats, args.max_len, state_cap=args.budget)
        if w is None:
            print("kernel word = none")
            _manifest_line("multdep word", s=len(mats), max_len=args.max_len)
            return 1
        text = " ".join(f"A{i + 1}^{s:+d}" for i, s in w.letters)
        print(f"kernel word = {text}")
        print(f"exponent sums = {','.join(map(str, w.exponent_sums))}")
        _manifest_line("multdep word", s=len(mats), max_len=args.max_len)
    else:  # pragma: no cover
        raise SystemExit(f"error: unknown multdep action {args.what}")
    return 0


def _cmd_lattice(args) -> int:
    if args.what == "dual":
        vec = _parse_ints(args.vector)
        lat = lattices.orthogonal_lattice([vec])
        basis = lattices.reduced_basis(lat, node_cap=args.budget)
        gram = lat.gram_det()
        print(f"rank = {lat.rank}")
        for row in basis:
            print("basis " + ",".join(map(str, row)))
        print(f"gram det = {gram}")
        check = lattices.dual_volume_check(vec)
        print(f"volume identity holds = {check}")
        _manifest_line("lattice dual", t=len(vec))
    elif args.what == "good":
        vec = _parse_ints(args.vector)
        verdict = lattices.is_k_good(vec, Fraction(args.K), node_cap=args.budget)
        print(f"verdict = {verdict.verdict}")
        print(f"minima squared = {','.join(map(str, verdict.minima_sq))}")
        _manifest_line("lattice good", t=len(vec), K=args.K)
    elif args.what == "census":
        if args.K == "sqrt":
            kb = math.ceil(math.sqrt(args.U))
        else:
            kb = Fraction(args.K)
        res = lattices.kbad_census(
            args.t, args.U, kb, method=args.method, node_cap=args.budget,
            parts=args.parts, threads=args.threads,
        )
        if args.format == "json":
            print(json.dumps({
                "t": args.t, "U": args.U, "K": str(kb),
                "count": str(res.count),
                "inv_norm_sum": repr(res.inv_norm_sum),
                "sum_error_bound": repr(res.sum_error_bound),
                "method": res.method,
            }, sort_keys=True))
        else:
            print(f"bad count = {res.count}")
            print(f"inverse norm sum = {res.inv_norm_sum!r}")
            print(f"sum error bound = {res.sum_error_bound:.3e}")
            print(f"method = {res.method}")
        _manifest_line(
            "lattice census", t=args.t, U=args.U, K=str(kb),
            budget=args.budget, parts=args.parts, threads=args.threads,
        )
    else:  # pragma: no cover
        raise SystemExit(f"error: unknown lattice action {args.what}")
    return 0


def _cmd_totient(args) -> int:
    if args.what == "v":
        val = numtheory.largest_totient_below(args.n)
        print(f"v({args.n}) = {val}")
    else:
        val = numtheory.max_totient_square_sum(args.n)
        print(f"w({args.n}) = {val}")
    _manifest_line("totient " + args.what, n=args.n)
    return 0


def _cmd_nt(args) -> int:
    if args.what == "smoothcount":
        val = numtheory.count_smooth_wrt(args.Q, args.U)
        print(f"count = {val}")
        _manifest_line("nt smoothcount", Q=args.Q, U=args.U)
    else:
        poly = numtheory.cyclotomic(args.k)
        print(f"cyclotomic({args.k}) = {poly}")
        _manifest_line("nt cyclotomic", k=args.k)
    return 0


def _cmd_fit(args) -> int:
    params = {}
    if args.d is not None:
        params["d"] = args.d
    if args.t is not None:
        params["t"] = args.t
    if args.t2 is not None:
        params["t2"] = args.t2
    if args.K is not None:
        params["K"] = args.K if args.K == "sqrt" else float(args.K)
    if args.f is not None:
        params["f"] = list(_parse_poly(args.f).all_coeffs())
    if args.matrix is not None:
        params["matrix"] = [list(r) for r in _load_matrix(args.matrix).rows]
    grid = tuple(float(g) for g in args.grid.split(","))
    spec = ExperimentSpec(
        kind=args.kind, n=args.n, grid=grid, params=params,
        parts=args.parts, threads=args.threads, budget=args.budget,
        seed=args.seed,
    )
    t0 = time.perf_counter()
    records = experiments.run_grid(spec)
    elapsed = (time.perf_counter() - t0) * 1000.0
    if args.out:
        mpath = experiments.write_outputs(
            spec, records, args.out, fmt=args.format,
            elapsed_ms=elapsed, include_timing=args.timing,
        )
        print(f"wrote {args.out} and {mpath}", file=sys.stderr)
    else:
        payload = (
            experiments.records_to_csv(records, args.timing)
            if args.format == "csv"
            else experiments.records_to_json(records, args.timing)
        )
        sys.stdout.write(payload)
    rc = 0
    if all(r.count > 0 for r in records) and len(records) >= 2:
        fit = experiments.fit_exponent(records)
        print(f"slope = {fit.slope:.4f}", file=sys.stderr)
        print(f"intercept = {fit.intercept:.4f}", file=sys.stderr)
        print(f"max residual = {fit.max_residual:.4f}", file=sys.stderr)
        if args.predicted is not None:
            verdict = experiments.compare_to_bound(
                fit, args.predicted, args.tol, args.mode
            )
            print(f"verdict = {verdict}", file=sys.stderr)
            rc = 0 if verdict == "consistent" else 1
    _manifest_line(
        "fit " + args.kind, n=args.n, grid=list(grid),
        budget=args.budget, parts=args.parts, threads=args.threads,
    )
    return rc


# ---------------------------------------------------------------------------
# parser


def _add_common(p, parts=1):
    p.add_argument("--parts", type=int, default=parts)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--budget", type=int, default=counting.DEFAULT_BUDGET)
    p.add_argument("--format", choices=("human", "csv", "json"), default="human")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="matstat",
        description="exact counting and dependence tools for bounded integer matrices",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    pc = sub.add_parser("count", help="exact matrix counts")
    pc.add_argument("what", choices=(
        "universe", "charpoly", "det", "dettrace", "bordered",
        "maxcharpoly", "centralizer",
    ))
    pc.add_argument("--n", type=int, default=2)
    pc.add_argument("--H", type=float, default=1.0)
    pc.add_argument("--K", type=int, default=1)
    pc.add_argument("--d", type=int, default=0)
    pc.add_argument("--t", type=int, default=0)
    pc.add_argument("--t2", type=int, default=None)
    pc.add_argument("--f", type=str, default=None,
                    help="monic coefficients c0,c1,...,1 (constant first)")
    pc.add_argument("--matrix", type=str, default=None, help="JSON matrix file")
    pc.add_argument("--method", choices=("auto", "fast", "naive"), default="auto")
    _add_common(pc)
    pc.set_defaults(fn=_cmd_count)

    pm = sub.add_parser("multdep", help="multiplicative dependence of tuples")
    pm.add_argument("what", choices=("check", "rank", "word", "construct"))
    pm.add_argument("--tuple", type=str, default=None, help="JSON tuple file")
    pm.add_argument("--bound", type=int, default=None)
    pm.add_argument("--k", type=str, default=None,
                    help="exponent vector to verify instead of searching")
    pm.add_argument("--max-len", type=int, default=6)
    pm.add_argument("--mode", choices=("even", "odd", "torsion"), default="even")
    pm.add_argument("--blocks", type=str, default=None)
    pm.add_argument("--orders", type=str, default=None)
    pm.add_argument("--out", type=str, default=None)
    _add_common(pm)
    pm.set_defaults(fn=_cmd_multdep)

    pl = sub.add_parser("lattice", help="orthogonal lattices and the census")
    pl.add_argument("what", choices=("dual", "good", "census"))
    pl.add_argument("--vector", type=str, default=None)
    pl.add_argument("--K", type=str, default="sqrt")
    pl.add_argument("--t", type=int, default=3)
    pl.add_argument("--U", type=float, default=20.0)
    pl.add_argument("--method", choices=("auto", "kernel", "generic"), default="auto")
    _add_common(pl)
    pl.set_defaults(fn=_cmd_lattice)

    pt = sub.add_parser("totient", help="totient extremizers")
    pt.add_argument("what", choices=("v", "w"))
    pt.add_argument("--n", type=int, required=True)
    pt.set_defaults(fn=_cmd_totient)

    pn = sub.add_parser("nt", help="number-theoretic helpers")
    pn.add_argument("what", choices=("smoothcount", "cyclotomic"))
    pn.add_argument("--Q", type=int, default=12)
    pn.add_argument("--U", type=int, default=12)
    pn.add_argument("--k", type=int, default=1)
    pn.set_defaults(fn=_cmd_nt)

    pf = sub.add_parser("fit", help="grid experiments and exponent fits")
    pf.add_argument("--kind", choices=experiments.EXPERIMENT_KINDS, required=True)
    pf.add_argument("--n", type=int, default=2)
    pf.add_argument("--grid", type=str, required=True, help="comma-separated H values")
    pf.add_argument("--d", type=int, default=None)
    pf.add_argument("--t", type=int, default=None)
    pf.add_argument("--t2", type=int, default=None)
    pf.add_argument("--K", type=str, default=None)
    pf.add_argument("--f", type=str, default=None)
    pf.add_argument("--matrix", type=str, default=None)
    pf.add_argument("--predicted", type=float, default=None)
    pf.add_argument("--tol", type=float, default=0.5)
    pf.add_argument("--mode", choices=("upper", "two-sided"), default="upper")
    pf.add_argument("--out", type=str, default=None)
    pf.add_argument("--seed", type=int, default=0)
    pf.add_argument("--timing", action="store_true")
    _add_common(pf, parts=8)
    pf.set_defaults(fn=_cmd_fit)

    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.cmd == "fit":
        if args.format == "human":
            args.format = "csv"  # grids always serialize as data
    elif getattr(args, "format", "human") == "csv":
        args.format = "human"
    try:
        return args.fn(args)
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
