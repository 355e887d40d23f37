"""Command-line front end.

Subcommands:
  generate   write Watts-Strogatz instances to disk
  solve      run branch-and-cut on instance files, report TSV or text
  verify     run the built-in fixture suites (tables, trace, oracle battery)
  dp-cycle   solve a simple-cycle instance by dynamic programming

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
The environment variable LCIM_THREADS caps batch parallelism for `solve`.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import bnc, cyclecuts, demo, instance as inst_mod, knapcuts, oracle, special
from .bnc import CUT_FAMILIES, TSV_HEADER, SolveParams
from .instance import ParseError
from .knapcuts import xvar, yvar, zvar
from .lp import solve_lp

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_IO = 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lcim",
        description="Exact solver for least cost influence maximization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate small-world instances")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--v", type=int, required=True, help="mean degree (even)")
    gen.add_argument("--q", type=float, required=True, help="rewiring probability")
    gen.add_argument("--a", type=float, required=True, help="penetration rate")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--outdir", default=".")

    slv = sub.add_parser("solve", help="solve instance files")
    slv.add_argument("paths", nargs="+")
    slv.add_argument("--mode", choices=bnc.MODES, default="def")
    slv.add_argument("--time-limit", type=float, default=600.0, metavar="S")
    slv.add_argument("--rounds", type=int, default=50, metavar="K",
                     help="max root cutting rounds (cb mode)")
    slv.add_argument("--seed", type=int, default=0)
    slv.add_argument("--format", choices=("tsv", "text"), default="tsv")
    slv.add_argument("--out", metavar="PATH")

    sub.add_parser("verify", help="run the fixture verification suites")

    dpc = sub.add_parser("dp-cycle", help="solve a simple cycle by DP")
    dpc.add_argument("path")
    dpc.add_argument("--b", type=int, default=None)

    return parser


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def cmd_generate(args):
    try:
        os.makedirs(args.outdir, exist_ok=True)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for k in range(args.count):
        seed = args.seed + k
        try:
            inst = inst_mod.generate_small_world(
                args.n, args.v, args.q, args.a, seed
            )
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        name = f"{args.n}_{args.v}_{args.q}_{args.a}_{seed}.lcim"
        path = os.path.join(args.outdir, name)
        try:
            inst_mod.save(inst, path)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def _solve_one(path, args):
    inst = inst_mod.preprocess(inst_mod.load(path))
    params = SolveParams(
        time_limit=args.time_limit, max_rounds=args.rounds, seed=args.seed
    )
    return bnc.solve(inst, args.mode, params, instance_id=os.path.basename(path))


def cmd_solve(args):
    threads = max(1, int(os.environ.get("LCIM_THREADS", "1")))
    reports = []
    errors = []

    def run(path):
        try:
            return path, _solve_one(path, args), None
        except (OSError, ParseError) as exc:
            return path, None, (EXIT_IO, str(exc))
        except ValueError as exc:
            return path, None, (EXIT_USAGE, str(exc))

    if threads > 1 and len(args.paths) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, args.paths))
    else:
        results = [run(p) for p in args.paths]

    lines = []
    if args.format == "tsv":
        lines.append(TSV_HEADER)
    for path, report, err in results:
        if err is not None:
            errors.append((path, err))
            lines.append(f"# error\t{path}\t{err[1]}")
            continue
        reports.append(report)
        lines.append(
            report.tsv_line() if args.format == "tsv" else report.text_block() + "\n"
        )
    if args.format == "tsv" and len(reports) > 1:
        lines.append(_mean_line(reports))

    text = "\n".join(lines) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)

    if errors:
        return max(code for _, (code, _) in errors)
    return EXIT_OK


def _mean_line(reports):
    k = len(reports)
    cells = [
        "mean",
        reports[0].mode,
        f"{sum(r.n for r in reports) / k:g}",
        f"{sum(r.m for r in reports) / k:g}",
        f"{sum(r.b for r in reports) / k:g}",
        "-",
        f"{sum(r.ub for r in reports) / k:g}",
        f"{sum(r.lb for r in reports) / k:g}",
        f"{sum(r.gap for r in reports) / k:g}",
        f"{sum(r.nodes for r in reports) / k:g}",
    ]
    for fam in CUT_FAMILIES:
        cells.append(f"{sum(r.cuts.get(fam, 0) for r in reports) / k:g}")
    cells.append(f"{sum(r.seconds for r in reports) / k:.3f}")
    return "\t".join(cells)


# ---------------------------------------------------------------------------
# dp-cycle
# ---------------------------------------------------------------------------


def cmd_dp_cycle(args):
    try:
        inst = inst_mod.preprocess(inst_mod.load(args.path))
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        plan = special.dp_cycle(inst, args.b)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"start {plan.start} direction {plan.direction} cost {plan.cost}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _enumerate_cover_packing_rows(view):
    """Every distinct cover/packing cut over all admissible minimal sets."""
    from itertools import combinations

    rows = {}
    nbrs = view.neighbors
    for size in range(1, len(nbrs) + 1):
        for S in combinations(nbrs, size):
            for builder in (knapcuts.build_cover_cut, knapcuts.build_packing_cut):
                try:
                    cut = builder(view, S)
                except ValueError:
                    continue
                key = tuple(sorted(cut.coeffs.items()))
                rows[key] = cut
    return rows


def _suite_tables(failures):
    view = demo.example_view()
    rows = _enumerate_cover_packing_rows(view)
    actual = {k for k in rows}
    expected = {
        tuple(sorted(r["coeffs"].items())) for r in demo.TABLE_COVER_PACKING
    }
    checks = 0
    if actual != expected:
        failures.append(
            "cover/packing table mismatch:\n"
            f"  missing: {sorted(expected - actual)}\n"
            f"  extra:   {sorted(actual - expected)}"
        )
    checks += 1
    for r in demo.TABLE_MIS:
        cut = knapcuts.build_mis_cut(view, r["mis"])
        if cut.coeffs != r["coeffs"]:
            failures.append(
                f"MIS row M={r['mis']}: expected {r['coeffs']}, got {cut.coeffs}"
            )
        checks += 1
    return checks


def _suite_facets(failures):
    view = demo.example_view()
    checks = 0
    all_rows = [r["coeffs"] for r in demo.TABLE_COVER_PACKING + demo.TABLE_MIS]
    all_rows.append(demo.EXTRA_FACET_ROW)
    for coeffs in all_rows:
        ineq = knapcuts.Inequality(coeffs=coeffs, rhs=0.0, tag="base")
        if not oracle.check_facet(ineq, view):
            failures.append(f"not a facet: {ineq.render()}")
        checks += 1
    return checks


def _suite_trace(failures):
    inst = demo.demo_instance()
    model = bnc.assemble(inst, "def")
    sol = solve_lp(model)
    if abs(sol.objective - demo.DEMO_LP_OBJ) > 1e-4:
        failures.append(
            f"root LP: expected {demo.DEMO_LP_OBJ}, got {sol.objective:.6f}"
        )
    point = demo.demo_lp_point()
    views = {i: inst.node_view(i) for i in range(1, 6)}
    base_map = demo.demo_base_map(inst)
    cycle = demo.demo_cycle()
    res = cyclecuts.separate_uc(cycle, base_map, views, point, point, point)
    if res is None:
        failures.append("separate_uc found no cut at the recorded point")
    else:
        U, cut, violation = res
        if U != demo.DEMO_UC_U:
            failures.append(f"separation subset: expected {demo.DEMO_UC_U}, got {U}")
        if abs(violation - demo.DEMO_UC_VIOLATION) > 1e-6:
            failures.append(
                f"violation: expected {demo.DEMO_UC_VIOLATION}, got {violation}"
            )
        model.add_constraint(cut.coeffs, ">=", cut.rhs)
        sol2 = solve_lp(model)
        if abs(sol2.objective - demo.DEMO_POSTCUT_OBJ) > 1e-4:
            failures.append(
                f"post-cut LP: expected {demo.DEMO_POSTCUT_OBJ}, "
                f"got {sol2.objective:.6f}"
            )
    f_direct, exits = cyclecuts.uc_dag_values(
        cycle, base_map, views, point, point, point
    )
    dag = (f_direct, *exits)
    if any(abs(a - b) > 1e-6 for a, b in zip(dag, demo.DEMO_DAG_VALUES)):
        failures.append(
            f"DAG values: expected {demo.DEMO_DAG_VALUES}, got {dag}"
        )
    report = bnc.solve(inst, "def", SolveParams(time_limit=60))
    if report.ub != demo.DEMO_OPTIMUM:
        failures.append(f"optimum: expected {demo.DEMO_OPTIMUM}, got {report.ub}")
    return 4


def _suite_oracle(failures):
    rng = np.random.default_rng(20240817)
    checks = 0
    for _ in range(6):
        inst = _random_small_instance(rng)
        expect, _ = oracle.brute_force_optimum(inst)
        for mode in ("def", "cb"):
            report = bnc.solve(inst, mode, SolveParams(time_limit=60))
            if report.ub != expect:
                failures.append(
                    f"{mode} solve: expected {expect}, got {report.ub} "
                    f"(n={inst.n}, b={inst.b})"
                )
            checks += 1
    return checks


def _random_small_instance(rng, n_max=6):
    """Random connected bidirectional instance for oracle batteries."""
    n = int(rng.integers(3, n_max + 1))
    arcs = {}
    order = list(rng.permutation(np.arange(1, n + 1)))
    for a, b in zip(order, order[1:]):  # random spanning tree
        a, b = int(a), int(b)
        arcs[(a, b)] = int(rng.integers(1, 11))
        arcs[(b, a)] = int(rng.integers(1, 11))
    for i in range(1, n + 1):  # sprinkle extra edges
        for j in range(i + 1, n + 1):
            if (i, j) not in arcs and rng.random() < 0.35:
                arcs[(i, j)] = int(rng.integers(1, 11))
                arcs[(j, i)] = int(rng.integers(1, 11))
    thresholds = {}
    for i in range(1, n + 1):
        delta = sum(w for (a, b), w in arcs.items() if b == i)
        thresholds[i] = int(rng.integers(1, max(2, delta + 2)))
    b = int(rng.integers(1, n + 1))
    return inst_mod.preprocess(inst_mod.make_instance(n, arcs, thresholds, b))


def cmd_verify(_args):
    suites = [
        ("tables", _suite_tables),
        ("facets", _suite_facets),
        ("trace", _suite_trace),
        ("oracle", _suite_oracle),
    ]
    exit_code = EXIT_OK
    for name, fn in suites:
        failures = []
        try:
            checks = fn(failures)
        except FileNotFoundError as exc:
            print(f"{name}: FAIL fixture not found: {exc}")
            exit_code = EXIT_VERIFY
            continue
        if failures:
            print(f"{name}: FAIL {checks - len(failures)}/{checks} passed")
            for msg in failures:
                print(f"  {msg}")
            exit_code = EXIT_VERIFY
        else:
            print(f"{name}: ok {checks}/{checks} passed")
    return exit_code


# ---------------------------------------------------------------------------


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "generate": cmd_generate,
        "solve": cmd_solve,
        "verify": cmd_verify,
        "dp-cycle": cmd_dp_cycle,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
