"""``semiring-dp`` command line.

Exit codes: 0 ok, 2 parse/usage error, 3 legality or validation failure,
4 budget exceeded, 5 oracle mismatch, 1 anything else.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

from . import cds, csp, generate, oracle
from .algebra import INF, TROP, Value, parse_semiring
from .errors import LegalityError, ParseError, SemiringDPError, UsageError
from .expr import EvalStats, Expr, ExprStore, Universe, dumps, evaluate, loads
from .measures import (MeasureMatrix, count_min_cost, counting_measure, decision_measure,
                       delta_measure, list_measure, parse_matrix)

EXIT_MISMATCH = 5
MEASURES = ("decision", "count", "list", "cost", "deltanat", "count-min-cost", "matrix")


class OracleMismatch(SemiringDPError):
    exit_code = EXIT_MISMATCH


class _Inputs:
    """Reads files once and remembers their hashes for the report."""

    def __init__(self):
        self.hashes = {}

    def read(self, path) -> str:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
        self.hashes[str(path)] = hashlib.sha256(data).hexdigest()
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError:
            raise ParseError(f"{path} is not UTF-8 text") from None


# -- measures ----------------------------------------------------------------


def parse_lists(text: str, universe: Universe) -> dict:
    """Lines ``s: t1 t2 ...``; elements matched by ``str``."""
    s_by = {str(s): s for s in universe.S}
    t_by = {str(t): t for t in universe.T}
    allowed = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise ParseError("expected 's: t1 t2 ...'", lineno, 1)
        if head.strip() not in s_by:
            raise ParseError(f"unknown domain element {head.strip()!r}", lineno, 1)
        ts = []
        for tok in rest.split():
            if tok not in t_by:
                raise ParseError(f"unknown codomain element {tok!r}", lineno, raw.find(tok) + 1)
            ts.append(t_by[tok])
        allowed[s_by[head.strip()]] = set(ts)
    return allowed


def build_measure(args, universe: Universe, inputs: _Inputs) -> MeasureMatrix | None:
    """The matrix for ``--measure``; None for count-min-cost (handled apart)."""
    m = args.measure
    if m == "decision":
        return decision_measure(universe)
    if m == "count":
        return counting_measure(universe)
    if m == "list":
        if not args.lists:
            raise UsageError("--measure list needs --lists FILE")
        return list_measure(universe, parse_lists(inputs.read(args.lists), universe))
    if m in ("cost", "deltanat", "count-min-cost"):
        costs = load_costs(args, universe, inputs)
        if m == "cost":
            return costs
        if m == "deltanat":
            return delta_measure(costs, counting_measure(universe))
        return None
    if m == "matrix":
        if not args.matrix:
            raise UsageError("--measure matrix needs --matrix FILE")
        return parse_matrix(inputs.read(args.matrix), universe)
    raise UsageError(f"unknown measure {m!r}")


def load_costs(args, universe, inputs) -> MeasureMatrix:
    if not args.costs:
        raise UsageError(f"--measure {args.measure} needs --costs FILE")
    m = parse_matrix(inputs.read(args.costs), universe, default_semiring=TROP, fill_missing=True)
    if m.semiring != TROP:
        raise UsageError(f"cost file must be tropical, got {m.semiring}")
    return m


def render_value(v: Value):
    return str(v)


def _measure_expr(args, e: Expr, inputs, report, oracle_fs=None):
    """Evaluate ``e`` under the chosen measure; also on ``oracle_fs`` if given."""
    universe = e.store.universe
    matrix = build_measure(args, universe, inputs)
    stats = EvalStats()
    t0 = time.perf_counter()
    if matrix is None:
        costs = load_costs(args, universe, inputs)
        best, count = count_min_cost(e, costs)
        stats.nodes = len(e.store.reachable(e))
        result = {"min": "inf" if best == INF else best, "count": str(count)}
        semiring = "prod(delta(trop,nat),nat)"
    else:
        val = evaluate(e, matrix, stats)
        result = render_value(val)
        semiring = str(matrix.semiring)
    report["timings"]["evaluate"] = time.perf_counter() - t0
    report["value"] = result
    report["semiring"] = semiring
    report["expr_stats"] = {"dag_nodes": stats.nodes, "tree_size": e.tree_size,
                            "domain_size": len(e.domain)}
    if oracle_fs is not None:
        t0 = time.perf_counter()
        if matrix is None:
            costs = load_costs(args, universe, inputs)
            best, winners = oracle.argmin_scan(oracle_fs, costs)
            if best == INF:
                winners = oracle_fs
            expected = {"min": "inf" if best == INF else best, "count": str(len(winners))}
        else:
            expected = render_value(oracle.measure_directly(oracle_fs, matrix))
        report["timings"]["oracle"] = time.perf_counter() - t0
        report["oracle"] = {"value": expected, "agrees": expected == result}
        if expected != result:
            raise OracleMismatch(f"oracle mismatch: solver gave {result!r}, oracle gave {expected!r}")


# -- commands -----------------------------------------------------------------


def _kexpr(args, inputs):
    return cds.parse_kexpr(inputs.read(args.kexpr))


def cmd_solve_graph(args, inputs, report, connected):
    t0 = time.perf_counter()
    e = _kexpr(args, inputs)
    report["timings"]["parse"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    solver = cds.solve_semiring_cds if connected else cds.solve_semiring_ds
    expr = solver(e, max_k=args.k_limit)
    report["timings"]["solve"] = time.perf_counter() - t0
    if args.emit_expr:
        Path(args.emit_expr).write_text(dumps(expr) + "\n")
    fs = None
    if args.check_oracle:
        budget = oracle.EnumerationBudget.from_env()
        g = cds.eval_kexpr(e)
        fs = oracle.enumerate_cds(g, budget) if connected else oracle.enumerate_ds(g, budget)
    _measure_expr(args, expr, inputs, report, fs)


def _csp_inputs(args, inputs, semiring=None, valued=False):
    if not args.instance or not args.td:
        raise UsageError("this command needs --instance FILE and --td FILE")
    inst = csp.parse_instance(inputs.read(args.instance), semiring)
    if valued and isinstance(inst, csp.CspInstance):
        inst = inst.indicator_instance(semiring)
    td = csp.parse_td(inputs.read(args.td), inst.variables)
    g = csp.gaifman(inst)
    ntd = csp.make_nice(g, td, inst.constraints if isinstance(inst, csp.SumProductInstance) else None)
    return inst, ntd


def cmd_solve_csp(args, inputs, report):
    t0 = time.perf_counter()
    inst, ntd = _csp_inputs(args, inputs)
    if not isinstance(inst, csp.CspInstance):
        raise UsageError("solve-csp needs relation constraints ('tuples'); use sum-product")
    report["timings"]["parse"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    expr = csp.solve_semiring_csp(inst, ntd)
    report["timings"]["solve"] = time.perf_counter() - t0
    if args.emit_expr:
        Path(args.emit_expr).write_text(dumps(expr) + "\n")
    fs = oracle.enumerate_csp(inst, oracle.EnumerationBudget.from_env()) if args.check_oracle else None
    _measure_expr(args, expr, inputs, report, fs)


def cmd_sum_product(args, inputs, report):
    t0 = time.perf_counter()
    inst, ntd = _csp_inputs(args, inputs, args.semiring, valued=True)
    report["timings"]["parse"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    val = csp.solve_sum_product(inst, ntd)
    report["timings"]["solve"] = time.perf_counter() - t0
    report["value"] = render_value(val)
    report["semiring"] = str(val.semiring)
    if args.check_oracle:
        expected = render_value(oracle.brute_sum_product(inst, oracle.EnumerationBudget.from_env()))
        report["oracle"] = {"value": expected, "agrees": expected == report["value"]}
        if expected != report["value"]:
            raise OracleMismatch(f"oracle mismatch: solver gave {report['value']}, oracle gave {expected}")


def cmd_eval_expr(args, inputs, report):
    if not args.matrix:
        raise UsageError("eval-expr needs --matrix FILE (it defines S, T and the semiring)")
    m = parse_matrix(inputs.read(args.matrix))
    store = ExprStore(m.universe)
    e = loads(inputs.read(args.expr), store)
    stats = EvalStats()
    t0 = time.perf_counter()
    report["value"] = render_value(evaluate(e, m, stats))
    report["timings"]["evaluate"] = time.perf_counter() - t0
    report["semiring"] = str(m.semiring)
    report["expr_stats"] = {"dag_nodes": stats.nodes, "tree_size": e.tree_size,
                            "domain_size": len(e.domain)}


def cmd_oracle(args, inputs, report):
    budget = oracle.EnumerationBudget.from_env()
    t0 = time.perf_counter()
    if args.problem in ("cds", "ds"):
        if not args.kexpr:
            raise UsageError("oracle cds/ds needs --kexpr FILE")
        g = cds.eval_kexpr(_kexpr(args, inputs))
        fs = oracle.enumerate_cds(g, budget) if args.problem == "cds" else oracle.enumerate_ds(g, budget)
        universe = Universe(g.vertices, (0, 1))
    elif args.problem == "csp":
        if not args.instance:
            raise UsageError("oracle csp needs --instance FILE")
        inst = csp.parse_instance(inputs.read(args.instance))
        if not isinstance(inst, csp.CspInstance):
            raise UsageError("oracle csp needs relation constraints")
        fs = oracle.enumerate_csp(inst, budget)
        universe = Universe(inst.variables, inst.domain)
    else:
        if not args.instance:
            raise UsageError("oracle sum-product needs --instance FILE")
        inst = csp.parse_instance(inputs.read(args.instance), args.semiring)
        if isinstance(inst, csp.CspInstance):
            inst = inst.indicator_instance(args.semiring)
        val = oracle.brute_sum_product(inst, budget)
        report["value"] = render_value(val)
        report["semiring"] = str(val.semiring)
        report["timings"]["oracle"] = time.perf_counter() - t0
        return
    report["solutions"] = len(fs)
    matrix = build_measure(args, universe, inputs)
    if matrix is None:
        costs = load_costs(args, universe, inputs)
        best, winners = oracle.argmin_scan(fs, costs)
        if best == INF:
            winners = fs
        report["value"] = {"min": "inf" if best == INF else best, "count": str(len(winners))}
        report["semiring"] = "prod(delta(trop,nat),nat)"
    else:
        report["value"] = render_value(oracle.measure_directly(fs, matrix))
        report["semiring"] = str(matrix.semiring)
    report["timings"]["oracle"] = time.perf_counter() - t0


def cmd_validate(args, inputs, report):
    if args.kexpr:
        e = _kexpr(args, inputs)
        g = cds.eval_kexpr(e)
        report["value"] = "ok"
        report["graph"] = {"vertices": len(g.vertices), "edges": len(g.edges),
                           "k": cds.kexpr_width(e)}
        if args.edge_list:
            Path(args.edge_list).write_text(cds.format_edge_list(g))
        return
    if not args.instance or not args.td:
        raise UsageError("validate needs --kexpr FILE, or --instance FILE and --td FILE")
    inst = csp.parse_instance(inputs.read(args.instance), args.semiring)
    td = csp.parse_td(inputs.read(args.td), inst.variables)
    rep = csp.validate_td(csp.gaifman(inst), td)
    if not rep.ok:
        raise LegalityError(f"tree decomposition violates property {rep.property} "
                            f"(witness {rep.witness!r})")
    ntd = csp.make_nice(csp.gaifman(inst), td)
    problems = csp.check_nice(ntd)
    if problems:
        raise LegalityError("nice conversion failed: " + "; ".join(problems))
    report["value"] = "ok"
    report["td"] = {"width": rep.width, "bags": len(td.bags), "nice_nodes": len(ntd)}


def cmd_gen(args, inputs, report):
    if args.kind == "kexpr":
        e = generate.random_kexpr(args.k, args.n, args.seed)
        text = cds.format_kexpr(e) + "\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return None
    if not args.out:
        raise UsageError("gen csp needs --out PREFIX (writes PREFIX.json and PREFIX.td)")
    inst, td = generate.random_csp(args.vars, args.domain, args.seed, max_arity=args.arity)
    Path(args.out + ".json").write_text(csp.format_instance(inst))
    Path(args.out + ".td").write_text(csp.format_td(td, inst.variables))
    return None


# -- report and entry point ---------------------------------------------------


def render_report(report: dict) -> str:
    """Canonical JSON: re-parsing and re-rendering gives the same bytes."""
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _human_value(v):
    if isinstance(v, dict):
        return f"min={v['min']} count={v['count']}"
    return v


def render_human(report: dict) -> str:
    lines = [f"value: {_human_value(report.get('value'))}"]
    if "semiring" in report:
        lines.append(f"semiring: {report['semiring']}")
    if "expr_stats" in report:
        s = report["expr_stats"]
        lines.append(f"expression: {s['dag_nodes']} dag nodes, tree size {s['tree_size']}, "
                     f"domain size {s['domain_size']}")
    if "oracle" in report:
        lines.append(f"oracle: {_human_value(report['oracle']['value'])} "
                     f"({'agrees' if report['oracle']['agrees'] else 'MISMATCH'})")
    for key in ("graph", "td"):
        if key in report:
            lines.append(f"{key}: " + ", ".join(f"{k}={v}" for k, v in sorted(report[key].items())))
    return "\n".join(lines) + "\n"


def _parser():
    p = argparse.ArgumentParser(prog="semiring-dp",
                                description="Join/union expressions and semiring measures for "
                                            "dominating sets (clique-width) and CSPs (treewidth).")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, measure=True):
        sp.add_argument("--format", choices=("human", "json"), default="human")
        if measure:
            sp.add_argument("--measure", choices=MEASURES, default="count")
            sp.add_argument("--costs", help="tropical cost file: 's t cost' lines, missing pairs cost 0")
            sp.add_argument("--lists", help="list file: 's: t1 t2 ...' lines")
            sp.add_argument("--matrix", help="measure matrix file (with 'semiring:' header)")

    for name, help_ in (("solve-cds", "connected dominating sets from a k-expression"),
                        ("solve-ds", "dominating sets from a k-expression")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--kexpr", required=True)
        sp.add_argument("--k-limit", type=int, default=_env_int("SEMIRING_DP_MAX_K", cds.MAX_K))
        sp.add_argument("--check-oracle", action="store_true")
        sp.add_argument("--emit-expr", help="write the expression to this file")
        common(sp)

    sp = sub.add_parser("solve-csp", help="solution expression of a CSP over a tree decomposition")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--td", required=True)
    sp.add_argument("--check-oracle", action="store_true")
    sp.add_argument("--emit-expr")
    common(sp)

    sp = sub.add_parser("sum-product", help="sum over assignments of products of valuations")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--td", required=True)
    sp.add_argument("--semiring", help="descriptor overriding the instance's")
    sp.add_argument("--check-oracle", action="store_true")
    common(sp, measure=False)

    sp = sub.add_parser("eval-expr", help="evaluate a stored expression under a measure matrix")
    sp.add_argument("--expr", required=True)
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--format", choices=("human", "json"), default="human")

    sp = sub.add_parser("oracle", help="brute-force answer")
    sp.add_argument("problem", choices=("cds", "ds", "csp", "sum-product"))
    sp.add_argument("--kexpr")
    sp.add_argument("--instance")
    sp.add_argument("--semiring")
    common(sp)

    sp = sub.add_parser("validate", help="check a k-expression or a tree decomposition")
    sp.add_argument("--kexpr")
    sp.add_argument("--edge-list", help="write the graph of --kexpr as an edge list")
    sp.add_argument("--instance")
    sp.add_argument("--td")
    sp.add_argument("--semiring")
    sp.add_argument("--format", choices=("human", "json"), default="human")

    sp = sub.add_parser("gen", help="seeded random fixtures")
    sp.add_argument("kind", choices=("kexpr", "csp"))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--n", type=int, default=6)
    sp.add_argument("--vars", type=int, default=5)
    sp.add_argument("--domain", type=int, default=3)
    sp.add_argument("--arity", type=int, default=3)
    sp.add_argument("--out")
    return p


def _env_int(name, default):
    raw = os.environ.get(name)
    try:
        return int(raw) if raw else default
    except ValueError:
        return default


COMMANDS = {
    "solve-cds": lambda a, i, r: cmd_solve_graph(a, i, r, True),
    "solve-ds": lambda a, i, r: cmd_solve_graph(a, i, r, False),
    "solve-csp": cmd_solve_csp,
    "sum-product": cmd_sum_product,
    "eval-expr": cmd_eval_expr,
    "oracle": cmd_oracle,
    "validate": cmd_validate,
    "gen": cmd_gen,
}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = _parser().parse_args(argv)
    inputs = _Inputs()
    report = {"command": args.command, "timings": {}}
    if getattr(args, "measure", None):
        report["measure"] = args.measure
    code = 0
    try:
        if getattr(args, "semiring", None):
            args.semiring = parse_semiring(args.semiring)
        COMMANDS[args.command](args, inputs, report)
    except SemiringDPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = exc.exit_code
        if not isinstance(exc, OracleMismatch):
            return code
    if args.command == "gen":
        return code
    report["provenance"] = {"inputs": dict(sorted(inputs.hashes.items()))}
    if getattr(args, "format", "human") == "json":
        out.write(render_report(report))
    else:
        out.write(render_human(report))
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
