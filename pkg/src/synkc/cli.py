"""``synkc`` command line front end.

Every subcommand prints (or writes with ``--report``) a JSON run report and
exits with 0 on success, 1 when a checked property fails, 2 on parse or
usage errors and 3 on solver timeouts or memory exhaustion.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from contextlib import contextmanager
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import __version__, sat
from .c2syn import compile_cnf
from .cnf import ClauseSet, ParseError, ParseReport, parse_qdimacs
from .nnf import Kind, NnfDag, VarDecl, x, y
from .nnf_format import NnfFormatError, read_nnf, write_nnf
from .oracle import gen_family, random_nnf
from .refine import check_refines
from .skolem import error_formula_check, gacks_skolem
from .synnnf import MembershipTimeout, check_ddnnf, check_dnnf, check_membership, check_wdnnf, syntactic_failures

log = logging.getLogger("synkc")

REPORT_SCHEMA = "synkc-report/1"
EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_TIMEOUT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


class Report:
    def __init__(self, command: str):
        self.data: Dict = {
            "schema": REPORT_SCHEMA,
            "version": __version__,
            "command": command,
            "inputs": {},
            "phases": {},
            "sat_calls": 0,
            "verdicts": {},
            "outputs": {},
        }
        self._calls0 = sat.stats["sat_calls"]

    def input(self, path: str) -> None:
        self.data["inputs"][path] = _digest(path)

    def output(self, path: str) -> None:
        self.data["outputs"][path] = _digest(path)

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.data["phases"][name] = round(time.perf_counter() - t0, 6)

    def finish(self, code: int, dest: Optional[str]) -> int:
        self.data["sat_calls"] = sat.stats["sat_calls"] - self._calls0
        self.data["exit_code"] = code
        text = json.dumps(self.data, indent=2, sort_keys=True)
        if dest:
            with open(dest, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return code


def _bits(assignment, decl: VarDecl) -> Optional[Dict[str, int]]:
    """Witness as a map from original DIMACS index to bit."""
    if assignment is None:
        return None
    out = {}
    for v, b in assignment.items():
        key = str(decl.dimacs_of(v)) if v.kind != Kind.BAR else repr(v)
        out[key] = int(b)
    return dict(sorted(out.items(), key=lambda kv: (len(kv[0]), kv[0])))


# --------------------------------------------------------------- loading
def _load_cnf(path: str, free_vars: str, order: Optional[str]) -> ClauseSet:
    with open(path) as fh:
        S = parse_qdimacs(fh.read(), free_vars=free_vars, report=ParseReport())
    if order and order != "prefix":
        if not order.startswith("file:"):
            raise UsageError("--order must be 'prefix' or 'file:<path>'")
        with open(order[5:]) as fh:
            ids = [int(t) for t in fh.read().split()]
        try:
            S = S.with_order(ids)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return S


def _load_spec(path: str, free_vars: str) -> Tuple[NnfDag, int]:
    """A specification from ``.nnf`` (its root) or (Q)DIMACS (the clause conjunction)."""
    if path.endswith(".nnf"):
        dag, roots = read_nnf(path)
        return dag, _main_root(roots)
    S = _load_cnf(path, free_vars, None)
    dag = NnfDag(S.decl)
    return dag, S.to_dag(dag)


def _main_root(roots: Dict[str, int]) -> int:
    for name in ("Ftilde", "root"):
        if name in roots:
            return roots[name]
    return list(roots.values())[-1]


def _load_into(path: str, dag: NnfDag) -> int:
    _, roots = read_nnf(path, dag=dag, outputs=dag.decl.x_names)
    return _main_root(roots)


# -------------------------------------------------------------- commands
def cmd_compile(args, rep: Report) -> int:
    rep.input(args.input)
    with rep.phase("parse"):
        S = _load_cnf(args.input, args.free_vars, args.order)
    with rep.phase("compile"):
        cap = None if args.always_try_gacks else args.gacks_cap
        res = compile_cnf(S, gacks_cap=cap)
    dag, root = res.dag, res.root
    rep.data["stats"] = dict(sorted(res.stats.items()))
    code = EXIT_OK
    if args.verify:
        with rep.phase("verify"):
            code = _verify(dag, S.to_dag(dag), root, rep)
    if args.skolem:
        with rep.phase("skolem"):
            sk = gacks_skolem(dag, root, [dag.decl.var_of(v) for v in S.x_order])
            write_nnf(dag, sk.named_roots(), args.skolem)
        rep.output(args.skolem)
    if args.output:
        write_nnf(dag, {"Ftilde": root}, args.output)
        rep.output(args.output)
    if args.stats:
        with open(args.stats, "w") as fh:
            json.dump(dict(sorted(res.stats.items())), fh, indent=2)
    return code


def _verify(dag: NnfDag, f: int, ftilde: int, rep: Report) -> int:
    fails = syntactic_failures(dag, ftilde)
    ref = check_refines(dag, ftilde, f)
    decl = dag.decl
    rep.data["verdicts"].update({
        "syntactic_synnnf": not fails,
        "syntactic_failures": {str(decl.x_names[i - 1]): node for i, node in fails.items()},
        "refines_a": ref.cond_a,
        "refines_b": ref.cond_b,
        "witness_a": _bits(ref.witness_a, decl),
        "witness_b": {k: _bits(v, decl) for k, v in ref.witness_b.items()} if ref.witness_b else None,
    })
    return EXIT_OK if not fails and ref.holds else EXIT_VIOLATED


def cmd_verify(args, rep: Report) -> int:
    rep.input(args.spec)
    rep.input(args.candidate)
    with rep.phase("parse"):
        dag, f = _load_spec(args.spec, args.free_vars)
        ft = _load_into(args.candidate, dag)
    with rep.phase("verify"):
        return _verify(dag, f, ft, rep)


def cmd_check(args, rep: Report) -> int:
    rep.input(args.input)
    with rep.phase("parse"):
        dag, roots = read_nnf(args.input)
        root = _main_root(roots)
    with rep.phase("check"):
        if args.form == "synnnf":
            try:
                mr = check_membership(dag, root, args.method)
            except MembershipTimeout as exc:
                rep.data["verdicts"]["membership"] = exc.partial.to_json(dag.decl)
                raise
            rep.data["verdicts"]["membership"] = mr.to_json(dag.decl)
            ok = mr.in_synnnf
        else:
            ok = {"wdnnf": check_wdnnf, "dnnf": check_dnnf, "ddnnf": check_ddnnf}[args.form](dag, root)
        rep.data["verdicts"][args.form] = ok
    return EXIT_OK if ok else EXIT_VIOLATED


def cmd_synthesize(args, rep: Report) -> int:
    rep.input(args.input)
    with rep.phase("parse"):
        S = _load_cnf(args.input, args.free_vars, args.order)
    with rep.phase("compile"):
        res = compile_cnf(S, gacks_cap=None if args.always_try_gacks else args.gacks_cap)
    dag = res.dag
    order = [dag.decl.var_of(v) for v in S.x_order]
    with rep.phase("skolem"):
        sk = gacks_skolem(dag, res.root, order)
    with rep.phase("error_formula"):
        verdict = error_formula_check(dag, S.to_dag(dag), sk)
    rep.data["stats"] = dict(sorted(res.stats.items()))
    rep.data["verdicts"]["skolem_correct"] = verdict.correct
    if not verdict.correct:
        rep.data["verdicts"]["witness"] = {"y": _bits(verdict.y, dag.decl), "psi": _bits(verdict.psi, dag.decl)}
    rep.data["skolem_nodes"] = sk.node_count()
    if args.output:
        write_nnf(dag, sk.named_roots(), args.output)
        rep.output(args.output)
    if args.text:
        with open(args.text, "w") as fh:
            fh.write(sk.to_text())
    return EXIT_OK if verdict.correct else EXIT_VIOLATED


def cmd_refine_check(args, rep: Report) -> int:
    rep.input(args.spec)
    rep.input(args.candidate)
    with rep.phase("parse"):
        dag, f = _load_spec(args.spec, args.free_vars)
        ft = _load_into(args.candidate, dag)
    with rep.phase("refine"):
        ref = check_refines(dag, ft, f)
    decl = dag.decl
    rep.data["verdicts"].update({
        "cond_a": ref.cond_a,
        "cond_b": ref.cond_b,
        "refines": ref.holds,
        "witness_a": _bits(ref.witness_a, decl),
        "witness_b": {k: _bits(v, decl) for k, v in ref.witness_b.items()} if ref.witness_b else None,
    })
    return EXIT_OK if ref.holds else EXIT_VIOLATED


def cmd_gen(args, rep: Report) -> int:
    if args.family != "appendix":
        raise UsageError(f"unknown family {args.family!r}")
    if args.n < 1:
        raise UsageError("--n must be positive")
    rng = np.random.default_rng(args.seed)
    dag = NnfDag(VarDecl.plain(args.n, args.ny))
    fs = []
    for i in range(1, args.n + 2):
        variables = [x(k) for k in range(i + 1, args.n + 1)] + [y(j) for j in range(1, args.ny + 1)]
        fs.append(random_nnf(rng, dag, n_nodes=args.f_size, variables=variables) if variables else 1)
    ops = [args.op] * args.n
    root = gen_family(dag, [args.opprime] * args.n, ops, fs, xor_form=args.xor_form)
    write_nnf(dag, {"root": root}, args.output)
    rep.output(args.output)
    rep.data["verdicts"]["nodes"] = dag.size(root)
    return EXIT_OK


# ---------------------------------------------------------------- parser
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="synkc", description="Compile CNF specifications into a synthesis-friendly NNF and check them.")
    p.add_argument("--version", action="version", version=f"synkc {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", help="write the JSON run report here instead of stdout")
    common.add_argument("--timeout", type=float, default=3600.0, help="wall-clock budget in seconds (default 3600)")
    common.add_argument("--conflict-budget", type=int, help="per-query conflict limit")
    common.add_argument("--dump-cnf", metavar="DIR", help="write every SAT query as DIMACS into DIR")
    common.add_argument("--free-vars", choices=["universal", "reject"], default="universal",
                        help="treatment of unquantified DIMACS variables")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def compile_opts(sp):
        sp.add_argument("--order", default="prefix", help="output order: 'prefix' or 'file:<path>'")
        sp.add_argument("--gacks-cap", type=int, default=64, help="skip the Skolem shortcut below the top level above this many outputs")
        sp.add_argument("--always-try-gacks", action="store_true", help="disable --gacks-cap")
        sp.add_argument("--seed", type=int, default=0, help="accepted for reproducibility; compilation is deterministic")

    c = sub.add_parser("compile", parents=[common], help="compile a (Q)DIMACS specification")
    c.add_argument("input")
    c.add_argument("-o", "--output")
    c.add_argument("--verify", action="store_true")
    c.add_argument("--skolem", help="also write the Skolem vector of the result (.nnf)")
    c.add_argument("--stats", help="write compiler counters as JSON")
    compile_opts(c)
    c.set_defaults(func=cmd_compile)

    k = sub.add_parser("check", parents=[common], help="check normal-form membership of an .nnf file")
    k.add_argument("input")
    k.add_argument("--form", choices=["synnnf", "wdnnf", "dnnf", "ddnnf"], default="synnnf")
    k.add_argument("--method", choices=["auto", "semantic", "syntactic"], default="auto")
    k.set_defaults(func=cmd_check)

    s = sub.add_parser("synthesize", parents=[common], help="compile, extract Skolem functions, check them against the input")
    s.add_argument("input")
    s.add_argument("-o", "--output", help="Skolem vector as multi-rooted .nnf")
    s.add_argument("--text", help="Skolem functions as readable expressions")
    compile_opts(s)
    s.set_defaults(func=cmd_synthesize)

    v = sub.add_parser("verify", parents=[common], help="check that a candidate is in normal form and refines the specification")
    v.add_argument("spec")
    v.add_argument("candidate")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("refine-check", parents=[common], help="check refinement of a specification by a candidate")
    r.add_argument("spec")
    r.add_argument("candidate")
    r.set_defaults(func=cmd_refine_check)

    g = sub.add_parser("gen", parents=[common], help="generate a fixture instance")
    g.add_argument("--family", default="appendix")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--ny", type=int, default=3)
    g.add_argument("--opprime", choices=["or", "xor", "and"], default="or")
    g.add_argument("--op", choices=["and", "or"], default="and")
    g.add_argument("--xor-form", choices=["cnf", "dnf"], default="cnf")
    g.add_argument("--f-size", type=int, default=4)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    sat.configure(conflict_budget=args.conflict_budget, timeout=args.timeout, dump_dir=args.dump_cnf)
    rep = Report(args.command)
    try:
        code = args.func(args, rep)
    except (ParseError, NnfFormatError, UsageError, OSError, KeyError) as exc:
        rep.data["error"] = f"{type(exc).__name__}: {exc}"
        code = EXIT_USAGE
    except sat.SolverTimeout as exc:
        rep.data["error"] = f"timeout: {exc}"
        code = EXIT_TIMEOUT
    except MemoryError:
        rep.data["error"] = "out of memory"
        code = EXIT_TIMEOUT
    finally:
        sat.configure()
    return rep.finish(code, args.report)


if __name__ == "__main__":
    sys.exit(main())
