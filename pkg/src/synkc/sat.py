"""SAT-based decision procedures over NNF DAGs.

A :class:`Session` owns one incremental CDCL solver (pysat) and a Tseitin
:class:`Encoder`.  DAG nodes are encoded lazily and only in the polarities
requested.  Several *scopes* can coexist in one session: a scope names a
copy of some variables (e.g. the primed outputs ``X'``) while every other
variable is shared with the base scope.
"""

from __future__ import annotations

import itertools
import logging
import os
import threading
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from pysat.solvers import Solver

from .nnf import AND, FALSE, LIT, OR, TRUE, Kind, NnfDag, Var

__all__ = [
    "SolverTimeout",
    "CnfEncoding",
    "Encoder",
    "Session",
    "SatVerdict",
    "QbfVerdict",
    "configure",
    "stats",
    "tseitin",
    "is_sat",
    "is_tautology",
    "semantically_independent",
    "forall_exists_valid",
    "OUTPUT_KINDS",
]

log = logging.getLogger(__name__)

OUTPUT_KINDS = frozenset({Kind.OUTPUT, Kind.BAR})

# Counters shared by every session: "sat_calls", "qbf_iterations", ...
stats: Counter = Counter()


class SolverTimeout(RuntimeError):
    """A query hit its conflict budget, deadline or iteration cap."""


@dataclass
class _Config:
    solver: str = "minisat22"
    conflict_budget: Optional[int] = None
    deadline: Optional[float] = None  # absolute time.monotonic() value
    dump_dir: Optional[str] = None


_config = _Config()


def configure(
    solver: Optional[str] = None,
    conflict_budget: Optional[int] = None,
    timeout: Optional[float] = None,
    dump_dir: Optional[str] = None,
) -> None:
    """Set process-wide solver defaults; ``timeout`` is in seconds from now."""
    if solver is not None:
        _config.solver = solver
    _config.conflict_budget = conflict_budget
    _config.deadline = time.monotonic() + timeout if timeout is not None else None
    _config.dump_dir = dump_dir


def _dump_dir() -> Optional[str]:
    return _config.dump_dir or os.environ.get("SYNKC_SOLVER_DUMP") or None


# ---------------------------------------------------------------- encoding
@dataclass
class CnfEncoding:
    clauses: List[List[int]]
    def_map: Dict[int, int]
    input_map: Dict[Var, int]


class Encoder:
    """Polarity-aware Tseitin encoder with named variable scopes."""

    POS, NEG = 1, 2

    def __init__(self, dag: NnfDag):
        self.dag = dag
        self.clauses: List[List[int]] = []
        self.nvars = 0
        self._vars: Dict[Tuple[str, Var], int] = {}
        self._defs: Dict[Tuple[str, int], int] = {}
        self._done: Dict[Tuple[str, int], int] = {}
        self._scopes: Dict[str, Tuple[frozenset, frozenset]] = {"": (frozenset(), frozenset())}
        self._true: Optional[int] = None

    def new_var(self) -> int:
        self.nvars += 1
        return self.nvars

    def declare_scope(self, name: str, private_vars: Iterable[Var] = (), private_kinds: Iterable[Kind] = ()) -> None:
        """Make ``name`` a scope whose listed variables are fresh copies."""
        self._scopes[name] = (frozenset(private_vars), frozenset(private_kinds))

    def _owner(self, v: Var, scope: str) -> str:
        private, kinds = self._scopes[scope]
        return scope if (v in private or v.kind in kinds) else ""

    def var(self, v: Var, scope: str = "") -> int:
        key = (self._owner(v, scope), v)
        ident = self._vars.get(key)
        if ident is None:
            ident = self._vars[key] = self.new_var()
        return ident

    def has_var(self, v: Var, scope: str = "") -> bool:
        return (self._owner(v, scope), v) in self._vars

    def true_lit(self) -> int:
        if self._true is None:
            self._true = self.new_var()
            self.clauses.append([self._true])
        return self._true

    def lit(self, root: int, scope: str = "", pos: bool = True, neg: bool = False) -> int:
        """Solver literal equivalent (in the requested directions) to ``root``."""
        want = (self.POS if pos else 0) | (self.NEG if neg else 0)
        dag = self.dag
        for node in dag.reachable(root):
            key = (scope, node)
            missing = want & ~self._done.get(key, 0)
            if not missing and key in self._defs:
                continue
            op = dag.op(node)
            if node == TRUE:
                self._defs[key] = self.true_lit()
            elif node == FALSE:
                self._defs[key] = -self.true_lit()
            elif op == LIT:
                v, pol = dag.literal(node)
                ident = self.var(v, scope)
                self._defs[key] = ident if pol else -ident
            else:
                t = self._defs.get(key)
                if t is None:
                    t = self._defs[key] = self.new_var()
                kids = [self._defs[(scope, c)] for c in dag.children(node)]
                if op == AND:
                    if missing & self.POS:
                        self.clauses.extend([-t, c] for c in kids)
                    if missing & self.NEG:
                        self.clauses.append([t] + [-c for c in kids])
                else:
                    if missing & self.POS:
                        self.clauses.append([-t] + kids)
                    if missing & self.NEG:
                        self.clauses.extend([t, -c] for c in kids)
            self._done[key] = self._done.get(key, 0) | want
        return self._defs[(scope, root)]


def tseitin(dag: NnfDag, roots: Sequence[int], polarity_aware: bool = True) -> CnfEncoding:
    """Definitions for every node reachable from ``roots`` (roots asserted nowhere)."""
    enc = Encoder(dag)
    for r in roots:
        enc.lit(r, pos=True, neg=not polarity_aware)
    def_map = {node: enc._defs[("", node)] for node in dag.reachable(list(roots))}
    input_map = {v: ident for (owner, v), ident in enc._vars.items() if owner == ""}
    return CnfEncoding(list(enc.clauses), def_map, input_map)


# ----------------------------------------------------------------- sessions
@dataclass
class SatVerdict:
    sat: bool
    model: Optional[Dict[Var, int]] = None

    @property
    def status(self) -> str:
        return "Sat" if self.sat else "Unsat"

    def __bool__(self) -> bool:
        return self.sat


class Session:
    """One incremental solver plus an encoder; use as a context manager."""

    _dump_counter = itertools.count()

    def __init__(self, dag: NnfDag, name: str = "query", solver: Optional[str] = None):
        self.dag = dag
        self.name = name
        self.enc = Encoder(dag)
        self.solver = Solver(name=solver or _config.solver)
        self._pushed = 0
        self.calls = 0

    def __enter__(self) -> "Session":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def close(self) -> None:
        if self.solver is not None:
            self.solver.delete()
            self.solver = None

    # encoding helpers
    def declare_scope(self, name: str, private_vars: Iterable[Var] = (), private_kinds: Iterable[Kind] = ()) -> None:
        self.enc.declare_scope(name, private_vars, private_kinds)

    def lit(self, node: int, scope: str = "", pos: bool = True, neg: bool = False) -> int:
        return self.enc.lit(node, scope, pos, neg)

    def var(self, v: Var, scope: str = "") -> int:
        return self.enc.var(v, scope)

    def new_var(self) -> int:
        return self.enc.new_var()

    def add_clause(self, lits: Iterable[int]) -> None:
        self.enc.clauses.append(list(lits))

    def require(self, node: int, value: bool = True, scope: str = "") -> None:
        """Constrain ``node`` (in ``scope``) to evaluate to ``value``."""
        t = self.lit(node, scope, pos=value, neg=not value)
        self.add_clause([t if value else -t])

    def require_under(self, selector: int, node: int, value: bool = True, scope: str = "") -> None:
        """Like :meth:`require` but only when ``selector`` is assumed true."""
        t = self.lit(node, scope, pos=value, neg=not value)
        self.add_clause([-selector, t if value else -t])

    def equate(self, a: int, b: int) -> None:
        self.add_clause([-a, b])
        self.add_clause([a, -b])

    # solving
    def _flush(self) -> None:
        clauses = self.enc.clauses
        for c in clauses[self._pushed:]:
            self.solver.add_clause(c)
        self._pushed = len(clauses)

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        self._flush()
        self.calls += 1
        stats["sat_calls"] += 1
        self._maybe_dump(assumptions)
        budget, deadline = _config.conflict_budget, _config.deadline
        if budget is None and deadline is None:
            return self.solver.solve(assumptions=list(assumptions))
        timer = None
        if deadline is not None:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise SolverTimeout(f"{self.name}: deadline passed")
            timer = threading.Timer(remaining, self.solver.interrupt)
            timer.start()
        try:
            if budget is not None:
                self.solver.conf_budget(budget)
            res = self.solver.solve_limited(assumptions=list(assumptions), expect_interrupt=timer is not None)
        finally:
            if timer is not None:
                timer.cancel()
                self.solver.clear_interrupt()
        if res is None:
            stats["timeouts"] += 1
            raise SolverTimeout(f"{self.name}: resource limit reached")
        return res

    def model(self, variables: Iterable[Var], scope: str = "") -> Dict[Var, int]:
        """Values of ``variables`` in the last model; unencoded variables read as 0."""
        raw = self.solver.get_model() or []
        true = {l for l in raw if l > 0}
        out = {}
        for v in variables:
            out[v] = int(self.enc.has_var(v, scope) and self.enc.var(v, scope) in true)
        return out

    def _maybe_dump(self, assumptions: Sequence[int]) -> None:
        target = _dump_dir()
        if not target:
            return
        os.makedirs(target, exist_ok=True)
        k = next(Session._dump_counter)
        path = os.path.join(target, f"{k:05d}_{self.name}.cnf")
        with open(path, "w") as fh:
            clauses = self.enc.clauses + [[a] for a in assumptions]
            fh.write(f"c {self.name}\np cnf {self.enc.nvars} {len(clauses)}\n")
            for c in clauses:
                fh.write(" ".join(map(str, c)) + " 0\n")


# ---------------------------------------------------------- one-shot checks
def is_sat(dag: NnfDag, roots: Iterable[int] = (), negated: Iterable[int] = ()) -> SatVerdict:
    """Satisfiability of ``AND(roots) & AND(~negated)``; the model covers the support."""
    roots, negated = list(roots), list(negated)
    with Session(dag, "is_sat") as s:
        for r in roots:
            s.require(r, True)
        for r in negated:
            s.require(r, False)
        if not s.solve():
            return SatVerdict(False)
        support = sorted(dag.support(roots + negated))
        return SatVerdict(True, s.model(support))


def is_tautology(dag: NnfDag, root: int) -> bool:
    return not is_sat(dag, negated=[root]).sat


def semantically_independent(dag: NnfDag, root: int, variables: Iterable[Var]) -> bool:
    """True iff ``root`` does not depend on ``variables`` (one SAT call)."""
    variables = set(variables) & dag.support(root)
    if not variables:
        return True
    with Session(dag, "independence") as s:
        s.declare_scope("copy", private_vars=variables)
        s.require(root, True)
        s.require(root, False, scope="copy")
        return not s.solve()


@dataclass
class QbfVerdict:
    valid: bool
    counter_y: Optional[Dict[Var, int]] = None
    iterations: int = 0

    def __bool__(self) -> bool:
        return self.valid


def forall_exists_valid(
    dag: NnfDag,
    y_vars: Iterable[Var],
    a_root: int,
    b_root: int,
    max_iterations: Optional[int] = None,
) -> QbfVerdict:
    """Decide ``forall Y (exists X A(X,Y) -> exists X' B(X',Y))`` by CEGAR.

    The abstraction proposes an input assignment on which ``A`` is
    satisfiable and which no earlier block excludes; the verifier checks
    ``B`` under it.  Blocks are full assignments over the inputs that occur
    in ``A`` or ``B`` (other inputs cannot matter), so the loop ends after at
    most ``2^k`` rounds for ``k`` such inputs.
    """
    relevant = sorted(set(y_vars) & dag.support([a_root, b_root]))
    bound = 2 ** len(relevant) + 1
    cap = bound if max_iterations is None else min(bound, max_iterations)
    with Session(dag, "qbf_abstraction") as abst, Session(dag, "qbf_verification") as verif:
        abst.require(a_root, True)
        verif.require(b_root, True)
        iterations = 0
        while True:
            if iterations >= cap:
                raise SolverTimeout(f"2QBF loop exceeded {cap} iterations")
            iterations += 1
            stats["qbf_iterations"] += 1
            if not abst.solve():
                return QbfVerdict(True, None, iterations)
            y_star = abst.model(relevant)
            assumptions = [verif.var(v) if y_star[v] else -verif.var(v) for v in relevant]
            if not verif.solve(assumptions):
                return QbfVerdict(False, y_star, iterations)
            abst.add_clause([-abst.var(v) if y_star[v] else abst.var(v) for v in relevant])
