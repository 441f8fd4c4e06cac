"""Refinement w.r.t. synthesis: checks, functional-definition discovery and pivoting.

Functional definitions (f-defs) are stated over DIMACS literals: an
:class:`FDef` ``op(args)`` attached to output ``v`` asserts ``v <-> op(args)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .cnf import ClauseSet, cofactor_clauses
from .nnf import Kind, NnfDag, Var
from .sat import Session, forall_exists_valid

__all__ = [
    "FDef",
    "FDefSystem",
    "RefinementReport",
    "check_refines",
    "find_fd",
    "ThetaChecker",
    "theta_tautology",
    "fd_refine",
    "def_rails",
    "get_def_ckt",
]

log = logging.getLogger(__name__)

OPS = ("and", "or", "nand", "nor", "xor", "xnor", "not", "identity", "const0", "const1")


@dataclass(frozen=True)
class FDef:
    op: str
    args: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown gate {self.op!r}")

    # A kernel is (kind, signed literals, negated) with kind in and/or/xor.
    def kernel(self) -> Tuple[str, Tuple[int, ...], bool]:
        op, a = self.op, self.args
        if op in ("and", "or", "xor"):
            return op, a, False
        if op == "nand":
            return "or", tuple(-l for l in a), False
        if op == "nor":
            return "and", tuple(-l for l in a), False
        if op == "xnor":
            return "xor", a, True
        if op == "not":
            return "and", (-a[0],), False
        if op == "identity":
            return "and", (a[0],), False
        return ("or" if op == "const0" else "and"), (), False

    @staticmethod
    def gate(kind: str, lits: Iterable[int], negated: bool = False) -> "FDef":
        """Canonical f-def for ``kind(lits)`` (negated if asked)."""
        lits = list(lits)
        if kind == "xor":
            parity = negated
            count: Dict[int, int] = {}
            for l in lits:
                if l < 0:
                    parity = not parity
                count[abs(l)] = count.get(abs(l), 0) + 1
            vs = sorted(v for v, c in count.items() if c % 2)
            if not vs:
                return FDef("const1" if parity else "const0")
            if len(vs) == 1:
                return FDef("not" if parity else "identity", (vs[0],))
            return FDef("xnor" if parity else "xor", tuple(vs))
        lits = list(dict.fromkeys(lits))
        if negated:
            kind, lits = ("or" if kind == "and" else "and"), [-l for l in lits]
        if any(-l in lits for l in lits):
            return FDef("const0" if kind == "and" else "const1")
        if not lits:
            return FDef("const1" if kind == "and" else "const0")
        if len(lits) == 1:
            l = lits[0]
            return FDef("identity", (l,)) if l > 0 else FDef("not", (-l,))
        lits = sorted(lits, key=lambda l: (abs(l), l))
        if all(l < 0 for l in lits):
            return FDef("nor" if kind == "and" else "nand", tuple(-l for l in lits))
        return FDef(kind, tuple(lits))

    def negation(self) -> "FDef":
        kind, lits, neg = self.kernel()
        return FDef.gate(kind, lits, not neg)

    def variables(self) -> Set[int]:
        return {abs(l) for l in self.args}

    def restrict(self, var: int, value: bool) -> "FDef":
        kind, lits, neg = self.kernel()
        if var not in {abs(l) for l in lits}:
            return self
        kept = []
        for l in lits:
            if abs(l) != var:
                kept.append(l)
                continue
            truth = value if l > 0 else not value
            if kind == "and" and not truth:
                return FDef.gate("or", [], neg)
            if kind == "or" and truth:
                return FDef.gate("and", [], neg)
            if kind == "xor" and truth:
                neg = not neg
        return FDef.gate(kind, kept, neg)

    def evaluate(self, value: Callable[[int], bool]) -> bool:
        kind, lits, neg = self.kernel()
        vals = [value(abs(l)) == (l > 0) for l in lits]
        if kind == "and":
            res = all(vals)
        elif kind == "or":
            res = any(vals)
        else:
            res = sum(vals) % 2 == 1
        return res != neg

    def to_node(self, dag: NnfDag, lit_node: Callable[[int], int]) -> int:
        """NNF DAG for the gate; ``lit_node(l)`` gives the node of signed literal ``l``."""
        kind, lits, neg = self.kernel()
        if neg:
            # only xnor is negated; flipping one argument turns it into xor
            lits = (-lits[0],) + lits[1:]
        if kind == "and":
            return dag.conj(lit_node(l) for l in lits)
        if kind == "or":
            return dag.disj(lit_node(l) for l in lits)
        acc, nacc = lit_node(lits[0]), lit_node(-lits[0])
        for l in lits[1:]:
            p, n = lit_node(l), lit_node(-l)
            acc, nacc = (dag.build_or([dag.build_and([acc, n]), dag.build_and([nacc, p])]),
                         dag.build_or([dag.build_and([acc, p]), dag.build_and([nacc, n])]))
        return acc

    def __str__(self) -> str:
        return f"{self.op}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class FDefSystem:
    """Acyclic f-defs over the outputs ``x_vars``; ``order`` lists each output after its dependencies."""

    x_vars: FrozenSet[int] = frozenset()
    defs: Tuple[Tuple[int, FDef], ...] = ()

    @classmethod
    def empty(cls, x_vars: Iterable[int]) -> "FDefSystem":
        return cls(frozenset(x_vars))

    @property
    def table(self) -> Dict[int, FDef]:
        return dict(self.defs)

    @property
    def T(self) -> Set[int]:
        return {v for v, _ in self.defs}

    def __len__(self) -> int:
        return len(self.defs)

    def __contains__(self, v: int) -> bool:
        return any(w == v for w, _ in self.defs)

    def deps(self, v: int) -> Set[int]:
        return {u for u in self.table[v].variables() if u in self.x_vars}

    @property
    def order(self) -> List[int]:
        table = self.table
        seen: Set[int] = set()
        out: List[int] = []

        def visit(v: int) -> None:
            stack = [(v, iter(sorted(self.deps(v) & table.keys())))]
            seen.add(v)
            while stack:
                node, it = stack[-1]
                nxt = next((u for u in it if u not in seen), None)
                if nxt is None:
                    stack.pop()
                    out.append(node)
                else:
                    seen.add(nxt)
                    stack.append((nxt, iter(sorted(self.deps(nxt) & table.keys()))))

        for v, _ in self.defs:
            if v not in seen:
                visit(v)
        return out

    def creates_cycle(self, v: int, fdef: FDef) -> bool:
        table = self.table
        stack = [u for u in fdef.variables() if u in self.x_vars]
        seen: Set[int] = set()
        while stack:
            u = stack.pop()
            if u == v:
                return True
            if u in seen or u not in table:
                continue
            seen.add(u)
            stack.extend(w for w in table[u].variables() if w in self.x_vars)
        return False

    def with_def(self, v: int, fdef: FDef) -> "FDefSystem":
        if v not in self.x_vars:
            raise ValueError(f"{v} is not an output")
        if v in self:
            raise ValueError(f"output {v} already defined")
        if self.creates_cycle(v, fdef):
            raise ValueError(f"definition of {v} would be cyclic")
        return replace(self, defs=self.defs + ((v, fdef),))

    def restrict(self, var: int, value: bool) -> "FDefSystem":
        """Substitute ``var := value`` into every def; a def of ``var`` itself is dropped."""
        return replace(self, defs=tuple((v, d.restrict(var, value)) for v, d in self.defs if v != var))

    def project(self, support: Iterable[int]) -> "FDefSystem":
        """Keep defs whose output and output arguments all lie in ``support``."""
        support = set(support)
        kept = tuple((v, d) for v, d in self.defs
                     if v in support and all(u in support for u in d.variables() if u in self.x_vars))
        return replace(self, defs=kept)

    def holds(self, value: Callable[[int], bool]) -> bool:
        return all(value(v) == d.evaluate(value) for v, d in self.defs)

    def to_json(self) -> Dict[str, str]:
        return {str(v): str(d) for v, d in self.defs}


# ------------------------------------------------------------ refinement
@dataclass
class RefinementReport:
    cond_a: bool
    cond_b: bool
    witness_a: Optional[Dict[Var, int]] = None
    witness_b: Optional[Dict[str, Dict[Var, int]]] = None

    @property
    def holds(self) -> bool:
        return self.cond_a and self.cond_b

    def __bool__(self) -> bool:
        return self.holds


def check_refines(dag: NnfDag, ftilde: int, f: int) -> RefinementReport:
    """Whether ``ftilde`` refines ``f`` for synthesis (both over ``dag.decl``).

    (a) every input admitting ``f`` admits ``ftilde``: a 2QBF query;
    (b) ``f(X,Y) & ftilde(X',Y) & ~f(X',Y)`` is unsatisfiable: one SAT call.
    """
    inputs = dag.decl.inputs
    qa = forall_exists_valid(dag, inputs, f, ftilde)
    with Session(dag, "refines_b") as s:
        s.declare_scope("p", private_kinds=[Kind.OUTPUT, Kind.BAR])
        s.require(f, True)
        s.require(ftilde, True, scope="p")
        s.require(f, False, scope="p")
        if s.solve():
            outs = dag.decl.outputs
            wb = {"y": s.model(inputs), "x": s.model(outs), "x_prime": s.model(outs, "p")}
            return RefinementReport(qa.valid, False, qa.counter_y, wb)
    return RefinementReport(qa.valid, True, qa.counter_y, None)


# --------------------------------------------------------------- FindFD
def _fd_candidates(S: ClauseSet, fdefs: FDefSystem) -> List[Tuple[tuple, int, FDef]]:
    present = {c for _, c in S.live()}
    outputs = S.outputs
    T = fdefs.T
    cands = set()
    for _, c in S.live():
        for a in c:
            v = abs(a)
            if v not in outputs or v in T:
                continue
            rest = [l for l in c if l != a]
            if not rest:
                cands.add((v, FDef("const1" if a > 0 else "const0")))
                continue
            if all(frozenset((-a, -r)) in present for r in rest):
                cands.add((v, FDef.gate("and", [-r for r in rest], negated=a < 0)))
        if len(c) == 3:
            negs = sum(1 for l in c if l < 0) % 2
            vs = sorted(abs(l) for l in c)
            full = all(
                frozenset(s * u for s, u in zip(signs, vs)) in present
                for signs in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1),
                              (-1, -1, -1), (-1, 1, 1), (1, -1, 1), (1, 1, -1))
                if (sum(1 for s in signs if s < 0) % 2) == negs
            )
            if full:
                for v in vs:
                    if v in outputs and v not in T:
                        others = [u for u in vs if u != v]
                        cands.add((v, FDef.gate("xor", others, negated=negs == 0)))
    pos = {v: k for k, v in enumerate(S.x_order)}
    keyed = [((pos[v], len(d.args), d.args, d.op), v, d) for v, d in cands]
    keyed.sort(key=lambda t: t[0])
    return keyed


def find_fd(S: ClauseSet, fdefs: FDefSystem) -> FDefSystem:
    """Extend ``fdefs`` with gate definitions matched syntactically in ``S``.

    Candidates are visited by output position, then argument count; the
    first one per output that keeps the system acyclic is kept.
    """
    for _, v, d in _fd_candidates(S, fdefs):
        if v in fdefs or fdefs.creates_cycle(v, d):
            continue
        fdefs = fdefs.with_def(v, d)
    return fdefs


# ------------------------------------------------------------ pivoting
class ThetaChecker:
    """Incremental solver deciding the pivoting condition for every ``(x_i, a)``.

    The negated implication is

        F(X,Y)|x_i=a  &  AND_{j not in T+{i}} (x_j <-> x'_j)
                      &  Fun_T(X',Y)|x'_i=1-a  &  ~F(X',Y)|x'_i=1-a

    Equalities and definitions sit behind selector literals, so one
    encoding serves all queries over the same clause set and f-defs.
    """

    def __init__(self, S: ClauseSet, fdefs: FDefSystem, dag: Optional[NnfDag] = None):
        self.S = S
        self.fdefs = fdefs
        self.dag = dag if dag is not None else NnfDag(S.decl)
        decl = self.dag.decl
        self.s = Session(self.dag, "theta")
        s = self.s
        s.declare_scope("p", private_kinds=[Kind.OUTPUT, Kind.BAR])
        f = S.to_dag(self.dag)
        s.require(f, True)
        s.require(f, False, scope="p")
        self.outputs = S.output_support()
        self._eq: Dict[int, int] = {}
        for v in self.outputs:
            e = s.new_var()
            a, b = s.var(decl.var_of(v)), s.var(decl.var_of(v), "p")
            s.add_clause([-e, -a, b])
            s.add_clause([-e, a, -b])
            self._eq[v] = e
        self._def: Dict[int, int] = {}

        def lit_node(l: int) -> int:
            return self.dag.build_literal(decl.var_of(abs(l)), l > 0)

        for v, d in fdefs.defs:
            node = self.dag.iff(decl.var_of(v), d.to_node(self.dag, lit_node), d.negation().to_node(self.dag, lit_node))
            sel = s.new_var()
            s.require_under(sel, node, True, scope="p")
            self._def[v] = sel

    def tautology(self, v: int, a: int) -> bool:
        decl = self.dag.decl
        s = self.s
        xv = decl.var_of(v)
        assumptions = [s.var(xv) if a else -s.var(xv), -s.var(xv, "p") if a else s.var(xv, "p")]
        T = self.fdefs.T
        assumptions += [e for u, e in self._eq.items() if u != v and u not in T]
        assumptions += list(self._def.values())
        return not s.solve(assumptions)

    def close(self) -> None:
        self.s.close()


def theta_tautology(S: ClauseSet, fdefs: FDefSystem, v: int, a: int) -> bool:
    """Whether pivoting output ``v`` to ``1-a`` is licensed (one SAT call)."""
    if v in fdefs:
        raise ValueError(f"output {v} is already defined")
    checker = ThetaChecker(S, fdefs)
    try:
        return checker.tautology(v, a)
    finally:
        checker.close()


@dataclass
class FdRefineStats:
    rounds: int = 0
    pivots: int = 0
    found: int = 0
    theta_calls: int = 0


def fd_refine(S: ClauseSet, fdefs: FDefSystem, dag: Optional[NnfDag] = None,
              stats: Optional[FdRefineStats] = None) -> Tuple[ClauseSet, FDefSystem]:
    """Alternate gate matching and pivoting until neither makes progress.

    A pivot of ``x_i`` to value ``b`` replaces the clauses by their cofactor
    plus the unit ``x_i = b`` and records ``x_i <-> b``; earlier f-defs are
    restricted by the same assignment.  Later pivots are tested against the
    already refined clause set.
    """
    stats = stats if stats is not None else FdRefineStats()
    out = S.output_support()
    while True:
        stats.rounds += 1
        progressed = False
        grown = find_fd(S, fdefs)
        if len(grown) > len(fdefs):
            stats.found += len(grown) - len(fdefs)
            fdefs, progressed = grown, True
        checker = None
        for v in out:
            if v in fdefs:
                continue
            if checker is None:
                checker = ThetaChecker(S, fdefs, dag)
            for a in (0, 1):
                stats.theta_calls += 1
                if checker.tautology(v, a):
                    value = a == 0
                    S = cofactor_clauses(S, v, value).with_clauses([[v if value else -v]])
                    fdefs = fdefs.restrict(v, value).with_def(v, FDef("const1" if value else "const0"))
                    checker.close()
                    checker = None
                    stats.pivots += 1
                    progressed = True
                    break
        if checker is not None:
            checker.close()
        if not progressed:
            return S, fdefs


def def_rails(dag: NnfDag, fdefs: FDefSystem) -> Dict[int, Tuple[int, int]]:
    """Each defined output's function and its negation, composed down to inputs."""
    decl = dag.decl
    rails: Dict[int, Tuple[int, int]] = {}

    def lit_node(l: int) -> int:
        v = abs(l)
        if v in rails:
            p, n = rails[v]
            return p if l > 0 else n
        if v in fdefs.x_vars:
            raise ValueError(f"output {v} is used but not defined")
        return dag.build_literal(decl.var_of(v), l > 0)

    for v in fdefs.order:
        d = fdefs.table[v]
        rails[v] = (d.to_node(dag, lit_node), d.negation().to_node(dag, lit_node))
    return rails


def get_def_ckt(dag: NnfDag, fdefs: FDefSystem) -> int:
    """``AND_{x in T} ((x & t_x) | (~x & ~t_x))`` with each ``t_x`` over inputs only."""
    rails = def_rails(dag, fdefs)
    return dag.conj(dag.iff(dag.decl.var_of(v), *rails[v]) for v in fdefs.order)
