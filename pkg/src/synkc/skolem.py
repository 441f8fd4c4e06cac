"""Skolem function extraction, ordered quantifier elimination and the error formula."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .nnf import Kind, NnfDag, Var
from .sat import Session
from .synnnf import _order, alpha, is_and_unrealizable, reduct

__all__ = [
    "SkolemVector",
    "gacks_skolem",
    "QuantResult",
    "eliminate_outputs",
    "ErrorFormulaResult",
    "error_formula_check",
    "skolem_to_synnnf",
    "unrealizable_under_skolem",
]


@dataclass
class SkolemVector:
    """``pos_roots[k]`` is psi for ``order[k]``; ``neg_roots[k]`` is its negation."""

    dag: NnfDag
    order: List[Var]
    pos_roots: List[int]
    neg_roots: List[int]
    work: int = 0

    def __len__(self) -> int:
        return len(self.order)

    def node_count(self) -> int:
        return self.dag.size(self.pos_roots + self.neg_roots)

    def binding(self):
        """Substitution maps sending each output to psi (and its negation)."""
        pos = dict(zip(self.order, self.pos_roots))
        neg = dict(zip(self.order, self.neg_roots))
        return pos, neg

    def named_roots(self) -> Dict[str, int]:
        roots = {}
        for v, p, n in zip(self.order, self.pos_roots, self.neg_roots):
            roots[f"psi_{v.index}"] = p
            roots[f"npsi_{v.index}"] = n
        return roots

    def to_text(self) -> str:
        decl = self.dag.decl
        lines = []
        for v, p in zip(self.order, self.pos_roots):
            lines.append(f"{decl.dimacs_of(v)} := {self.dag.to_str(p)}")
        return "\n".join(lines) + "\n"


def gacks_skolem(dag: NnfDag, root: int, order: Optional[Sequence[Var]] = None) -> SkolemVector:
    """Canonical Skolem vector: psi'_i is the (1,0) alpha of reduct i, composed from n down to 1.

    Each step substitutes the already composed later functions (and their
    stored negations) into psi'_i and into its negation, so both rails share
    structure and no composed function is ever negated again.
    """
    order = _order(dag, order)
    start = dag.work
    n = len(order)
    pos: List[int] = [0] * n
    neg: List[int] = [0] * n
    for k in range(n - 1, -1, -1):
        raw = alpha(dag, root, k + 1, 1, 0, order)
        raw_neg = dag.negate(raw)
        later = order[k + 1:]
        bind = {v: pos[j] for j, v in zip(range(k + 1, n), later)}
        nbind = {v: neg[j] for j, v in zip(range(k + 1, n), later)}
        pos[k] = dag.substitute(raw, bind, nbind)
        neg[k] = dag.substitute(raw_neg, bind, nbind)
    return SkolemVector(dag, order, pos, neg, dag.work - start)


@dataclass
class QuantResult:
    root: int
    exact: bool


def eliminate_outputs(dag: NnfDag, root: int, i: int, order: Optional[Sequence[Var]] = None,
                      exact: Optional[bool] = None) -> QuantResult:
    """Existentially eliminate the first ``i`` outputs of ``order``.

    Returns reduct ``i+1`` with later bars read as negated outputs.  The
    result is exact when reducts ``1..i`` are and-unrealizable (checked
    here unless ``exact`` is supplied); otherwise it over-approximates.
    """
    order = _order(dag, order)
    if not 0 <= i <= len(order):
        raise IndexError(f"cannot eliminate {i} of {len(order)} outputs")
    r = reduct(dag, root, i + 1, order)
    binding = {}
    neg_binding = {}
    for v in order[i:]:
        binding[v.twin] = dag.build_literal(v, False)
        neg_binding[v.twin] = dag.build_literal(v, True)
    out = dag.substitute(r, binding, neg_binding)
    if exact is None:
        exact = all(is_and_unrealizable(dag, root, j, order).holds for j in range(1, i + 1))
    return QuantResult(out, exact)


@dataclass
class ErrorFormulaResult:
    correct: bool
    y: Optional[Dict[Var, int]] = None
    x: Optional[Dict[Var, int]] = None
    psi: Optional[Dict[Var, int]] = None

    def __bool__(self) -> bool:
        return self.correct


def error_formula_check(dag: NnfDag, root: int, sk: SkolemVector) -> ErrorFormulaResult:
    """One SAT call on ``F(X,Y) & ~F(X',Y) & AND_i (x'_i <-> psi_i)``; unsat means correct."""
    for p in sk.pos_roots:
        if any(v.kind != Kind.INPUT for v in dag.support(p)):
            raise ValueError("Skolem functions must range over inputs only")
    outputs = sorted({v for v in dag.support(root) if v.kind == Kind.OUTPUT} | set(sk.order))
    with Session(dag, "error_formula") as s:
        s.declare_scope("p", private_kinds=[Kind.OUTPUT, Kind.BAR])
        s.require(root, True)
        s.require(root, False, scope="p")
        for v, p in zip(sk.order, sk.pos_roots):
            s.equate(s.var(v, "p"), s.lit(p, pos=True, neg=True))
        if not s.solve():
            return ErrorFormulaResult(True)
        inputs = sorted(dag.decl.inputs)
        return ErrorFormulaResult(False, s.model(inputs), s.model(outputs), s.model(sk.order, "p"))


def skolem_to_synnnf(sk: SkolemVector) -> int:
    """``AND_i ((x_i & psi_i) | (~x_i & ~psi_i))`` built from both rails."""
    dag = sk.dag
    return dag.conj(dag.iff(v, p, n) for v, p, n in zip(sk.order, sk.pos_roots, sk.neg_roots))


def unrealizable_under_skolem(dag: NnfDag, root: int, sk: SkolemVector, realizable_only: bool = True) -> bool:
    """Whether every alpha-triple, with later outputs replaced by psi, leaves zeta unsat.

    With ``realizable_only`` the check is restricted to inputs where the
    specification is satisfiable, which is the form under which it matches
    correctness of the canonical vector exactly.
    """
    order = sk.order
    pos, neg = sk.binding()
    for i in range(1, len(order) + 1):
        later = order[i:]
        bind = {v: pos[v] for v in later}
        nbind = {v: neg[v] for v in later}
        a11, a10, a01 = (dag.substitute(alpha(dag, root, i, j, k, order), bind, nbind)
                         for j, k in ((1, 1), (1, 0), (0, 1)))
        with Session(dag, "zeta_under_psi") as s:
            s.declare_scope("r", private_kinds=[Kind.OUTPUT, Kind.BAR])
            s.require(a11, True)
            s.require(a10, False)
            s.require(a01, False)
            if realizable_only:
                s.require(root, True, scope="r")
            if s.solve():
                return False
    return True
