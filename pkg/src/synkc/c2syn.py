"""Recursive CNF compiler into the synthesis normal form.

:func:`compile_cnf` returns a DAG ``Ftilde`` that passes the syntactic path
check and refines the input clauses for synthesis.  It tries, in order:
constant answers, input independence (a single model cube), output
independence, f-def discovery plus pivoting, the canonical Skolem vector
guarded by its error formula, and finally a branch on one output.

The two arms of a branch must each imply their own clauses outright, not
only on realizable inputs, or the disjunction could pick an arm whose
clauses have no solution.  Calls made for an arm are therefore *strict*:
their function-based exits are conjoined with the input-only condition
obtained by substituting the functions into the clauses.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import sat
from .cnf import ClauseSet, clause_graph_mccs, cofactor_clauses
from .nnf import FALSE, TRUE, Kind, NnfDag, Var
from .refine import FDefSystem, FdRefineStats, def_rails, fd_refine, get_def_ckt
from .sat import Session, semantically_independent
from .skolem import error_formula_check, gacks_skolem, skolem_to_synnnf

__all__ = ["CompileResult", "Compiler", "compile_cnf", "choose_output_var", "branch_partition"]

log = logging.getLogger(__name__)

DEGENERATE, DEFCKT, GACKS, BRANCH = "Degenerate", "DefCkt", "GacksExact", "Branch"


@dataclass
class CompileResult:
    dag: NnfDag
    root: int
    stats: Counter
    certificate: List[Tuple[int, str, int]] = field(default_factory=list)

    def provenance(self) -> Dict[int, str]:
        return {node: tag for node, tag, _ in self.certificate}


def choose_output_var(S: ClauseSet, candidates: Sequence[int]) -> int:
    """Highest sum of ``2^-|C|`` over clauses mentioning the variable; ties go to the lowest index."""
    if not candidates:
        raise ValueError("no candidate outputs")
    score = Counter()
    cand = set(candidates)
    for _, c in S.live():
        w = 2.0 ** -len(c)
        for l in c:
            if abs(l) in cand:
                score[abs(l)] += w
    return min(candidates, key=lambda v: (-score[v], v))


def branch_partition(S: ClauseSet, x: int) -> Tuple[ClauseSet, ClauseSet, ClauseSet]:
    """Clauses linked to ``x`` / ``~x`` occurrences and the rest, before cofactoring.

    The first two sets may overlap; the third shares no output with them.
    """
    mccs = clause_graph_mccs(S)
    pos_parts = {mccs.clause_to_part[i] for i, c in S.live() if x in c}
    neg_parts = {mccs.clause_to_part[i] for i, c in S.live() if -x in c}
    idx1 = [i for i, _ in S.live() if mccs.clause_to_part[i] in pos_parts]
    idx2 = [i for i, _ in S.live() if mccs.clause_to_part[i] in neg_parts]
    idx3 = [i for i, _ in S.live() if mccs.clause_to_part[i] not in pos_parts | neg_parts]
    return S.subset(idx1), S.subset(idx2), S.subset(idx3)


class Compiler:
    """One compilation run; all nodes live in ``self.dag`` (declared by ``S``)."""

    def __init__(self, S: ClauseSet, gacks_cap: Optional[int] = 64, try_gacks: bool = True):
        self.S = S
        self.dag = NnfDag(S.decl)
        self.decl = self.dag.decl
        self.gacks_cap = gacks_cap
        self.try_gacks = try_gacks
        self.stats: Counter = Counter()
        self.certificate: List[Tuple[int, str, int]] = []
        self.n = len(S.x_order)

    def run(self, fdefs: Optional[FDefSystem] = None) -> CompileResult:
        calls0 = sat.stats["sat_calls"]
        fdefs = fdefs if fdefs is not None else FDefSystem.empty(self.S.x_order)
        root = self._compile(self.S, fdefs, 0, strict=False)
        self.stats["sat_calls"] = sat.stats["sat_calls"] - calls0
        self.stats["nodes"] = self.dag.size(root)
        self.dag.roots["Ftilde"] = root
        return CompileResult(self.dag, root, self.stats, self.certificate)

    def _tag(self, node: int, tag: str, level: int) -> int:
        self.certificate.append((node, tag, level))
        return node

    def _var(self, v: int) -> Var:
        return self.decl.var_of(v)

    def _guard(self, S: ClauseSet, pos: Dict[Var, int], neg: Dict[Var, int]) -> int:
        """``S`` with every output replaced by its function: true exactly where they solve ``S``."""
        g = self.dag.substitute(S.to_dag(self.dag), pos, neg)
        self.stats["guards"] += 1
        return g

    def _compile(self, S: ClauseSet, fdefs: FDefSystem, level: int, strict: bool) -> int:
        if level > self.n:
            raise AssertionError(f"recursion level {level} exceeds the number of outputs")
        st = self.stats
        st["calls"] += 1
        st["max_level"] = max(st["max_level"], level)
        dag = self.dag
        out = S.output_support()

        # constants
        if S.inconsistent:
            st["exit_inconsistent"] += 1
            return self._tag(FALSE, DEGENERATE, level)
        if len(S) == 0:
            st["exit_valid"] += 1
            return self._tag(TRUE, DEGENERATE, level)
        f = S.to_dag(dag)
        with Session(dag, "consistency") as s:
            s.require(f, True)
            if not s.solve():
                st["exit_inconsistent"] += 1
                return self._tag(FALSE, DEGENERATE, level)
            pi = s.model([self._var(v) for v in out])

        # independence of all inputs: any model's outputs work everywhere
        inputs = [self._var(v) for v in S.input_support()]
        if semantically_independent(dag, f, inputs):
            st["exit_model_cube"] += 1
            return self._tag(dag.cube((v, bool(b)) for v, b in pi.items()), DEGENERATE, level)
        if semantically_independent(dag, f, [self._var(v) for v in out]):
            st["exit_output_free"] += 1
            if not strict:
                return self._tag(TRUE, DEGENERATE, level)
            fixed = {v: bool(b) for v, b in pi.items()}
            return self._tag(dag.substitute(f, fixed, {v: not b for v, b in fixed.items()}), DEGENERATE, level)

        fr = FdRefineStats()
        S2, fdefs2 = fd_refine(S, fdefs, dag, fr)
        st["pivots"] += fr.pivots
        st["fdefs_found"] += fr.found
        st["theta_calls"] += fr.theta_calls
        free = [v for v in out if v not in fdefs2]
        if not free:
            st["exit_defckt"] += 1
            defs = fdefs2.project(out)
            node = get_def_ckt(dag, defs)
            if strict:
                rails = def_rails(dag, defs)
                node = dag.build_and([node, self._guard(
                    S2, {self._var(v): p for v, (p, _) in rails.items()},
                    {self._var(v): n for v, (_, n) in rails.items()})])
            return self._tag(node, DEFCKT, level)

        if self.try_gacks and (self.gacks_cap is None or level == 0 or len(out) <= self.gacks_cap):
            f2 = S2.to_dag(dag)
            order = [self._var(v) for v in S2.output_support()]
            sk = gacks_skolem(dag, f2, order)
            st["gacks_attempts"] += 1
            if error_formula_check(dag, f2, sk).correct:
                st["exit_gacks"] += 1
                node = skolem_to_synnnf(sk)
                if strict:
                    node = dag.build_and([node, self._guard(S2, *sk.binding())])
                return self._tag(node, GACKS, level)

        x = choose_output_var(S2, free)
        st["branches"] += 1
        if st["branches"] > 2 ** self.n:
            raise AssertionError("branch count exceeds 2^|X|")
        S1, S2b, S3 = branch_partition(S2, x)
        sub = []
        for part, value in ((S1, False), (S2b, True), (S3, None)):
            if value is None:
                cof, fd, arm = part, fdefs2, strict
            else:
                cof, fd, arm = cofactor_clauses(part, x, value), fdefs2.restrict(x, value), True
            sub.append(self._compile(cof, fd.project(cof.output_support()), level + 1, arm))
        t1, t2, t3 = sub
        xv = self._var(x)
        node = dag.build_and([t3, dag.build_or([
            dag.build_and([dag.build_literal(xv, True), t2]),
            dag.build_and([dag.build_literal(xv, False), t1]),
        ])])
        return self._tag(node, BRANCH, level)


def compile_cnf(S: ClauseSet, gacks_cap: Optional[int] = 64, try_gacks: bool = True) -> CompileResult:
    """Compile ``S`` (with its own ``x_order``) into a refining SynNNF DAG."""
    return Compiler(S, gacks_cap, try_gacks).run()
