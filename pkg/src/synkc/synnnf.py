"""Reducts, and-unrealizability and membership checks for the synthesis normal form.

Throughout, ``order`` is the output sequence the checks are taken with respect
to (a list of output :class:`~synkc.nnf.Var`).  It defaults to all declared
outputs ``x_1 .. x_n``; a subsequence may be given when the remaining outputs
do not occur in the formula.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .nnf import AND, LIT, OR, TRUE, Kind, NnfDag, Var
from .sat import Session, SolverTimeout, is_sat

__all__ = [
    "reduct",
    "alpha",
    "zeta_roots",
    "is_and_unrealizable",
    "Unrealizability",
    "MembershipReport",
    "MembershipTimeout",
    "check_membership",
    "syntactic_failures",
    "check_wdnnf",
    "check_dnnf",
    "check_ddnnf",
]


def _order(dag: NnfDag, order: Optional[Sequence[Var]]) -> List[Var]:
    return list(order) if order is not None else dag.decl.outputs


def _reduct_binding(order: Sequence[Var], i: int) -> Dict[Var, int]:
    binding: Dict[Var, int] = {}
    for v in order[: i - 1]:
        binding[v] = TRUE
        binding[v.twin] = TRUE
    return binding


def reduct(dag: NnfDag, root: int, i: int, order: Optional[Sequence[Var]] = None) -> int:
    """The ``i``-th reduct: the positive form with the first ``i-1`` output pairs set to 1."""
    order = _order(dag, order)
    if not 1 <= i <= len(order) + 1:
        raise IndexError(f"reduct index {i} outside 1..{len(order) + 1}")
    return dag.substitute(dag.positive_form(root), _reduct_binding(order, i))


def alpha(dag: NnfDag, root: int, i: int, j: int, k: int, order: Optional[Sequence[Var]] = None) -> int:
    """Reduct ``i`` with ``x_i := j``, ``xbar_i := k`` and later bars read as negated outputs."""
    order = _order(dag, order)
    if not 1 <= i <= len(order):
        raise IndexError(f"output index {i} outside 1..{len(order)}")
    binding = _reduct_binding(order, i)
    xi = order[i - 1]
    binding[xi] = TRUE if j else 0
    binding[xi.twin] = TRUE if k else 0
    neg_binding = {}
    for v in order[i:]:
        binding[v.twin] = dag.build_literal(v, False)
        neg_binding[v.twin] = dag.build_literal(v, True)
    return dag.substitute(dag.positive_form(root), binding, neg_binding)


def zeta_roots(dag: NnfDag, root: int, i: int, order: Optional[Sequence[Var]] = None) -> Tuple[int, int, int]:
    """``(alpha11, alpha10, alpha01)``; zeta is ``alpha11 & ~alpha10 & ~alpha01``."""
    return tuple(alpha(dag, root, i, j, k, order) for j, k in ((1, 1), (1, 0), (0, 1)))


@dataclass
class Unrealizability:
    holds: bool
    witness: Optional[Dict[Var, int]] = None

    def __bool__(self) -> bool:
        return self.holds


def is_and_unrealizable(dag: NnfDag, root: int, i: int, order: Optional[Sequence[Var]] = None) -> Unrealizability:
    """SAT check that no assignment makes reduct ``i`` behave like ``x_i & xbar_i``."""
    order = _order(dag, order)
    a11, a10, a01 = zeta_roots(dag, root, i, order)
    verdict = is_sat(dag, [a11], [a10, a01])
    if not verdict.sat:
        return Unrealizability(True)
    # report the witness over every later output and every input
    later = order[i:]
    scope = set(later) | set(dag.decl.inputs)
    witness = {v: verdict.model.get(v, 0) for v in sorted(scope)}
    return Unrealizability(False, witness)


# -------------------------------------------------------------- syntactic
def _reach_masks(dag: NnfDag, root: int, bit_of: Dict[Var, int]) -> Tuple[Dict[int, int], Dict[int, int], List[int]]:
    """Per node bitmasks of outputs (resp. bars) below it, plus the And nodes in id order."""
    xs: Dict[int, int] = {}
    bs: Dict[int, int] = {}
    ands = []
    for node in dag.reachable(root):
        op = dag.op(node)
        if op == LIT:
            v, _ = dag.literal(node)
            if v.kind == Kind.INPUT:
                xs[node] = bs[node] = 0
                continue
            b = bit_of.get(v.twin if v.kind == Kind.BAR else v, 0)
            xs[node] = b if v.kind == Kind.OUTPUT else 0
            bs[node] = b if v.kind == Kind.BAR else 0
        elif op in (AND, OR):
            kids = dag.children(node)
            mx = mb = 0
            for c in kids:
                mx |= xs[c]
                mb |= bs[c]
            xs[node], bs[node] = mx, mb
            if op == AND:
                ands.append(node)
        else:
            xs[node] = bs[node] = 0
    return xs, bs, ands


def _and_conflicts(dag: NnfDag, root: int, order: Sequence[Var]) -> Dict[int, int]:
    """Map output position -> lowest And node where ``x_i`` and ``xbar_i`` meet via distinct children."""
    bit_of = {v: 1 << k for k, v in enumerate(order)}
    xs, bs, ands = _reach_masks(dag, root, bit_of)
    first: Dict[int, int] = {}
    for node in ands:
        kids = dag.children(node)
        k = len(kids)
        # bars reachable through children other than c, via prefix/suffix ors
        suffix = [0] * (k + 1)
        for t in range(k - 1, -1, -1):
            suffix[t] = suffix[t + 1] | bs[kids[t]]
        prefix = 0
        clash = 0
        for t, c in enumerate(kids):
            clash |= xs[c] & (prefix | suffix[t + 1])
            prefix |= bs[c]
        while clash:
            low = clash & -clash
            pos = low.bit_length()
            first.setdefault(pos, node)
            clash ^= low
    return first


def syntactic_failures(dag: NnfDag, root: int, order: Optional[Sequence[Var]] = None) -> Dict[int, int]:
    """Output positions whose reduct fails the path check, with the offending And node.

    A clean positive form implies clean reducts (substituting constants
    only removes paths), so the per-reduct pass runs only for positions
    flagged on the positive form itself.
    """
    order = _order(dag, order)
    fhat = dag.positive_form(root)
    suspects = _and_conflicts(dag, fhat, order)
    failures = {}
    for i in sorted(suspects):
        r = reduct(dag, root, i, order)
        hit = _and_conflicts(dag, r, order).get(i)
        if hit is not None:
            failures[i] = hit
    return failures


@dataclass
class MembershipReport:
    in_synnnf: bool
    failing_i: Optional[int] = None
    witness: Optional[Dict[Var, int]] = None
    per_i: List[Dict] = field(default_factory=list)
    method: str = "auto"
    complete: bool = True

    def __bool__(self) -> bool:
        return self.in_synnnf

    def to_json(self, decl=None) -> Dict:
        def wit(w):
            if w is None:
                return None
            return {_name(v, decl): b for v, b in w.items()}

        return {
            "in_synnnf": self.in_synnnf,
            "failing_i": self.failing_i,
            "witness": wit(self.witness),
            "method": self.method,
            "complete": self.complete,
            "per_i": [dict(p, witness=wit(p.get("witness"))) for p in self.per_i],
        }


def _name(v: Var, decl) -> str:
    if decl is not None and v.kind != Kind.BAR:
        return str(decl.dimacs_of(v))
    return repr(v)


class MembershipTimeout(SolverTimeout):
    def __init__(self, message: str, partial: MembershipReport):
        super().__init__(message)
        self.partial = partial


def check_membership(
    dag: NnfDag,
    root: int,
    method: str = "auto",
    order: Optional[Sequence[Var]] = None,
) -> MembershipReport:
    """Decide (``semantic``), certify (``syntactic``) or both (``auto``).

    ``syntactic`` is sound but incomplete: a failure there only means the
    path check found a meeting And node.  ``auto`` re-examines such
    positions semantically, so its negative answers are exact.
    """
    if method not in ("auto", "semantic", "syntactic"):
        raise ValueError(f"unknown method {method!r}")
    order = _order(dag, order)
    report = MembershipReport(True, method=method)
    failures = {} if method == "semantic" else syntactic_failures(dag, root, order)
    for i in range(1, len(order) + 1):
        if method == "syntactic" or (method == "auto" and i not in failures):
            ok = i not in failures
            entry = {"i": i, "method": "syntactic", "holds": ok}
            if not ok:
                entry["and_node"] = failures[i]
            report.per_i.append(entry)
            if not ok and report.failing_i is None:
                report.in_synnnf, report.failing_i = False, i
            continue
        try:
            res = is_and_unrealizable(dag, root, i, order)
        except SolverTimeout as exc:
            report.complete = False
            raise MembershipTimeout(str(exc), report) from exc
        report.per_i.append({"i": i, "method": "semantic", "holds": res.holds, "witness": res.witness})
        if not res.holds and report.failing_i is None:
            report.in_synnnf, report.failing_i, report.witness = False, i, res.witness
    return report


# --------------------------------------------------- DNNF-family validators
def _lit_sets(dag: NnfDag, root: int) -> Dict[int, frozenset]:
    sets: Dict[int, frozenset] = {}
    for node in dag.reachable(root):
        op = dag.op(node)
        if op == LIT:
            sets[node] = frozenset([dag.literal(node)])
        elif op in (AND, OR):
            sets[node] = frozenset().union(*(sets[c] for c in dag.children(node)))
        else:
            sets[node] = frozenset()
    return sets


def check_wdnnf(dag: NnfDag, root: int) -> bool:
    """No And node has two children with complementary literals."""
    sets = _lit_sets(dag, root)
    for node in sets:
        if dag.op(node) != AND:
            continue
        for c, d in itertools.permutations(dag.children(node), 2):
            if any((v, not p) in sets[d] for v, p in sets[c]):
                return False
    return True


def check_dnnf(dag: NnfDag, root: int) -> bool:
    """Children of every And node have pairwise disjoint atoms."""
    sets = _lit_sets(dag, root)
    for node in sets:
        if dag.op(node) != AND:
            continue
        seen: Set[Var] = set()
        for c in dag.children(node):
            atoms = {v for v, _ in sets[c]}
            if atoms & seen:
                return False
            seen |= atoms
    return True


def check_ddnnf(dag: NnfDag, root: int) -> bool:
    """DNNF whose Or nodes have pairwise contradictory children (one SAT call per pair)."""
    if not check_dnnf(dag, root):
        return False
    for node in dag.reachable(root):
        if dag.op(node) != OR:
            continue
        for c, d in itertools.combinations(dag.children(node), 2):
            if is_sat(dag, [c, d]).sat:
                return False
    return True
