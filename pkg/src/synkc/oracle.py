"""Brute-force reference semantics and random instance generators.

Truth tables are numpy boolean vectors of length ``2^p`` over an ordered
support; the first support variable is the most significant bit, so the
table reshaped to ``(2,)*p`` is indexed by the assignment in support order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .cnf import ClauseSet
from .nnf import AND, LIT, OR, TRUE_OP, Kind, NnfDag, Var, VarDecl, x, y

__all__ = [
    "MAX_VARS",
    "TruthTable",
    "tt_of",
    "tt_exists",
    "tt_forall",
    "tt_equiv",
    "tt_refines",
    "tt_skolem_correct",
    "tt_cofactor",
    "tt_reduct",
    "tt_unrealizable_under",
    "gen_family",
    "random_nnf",
    "random_cnf",
    "random_dnnf",
    "random_wdnnf",
    "random_ddnnf",
]

MAX_VARS = 22


@dataclass(frozen=True)
class TruthTable:
    support: Tuple[Var, ...]
    bits: np.ndarray

    def __post_init__(self):
        if self.bits.shape != (1 << len(self.support),):
            raise ValueError("table size does not match support")

    def cube(self) -> np.ndarray:
        return self.bits.reshape((2,) * len(self.support)) if self.support else self.bits.reshape(())

    def expand(self, support: Sequence[Var]) -> "TruthTable":
        """The same function over a superset ``support`` (in that order)."""
        support = tuple(support)
        if support == self.support:
            return self
        missing = set(self.support) - set(support)
        if missing:
            raise ValueError(f"cannot drop variables {sorted(missing)}")
        present = [v for v in support if v in self.support]
        arr = np.transpose(self.cube(), [self.support.index(v) for v in present]) if present else self.cube()
        shape = [2 if v in self.support else 1 for v in support]
        arr = np.broadcast_to(arr.reshape(shape), (2,) * len(support))
        return TruthTable(support, np.ascontiguousarray(arr).reshape(-1))

    def value(self, assignment: Mapping[Var, int]) -> bool:
        idx = 0
        for v in self.support:
            idx = (idx << 1) | int(assignment[v])
        return bool(self.bits[idx])

    def is_const(self) -> Optional[bool]:
        if self.bits.all():
            return True
        if not self.bits.any():
            return False
        return None


def _columns(p: int) -> np.ndarray:
    idx = np.arange(1 << p, dtype=np.int64)
    return np.array([((idx >> (p - 1 - k)) & 1).astype(bool) for k in range(p)]).reshape(p, -1)


LiteralOverride = Callable[[Var, bool], Optional[np.ndarray]]


def tt_of(dag: NnfDag, root: int, support: Optional[Sequence[Var]] = None,
          override: Optional[LiteralOverride] = None) -> TruthTable:
    """Exhaustive evaluation of ``root`` over ``support`` (default: its sorted support).

    ``override(v, polarity)`` may return a boolean column (length ``2^p``)
    to use for that literal instead of its value; ``None`` keeps the value.
    """
    support = tuple(sorted(dag.support(root)) if support is None else support)
    missing = dag.support(root) - set(support)
    if override is None and missing:
        raise ValueError(f"support misses {sorted(missing)}")
    p = len(support)
    if p > MAX_VARS:
        raise ValueError(f"{p} variables exceed the oracle cap of {MAX_VARS}")
    cols = _columns(p) if p else np.zeros((0, 1), dtype=bool)
    pos = {v: k for k, v in enumerate(support)}
    size = 1 << p
    vals: Dict[int, np.ndarray] = {}
    for node in dag.reachable(root):
        op = dag.op(node)
        if op == LIT:
            v, pol = dag.literal(node)
            col = override(v, pol) if override is not None else None
            if col is None:
                if v not in pos:
                    raise ValueError(f"support misses {v!r}")
                col = cols[pos[v]] if pol else ~cols[pos[v]]
            vals[node] = np.broadcast_to(np.asarray(col, dtype=bool), (size,))
        elif op == AND:
            vals[node] = np.logical_and.reduce([vals[c] for c in dag.children(node)])
        elif op == OR:
            vals[node] = np.logical_or.reduce([vals[c] for c in dag.children(node)])
        else:
            vals[node] = np.full(size, op == TRUE_OP)
    return TruthTable(support, np.array(vals[root], dtype=bool).reshape(size))


def _quantify(tt: TruthTable, variables: Iterable[Var], reducer) -> TruthTable:
    variables = set(variables) & set(tt.support)
    if not variables:
        return tt
    axes = tuple(k for k, v in enumerate(tt.support) if v in variables)
    keep = tuple(v for v in tt.support if v not in variables)
    arr = reducer(tt.cube(), axis=axes)
    return TruthTable(keep, np.asarray(arr, dtype=bool).reshape(-1))


def tt_exists(tt: TruthTable, variables: Iterable[Var]) -> TruthTable:
    return _quantify(tt, variables, np.any)


def tt_forall(tt: TruthTable, variables: Iterable[Var]) -> TruthTable:
    return _quantify(tt, variables, np.all)


def tt_cofactor(tt: TruthTable, v: Var, value: int) -> TruthTable:
    if v not in tt.support:
        return tt
    k = tt.support.index(v)
    arr = np.take(tt.cube(), int(value), axis=k)
    return TruthTable(tt.support[:k] + tt.support[k + 1:], np.asarray(arr).reshape(-1))


def _union(*tables: TruthTable) -> Tuple[Var, ...]:
    return tuple(sorted(set().union(*(t.support for t in tables))))


def tt_equiv(a: TruthTable, b: TruthTable) -> bool:
    sup = _union(a, b)
    return bool(np.array_equal(a.expand(sup).bits, b.expand(sup).bits))


def tt_refines(ft: TruthTable, f: TruthTable, X: Sequence[Var], Y: Sequence[Var]) -> bool:
    """Both refinement conditions by enumeration over ``X`` and ``Y``."""
    sup = tuple(X) + tuple(Y)
    ft, f = ft.expand(sup), f.expand(sup)
    ex_f = tt_exists(f, X).expand(tuple(Y))
    ex_ft = tt_exists(ft, X).expand(tuple(Y))
    cond_a = bool(np.all(~ex_f.bits | ex_ft.bits))
    ex_f_full = ex_f.expand(sup)
    cond_b = bool(np.all(~(ex_f_full.bits & ft.bits) | f.bits))
    return cond_a and cond_b


def tt_skolem_correct(f: TruthTable, psi: Mapping[Var, TruthTable], X: Sequence[Var], Y: Sequence[Var]) -> bool:
    """For every input with a model, ``f(psi(Y), Y)`` holds."""
    X, Y = tuple(X), tuple(Y)
    f = f.expand(X + Y)
    ex = tt_exists(f, X).expand(Y).bits
    ny = len(Y)
    idx = np.arange(1 << ny, dtype=np.int64)
    for k, v in enumerate(X):
        col = psi[v].expand(Y).bits.astype(np.int64)
        idx = idx + (col << (ny + len(X) - 1 - k))
    return bool(np.all(~ex | f.bits[idx]))


def tt_reduct(dag: NnfDag, root: int, i: int, order: Sequence[Var], support: Sequence[Var]) -> TruthTable:
    """``root`` with both literals of ``order[:i]`` read as true: the reduct after
    the first ``i`` outputs, with later negated outputs left as negations."""
    first = set(order[:i])
    size = 1 << len(support)
    return tt_of(dag, root, support, lambda v, pol: np.ones(size, bool) if v in first else None)


def tt_unrealizable_under(dag: NnfDag, root: int, order: Sequence[Var],
                          psi: Mapping[Var, TruthTable], Y: Sequence[Var]) -> List[bool]:
    """Per output ``i``: no realizable input makes reduct ``i`` (later outputs
    replaced by ``psi``) behave as ``x_i & ~x_i``."""
    Y = tuple(Y)
    size = 1 << len(Y)
    cols = {v: t.expand(Y).bits for v, t in psi.items()}
    realizable = tt_exists(tt_of(dag, root, tuple(order) + Y), order).expand(Y).bits
    verdicts = []
    for k, xi in enumerate(order):
        earlier, later = set(order[:k]), set(order[k + 1:])

        def table(pos_val: bool, neg_val: bool) -> np.ndarray:
            def lit(v: Var, pol: bool):
                if v in earlier:
                    return np.ones(size, bool)
                if v == xi:
                    return np.full(size, pos_val if pol else neg_val)
                if v in later:
                    return cols[v] if pol else ~cols[v]
                return None
            return tt_of(dag, root, Y, lit).bits

        zeta = table(True, True) & ~table(True, False) & ~table(False, True) & realizable
        verdicts.append(not zeta.any())
    return verdicts


# ------------------------------------------------------------ generators
def gen_family(
    dag: NnfDag,
    opprimes: Sequence[str],
    ops: Sequence[str],
    fs: Sequence[int],
    xor_form: str = "cnf",
) -> int:
    """Left-nested ``(x_1 op'_1 f_1) op_1 (x_2 op'_2 f_2) ... op_n f_{n+1}``.

    ``fs`` has ``n+1`` entries; ``f_i`` may use ``x_{i+1}..x_n`` and inputs.
    ``op'`` is ``or``, ``and`` or ``xor``; the xor term is built as
    ``(x | f) & (~x | ~f)`` (``xor_form="cnf"``) or ``(x & ~f) | (~x & f)``
    (``xor_form="dnf"``).
    """
    n = len(opprimes)
    if len(ops) != n or len(fs) != n + 1:
        raise ValueError("need n op', n op and n+1 sub-formulas")
    acc = None
    for i in range(n):
        xi = x(i + 1)
        for v in dag.support(fs[i]):
            if v.kind == Kind.OUTPUT and v.index <= i + 1:
                raise ValueError(f"f_{i + 1} may not mention {v!r}")
        lx, nx = dag.build_literal(xi), dag.build_literal(xi, False)
        f, nf = fs[i], dag.negate(fs[i])
        if opprimes[i] == "or":
            term = dag.build_or([lx, f])
        elif opprimes[i] == "and":
            term = dag.build_and([lx, f])
        elif opprimes[i] == "xor":
            if xor_form == "cnf":
                term = dag.build_and([dag.build_or([lx, f]), dag.build_or([nx, nf])])
            else:
                term = dag.build_or([dag.build_and([lx, nf]), dag.build_and([nx, f])])
        else:
            raise ValueError(f"unknown op' {opprimes[i]!r}")
        if acc is None:
            acc = term
        else:
            acc = _binop(dag, ops[i - 1], acc, term)
    return _binop(dag, ops[n - 1], acc, fs[n])


def _binop(dag: NnfDag, op: str, a: int, b: int) -> int:
    if op == "and":
        return dag.build_and([a, b])
    if op == "or":
        return dag.build_or([a, b])
    raise ValueError(f"unknown op {op!r}")


def random_nnf(rng: np.random.Generator, dag: NnfDag, n_nodes: int = 12,
               variables: Optional[Sequence[Var]] = None, max_arity: int = 3,
               polarity: Optional[Mapping[Var, bool]] = None) -> int:
    """A random NNF DAG whose internal nodes pick children among earlier nodes.

    Variables listed in ``polarity`` occur only with that sign.
    """
    variables = list(variables) if variables is not None else dag.decl.outputs + dag.decl.inputs
    polarity = polarity or {}
    lits = [(v, pol) for v in variables for pol in ((polarity[v],) if v in polarity else (True, False))]
    pool = [dag.build_literal(*lits[k]) for k in rng.permutation(len(lits))]
    for _ in range(n_nodes):
        arity = int(rng.integers(2, max_arity + 1))
        # favour recent nodes so the root tends to use most of the pool
        weights = np.linspace(1.0, 3.0, len(pool))
        picks = rng.choice(len(pool), size=min(arity, len(pool)), replace=False, p=weights / weights.sum())
        kids = [pool[k] for k in picks]
        node = dag.build_and(kids) if rng.integers(2) else dag.build_or(kids)
        if node not in pool:
            pool.append(node)
    return pool[-1]


def random_cnf(rng: np.random.Generator, n: int, m: int, n_clauses: int,
               min_width: int = 1, max_width: int = 3) -> ClauseSet:
    """Random clauses over outputs ``1..n`` and inputs ``n+1..n+m``."""
    total = n + m
    clauses = []
    for _ in range(n_clauses):
        hi = min(max_width, total)
        w = int(rng.integers(min(min_width, hi), hi + 1))
        vs = rng.choice(np.arange(1, total + 1), size=w, replace=False)
        clauses.append([int(v) if rng.integers(2) else -int(v) for v in vs])
    return ClauseSet.build(clauses, range(1, n + 1), range(n + 1, total + 1))


def random_dnnf(rng: np.random.Generator, dag: NnfDag, variables: Sequence[Var], depth: int = 4) -> int:
    """Random DNNF: And children get disjoint variable sets."""
    variables = list(variables)
    if depth == 0 or len(variables) == 1 or rng.random() < 0.15:
        v = variables[int(rng.integers(len(variables)))]
        return dag.build_literal(v, bool(rng.integers(2)))
    if rng.random() < 0.5:
        perm = [variables[k] for k in rng.permutation(len(variables))]
        cut = int(rng.integers(1, len(perm)))
        return dag.build_and([random_dnnf(rng, dag, perm[:cut], depth - 1),
                              random_dnnf(rng, dag, perm[cut:], depth - 1)])
    return dag.build_or([random_dnnf(rng, dag, variables, depth - 1) for _ in range(2)])


def random_wdnnf(rng: np.random.Generator, dag: NnfDag, variables: Sequence[Var], depth: int = 4,
                 allowed: Optional[Dict[Var, Tuple[bool, ...]]] = None) -> int:
    """Random wDNNF: And children never carry complementary literals."""
    if allowed is None:
        allowed = {v: (True, False) for v in variables}
    usable = [v for v in variables if allowed.get(v)]
    if depth == 0 or len(usable) == 1 or rng.random() < 0.15:
        v = usable[int(rng.integers(len(usable)))]
        pols = allowed[v]
        return dag.build_literal(v, pols[int(rng.integers(len(pols)))])
    if rng.random() < 0.5:
        left: Dict[Var, Tuple[bool, ...]] = {}
        right: Dict[Var, Tuple[bool, ...]] = {}
        for v in usable:
            pols = allowed[v]
            if len(pols) == 1:
                left[v] = right[v] = pols
                continue
            choice = int(rng.integers(4))
            if choice == 0:
                left[v], right[v] = (True,), (True,)
            elif choice == 1:
                left[v], right[v] = (False,), (False,)
            elif choice == 2:
                left[v], right[v] = pols, ()
            else:
                left[v], right[v] = (), pols
        kids = []
        for side in (left, right):
            if any(side.values()):
                kids.append(random_wdnnf(rng, dag, usable, depth - 1, side))
        return dag.build_and(kids)
    return dag.build_or([random_wdnnf(rng, dag, usable, depth - 1, allowed) for _ in range(2)])


def random_ddnnf(rng: np.random.Generator, dag: NnfDag, variables: Sequence[Var], depth: int = 4) -> int:
    """Random decision-DNNF: Or nodes split on a variable, And nodes split the variables."""
    variables = list(variables)
    if depth == 0 or len(variables) == 1 or rng.random() < 0.1:
        v = variables[int(rng.integers(len(variables)))]
        return dag.build_literal(v, bool(rng.integers(2)))
    perm = [variables[k] for k in rng.permutation(len(variables))]
    if rng.random() < 0.4 and len(perm) > 2:
        cut = int(rng.integers(1, len(perm)))
        return dag.build_and([random_ddnnf(rng, dag, perm[:cut], depth - 1),
                              random_ddnnf(rng, dag, perm[cut:], depth - 1)])
    v, rest = perm[0], perm[1:]
    hi = dag.build_and([dag.build_literal(v, True), random_ddnnf(rng, dag, rest, depth - 1)])
    lo = dag.build_and([dag.build_literal(v, False), random_ddnnf(rng, dag, rest, depth - 1)])
    return dag.build_or([hi, lo])
