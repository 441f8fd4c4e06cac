"""Hash-consed NNF DAGs.

All formulas of one run live in a single append-only arena (:class:`NnfDag`).
Nodes are plain integer ids; children always carry smaller ids than their
parents, so ascending id order is a topological order.  Node ``0`` is the
constant false and node ``1`` the constant true.

Simplification (constant absorption, duplicate removal, arity-1 collapse) is
applied when a node is built, so every DAG in the arena is simplified.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Set, Tuple, Union

__all__ = [
    "Kind",
    "Var",
    "VarDecl",
    "NnfDag",
    "FALSE",
    "TRUE",
    "LIT",
    "AND",
    "OR",
    "x",
    "y",
    "xbar",
]


class Kind(enum.IntEnum):
    OUTPUT = 0
    INPUT = 1
    BAR = 2


class Var(NamedTuple):
    """A variable: output ``x_i``, input ``y_j`` or the positive-form twin ``xbar_i``."""

    kind: Kind
    index: int

    def __repr__(self) -> str:
        return {Kind.OUTPUT: "x", Kind.INPUT: "y", Kind.BAR: "xbar"}[self.kind] + str(self.index)

    @property
    def twin(self) -> "Var":
        """Output <-> bar-output partner."""
        if self.kind == Kind.INPUT:
            raise ValueError(f"{self!r} has no bar twin")
        return Var(Kind.BAR if self.kind == Kind.OUTPUT else Kind.OUTPUT, self.index)


def x(i: int) -> Var:
    return Var(Kind.OUTPUT, i)


def y(j: int) -> Var:
    return Var(Kind.INPUT, j)


def xbar(i: int) -> Var:
    return Var(Kind.BAR, i)


@dataclass(frozen=True)
class VarDecl:
    """Output/input declaration: ``x_names[i-1]`` is the DIMACS id of ``x_i``."""

    x_names: Tuple[int, ...] = ()
    y_names: Tuple[int, ...] = ()

    @classmethod
    def plain(cls, n: int, m: int) -> "VarDecl":
        return cls(tuple(range(1, n + 1)), tuple(range(n + 1, n + m + 1)))

    @property
    def n(self) -> int:
        return len(self.x_names)

    @property
    def m(self) -> int:
        return len(self.y_names)

    @property
    def outputs(self) -> List[Var]:
        return [x(i) for i in range(1, self.n + 1)]

    @property
    def inputs(self) -> List[Var]:
        return [y(j) for j in range(1, self.m + 1)]

    def var_of(self, dimacs: int) -> Var:
        try:
            return x(self.x_names.index(dimacs) + 1)
        except ValueError:
            pass
        try:
            return y(self.y_names.index(dimacs) + 1)
        except ValueError:
            raise KeyError(f"DIMACS variable {dimacs} is not declared") from None

    def dimacs_of(self, v: Var) -> int:
        if v.kind == Kind.INPUT:
            return self.y_names[v.index - 1]
        if v.kind == Kind.OUTPUT:
            return self.x_names[v.index - 1]
        raise ValueError(f"{v!r} has no DIMACS name")


# node operators
FALSE_OP, TRUE_OP, LIT, AND, OR = range(5)
FALSE, TRUE = 0, 1

Const = Union[bool, int]


@dataclass
class NnfDag:
    """Append-only arena of simplified NNF nodes with named roots."""

    decl: VarDecl = field(default_factory=VarDecl)
    roots: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._op: List[int] = [FALSE_OP, TRUE_OP]
        self._args: List[tuple] = [(), ()]
        self._unique: Dict[tuple, int] = {}
        self._neg: Dict[int, int] = {FALSE: TRUE, TRUE: FALSE}
        self._subst_cache: Dict[tuple, Dict[int, int]] = {}
        self.work = 0  # node visits performed by transformations

    # ------------------------------------------------------------------ access
    def __len__(self) -> int:
        return len(self._op)

    def op(self, node: int) -> int:
        return self._op[node]

    def children(self, node: int) -> tuple:
        return self._args[node] if self._op[node] in (AND, OR) else ()

    def literal(self, node: int) -> Tuple[Var, bool]:
        if self._op[node] != LIT:
            raise ValueError(f"node {node} is not a literal")
        return self._args[node]

    def is_const(self, node: int) -> bool:
        return node in (FALSE, TRUE)

    # ---------------------------------------------------------------- building
    def _intern(self, op: int, args: tuple) -> int:
        key = (op, args)
        node = self._unique.get(key)
        if node is None:
            node = len(self._op)
            self._op.append(op)
            self._args.append(args)
            self._unique[key] = node
        return node

    def const(self, value: Const) -> int:
        return TRUE if value else FALSE

    def build_literal(self, v: Var, polarity: bool = True) -> int:
        return self._intern(LIT, (v, bool(polarity)))

    def _build_nary(self, op: int, children: Iterable[int]) -> int:
        children = list(children)
        if not children:
            raise ValueError("And/Or nodes need at least one child")
        absorbing, neutral = (FALSE, TRUE) if op == AND else (TRUE, FALSE)
        kept = set()
        for c in children:
            if not 0 <= c < len(self._op):
                raise ValueError(f"unknown node id {c}")
            if c == absorbing:
                return absorbing
            if c != neutral:
                kept.add(c)
        if not kept:
            return neutral
        if len(kept) == 1:
            return kept.pop()
        return self._intern(op, tuple(sorted(kept)))

    def build_and(self, children: Iterable[int]) -> int:
        return self._build_nary(AND, children)

    def build_or(self, children: Iterable[int]) -> int:
        return self._build_nary(OR, children)

    def conj(self, children: Iterable[int]) -> int:
        """Like :meth:`build_and` but the empty conjunction is true."""
        children = list(children)
        return self.build_and(children) if children else TRUE

    def disj(self, children: Iterable[int]) -> int:
        children = list(children)
        return self.build_or(children) if children else FALSE

    def iff(self, v: Var, pos: int, neg: Optional[int] = None) -> int:
        """``(v & f) | (~v & ~f)`` given ``f`` and optionally its negation."""
        if neg is None:
            neg = self.negate(pos)
        return self.build_or([
            self.build_and([self.build_literal(v), pos]),
            self.build_and([self.build_literal(v, False), neg]),
        ])

    # -------------------------------------------------------------- traversal
    def reachable(self, roots: Union[int, Iterable[int]]) -> List[int]:
        """Node ids reachable from ``roots`` in ascending (topological) order."""
        if isinstance(roots, int):
            roots = [roots]
        seen: Set[int] = set()
        stack = list(roots)
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            if self._op[node] >= AND:
                stack.extend(c for c in self._args[node] if c not in seen)
        return sorted(seen)

    def size(self, roots: Union[int, Iterable[int], None] = None) -> int:
        """Node count reachable from ``roots`` (default: all named roots)."""
        if roots is None:
            roots = list(self.roots.values())
        return len(self.reachable(roots))

    def edge_count(self, roots: Union[int, Iterable[int]]) -> int:
        return sum(len(self.children(n)) for n in self.reachable(roots))

    def support(self, root: Union[int, Iterable[int]]) -> Set[Var]:
        return {self._args[n][0] for n in self.reachable(root) if self._op[n] == LIT}

    def literals(self, root: int) -> Set[Tuple[Var, bool]]:
        return {self._args[n] for n in self.reachable(root) if self._op[n] == LIT}

    # ------------------------------------------------------------- semantics
    def evaluate(self, root: int, assignment: Mapping[Var, Const]) -> int:
        """Evaluate ``root`` under a total assignment of its support."""
        val: Dict[int, bool] = {}
        for node in self.reachable(root):
            op = self._op[node]
            if op == LIT:
                v, pol = self._args[node]
                if v not in assignment:
                    raise KeyError(f"assignment misses variable {v!r}")
                val[node] = bool(assignment[v]) == pol
            elif op == AND:
                val[node] = all(val[c] for c in self._args[node])
            elif op == OR:
                val[node] = any(val[c] for c in self._args[node])
            else:
                val[node] = op == TRUE_OP
        return int(val[root])

    # -------------------------------------------------------- transformations
    def _rewrite(self, root: int, leaf, memo: Dict[int, int]) -> int:
        """Rebuild ``root`` bottom-up, mapping every literal node through ``leaf``."""
        for node in self.reachable(root):
            if node in memo:
                continue
            self.work += 1
            op = self._op[node]
            if op == LIT:
                memo[node] = leaf(*self._args[node])
            elif op == AND:
                memo[node] = self.build_and(memo[c] for c in self._args[node])
            elif op == OR:
                memo[node] = self.build_or(memo[c] for c in self._args[node])
            else:
                memo[node] = node
        return memo[root]

    def negate(self, root: int) -> int:
        """NNF negation by De Morgan push-down; results are cached both ways."""
        if root in self._neg:
            return self._neg[root]
        for node in self.reachable(root):
            if node in self._neg:
                continue
            self.work += 1
            op = self._op[node]
            if op == LIT:
                v, pol = self._args[node]
                res = self.build_literal(v, not pol)
            elif op == AND:
                res = self.build_or(self._neg[c] for c in self._args[node])
            else:  # OR; constants are pre-seeded
                res = self.build_and(self._neg[c] for c in self._args[node])
            self._neg[node] = res
            self._neg[res] = node
        return self._neg[root]

    def positive_form(self, root: int) -> int:
        """Replace every negative output literal ``~x_i`` by the fresh variable ``xbar_i``."""

        def leaf(v: Var, pol: bool) -> int:
            if v.kind == Kind.OUTPUT and not pol:
                return self.build_literal(v.twin)
            return self.build_literal(v, pol)

        return self._rewrite(root, leaf, self._subst_memo(("positive-form",)))

    def _subst_memo(self, key: tuple) -> Dict[int, int]:
        return self._subst_cache.setdefault(key, {})

    def _coerce(self, target: Union[int, bool]) -> int:
        if isinstance(target, bool):
            return TRUE if target else FALSE
        return target

    def substitute(
        self,
        root: int,
        binding: Mapping[Var, Union[int, bool]],
        neg_binding: Optional[Mapping[Var, Union[int, bool]]] = None,
    ) -> int:
        """Simultaneously replace variables by nodes (or ``True``/``False``).

        A negative literal of a bound variable becomes the negation of the
        bound node, unless ``neg_binding`` supplies that negation explicitly.
        Integer targets are node ids, so the constants must be passed as
        ``TRUE``/``FALSE`` (which equal 1/0) or as bools.
        """
        if not binding:
            return root
        pos = {v: self._coerce(t) for v, t in binding.items()}
        neg = {v: self._coerce(t) for v, t in (neg_binding or {}).items()}
        key = ("subst", tuple(sorted(pos.items())), tuple(sorted(neg.items())))

        def leaf(v: Var, pol: bool) -> int:
            if v not in pos:
                return self.build_literal(v, pol)
            if pol:
                return pos[v]
            if v in neg:
                return neg[v]
            return self.negate(pos[v])

        return self._rewrite(root, leaf, self._subst_memo(key))

    def rename(self, root: int, mapping: Mapping[Var, Var]) -> int:
        """Rename variables (literal polarity kept)."""
        return self.substitute(root, {v: self.build_literal(w) for v, w in mapping.items()},
                               {v: self.build_literal(w, False) for v, w in mapping.items()})

    # ---------------------------------------------------------------- display
    def to_str(self, root: int) -> str:
        """Human-readable expression (expands shared nodes)."""
        op = self._op[root]
        if op == FALSE_OP:
            return "0"
        if op == TRUE_OP:
            return "1"
        if op == LIT:
            v, pol = self._args[root]
            return repr(v) if pol else "~" + repr(v)
        sep = " & " if op == AND else " | "
        return "(" + sep.join(self.to_str(c) for c in self._args[root]) + ")"

    def cube(self, literals: Iterable[Tuple[Var, bool]]) -> int:
        """Conjunction of literals."""
        return self.conj(self.build_literal(v, p) for v, p in literals)

    def clause(self, literals: Iterable[Tuple[Var, bool]]) -> int:
        return self.disj(self.build_literal(v, p) for v, p in literals)


def parse_formula(dag: NnfDag, text: str) -> int:
    """Parse a small NNF expression such as ``(x1 | x2) & (~x2 | y1)``.

    Supported atoms are ``x<i>``, ``y<j>``, ``xbar<i>``, ``0`` and ``1``;
    negation is only allowed directly on atoms.  Used by tests and demos.
    """
    import re

    tokens = re.findall(r"xbar\d+|[xy]\d+|[01]|[()&|~]", text.replace(" ", ""))
    pos = 0

    def peek() -> Optional[str]:
        return tokens[pos] if pos < len(tokens) else None

    def take() -> str:
        nonlocal pos
        pos += 1
        return tokens[pos - 1]

    def atom() -> int:
        tok = take()
        if tok == "(":
            node = disjunction()
            if take() != ")":
                raise ValueError("expected )")
            return node
        if tok == "~":
            inner = take()
            return dag.build_literal(_var_token(inner), False)
        if tok in ("0", "1"):
            return int(tok)
        return dag.build_literal(_var_token(tok))

    def conjunction() -> int:
        parts = [atom()]
        while peek() == "&":
            take()
            parts.append(atom())
        return dag.build_and(parts)

    def disjunction() -> int:
        parts = [conjunction()]
        while peek() == "|":
            take()
            parts.append(conjunction())
        return dag.build_or(parts)

    node = disjunction()
    if pos != len(tokens):
        raise ValueError(f"trailing input in {text!r}")
    return node


def _var_token(tok: str) -> Var:
    if tok.startswith("xbar"):
        return xbar(int(tok[4:]))
    if tok[0] == "x":
        return x(int(tok[1:]))
    if tok[0] == "y":
        return y(int(tok[1:]))
    raise ValueError(f"bad variable token {tok!r}")
