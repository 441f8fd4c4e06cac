"""CNF specifications: QDIMACS parsing, cofactoring and clause-graph components.

Clauses are frozensets of signed DIMACS integers.  A :class:`ClauseSet` keeps
clause indices stable: removing a clause leaves a ``None`` tombstone in its
slot, so index sets (parts, branch partitions) stay meaningful across
restriction steps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .nnf import NnfDag, Var, VarDecl

__all__ = [
    "Clause",
    "ClauseSet",
    "MccPartition",
    "ParseError",
    "ParseReport",
    "parse_qdimacs",
    "clause_graph_mccs",
    "cofactor_clauses",
]

log = logging.getLogger(__name__)

Clause = FrozenSet[int]


class ParseError(ValueError):
    pass


@dataclass
class ParseReport:
    tautologies: List[Tuple[int, ...]] = field(default_factory=list)
    duplicates: int = 0
    free_vars: List[int] = field(default_factory=list)
    declared_vars: int = 0


@dataclass(frozen=True)
class ClauseSet:
    """A CNF over outputs ``x_order`` and inputs ``y_vars`` (DIMACS ids)."""

    clauses: Tuple[Optional[Clause], ...]
    x_order: Tuple[int, ...]
    y_vars: Tuple[int, ...]
    inconsistent: bool = False

    @classmethod
    def build(cls, clauses: Iterable[Iterable[int]], x_order: Sequence[int], y_vars: Sequence[int]) -> "ClauseSet":
        """Create a clause set, dropping tautologies and duplicates."""
        seen: Set[Clause] = set()
        kept: List[Clause] = []
        empty = False
        for lits in clauses:
            c = frozenset(lits)
            if any(-l in c for l in c) or c in seen:
                continue
            seen.add(c)
            kept.append(c)
            empty = empty or not c
        return cls(tuple(kept), tuple(x_order), tuple(sorted(y_vars)), empty)

    # ------------------------------------------------------------ inspection
    def live(self) -> Iterator[Tuple[int, Clause]]:
        for idx, c in enumerate(self.clauses):
            if c is not None:
                yield idx, c

    def live_clauses(self) -> List[Clause]:
        return [c for c in self.clauses if c is not None]

    def __len__(self) -> int:
        return sum(1 for c in self.clauses if c is not None)

    @property
    def decl(self) -> VarDecl:
        return VarDecl(self.x_order, self.y_vars)

    @property
    def outputs(self) -> FrozenSet[int]:
        return frozenset(self.x_order)

    def atoms(self) -> Set[int]:
        return {abs(l) for _, c in self.live() for l in c}

    def output_support(self) -> List[int]:
        """Outputs occurring in live clauses, in X order."""
        atoms = self.atoms()
        return [v for v in self.x_order if v in atoms]

    def input_support(self) -> List[int]:
        atoms = self.atoms()
        return [v for v in self.y_vars if v in atoms]

    def output_position(self, v: int) -> int:
        return self.x_order.index(v) + 1

    # ------------------------------------------------------------- editing
    def subset(self, indices: Iterable[int]) -> "ClauseSet":
        """Keep only the given clause indices (others become tombstones)."""
        keep = set(indices)
        clauses = tuple(c if i in keep else None for i, c in enumerate(self.clauses))
        return ClauseSet(clauses, self.x_order, self.y_vars,
                         any(c is not None and not c for c in clauses))

    def with_clauses(self, extra: Iterable[Iterable[int]]) -> "ClauseSet":
        present = {c for _, c in self.live()}
        added = []
        for lits in extra:
            c = frozenset(lits)
            if c not in present:
                present.add(c)
                added.append(c)
        return ClauseSet(self.clauses + tuple(added), self.x_order, self.y_vars,
                         self.inconsistent or any(not c for c in added))

    def with_order(self, x_order: Sequence[int]) -> "ClauseSet":
        if sorted(x_order) != sorted(self.x_order):
            raise ValueError("order must be a permutation of the outputs")
        return ClauseSet(self.clauses, tuple(x_order), self.y_vars, self.inconsistent)

    # ---------------------------------------------------------- conversions
    def to_dag(self, dag: NnfDag) -> int:
        """The conjunction of clauses as an And-of-Or DAG in ``dag``."""
        decl = dag.decl
        if self.inconsistent:
            return dag.const(False)
        return dag.conj(
            dag.clause((decl.var_of(abs(l)), l > 0) for l in sorted(c, key=abs))
            for _, c in self.live()
        )

    def to_dimacs(self) -> str:
        lines = [f"p cnf {max(self.x_order + self.y_vars + (0,))} {len(self)}"]
        if self.y_vars:
            lines.append("a " + " ".join(map(str, self.y_vars)) + " 0")
        if self.x_order:
            lines.append("e " + " ".join(map(str, self.x_order)) + " 0")
        for _, c in self.live():
            lines.append(" ".join(map(str, sorted(c, key=lambda l: (abs(l), l)))) + " 0")
        return "\n".join(lines) + "\n"


def parse_qdimacs(text: str, free_vars: str = "universal", report: Optional[ParseReport] = None) -> ClauseSet:
    """Parse (Q)DIMACS text with an optional ``a ... 0`` / ``e ... 0`` prefix.

    Only the forall-Y exists-X shape is accepted.  Variables without a
    quantifier become inputs (with a warning) unless ``free_vars='reject'``.
    """
    if free_vars not in ("universal", "reject"):
        raise ValueError("free_vars must be 'universal' or 'reject'")
    report = report if report is not None else ParseReport()
    nvars = ncls = None
    blocks: List[Tuple[str, List[int]]] = []
    clauses: List[List[int]] = []
    pending: List[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf" or nvars is not None:
                raise ParseError(f"line {lineno}: malformed header {line!r}")
            try:
                nvars, ncls = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"line {lineno}: malformed header {line!r}") from None
            continue
        if nvars is None:
            raise ParseError(f"line {lineno}: content before 'p cnf' header")
        if line[0] in "ae":
            if clauses or pending:
                raise ParseError(f"line {lineno}: quantifier block after clauses")
            nums = _ints(line[1:], lineno)
            if not nums or nums[-1] != 0:
                raise ParseError(f"line {lineno}: quantifier block not 0-terminated")
            for v in nums[:-1]:
                if not 1 <= v <= nvars:
                    raise ParseError(f"line {lineno}: variable {v} out of range")
            if blocks and blocks[-1][0] == line[0]:
                blocks[-1][1].extend(nums[:-1])
            else:
                blocks.append((line[0], nums[:-1]))
            continue
        for lit in _ints(line, lineno):
            if lit == 0:
                clauses.append(pending)
                pending = []
            elif abs(lit) > nvars:
                raise ParseError(f"line {lineno}: literal {lit} out of range")
            else:
                pending.append(lit)
    if nvars is None:
        raise ParseError("missing 'p cnf' header")
    if pending:
        raise ParseError("last clause is not 0-terminated")
    kinds = [k for k, _ in blocks]
    if kinds not in ([], ["a"], ["e"], ["a", "e"]):
        raise ParseError(f"unsupported quantifier prefix {''.join(kinds)!r}; only forall-exists is accepted")
    y_vars = [v for k, vs in blocks if k == "a" for v in vs]
    x_order = [v for k, vs in blocks if k == "e" for v in vs]
    quantified = set(y_vars) | set(x_order)
    used = {abs(l) for c in clauses for l in c}
    free = sorted(used - quantified)
    if free:
        if free_vars == "reject":
            raise ParseError(f"unquantified variables: {free}")
        log.warning("treating unquantified variables %s as inputs", free)
        y_vars.extend(free)
    report.free_vars = free
    report.declared_vars = nvars
    kept = []
    seen: Set[Clause] = set()
    for c in clauses:
        fc = frozenset(c)
        if any(-l in fc for l in fc):
            report.tautologies.append(tuple(c))
            continue
        if fc in seen:
            report.duplicates += 1
            continue
        seen.add(fc)
        kept.append(fc)
    if ncls is not None and len(clauses) != ncls:
        log.warning("header announces %d clauses, found %d", ncls, len(clauses))
    return ClauseSet.build(kept, x_order, y_vars)


def _ints(text: str, lineno: int) -> List[int]:
    try:
        return [int(t) for t in text.split()]
    except ValueError:
        raise ParseError(f"line {lineno}: non-integer token") from None


@dataclass(frozen=True)
class MccPartition:
    parts: Tuple[FrozenSet[int], ...]
    clause_to_part: Dict[int, int]


def clause_graph_mccs(S: ClauseSet) -> MccPartition:
    """Connected components of the graph linking clauses that share an output atom."""
    outputs = S.outputs
    parent: Dict[int, int] = {}

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    first_with: Dict[int, int] = {}
    for idx, c in S.live():
        parent[idx] = idx
        for lit in c:
            v = abs(lit)
            if v not in outputs:
                continue
            if v in first_with:
                a, b = find(idx), find(first_with[v])
                if a != b:
                    parent[max(a, b)] = min(a, b)
            else:
                first_with[v] = idx
    groups: Dict[int, List[int]] = {}
    for idx in parent:
        groups.setdefault(find(idx), []).append(idx)
    parts = tuple(frozenset(g) for _, g in sorted(groups.items()))
    clause_to_part = {idx: k for k, part in enumerate(parts) for idx in part}
    return MccPartition(parts, clause_to_part)


def cofactor_clauses(S: ClauseSet, var: int, value: bool) -> ClauseSet:
    """Restrict ``S`` by ``var := value``; satisfied clauses become tombstones."""
    true_lit = var if value else -var
    new: List[Optional[Clause]] = []
    seen: Set[Clause] = set()
    empty = S.inconsistent
    for c in S.clauses:
        if c is None or true_lit in c:
            new.append(None)
            continue
        if -true_lit in c:
            c = c - {-true_lit}
        if c in seen:
            new.append(None)
            continue
        seen.add(c)
        new.append(c)
        empty = empty or not c
    return ClauseSet(tuple(new), S.x_order, S.y_vars, empty)
