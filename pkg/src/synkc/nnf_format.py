"""Reading and writing c2d-style ``.nnf`` files.

Format: a header ``nnf v e n`` followed by one node per line in topological
order -- ``L <lit>``, ``A c i1 .. ic`` or ``O j c i1 .. ic`` -- with 0-based
node ids given by line order.  Two comment extensions carry what the plain
format cannot:

``c root <name> <id>``
    a named root (files may hold several, e.g. ``psi_1`` / ``npsi_1``);
``c var <id> input|output <orig-index>``
    the role of file variable ``<id>``; outputs are listed in X order.

Literals are written with their DIMACS ids, so ``<id>`` and ``<orig-index>``
coincide for files produced here.
"""

from __future__ import annotations

import io
from typing import Dict, Iterable, List, Mapping, Optional, TextIO, Tuple, Union

from .nnf import AND, FALSE, LIT, OR, TRUE, Kind, NnfDag, Var, VarDecl

__all__ = ["NnfFormatError", "write_nnf", "dumps_nnf", "read_nnf", "loads_nnf"]


class NnfFormatError(ValueError):
    pass


def dumps_nnf(dag: NnfDag, roots: Mapping[str, int]) -> str:
    buf = io.StringIO()
    write_nnf(dag, roots, buf)
    return buf.getvalue()


def write_nnf(dag: NnfDag, roots: Mapping[str, int], out: Union[str, TextIO]) -> None:
    if isinstance(out, str):
        with open(out, "w") as fh:
            write_nnf(dag, roots, fh)
        return
    decl = dag.decl
    nodes = dag.reachable(list(roots.values()))
    renum = {node: k for k, node in enumerate(nodes)}
    bar_base = max(decl.x_names + decl.y_names + (0,))

    def lit_id(v: Var, pol: bool) -> int:
        if v.kind == Kind.BAR:
            ident = bar_base + v.index
        else:
            ident = decl.dimacs_of(v)
        return ident if pol else -ident

    lines = []
    edges = 0
    used_bar = set()
    for node in nodes:
        op = dag.op(node)
        if node == TRUE:
            lines.append("A 0")
        elif node == FALSE:
            lines.append("O 0 0")
        elif op == LIT:
            v, pol = dag.literal(node)
            if v.kind == Kind.BAR:
                used_bar.add(v.index)
            lines.append(f"L {lit_id(v, pol)}")
        else:
            kids = [renum[c] for c in dag.children(node)]
            edges += len(kids)
            body = " ".join(map(str, kids))
            lines.append(f"A {len(kids)} {body}" if op == AND else f"O 0 {len(kids)} {body}")
    nvars = max([bar_base] + [bar_base + i for i in used_bar])
    out.write(f"nnf {len(nodes)} {edges} {nvars}\n")
    for ident in decl.x_names:
        out.write(f"c var {ident} output {ident}\n")
    for ident in decl.y_names:
        out.write(f"c var {ident} input {ident}\n")
    for i in sorted(used_bar):
        out.write(f"c var {bar_base + i} bar {decl.x_names[i - 1]}\n")
    for name, node in roots.items():
        out.write(f"c root {name} {renum[node]}\n")
    for line in lines:
        out.write(line + "\n")


def loads_nnf(text: str, **kwargs) -> Tuple[NnfDag, Dict[str, int]]:
    return read_nnf(io.StringIO(text), **kwargs)


def read_nnf(
    src: Union[str, TextIO],
    dag: Optional[NnfDag] = None,
    outputs: Optional[Iterable[int]] = None,
) -> Tuple[NnfDag, Dict[str, int]]:
    """Parse an ``.nnf`` file into ``dag`` (a fresh arena by default).

    Variable roles come from ``c var`` comments; failing those, ``outputs``
    lists the output ids (in order) and every other variable is an input.
    Without either, every variable is treated as an output.  When ``dag`` is
    given, its declaration must cover every variable of the file.
    """
    if isinstance(src, str):
        with open(src) as fh:
            return read_nnf(fh, dag, outputs)

    header = None
    var_roles: List[Tuple[int, str, int]] = []
    root_lines: List[Tuple[str, int]] = []
    body: List[Tuple[int, List[str]]] = []
    for lineno, raw in enumerate(src, 1):
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "c":
            if len(parts) >= 5 and parts[1] == "var":
                var_roles.append((int(parts[2]), parts[3], int(parts[4])))
            elif len(parts) >= 4 and parts[1] == "root":
                root_lines.append((parts[2], int(parts[3])))
            continue
        if parts[0] == "nnf":
            if header is not None or len(parts) != 4:
                raise NnfFormatError(f"line {lineno}: bad header")
            header = tuple(int(p) for p in parts[1:])
            continue
        if header is None:
            raise NnfFormatError(f"line {lineno}: node before header")
        body.append((lineno, parts))
    if header is None:
        raise NnfFormatError("missing 'nnf v e n' header")
    nvars = header[2]

    # variable roles
    role: Dict[int, Tuple[str, int]] = {ident: (kind, orig) for ident, kind, orig in var_roles}
    mentioned = set()
    for _, parts in body:
        if parts[0] == "L":
            mentioned.add(abs(int(parts[1])))
    if not role:
        out_ids = list(outputs) if outputs is not None else sorted(mentioned)
        for ident in out_ids:
            role[ident] = ("output", ident)
        for ident in sorted(mentioned - set(out_ids)):
            role[ident] = ("input", ident)
    x_names = tuple(orig for ident, (kind, orig) in role.items() if kind == "output")
    y_names = tuple(orig for ident, (kind, orig) in role.items() if kind == "input")
    if dag is None:
        dag = NnfDag(VarDecl(x_names, y_names))
    decl = dag.decl

    def var_of(ident: int) -> Var:
        if ident not in role:
            raise NnfFormatError(f"variable {ident} has no declared role")
        kind, orig = role[ident]
        if kind == "bar":
            return decl.var_of(orig).twin
        return decl.var_of(orig)

    ids: List[int] = []
    edges = 0
    for lineno, parts in body:
        tag = parts[0]
        try:
            if tag == "L":
                lit = int(parts[1])
                if lit == 0 or abs(lit) > nvars:
                    raise NnfFormatError(f"line {lineno}: literal {lit} out of range")
                ids.append(dag.build_literal(var_of(abs(lit)), lit > 0))
                continue
            if tag == "A":
                count, kids = int(parts[1]), parts[2:]
                op = AND
            elif tag == "O":
                count, kids = int(parts[2]), parts[3:]
                op = OR
            else:
                raise NnfFormatError(f"line {lineno}: unknown node type {tag!r}")
            if count != len(kids):
                raise NnfFormatError(f"line {lineno}: child count mismatch")
            kid_ids = [int(k) for k in kids]
            if any(not 0 <= k < len(ids) for k in kid_ids):
                raise NnfFormatError(f"line {lineno}: child refers forward or out of range")
            edges += count
            if count == 0:
                ids.append(TRUE if op == AND else FALSE)
            else:
                kid_nodes = [ids[k] for k in kid_ids]
                ids.append(dag.build_and(kid_nodes) if op == AND else dag.build_or(kid_nodes))
        except (IndexError, ValueError) as exc:
            if isinstance(exc, NnfFormatError):
                raise
            raise NnfFormatError(f"line {lineno}: {exc}") from None
    if len(ids) != header[0]:
        raise NnfFormatError(f"header announces {header[0]} nodes, found {len(ids)}")
    if not ids:
        raise NnfFormatError("empty DAG")
    if root_lines:
        roots = {name: ids[k] for name, k in root_lines}
    else:
        roots = {"root": ids[-1]}
    dag.roots.update(roots)
    return dag, roots
