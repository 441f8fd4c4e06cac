"""Enumeration references for the pivoting condition and gate-encoded clause sets."""

import itertools

import numpy as np

from synkc.cnf import ClauseSet


def clause_value(clauses, a):
    return all(any(a[abs(l)] == (l > 0) for l in c) for c in clauses)


def theta_brute(S: ClauseSet, fdefs, v: int, a: int) -> bool:
    """Enumerate outputs, primed outputs and inputs directly."""
    clauses = S.live_clauses()
    outs = list(S.x_order)
    ins = sorted(S.atoms() - S.outputs)
    T = fdefs.T
    tied = [u for u in outs if u != v and u not in T]
    for yv in itertools.product((False, True), repeat=len(ins)):
        base = dict(zip(ins, yv))
        for xv in itertools.product((False, True), repeat=len(outs)):
            A = {**base, **dict(zip(outs, xv))}
            if A[v] != bool(a) or not clause_value(clauses, A):
                continue
            for xp in itertools.product((False, True), repeat=len(outs)):
                B = {**base, **dict(zip(outs, xp))}
                if B[v] == bool(a) or any(B[u] != A[u] for u in tied):
                    continue
                if fdefs.holds(lambda w: B[w]) and not clause_value(clauses, B):
                    return False
    return True


def gate_clauses(kind, out, args):
    """CNF encoding of ``out <-> kind(args)`` for and/or (n-ary) and xor (binary)."""
    if kind == "and":
        return [[-out, a] for a in args] + [[out] + [-a for a in args]]
    if kind == "or":
        return [[out, -a] for a in args] + [[-out] + list(args)]
    a, b = args
    return [[-out, a, b], [-out, -a, -b], [out, -a, b], [out, a, -b]]


def random_gate_cnf(rng: np.random.Generator, n: int, m: int, extra: int) -> ClauseSet:
    """Random clauses plus gate encodings defining some outputs from later variables."""
    clauses = []
    total = n + m
    for v in range(1, n + 1):
        later = list(range(v + 1, total + 1))
        if len(later) < 2 or rng.random() < 0.4:
            continue
        kind = ("and", "or", "xor")[int(rng.integers(3))]
        k = 2 if kind == "xor" else int(rng.integers(2, min(3, len(later)) + 1))
        args = [int(u) if rng.integers(2) else -int(u) for u in rng.choice(later, size=k, replace=False)]
        clauses += gate_clauses(kind, v, args)
    for _ in range(extra):
        w = int(rng.integers(1, min(3, total) + 1))
        vs = rng.choice(np.arange(1, total + 1), size=w, replace=False)
        clauses.append([int(u) if rng.integers(2) else -int(u) for u in vs])
    return ClauseSet.build(clauses, range(1, n + 1), range(n + 1, total + 1))
