"""Shared fixtures: the three worked specifications and their clause forms."""

import pytest

from synkc.cnf import ClauseSet
from synkc.nnf import NnfDag, VarDecl, parse_formula

K_TEXT = "(x1|x2)&(~x2|y1)&(~y1|y2)"
H_TEXT = "(x1|x2|y1)&(~x1|(~x2&y2))"
G_TEXT = "(~x1|x2|y1)&(x1|~x2)&(x1|~y1)&(x2|y2)"

# DIMACS ids: x1=1, x2=2, y1=3, y2=4
K_CLAUSES = [[1, 2], [-2, 3], [-3, 4]]
G_CLAUSES = [[-1, 2, 3], [1, -2], [1, -3], [2, 4]]
H_CLAUSES = [[1, 2, 3], [-1, -2], [-1, 4]]

K_QDIMACS = "p cnf 4 3\na 3 4 0\ne 1 2 0\n1 2 0\n-2 3 0\n-3 4 0\n"
G_QDIMACS = "p cnf 4 4\na 3 4 0\ne 1 2 0\n-1 2 3 0\n1 -2 0\n1 -3 0\n2 4 0\n"
H_QDIMACS = "p cnf 4 3\na 3 4 0\ne 1 2 0\n1 2 3 0\n-1 -2 0\n-1 4 0\n"


@pytest.fixture
def dag():
    return NnfDag(VarDecl.plain(2, 2))


@pytest.fixture
def K(dag):
    return parse_formula(dag, K_TEXT)


@pytest.fixture
def H(dag):
    return parse_formula(dag, H_TEXT)


@pytest.fixture
def G(dag):
    return parse_formula(dag, G_TEXT)


def clause_set(clauses, n=2, m=2):
    return ClauseSet.build(clauses, range(1, n + 1), range(n + 1, n + m + 1))


def bits(table):
    return "".join(str(int(b)) for b in table.bits)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
