import itertools

import numpy as np
import pytest

from synkc.nnf import AND, FALSE, LIT, OR, TRUE, Kind, NnfDag, Var, VarDecl, parse_formula, x, xbar, y
from synkc.oracle import random_nnf, tt_equiv, tt_of

from conftest import bits


def all_assignments(variables):
    for vals in itertools.product((0, 1), repeat=len(variables)):
        yield dict(zip(variables, vals))


def tree_eval(dag, node, a):
    """Naive recursive evaluation, independent of the arena's evaluator."""
    op = dag.op(node)
    if node == TRUE:
        return 1
    if node == FALSE:
        return 0
    if op == LIT:
        v, pol = dag.literal(node)
        return int(a[v] == int(pol))
    vals = [tree_eval(dag, c, a) for c in dag.children(node)]
    return int(all(vals)) if op == AND else int(any(vals))


class TestBuilding:
    def test_and_with_true_is_identity(self, dag):
        t = dag.build_literal(x(1))
        assert dag.build_and([t, TRUE]) == t

    def test_or_with_true_is_true(self, dag):
        t = dag.build_literal(x(1))
        assert dag.build_or([t, TRUE]) == TRUE

    def test_idempotence(self, dag):
        t = dag.build_literal(x(1))
        assert dag.build_and([t, t]) == t
        assert dag.build_or([t, t]) == t

    def test_hash_consing(self, dag):
        a, b = dag.build_literal(x(1)), dag.build_literal(y(1), False)
        assert dag.build_and([a, b]) == dag.build_and([b, a])
        assert dag.build_literal(x(1)) == a

    def test_empty_arity_rejected(self, dag):
        with pytest.raises(ValueError):
            dag.build_and([])
        with pytest.raises(ValueError):
            dag.build_or([])

    def test_unknown_child_rejected(self, dag):
        with pytest.raises(ValueError):
            dag.build_and([1000])

    def test_children_precede_parents(self, dag, K, H):
        for node in dag.reachable([K, H]):
            assert all(c < node for c in dag.children(node))

    def test_no_constant_or_duplicate_children(self, dag, K, H):
        for node in dag.reachable([K, H]):
            kids = dag.children(node)
            assert len(kids) == len(set(kids))
            assert TRUE not in kids and FALSE not in kids
            if dag.op(node) in (AND, OR):
                assert len(kids) >= 2

    def test_size_counts_reachable_only(self, dag, K):
        before = dag.size(K)
        dag.build_and([dag.build_literal(x(1)), dag.build_literal(y(2))])
        assert dag.size(K) == before


class TestEvaluate:
    def test_examples(self, dag, K, H):
        a = {x(1): 1, x(2): 0, y(1): 0, y(2): 0}
        assert dag.evaluate(K, a) == 1
        assert dag.evaluate(H, a) == 0
        assert dag.evaluate(FALSE, {}) == 0

    def test_missing_variable(self, dag, K):
        with pytest.raises(KeyError):
            dag.evaluate(K, {x(1): 1})

    def test_truth_tables(self, dag, K, H, G):
        # frozen from the enumeration oracle, support (x1, x2, y1, y2)
        sup = (x(1), x(2), y(1), y(2))
        assert bits(tt_of(dag, K, sup)) == "0000000111010001"
        assert bits(tt_of(dag, H, sup)) == "0011111101010000"
        assert bits(tt_of(dag, G, sup)) == "0100000000011111"

    def test_agrees_with_tree_evaluator(self):
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 1000:
            dag = NnfDag(VarDecl.plain(3, 3))
            root = random_nnf(rng, dag, int(rng.integers(2, 12)))
            variables = dag.decl.outputs + dag.decl.inputs
            for _ in range(10):
                a = {v: int(rng.integers(2)) for v in variables}
                assert dag.evaluate(root, a) == tree_eval(dag, root, a)
                checked += 1


class TestPositiveForm:
    def test_examples(self, dag, K, H):
        assert dag.to_str(dag.positive_form(K)) == "((x1 | x2) & (~y1 | y2) & (y1 | xbar2))"
        expected = parse_formula(dag, "(x1|x2|y1)&(xbar1|(xbar2&y2))")
        assert dag.positive_form(H) == expected

    def test_without_negated_outputs_unchanged(self, dag):
        f = parse_formula(dag, "(x1|~y1)&(x2|y2)")
        assert dag.positive_form(f) == f

    def test_monotone_in_outputs_and_bars(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            dag = NnfDag(VarDecl.plain(3, 2))
            fh = dag.positive_form(random_nnf(rng, dag, 10))
            for v, pol in dag.literals(fh):
                if v.kind in (Kind.OUTPUT, Kind.BAR):
                    assert pol
            support = sorted(dag.support(fh))
            for _ in range(10):
                a = {v: int(rng.integers(2)) for v in support}
                if not dag.evaluate(fh, a):
                    continue
                for v in support:
                    if v.kind != Kind.INPUT and a[v] == 0:
                        assert dag.evaluate(fh, {**a, v: 1}) == 1


class TestSubstitute:
    def test_reduct_examples(self, dag, K, H):
        kh, hh = dag.positive_form(K), dag.positive_form(H)
        d2 = dag.substitute(kh, {x(1): True, xbar(1): True})
        assert d2 == parse_formula(dag, "(xbar2|y1)&(~y1|y2)")
        assert dag.substitute(hh, {x(1): True, xbar(1): True}) == TRUE

    def test_empty_binding_same_root(self, dag, K):
        assert dag.substitute(K, {}) == K

    def test_simultaneous(self, dag):
        f = parse_formula(dag, "x1&~x2")
        swapped = dag.substitute(f, {x(1): dag.build_literal(x(2)), x(2): dag.build_literal(x(1))})
        assert swapped == parse_formula(dag, "x2&~x1")

    def test_constant_binding_matches_evaluation(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            dag = NnfDag(VarDecl.plain(3, 2))
            f = random_nnf(rng, dag, 8)
            variables = dag.decl.outputs + dag.decl.inputs
            fixed = {v: bool(rng.integers(2)) for v in variables if rng.random() < 0.5}
            g = dag.substitute(f, fixed)
            for _ in range(8):
                a = {v: int(rng.integers(2)) for v in variables}
                assert dag.evaluate(g, a) == dag.evaluate(f, {**a, **{v: int(b) for v, b in fixed.items()}})


class TestNegate:
    def test_constants_and_de_morgan(self, dag):
        assert dag.negate(TRUE) == FALSE
        f = parse_formula(dag, "x1&y1")
        assert dag.negate(f) == parse_formula(dag, "~x1|~y1")

    def test_double_negation(self, dag, K):
        sup = (x(1), x(2), y(1), y(2))
        assert tt_equiv(tt_of(dag, dag.negate(dag.negate(K)), sup), tt_of(dag, K, sup))
        assert dag.negate(dag.negate(K)) == K

    def test_complement_and_size(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            dag = NnfDag(VarDecl.plain(4, 4))
            f = random_nnf(rng, dag, int(rng.integers(2, 15)))
            nf = dag.negate(f)
            assert dag.size(nf) <= dag.size(f)
            sup = tuple(sorted(dag.support(f)))
            assert np.array_equal(tt_of(dag, nf, sup).bits, ~tt_of(dag, f, sup).bits)


def test_parse_formula_rejects_trailing_input(dag):
    with pytest.raises(ValueError):
        parse_formula(dag, "x1 x2")


def test_var_twins():
    assert x(1).twin == xbar(1) and xbar(1).twin == x(1)
    with pytest.raises(ValueError):
        y(1).twin


def test_decl_round_trip():
    decl = VarDecl((5, 2), (7, 1))
    assert decl.outputs == [x(1), x(2)]
    assert decl.var_of(7) == y(1) and decl.dimacs_of(x(2)) == 2
    assert decl.var_of(5) == Var(Kind.OUTPUT, 1)
