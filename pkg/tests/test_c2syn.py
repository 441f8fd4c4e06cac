import numpy as np
import pytest

from synkc.c2syn import DEFCKT, branch_partition, choose_output_var, compile_cnf
from synkc.cnf import ClauseSet
from synkc.nnf import TRUE, parse_formula
from synkc.oracle import random_cnf, tt_equiv, tt_of, tt_refines, tt_skolem_correct
from synkc.refine import check_refines
from synkc.skolem import error_formula_check, gacks_skolem
from synkc.synnnf import syntactic_failures

from conftest import G_CLAUSES, H_CLAUSES, K_CLAUSES, clause_set


def _refines(r, S):
    d = r.dag
    X, Y = d.decl.outputs, d.decl.inputs
    f = S.to_dag(d)
    return tt_refines(tt_of(d, r.root, X + Y), tt_of(d, f, X + Y), X, Y)


class TestCompile:
    def test_G_without_branching(self):
        S = clause_set(G_CLAUSES)
        r = compile_cnf(S)
        assert r.stats["branches"] == 0 and r.stats["exit_defckt"] == 1
        assert tt_equiv(tt_of(r.dag, r.root), tt_of(r.dag, parse_formula(r.dag, "x1&x2")))
        assert r.provenance()[r.root] == DEFCKT
        assert _refines(r, S)

    def test_empty(self):
        r = compile_cnf(clause_set([]))
        assert r.root == TRUE and r.stats["exit_valid"] == 1

    def test_H(self):
        S = clause_set(H_CLAUSES)
        r = compile_cnf(S)
        assert not syntactic_failures(r.dag, r.root)
        assert check_refines(r.dag, r.root, S.to_dag(r.dag))
        assert _refines(r, S)

    def test_K(self):
        S = clause_set(K_CLAUSES)
        r = compile_cnf(S)
        assert not syntactic_failures(r.dag, r.root) and _refines(r, S)

    def test_inconsistent(self):
        r = compile_cnf(clause_set([[1], [-1]]))
        assert r.root == r.dag.const(0)

    def test_strict_arms_under_branching(self):
        # no gacks exit forces branching; arms must not admit outputs outside their clauses
        rng = np.random.default_rng(71)
        branched = 0
        for _ in range(60):
            S = random_cnf(rng, 3, 3, int(rng.integers(4, 14)), 2, 3)
            r = compile_cnf(S, try_gacks=False)
            branched += r.stats["branches"] > 0
            assert not syntactic_failures(r.dag, r.root)
            assert _refines(r, S)
            assert r.stats["max_level"] <= 3
        assert branched > 10

    def test_pipeline_skolem_against_original(self):
        rng = np.random.default_rng(72)
        for _ in range(60):
            S = random_cnf(rng, int(rng.integers(1, 5)), int(rng.integers(0, 5)), int(rng.integers(1, 16)), 1, 3)
            r = compile_cnf(S)
            d = r.dag
            X, Y = d.decl.outputs, d.decl.inputs
            sk = gacks_skolem(d, r.root, X)
            f = S.to_dag(d)
            assert error_formula_check(d, f, sk).correct
            psi = {v: tt_of(d, p, Y) for v, p in zip(X, sk.pos_roots)}
            assert tt_skolem_correct(tt_of(d, f, X + Y), psi, X, Y)


class TestChooseOutput:
    def test_single(self):
        assert choose_output_var(clause_set([[1, 3]]), [2]) == 2

    def test_short_clauses_win(self):
        S = ClauseSet.build([[1, 4], [1, 5], [-1, 6], [2, 4, 5]], [1, 2], [4, 5, 6])
        assert choose_output_var(S, [1, 2]) == 1

    def test_tie(self):
        S = clause_set([[2, 3], [1, 4]])
        assert choose_output_var(S, [2, 1]) == 1

    def test_empty(self):
        with pytest.raises(ValueError):
            choose_output_var(clause_set([[1]]), [])


class TestBranchPartition:
    def test_linked_by_pivot(self):
        # x=1, y1..y3 inputs 3..5 on a 2-output declaration with x2 as the other output
        S = ClauseSet.build([[1, 3], [-1, 4], [2, 5]], [1, 2], [3, 4, 5])
        s1, s2, s3 = branch_partition(S, 1)
        assert s1.live_clauses() == s2.live_clauses() == [frozenset({1, 3}), frozenset({-1, 4})]
        assert s3.live_clauses() == [frozenset({2, 5})]

    def test_pure(self):
        S = clause_set([[1, 3], [2, 4]])
        s1, s2, s3 = branch_partition(S, 1)
        assert len(s2) == 0 and len(s1) == 1 and len(s3) == 1

    def test_third_part_output_disjoint(self):
        rng = np.random.default_rng(73)
        for _ in range(100):
            S = random_cnf(rng, 4, 3, int(rng.integers(1, 12)))
            outs = S.output_support()
            if not outs:
                continue
            s1, s2, s3 = branch_partition(S, outs[0])
            assert not set(s3.output_support()) & (set(s1.output_support()) | set(s2.output_support()))
