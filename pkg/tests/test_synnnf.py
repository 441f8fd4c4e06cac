import numpy as np
import pytest

from synkc import sat
from synkc.nnf import TRUE, NnfDag, VarDecl, parse_formula, x, y
from synkc.oracle import (random_ddnnf, random_dnnf, random_nnf, random_wdnnf, tt_equiv, tt_exists, tt_of,
                          tt_reduct)
from synkc.sat import is_sat
from synkc.synnnf import (MembershipTimeout, alpha, check_ddnnf, check_dnnf, check_membership, check_wdnnf,
                          is_and_unrealizable, reduct, syntactic_failures, zeta_roots)


class TestReduct:
    def test_examples(self, dag, K, H):
        assert reduct(dag, K, 1) == dag.positive_form(K)
        assert reduct(dag, K, 2) == parse_formula(dag, "(xbar2|y1)&(~y1|y2)")
        assert reduct(dag, H, 2) == TRUE

    def test_last_reduct_has_no_outputs(self, dag, K):
        assert all(v.kind.name == "INPUT" for v in dag.support(reduct(dag, K, 3)))

    def test_range(self, dag, K):
        with pytest.raises(IndexError):
            reduct(dag, K, 0)
        with pytest.raises(IndexError):
            reduct(dag, K, 4)


class TestAlpha:
    def test_examples(self, dag, H):
        assert alpha(dag, H, 1, 1, 1) == TRUE
        assert alpha(dag, H, 1, 1, 0) == parse_formula(dag, "~x2&y2")
        assert alpha(dag, H, 1, 0, 1) == parse_formula(dag, "x2|y1")

    def test_range(self, dag, H):
        with pytest.raises(IndexError):
            alpha(dag, H, 3, 1, 0)


class TestUnrealizable:
    def test_examples(self, dag, K, H):
        assert is_and_unrealizable(dag, K, 1).holds
        r = is_and_unrealizable(dag, H, 1)
        assert not r.holds and r.witness == {x(2): 0, y(1): 0, y(2): 0}
        assert is_and_unrealizable(dag, H, 2).holds

    def test_zeta_vs_implication_form(self):
        # zeta unsat exactly when alpha11 is implied by alpha10 | alpha01
        rng = np.random.default_rng(21)
        for _ in range(100):
            dag = NnfDag(VarDecl.plain(3, 3))
            f = random_nnf(rng, dag, 10)
            for i in (1, 2, 3):
                a11, a10, a01 = zeta_roots(dag, f, i)
                implied = not is_sat(dag, [a11], [dag.build_or([a10, a01])]).sat
                assert implied == is_and_unrealizable(dag, f, i).holds


class TestMembership:
    def test_examples(self, dag, K, H):
        assert check_membership(dag, K).in_synnnf
        rep = check_membership(dag, H)
        assert not rep.in_synnnf and rep.failing_i == 1
        assert check_membership(dag, parse_formula(dag, "x1|y1")).in_synnnf

    def test_methods_agree_on_examples(self, dag, K, H):
        for method in ("semantic", "syntactic", "auto"):
            assert check_membership(dag, K, method).in_synnnf
            assert not check_membership(dag, H, method).in_synnnf

    def test_witness_satisfies_zeta(self):
        rng = np.random.default_rng(31)
        seen = 0
        for _ in range(300):
            dag = NnfDag(VarDecl.plain(3, 3))
            f = random_nnf(rng, dag, 12)
            rep = check_membership(dag, f, "semantic")
            if rep.in_synnnf:
                continue
            seen += 1
            a11, a10, a01 = zeta_roots(dag, f, rep.failing_i)
            full = {v: 0 for v in dag.decl.outputs + dag.decl.inputs}
            full.update(rep.witness)
            assert dag.evaluate(a11, full) == 1
            assert dag.evaluate(a10, full) == 0 and dag.evaluate(a01, full) == 0
        assert seen > 10

    def test_syntactic_pass_implies_semantic_pass(self):
        rng = np.random.default_rng(32)
        for _ in range(300):
            dag = NnfDag(VarDecl.plain(3, 3))
            f = random_nnf(rng, dag, int(rng.integers(3, 14)))
            fails = syntactic_failures(dag, f)
            rep = check_membership(dag, f, "semantic")
            for entry in rep.per_i:
                if entry["i"] not in fails:
                    assert entry["holds"]

    def test_equivalence_characterisation(self):
        # member  <=>  for every i, eliminating x_1..x_i equals reduct i+1 with bars as negations
        rng = np.random.default_rng(33)
        members = 0
        for _ in range(300):
            n = int(rng.integers(1, 5))
            dag = NnfDag(VarDecl.plain(n, int(rng.integers(1, 11 - n))))
            f = random_nnf(rng, dag, int(rng.integers(3, 20)))
            X = dag.decl.outputs
            sup = tuple(X + dag.decl.inputs)
            tf = tt_of(dag, f, sup)
            eq = all(tt_equiv(tt_exists(tf, X[:i]), tt_reduct(dag, f, i, X, sup)) for i in range(1, n + 1))
            member = check_membership(dag, f, "semantic").in_synnnf
            assert member == eq
            members += member
        assert 0 < members < 300

    def test_report_json(self, dag, H):
        js = check_membership(dag, H, "semantic").to_json(dag.decl)
        assert js["failing_i"] == 1 and js["witness"] == {"2": 0, "3": 0, "4": 0}
        assert [p["i"] for p in js["per_i"]] == [1, 2]

    def test_unknown_method(self, dag, K):
        with pytest.raises(ValueError):
            check_membership(dag, K, "guess")

    def test_timeout_carries_partial_report(self, dag, H, monkeypatch):
        calls = []

        def boom(*args, **kwargs):
            calls.append(1)
            raise sat.SolverTimeout("budget")

        monkeypatch.setattr("synkc.synnnf.is_sat", boom)
        with pytest.raises(MembershipTimeout) as info:
            check_membership(dag, H, "semantic")
        assert info.value.partial.complete is False and calls


class TestValidators:
    def test_examples(self, dag, K):
        assert not check_wdnnf(dag, K)
        assert check_dnnf(dag, parse_formula(dag, "x1&y1"))
        assert check_ddnnf(dag, parse_formula(dag, "(x1&y1)|(~x1&y2)"))
        assert not check_ddnnf(dag, parse_formula(dag, "(x1&y1)|(x2&y2)"))

    def test_hierarchy_and_membership(self):
        rng = np.random.default_rng(41)
        for _ in range(60):
            dag = NnfDag(VarDecl.plain(3, 3))
            vs = dag.decl.outputs + dag.decl.inputs
            for f in (random_dnnf(rng, dag, vs), random_ddnnf(rng, dag, vs), random_wdnnf(rng, dag, vs)):
                assert check_wdnnf(dag, f)
                assert check_membership(dag, f, "semantic").in_synnnf
            d = random_ddnnf(rng, dag, vs)
            assert check_dnnf(dag, d) and check_ddnnf(dag, d)
