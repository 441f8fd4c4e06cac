from pathlib import Path

import numpy as np
import pytest

from synkc.nnf import FALSE, TRUE, NnfDag, VarDecl, x, y
from synkc.nnf_format import NnfFormatError, dumps_nnf, loads_nnf, read_nnf, write_nnf
from synkc.oracle import random_nnf, tt_equiv, tt_of
from synkc.skolem import gacks_skolem

DATA = Path(__file__).parent / "data"


def test_round_trip_preserves_semantics_and_roles():
    rng = np.random.default_rng(1)
    for _ in range(50):
        dag = NnfDag(VarDecl((1, 3, 4), (2, 5)))
        f = random_nnf(rng, dag, 10)
        dag2, roots = loads_nnf(dumps_nnf(dag, {"root": f}))
        assert dag2.decl == dag.decl
        sup = tuple(dag.decl.outputs + dag.decl.inputs)
        assert tt_equiv(tt_of(dag, f, sup), tt_of(dag2, roots["root"], sup))


def test_positive_form_round_trip(dag, K):
    kh = dag.positive_form(K)
    dag2, roots = loads_nnf(dumps_nnf(dag, {"khat": kh}))
    assert dag2.to_str(roots["khat"]) == dag.to_str(kh)


def test_multi_rooted_skolem_file(dag, K, tmp_path):
    sk = gacks_skolem(dag, K)
    path = tmp_path / "sk.nnf"
    write_nnf(dag, sk.named_roots(), str(path))
    dag2, roots = read_nnf(str(path))
    assert set(roots) == {"psi_1", "npsi_1", "psi_2", "npsi_2"}
    Y = (y(1), y(2))
    for name, node in sk.named_roots().items():
        assert tt_equiv(tt_of(dag, node, Y), tt_of(dag2, roots[name], Y))


def test_constants(dag):
    for c in (TRUE, FALSE):
        _, roots = loads_nnf(dumps_nnf(dag, {"c": c}))
        assert roots["c"] == c


def test_plain_c2d_file_defaults():
    dag, roots = read_nnf(str(DATA / "c2d_plain.nnf"))
    assert list(roots) == ["root"]
    assert dag.decl.x_names == (1, 2, 3) and dag.decl.y_names == ()
    assert dag.to_str(roots["root"]) == "((x1 & x2) | (~x1 & x3))"


def test_plain_file_with_output_list():
    dag, roots = read_nnf(str(DATA / "c2d_plain.nnf"), outputs=[1])
    assert dag.decl.x_names == (1,) and dag.decl.y_names == (2, 3)


def test_deterministic_output(dag, K):
    assert dumps_nnf(dag, {"root": K}) == dumps_nnf(dag, {"root": K})


@pytest.mark.parametrize("text", [
    "L 1\n",                              # node before header
    "nnf 1 0 1\nnnf 1 0 1\nL 1\n",        # two headers
    "nnf 1 0 1\nL 2\n",                   # literal out of range
    "nnf 2 1 1\nL 1\nA 2 0\n",            # child count mismatch
    "nnf 2 1 1\nL 1\nA 1 5\n",            # forward reference
    "nnf 1 0 1\nQ 1\n",                   # unknown node type
    "nnf 3 0 1\nL 1\n",                   # node count mismatch
    "",                                   # missing header
])
def test_malformed(text):
    with pytest.raises(NnfFormatError):
        loads_nnf(text)
