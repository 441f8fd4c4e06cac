"""Compile clause sets, verify the result and pull Skolem functions out of it."""

# %%
import numpy as np

from synkc.c2syn import compile_cnf
from synkc.cnf import parse_qdimacs
from synkc.oracle import random_cnf
from synkc.refine import check_refines
from synkc.skolem import error_formula_check, gacks_skolem
from synkc.synnnf import syntactic_failures

# %% outputs 1 2, inputs 3 4; x1 is defined as x2 | y1 and x2 can be pinned to 1
G = parse_qdimacs("p cnf 4 4\na 3 4 0\ne 1 2 0\n-1 2 3 0\n1 -2 0\n1 -3 0\n2 4 0\n")
res = compile_cnf(G)
print(res.dag.to_str(res.root))
print(dict(res.stats))

# %% the result passes the path check and refines the clauses
f = G.to_dag(res.dag)
print(not syntactic_failures(res.dag, res.root), check_refines(res.dag, res.root, f).holds)

# %% random specs: functions read off the compiled form work for the original clauses
rng = np.random.default_rng(0)
ok = 0
for _ in range(50):
    S = random_cnf(rng, 4, 4, 14, 2, 3)
    r = compile_cnf(S)
    sk = gacks_skolem(r.dag, r.root, r.dag.decl.outputs)
    ok += error_formula_check(r.dag, S.to_dag(r.dag), sk).correct
print(ok, "of 50 Skolem vectors correct")
