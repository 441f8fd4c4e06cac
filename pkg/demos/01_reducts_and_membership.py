"""Walk through reducts, alpha formulas and the membership check on two small specs."""

# %%
from synkc.nnf import NnfDag, VarDecl, parse_formula
from synkc.skolem import eliminate_outputs, error_formula_check, gacks_skolem
from synkc.synnnf import alpha, check_membership, reduct

dag = NnfDag(VarDecl.plain(2, 2))  # outputs x1 x2, inputs y1 y2
K = parse_formula(dag, "(x1|x2)&(~x2|y1)&(~y1|y2)")
H = parse_formula(dag, "(x1|x2|y1)&(~x1|(~x2&y2))")

# %% reducts of K: bars mark negated outputs, earlier outputs are read as true
for i in (1, 2, 3):
    print(f"reduct {i} of K:", dag.to_str(reduct(dag, K, i)))

# %% K is a member, so eliminating both outputs is exact
print(check_membership(dag, K).in_synnnf)
q = eliminate_outputs(dag, K, 2)
print("exists x1 x2 . K =", dag.to_str(q.root), "exact:", q.exact)

# %% H fails at the first output
for jk in ((1, 1), (1, 0), (0, 1)):
    print("alpha", jk, dag.to_str(alpha(dag, H, 1, *jk)))
rep = check_membership(dag, H, "semantic")
print("member:", rep.in_synnnf, "fails at", rep.failing_i, "witness", rep.witness)

# %% yet its canonical Skolem vector happens to be correct
sk = gacks_skolem(dag, H)
print(sk.to_text(), end="")
print("correct:", error_formula_check(dag, H, sk).correct)
