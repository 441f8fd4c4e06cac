"""The nested or/xor family, and how Skolem construction grows with the number of outputs."""

# %%
import time

import numpy as np

from synkc.nnf import NnfDag, VarDecl, x
from synkc.oracle import gen_family, random_nnf
from synkc.skolem import gacks_skolem
from synkc.synnnf import check_membership, syntactic_failures

rng = np.random.default_rng(1)

# %% xor terms are members, but the path check cannot see it
d = NnfDag(VarDecl.plain(3, 3))
fs = [random_nnf(rng, d, 3, [x(j) for j in range(i + 1, 4)] + d.decl.inputs) for i in range(1, 5)]
g = gen_family(d, ["xor"] * 3, ["and", "or", "and"], fs)
print("semantic:", check_membership(d, g, "semantic").in_synnnf)
print("syntactic failures at outputs:", sorted(syntactic_failures(d, g)))

# %% node count and rewrite work against n for fixed-size unate-in-outputs specs
for n in (4, 8, 16, 32):
    d = NnfDag(VarDecl.plain(n, 6))
    pol = {v: bool(rng.integers(2)) for v in d.decl.outputs}
    f = random_nnf(rng, d, 120, None, 3, pol)
    size = d.size(d.positive_form(f))
    t0 = time.perf_counter()
    sk = gacks_skolem(d, f)
    print(f"n={n:2d} |F|={size} nodes={sk.node_count()} bound={2 * n * size + 8 * n} "
          f"work={sk.work} {time.perf_counter() - t0:.3f}s")
