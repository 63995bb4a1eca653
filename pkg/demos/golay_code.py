"""The ternary Golay code and its appearance as glue inside D12+."""

import numpy as np

from vosa import codes, lattices

g = codes.golay12()
print("dimension", g.dimension, "minimum weight", g.minimum_weight())
print("weight distribution", g.weight_distribution())

# the twelve norm-3 vectors spanning sqrt3Z^12 inside D12+ glue to a Golay code
lam = codes.golay_lambda_basis(g)
words = lattices.labels_to_words(lattices.glue_image(lattices.d_plus(12), lattices.Lattice.from_basis(lam)), 3)
glue = codes.TernaryCode(np.array(words) % 3)
perm, signs = codes.monomial_equivalence(glue, g, transitive=5)
print("glue code has", len(set(words)), "words; monomial map to golay12:")
print("  perm ", perm)
print("  signs", signs)
