"""
Learned label graphs
====================

Four ways of scoring label pairs from their embeddings, the rectified
normalization that turns raw scores into a propagation matrix, and the L1
pull toward the identity that keeps the graph sparse.
"""

import numpy as np

from agcn import (EmbeddingMatrix, init_lg_params, learn_graph, lg_cos, normalize, sparse_loss)

rng = np.random.default_rng(0)

# Three labels, two of which point the same way in embedding space.
emb = EmbeddingMatrix(["cat", "dog", "car"], [[1.0, 0.9, 0.0], [0.9, 1.0, 0.1], [0.0, 0.1, 1.0]])

# Cosine needs no parameters: symmetric with a unit diagonal.
print("cosine graph\n", np.round(lg_cos(emb).data, 3))

# The default graph is bilinear, A = (1/C) (E W_phi)(E W_theta)^T, so it
# can be asymmetric and negative.
params = init_lg_params("default", emb.dim, emb.num_labels, rng)
raw = learn_graph(emb, params)
print("raw default graph\n", np.round(raw.data, 3))

# Negative scores are clamped before the symmetric degree normalization;
# an all-negative graph therefore normalizes to the identity.
a_hat = normalize(raw)
print("normalized\n", np.round(a_hat.data, 3))
print("normalize(-raw) is I:", np.array_equal(normalize(-np.abs(raw.data)).data, np.eye(3)))

# The sparse loss is the entrywise distance from I.
print("L_A =", sparse_loss(a_hat).item())
print("L_A of a uniform 2x2 graph =", sparse_loss([[0.5, 0.5], [0.5, 0.5]]).item())
