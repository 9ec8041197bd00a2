"""
Checking gradients by finite differences
========================================

Every op records a backward rule on a tape.  ``grad_check`` compares the
tape's gradients with central differences and names the parameters that
disagree.
"""

import numpy as np

from agcn import AGCN, EmbeddingMatrix, ModelConfig, grad_check
from agcn.numcore import Parameter, Tape, record_op, reduce_sum

rng = np.random.default_rng(3)

# A whole model: label graph, two GCN layers, classifier loss and L_A.
emb = EmbeddingMatrix(["a", "b", "c", "d"], rng.standard_normal((4, 3)))
x = rng.standard_normal((12, 5))
y = (rng.random((12, 4)) < 0.5).astype(float)
model = AGCN.initialize(emb, 5, ModelConfig(hidden_dims=(5,), seed=3))
print(grad_check(lambda: model.losses(x, y)[0], model.parameters()))

# A wrong backward rule does not go unnoticed.
def bad_square(a):
    return record_op(a.data ** 2, (a,), lambda g: (g * a.data,))  # should be 2 a g

w = Parameter(rng.standard_normal((2, 2)))
report = grad_check(lambda: reduce_sum(bad_square(w)), {"w": w})
print(report)
print("failures:", report.failures)

# The tape can also be driven by hand.
with Tape() as tape:
    loss = model.losses(x, y)[0]
    tape.backward(loss)
print("d loss / d gcn.0 has norm", np.linalg.norm(model.parameters()["gcn.0"].grad))
