"""
Multi-label metrics
===================

mAP ranks each class's scores; the P/R/F1 family counts thresholded or
top-k decisions, pooled over everything (O*) or averaged per class (C*).
"""

import numpy as np

from agcn import PredictionSet, metric_report, prf_overall, prf_per_class

# The hand-countable case: TP=(2,1), FP=(0,1), FN=(0,1).
truths = np.array([[1, 0], [1, 1], [0, 1]])
decisions = np.array([[1, 1], [1, 0], [0, 1]])
pred = PredictionSet(np.zeros((3, 2)), truths, decisions)
print("overall  ", prf_overall(pred))
print("per class", prf_per_class(pred))

# A full report from confidences.  Ties are broken by sample index, and a
# class with no positives is left out of the class means and listed.
rng = np.random.default_rng(1)
scores = rng.random((20, 4))
truths = (scores + 0.4 * rng.standard_normal((20, 4)) > 0.6).astype(int)
truths[:, 3] = 0
report = metric_report(scores, truths, labels=["cat", "dog", "car", "bus"], top_k=2)
print(report.to_table())
