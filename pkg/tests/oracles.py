"""Definition-literal reference implementations, deliberately slow and loop based."""

import numpy as np


def ranked_above(scores, i, j):
    """True when item ``j`` sits at or above item ``i`` in the ranking (ties by index)."""
    return scores[j] > scores[i] or (scores[j] == scores[i] and j <= i)


def ap_oracle(scores, truths):
    n = len(scores)
    positives = [i for i in range(n) if truths[i]]
    total = 0.0
    for i in positives:
        rank = sum(1 for j in range(n) if ranked_above(scores, i, j))
        hits = sum(1 for j in positives if ranked_above(scores, i, j))
        total += hits / rank
    return total / len(positives)


def map_oracle(scores, truths):
    aps = [ap_oracle(scores[:, c], truths[:, c]) for c in range(scores.shape[1]) if truths[:, c].any()]
    return sum(aps) / len(aps)


def ap_all_oracle(scores, truths):
    flat_s, flat_t = [], []
    for i in range(scores.shape[0]):
        for c in range(scores.shape[1]):
            flat_s.append(scores[i, c])
            flat_t.append(truths[i, c])
    return ap_oracle(flat_s, flat_t)


def prf_oracle(truths, decisions):
    """((OP, OR, OF1), (CP, CR, CF1)) from explicit counting."""
    n, c = truths.shape
    tp = [0] * c
    fp = [0] * c
    fn = [0] * c
    for i in range(n):
        for k in range(c):
            if truths[i, k] and decisions[i, k]:
                tp[k] += 1
            elif decisions[i, k]:
                fp[k] += 1
            elif truths[i, k]:
                fn[k] += 1

    def f1(p, r):
        return 0.0 if p + r == 0 else 2 * p * r / (p + r)

    op = sum(tp) / (sum(tp) + sum(fp)) if sum(tp) + sum(fp) else 0.0
    orr = sum(tp) / (sum(tp) + sum(fn)) if sum(tp) + sum(fn) else 0.0
    cls = [k for k in range(c) if tp[k] + fn[k] > 0]
    cp = sum(tp[k] / (tp[k] + fp[k]) if tp[k] + fp[k] else 0.0 for k in cls) / len(cls)
    cr = sum(tp[k] / (tp[k] + fn[k]) for k in cls) / len(cls)
    return (op, orr, f1(op, orr)), (cp, cr, f1(cp, cr))


def random_instance(rng, n_max=50, c_max=10, tie_grid=None):
    """Random scores/truths with at least one positive overall and per instance."""
    n = int(rng.integers(2, n_max + 1))
    c = int(rng.integers(1, c_max + 1))
    scores = rng.random((n, c))
    if tie_grid:
        scores = np.round(scores * tie_grid) / tie_grid
    truths = (rng.random((n, c)) < rng.uniform(0.1, 0.6)).astype(np.int64)
    truths[rng.integers(n), rng.integers(c)] = 1
    return scores, truths
