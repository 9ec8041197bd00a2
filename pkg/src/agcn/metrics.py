"""Multi-label evaluation: mAP, overall/per-class P/R/F1, top-k variants, AP_all.

Ranking ties are always broken by ascending original index so every number
is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class MetricInputError(ValueError):
    pass


def _rank_order(scores: np.ndarray) -> np.ndarray:
    # stable sort on the negated scores keeps equal scores in index order
    return np.argsort(-np.asarray(scores, dtype=np.float64), kind="stable")


def average_precision(scores, truths) -> float:
    """Non-interpolated AP: mean precision@k over the ranks k of the positives."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    truths = np.asarray(truths).ravel().astype(bool)
    if scores.shape != truths.shape:
        raise MetricInputError(f"{scores.shape[0]} scores but {truths.shape[0]} truths")
    n_pos = int(truths.sum())
    if n_pos == 0:
        raise MetricInputError("average precision needs at least one positive")
    hits = truths[_rank_order(scores)]
    ranks = np.flatnonzero(hits) + 1
    precision_at_hits = np.arange(1, n_pos + 1) / ranks
    return float(precision_at_hits.sum() / n_pos)


@dataclass
class PredictionSet:
    scores: np.ndarray
    truths: np.ndarray
    decisions: np.ndarray | None = None

    def __post_init__(self):
        self.scores = np.atleast_2d(np.asarray(self.scores, dtype=np.float64))
        self.truths = np.atleast_2d(_binary(self.truths, "truths"))
        if self.scores.shape != self.truths.shape:
            raise MetricInputError(f"scores {self.scores.shape} and truths {self.truths.shape} differ")
        if self.decisions is not None:
            self.decisions = np.atleast_2d(_binary(self.decisions, "decisions"))
            if self.decisions.shape != self.truths.shape:
                raise MetricInputError(f"decisions {self.decisions.shape} and truths {self.truths.shape} differ")

    @property
    def num_classes(self) -> int:
        return self.scores.shape[1]


def _binary(a, what: str) -> np.ndarray:
    a = np.asarray(a)
    if not np.isin(a, (0, 1)).all():
        raise MetricInputError(f"{what} must be strictly 0/1")
    return a.astype(np.int64)


def per_class_ap(pred: PredictionSet) -> tuple[np.ndarray, list[int]]:
    """AP per class (NaN for skipped classes) and the skipped class indices."""
    aps = np.full(pred.num_classes, np.nan)
    skipped = []
    for c in range(pred.num_classes):
        if pred.truths[:, c].any():
            aps[c] = average_precision(pred.scores[:, c], pred.truths[:, c])
        else:
            skipped.append(c)
    return aps, skipped


def mean_average_precision(pred: PredictionSet) -> float:
    aps, skipped = per_class_ap(pred)
    if len(skipped) == pred.num_classes:
        raise MetricInputError("no class has a positive example")
    return float(np.nanmean(aps))


def ap_all(pred: PredictionSet) -> float:
    """Class-agnostic AP over every (sample, label) pair ranked together."""
    if not pred.truths.any():
        raise MetricInputError("AP_all needs at least one positive pair")
    return average_precision(pred.scores.ravel(), pred.truths.ravel())


def threshold_decisions(scores, threshold: float = 0.5) -> np.ndarray:
    return (np.asarray(scores) > threshold).astype(np.int64)


def topk_decisions(scores, k: int) -> np.ndarray:
    scores = np.atleast_2d(np.asarray(scores, dtype=np.float64))
    n, c = scores.shape
    if not 0 <= k <= c:
        raise MetricInputError(f"k={k} outside [0, {c}]")
    out = np.zeros((n, c), dtype=np.int64)
    for i in range(n):
        out[i, _rank_order(scores[i])[:k]] = 1
    return out


@dataclass
class PRF:
    precision: float
    recall: float
    f1: float
    flags: list[str] = field(default_factory=list)


def _ratio(num: float, den: float, name: str, flags: list[str]) -> float:
    if den == 0:
        flags.append(f"{name}: zero denominator, defined as 0")
        return 0.0
    return num / den


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else float(2.0 * p * r / (p + r))


def confusion_counts(pred: PredictionSet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if pred.decisions is None:
        raise MetricInputError("prediction set has no decisions")
    t, d = pred.truths, pred.decisions
    tp = (t & d).sum(axis=0)
    fp = ((1 - t) & d).sum(axis=0)
    fn = (t & (1 - d)).sum(axis=0)
    return tp, fp, fn


def prf_overall(pred: PredictionSet) -> PRF:
    tp, fp, fn = confusion_counts(pred)
    flags: list[str] = []
    p = _ratio(tp.sum(), (tp + fp).sum(), "OP", flags)
    r = _ratio(tp.sum(), (tp + fn).sum(), "OR", flags)
    return PRF(float(p), float(r), _f1(p, r), flags)


def prf_per_class(pred: PredictionSet) -> PRF:
    """Unweighted class means of precision and recall; classes without positives are left out."""
    tp, fp, fn = confusion_counts(pred)
    flags: list[str] = []
    included = np.flatnonzero((tp + fn) > 0)
    if included.size == 0:
        raise MetricInputError("no class has a positive example")
    precisions, recalls = [], []
    for c in included:
        precisions.append(_ratio(tp[c], tp[c] + fp[c], f"precision[{c}]", flags))
        recalls.append(tp[c] / (tp[c] + fn[c]))
    p, r = float(np.mean(precisions)), float(np.mean(recalls))
    return PRF(p, r, _f1(p, r), flags)


# ---------------------------------------------------------------------------
# report

REPORT_KEYS = ("mAP", "CP", "CR", "CF1", "OP", "OR", "OF1")
TOPK_KEYS = ("CP", "CR", "CF1", "OP", "OR", "OF1")


@dataclass
class MetricReport:
    """Full battery for one model on one dataset.

    ``values`` holds ``mAP``, ``CP``..``OF1`` for thresholded decisions,
    ``top{k}_CP``..``top{k}_OF1`` for top-k decisions, and ``AP_all``.
    """

    values: dict[str, float]
    per_class_ap: list[float]
    labels: list[str]
    skipped_classes: list[str] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)
    threshold: float = 0.5
    top_k: int | None = 3

    def __getitem__(self, key: str) -> float:
        return self.values[key]

    def to_kv(self) -> str:
        lines = [f"{k} = {format(v, '.17g')}" for k, v in self.values.items()]
        lines.append(f"threshold = {self.threshold!r}")
        lines.append(f"top_k = {self.top_k if self.top_k is not None else 'none'}")
        for name, ap in zip(self.labels, self.per_class_ap):
            lines.append(f"AP[{name}] = {'nan' if np.isnan(ap) else format(ap, '.17g')}")
        lines.append(f"skipped_classes = {','.join(self.skipped_classes)}")
        for flag in self.flags:
            lines.append(f"flag = {flag}")
        return "\n".join(lines) + "\n"

    def to_table(self) -> str:
        def row(title, keys, prefix=""):
            cells = "  ".join(f"{k:>6s}" for k in keys)
            vals = "  ".join(f"{100 * self.values[prefix + k]:6.2f}" for k in keys)
            return f"{title}\n  {cells}\n  {vals}"

        parts = [row(f"All (threshold {self.threshold})", REPORT_KEYS)]
        if self.top_k is not None:
            parts.append(row(f"Top-{self.top_k}", TOPK_KEYS, prefix=f"top{self.top_k}_"))
        parts.append(f"AP_all  {100 * self.values['AP_all']:6.2f}")
        if self.skipped_classes:
            parts.append("skipped (no positives): " + ", ".join(self.skipped_classes))
        return "\n".join(parts) + "\n"


def metric_report(scores, truths, labels=None, threshold: float = 0.5, top_k: int | None = 3,
                  topk_threshold: bool = False) -> MetricReport:
    """Compute every metric from confidences and truths.

    With ``topk_threshold`` the top-k decisions are additionally required to
    exceed ``threshold``.
    """
    base = PredictionSet(scores, truths)
    n, c = base.scores.shape
    if n == 0:
        raise MetricInputError("empty prediction set")
    labels = [str(i) for i in range(c)] if labels is None else list(labels)
    aps, skipped = per_class_ap(base)
    if len(skipped) == c:
        raise MetricInputError("no class has a positive example")
    values = {"mAP": float(np.nanmean(aps))}
    flags = []

    thr = PredictionSet(base.scores, base.truths, threshold_decisions(base.scores, threshold))
    for prefix, prf in (("C", prf_per_class(thr)), ("O", prf_overall(thr))):
        values[prefix + "P"], values[prefix + "R"], values[prefix + "F1"] = prf.precision, prf.recall, prf.f1
        flags += prf.flags

    if top_k is not None:
        k = min(top_k, c)
        dec = topk_decisions(base.scores, k)
        if topk_threshold:
            dec &= threshold_decisions(base.scores, threshold)
        tk = PredictionSet(base.scores, base.truths, dec)
        for prefix, prf in (("C", prf_per_class(tk)), ("O", prf_overall(tk))):
            key = f"top{top_k}_{prefix}"
            values[key + "P"], values[key + "R"], values[key + "F1"] = prf.precision, prf.recall, prf.f1
            flags += [f"top{top_k} {f}" for f in prf.flags]

    values["AP_all"] = ap_all(base)
    return MetricReport(values, [float(a) for a in aps], labels, [labels[i] for i in skipped], flags,
                        threshold, top_k)


def read_report_kv(path) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for line in fh:
            if "=" in line:
                k, v = line.split("=", 1)
                out[k.strip()] = v.strip()
    return out
