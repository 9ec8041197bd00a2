"""Embedding/dataset file formats and the synthetic block co-occurrence generator.

Embedding files use the word-vector text layout: one line per label, the
label token followed by ``d_e`` whitespace-separated reals.  Datasets are
JSON lines, one ``{"feature": [...], "labels": [...]}`` record per sample.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .labelgraph import EmbeddingMatrix


class LoadError(ValueError):
    pass


class SpecError(ValueError):
    pass


def load_embeddings(path) -> EmbeddingMatrix:
    path = Path(path)
    labels, rows = [], []
    seen: dict[str, int] = {}
    dim = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            name, values = parts[0], parts[1:]
            if name in seen:
                raise LoadError(f"{path}:{lineno}: duplicate label {name!r} (first on line {seen[name]})")
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise LoadError(f"{path}:{lineno}: label {name!r} has no vector")
            elif len(values) != dim:
                raise LoadError(f"{path}:{lineno}: {len(values)} values, expected {dim}")
            try:
                rows.append([float(v) for v in values])
            except ValueError as exc:
                raise LoadError(f"{path}:{lineno}: {exc}") from None
            seen[name] = lineno
            labels.append(name)
    if not labels:
        raise LoadError(f"{path}: no embeddings")
    return EmbeddingMatrix(labels, np.array(rows))


def save_embeddings(path, emb: EmbeddingMatrix):
    with open(path, "w") as fh:
        for name, vec in zip(emb.labels, emb.vectors):
            fh.write(name + " " + " ".join(format(v, ".17g") for v in vec) + "\n")


@dataclass
class LabeledSample:
    feature: np.ndarray
    labels: np.ndarray


@dataclass
class Dataset:
    """Features ``N x D`` and multi-hot targets ``N x C`` in a fixed label order."""

    label_names: list[str]
    features: np.ndarray
    targets: np.ndarray
    rejected: list[tuple[int, str]] = field(default_factory=list)

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.targets = np.asarray(self.targets, dtype=np.float64)
        if self.features.ndim != 2 or self.targets.ndim != 2:
            raise LoadError("features and targets must be 2-D")
        if self.features.shape[0] != self.targets.shape[0]:
            raise LoadError(f"{self.features.shape[0]} features but {self.targets.shape[0]} targets")
        if self.targets.shape[1] != len(self.label_names):
            raise LoadError(f"targets have {self.targets.shape[1]} columns for {len(self.label_names)} labels")
        if not np.isfinite(self.features).all():
            raise LoadError("features contain NaN/Inf")
        if not np.isin(self.targets, (0.0, 1.0)).all():
            raise LoadError("targets must be strictly binary")

    def __len__(self):
        return self.features.shape[0]

    def __getitem__(self, i) -> LabeledSample:
        return LabeledSample(self.features[i], self.targets[i])

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    @property
    def num_labels(self) -> int:
        return len(self.label_names)

    def subset(self, idx) -> "Dataset":
        return Dataset(self.label_names, self.features[idx], self.targets[idx])


def load_dataset(path, label_list: Sequence[str], training: bool = True) -> Dataset:
    """Read a JSON-lines dataset, mapping label names onto ``label_list`` order.

    Records with no positive label are rejected (and listed in
    ``Dataset.rejected``) when ``training``; evaluation loads keep them.
    """
    path = Path(path)
    index = {name: i for i, name in enumerate(label_list)}
    feats, targets, rejected = [], [], []
    dim = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            rec_idx = lineno - 1
            try:
                rec = json.loads(line)
                feature = np.asarray(rec["feature"], dtype=np.float64)
                names = rec["labels"]
            except (ValueError, KeyError, TypeError) as exc:
                raise LoadError(f"{path}: record {rec_idx}: malformed ({exc})") from None
            if feature.ndim != 1:
                raise LoadError(f"{path}: record {rec_idx}: feature must be a flat list")
            if dim is None:
                dim = feature.size
            elif feature.size != dim:
                raise LoadError(f"{path}: record {rec_idx}: feature has {feature.size} dims, expected {dim}")
            if not np.isfinite(feature).all():
                raise LoadError(f"{path}: record {rec_idx}: feature contains NaN/Inf")
            y = np.zeros(len(label_list))
            for name in names:
                if name not in index:
                    raise LoadError(f"{path}: record {rec_idx}: unknown label {name!r}")
                y[index[name]] = 1.0
            if training and not y.any():
                rejected.append((rec_idx, "no positive label"))
                continue
            feats.append(feature)
            targets.append(y)
    if not feats and dim is None:
        raise LoadError(f"{path}: no records")
    features = np.array(feats) if feats else np.zeros((0, dim))
    return Dataset(list(label_list), features, np.array(targets).reshape(len(feats), len(label_list)),
                   rejected)


def save_dataset(path, data: Dataset):
    with open(path, "w") as fh:
        for x, y in zip(data.features, data.targets):
            names = [data.label_names[j] for j in np.flatnonzero(y)]
            fh.write(json.dumps({"feature": [float(v) for v in x], "labels": names}) + "\n")


# ---------------------------------------------------------------------------
# synthetic generator


@dataclass
class SyntheticSpec:
    """Labels partitioned into co-occurrence blocks.

    Each sample draws one block uniformly; its labels switch on with
    ``p_in``, every other label with ``p_out`` (a sample is redrawn until at
    least one label is on).  Features are the sum of the active labels'
    prototypes plus Gaussian noise; prototypes have norm close to
    ``prototype_scale`` and the noise vector norm is close to ``noise``.  Embeddings are a random projection of
    each prototype plus a shared per-block direction (``block_signal``) plus
    noise, so embedding similarity tracks block membership.
    """

    blocks: list[list[int]]
    embed_dim: int = 16
    feature_dim: int = 32
    n_train: int = 2000
    n_test: int = 500
    p_in: float = 0.6
    p_out: float = 0.05
    noise: float = 1.0
    prototype_scale: float = 1.0
    block_signal: float = 1.0
    embed_noise: float = 0.3
    seed: int = 0

    def __post_init__(self):
        self.blocks = [list(map(int, b)) for b in self.blocks]
        if any(len(b) == 0 for b in self.blocks):
            raise SpecError("empty block")
        flat = sorted(j for b in self.blocks for j in b)
        if flat != list(range(len(flat))):
            raise SpecError(f"blocks must partition labels 0..C-1 exactly, got {self.blocks}")
        for name in ("p_in", "p_out"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise SpecError(f"{name}={v} is not a probability")
        if not self.p_in > self.p_out:
            raise SpecError("p_in must exceed p_out")
        if self.p_in == 0.0:
            raise SpecError("p_in must be positive")
        if min(self.embed_dim, self.feature_dim) < 1 or min(self.n_train, self.n_test) < 0:
            raise SpecError("dimensions must be positive and sample counts non-negative")
        if self.noise < 0 or self.embed_noise < 0:
            raise SpecError("noise scales must be non-negative")

    @property
    def num_labels(self) -> int:
        return sum(len(b) for b in self.blocks)

    @classmethod
    def even(cls, num_labels: int, num_blocks: int, **kw) -> "SyntheticSpec":
        blocks = [list(b) for b in np.array_split(np.arange(num_labels), num_blocks)]
        return cls(blocks=blocks, **kw)

    def block_matrix(self) -> np.ndarray:
        c = self.num_labels
        m = np.zeros((c, c))
        for b in self.blocks:
            m[np.ix_(b, b)] = 1.0
        return m


@dataclass
class SyntheticData:
    embeddings: EmbeddingMatrix
    train: Dataset
    test: Dataset
    block_matrix: np.ndarray
    prototypes: np.ndarray
    train_blocks: np.ndarray
    test_blocks: np.ndarray


def _draw(spec: SyntheticSpec, rng: np.random.Generator, n: int, prototypes: np.ndarray):
    c = spec.num_labels
    in_block = np.zeros((len(spec.blocks), c), dtype=bool)
    for k, b in enumerate(spec.blocks):
        in_block[k, b] = True
    targets = np.zeros((n, c))
    blocks = np.zeros(n, dtype=np.int64)
    for i in range(n):
        while True:
            k = rng.integers(len(spec.blocks))
            probs = np.where(in_block[k], spec.p_in, spec.p_out)
            y = rng.random(c) < probs
            if y.any():
                break
        targets[i] = y
        blocks[i] = k
    features = targets @ prototypes + spec.noise / np.sqrt(spec.feature_dim) * rng.standard_normal((n, spec.feature_dim))
    return features, targets, blocks


def synth_generate(spec: SyntheticSpec, label_names: Sequence[str] | None = None) -> SyntheticData:
    rng = np.random.default_rng(spec.seed)
    c = spec.num_labels
    names = [f"label{j:02d}" for j in range(c)] if label_names is None else list(label_names)
    # per-coordinate variance 1/D keeps feature norms near prototype_scale and noise
    base = rng.standard_normal((c, spec.feature_dim)) / np.sqrt(spec.feature_dim)
    prototypes = spec.prototype_scale * base
    projection = rng.standard_normal((spec.feature_dim, spec.embed_dim))
    block_dirs = rng.standard_normal((len(spec.blocks), spec.embed_dim))
    membership = np.zeros(c, dtype=np.int64)
    for k, b in enumerate(spec.blocks):
        membership[b] = k
    vectors = (base @ projection
               + spec.block_signal * block_dirs[membership]
               + spec.embed_noise * rng.standard_normal((c, spec.embed_dim)))
    xtr, ytr, btr = _draw(spec, rng, spec.n_train, prototypes)
    xte, yte, bte = _draw(spec, rng, spec.n_test, prototypes)
    return SyntheticData(
        embeddings=EmbeddingMatrix(names, vectors),
        train=Dataset(names, xtr, ytr),
        test=Dataset(names, xte, yte),
        block_matrix=spec.block_matrix(),
        prototypes=prototypes,
        train_blocks=btr,
        test_blocks=bte,
    )
