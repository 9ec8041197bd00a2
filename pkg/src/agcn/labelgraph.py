"""Learned label correlation graphs.

Four ways of turning label embeddings into a raw ``C x C`` score matrix
(bilinear default, cosine, fully connected, self dot product), the
rectified symmetric normalization fed to the GCN, and the L1 pull of the
normalized graph toward the identity.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .numcore import (DimensionError, Matrix, Parameter, absolute, add, as_matrix,
                      clamp_min, matmul, mul, power, reduce_sum, relu, scale, sub,
                      sum_rows, transpose)

VARIANTS = ("default", "cos", "fc", "dot")
DEGREE_FLOOR = 1e-6


class DegenerateEmbeddingError(ValueError):
    pass


@dataclass
class EmbeddingMatrix:
    labels: list[str]
    vectors: np.ndarray

    def __post_init__(self):
        self.labels = list(self.labels)
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.labels):
            raise DimensionError(
                f"{len(self.labels)} labels but embedding array has shape {self.vectors.shape}")
        seen = set()
        for name in self.labels:
            if name in seen:
                raise ValueError(f"duplicate label {name!r}")
            seen.add(name)

    @property
    def num_labels(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def matrix(self) -> Matrix:
        return Matrix(self.vectors)

    def permuted(self, order: Sequence[int]) -> "EmbeddingMatrix":
        order = list(order)
        return EmbeddingMatrix([self.labels[i] for i in order], self.vectors[order])


@dataclass
class LgParams:
    """Learnables of one label-graph variant.

    ``w_phi``/``w_theta`` are the per-label linear maps (``d_e x d_l``) of the
    default and dot variants; ``w_l`` (``d_e x C``) belongs to the fc variant.
    Cosine graphs have no parameters.
    """

    variant: str
    w_phi: Parameter | None = None
    w_theta: Parameter | None = None
    w_l: Parameter | None = None
    b_phi: Parameter | None = None
    b_theta: Parameter | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown label-graph variant {self.variant!r}; expected one of {VARIANTS}")
        wanted = {
            "default": {"w_phi", "w_theta"},
            "dot": {"w_phi"},
            "fc": {"w_l"},
            "cos": set(),
        }[self.variant]
        have = {k for k in ("w_phi", "w_theta", "w_l") if getattr(self, k) is not None}
        if have != wanted:
            raise ValueError(f"variant {self.variant!r} needs parameters {sorted(wanted)}, got {sorted(have)}")
        if self.b_theta is not None and self.variant != "default":
            raise ValueError("b_theta only exists for the default variant")
        if self.b_phi is not None and self.variant not in ("default", "dot"):
            raise ValueError(f"variant {self.variant!r} takes no bias")

    @property
    def latent_dim(self) -> int | None:
        return self.w_phi.cols if self.w_phi is not None else None

    def named_parameters(self) -> dict[str, Parameter]:
        out = {}
        for key in ("w_phi", "w_theta", "w_l", "b_phi", "b_theta"):
            p = getattr(self, key)
            if p is not None:
                out[f"lg.{key}"] = p
        return out


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_lg_params(variant: str, embed_dim: int, num_labels: int, rng: np.random.Generator,
                   latent_dim: int | None = None, bias: bool = False) -> LgParams:
    d_l = embed_dim if latent_dim is None else int(latent_dim)
    if d_l < 1:
        raise ValueError("latent_dim must be >= 1")
    kw = {}
    if variant in ("default", "dot"):
        kw["w_phi"] = Parameter(glorot_uniform(rng, embed_dim, d_l), name="lg.w_phi")
        if bias:
            kw["b_phi"] = Parameter(np.zeros((1, d_l)), name="lg.b_phi")
    if variant == "default":
        kw["w_theta"] = Parameter(glorot_uniform(rng, embed_dim, d_l), name="lg.w_theta")
        if bias:
            kw["b_theta"] = Parameter(np.zeros((1, d_l)), name="lg.b_theta")
    if variant == "fc":
        kw["w_l"] = Parameter(glorot_uniform(rng, embed_dim, num_labels), name="lg.w_l")
    return LgParams(variant, **kw)


def _transform(E: Matrix, w: Parameter, b: Parameter | None, what: str) -> Matrix:
    if E.cols != w.rows:
        raise DimensionError(f"{what}: embeddings have d_e={E.cols} but transform expects {w.rows} "
                             f"(embeddings {E.shape}, transform {w.shape})")
    out = matmul(E, w)
    if b is not None:
        out = add(out, matmul(np.ones((E.rows, 1)), b))
    return out


def _embedding_matrix(E) -> Matrix:
    return E.matrix() if isinstance(E, EmbeddingMatrix) else as_matrix(E)


def lg_default(E, p: LgParams) -> Matrix:
    """A = (1/C) (E W_phi)(E W_theta)^T."""
    if p.variant != "default":
        raise ValueError(f"lg_default called with {p.variant!r} parameters")
    Em = _embedding_matrix(E)
    phi = _transform(Em, p.w_phi, p.b_phi, "w_phi")
    theta = _transform(Em, p.w_theta, p.b_theta, "w_theta")
    return scale(matmul(phi, transpose(theta)), 1.0 / Em.rows)


def lg_dot(E, p: LgParams) -> Matrix:
    """A = (1/C) (E W_phi)(E W_phi)^T, symmetric PSD."""
    if p.variant != "dot":
        raise ValueError(f"lg_dot called with {p.variant!r} parameters")
    Em = _embedding_matrix(E)
    phi = _transform(Em, p.w_phi, p.b_phi, "w_phi")
    raw = scale(matmul(phi, transpose(phi)), 1.0 / Em.rows)
    # BLAS may round the two triangles differently
    raw.data = 0.5 * (raw.data + raw.data.T)
    return raw


def lg_fc(E, p: LgParams) -> Matrix:
    """A = E W_l, a free linear map from each embedding to a row of scores."""
    if p.variant != "fc":
        raise ValueError(f"lg_fc called with {p.variant!r} parameters")
    Em = _embedding_matrix(E)
    if p.w_l.shape != (Em.cols, Em.rows):
        raise DimensionError(f"w_l must be {(Em.cols, Em.rows)} for embeddings {Em.shape}, got {p.w_l.shape}")
    return matmul(Em, p.w_l)


def lg_cos(E) -> Matrix:
    """Pairwise cosine similarity of embeddings; constant, no learnables."""
    if isinstance(E, EmbeddingMatrix):
        labels, vecs = E.labels, E.vectors
    else:
        vecs = _embedding_matrix(E).data
        labels = [str(i) for i in range(vecs.shape[0])]
    norms = np.linalg.norm(vecs, axis=1)
    for name, n in zip(labels, norms):
        if n == 0.0:
            raise DegenerateEmbeddingError(f"label {name!r} has an all-zero embedding; cosine is undefined")
    unit = vecs / norms[:, None]
    sim = unit @ unit.T
    upper = np.triu(sim, 1)
    sim = upper + upper.T
    np.fill_diagonal(sim, 1.0)
    return Matrix(sim)


def learn_graph(E, p: LgParams) -> Matrix:
    if p.variant == "default":
        return lg_default(E, p)
    if p.variant == "dot":
        return lg_dot(E, p)
    if p.variant == "fc":
        return lg_fc(E, p)
    return lg_cos(E)


def normalize(raw, eps: float = DEGREE_FLOOR) -> Matrix:
    """D^-1/2 (max(raw, 0) + I) D^-1/2 with row-sum degrees floored at ``eps``.

    Negative learned scores are clamped to zero first so degrees stay positive;
    gradient reaches ``raw`` only through its positive entries.
    """
    raw = as_matrix(raw)
    if raw.rows != raw.cols:
        raise DimensionError(f"graph must be square, got {raw.shape}")
    c = raw.rows
    a_tilde = add(relu(raw), Matrix(np.eye(c)))
    deg = clamp_min(sum_rows(a_tilde), eps)
    # (d_i d_j)^-1/2 rather than d_i^-1/2 d_j^-1/2: one rounding, exact on perfect squares
    return mul(a_tilde, power(matmul(deg, transpose(deg)), -0.5))


def sparse_loss(norm, reduction: str = "sum") -> Matrix:
    """Entrywise L1 distance between the normalized graph and the identity."""
    norm = as_matrix(norm)
    total = reduce_sum(absolute(sub(norm, Matrix(np.eye(norm.rows)))))
    if reduction == "sum":
        return total
    if reduction == "mean":
        return scale(total, 1.0 / norm.data.size)
    raise ValueError(f"unknown reduction {reduction!r}")


@dataclass
class CorrelationGraph:
    labels: list[str]
    raw: np.ndarray
    normalized: np.ndarray

    @classmethod
    def from_raw(cls, labels, raw) -> "CorrelationGraph":
        raw = as_matrix(raw).data.copy()
        return cls(list(labels), raw, normalize(Matrix(raw)).data.copy())


def write_graph_csv(path, labels: Sequence[str], matrix: np.ndarray):
    """One header row of label names, then one row of 17-digit values per label."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape != (len(labels), len(labels)):
        raise DimensionError(f"graph {matrix.shape} does not match {len(labels)} labels")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", *labels])
        for name, row in zip(labels, matrix):
            w.writerow([name, *(format(v, ".17g") for v in row)])


def read_graph_csv(path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty graph file")
    labels = rows[0][1:]
    body = rows[1:]
    if len(body) != len(labels):
        raise ValueError(f"{path}: {len(labels)} labels in header but {len(body)} rows")
    out = np.empty((len(labels), len(labels)))
    for i, row in enumerate(body):
        if len(row) != len(labels) + 1:
            raise ValueError(f"{path}: line {i + 2} has {len(row) - 1} values, expected {len(labels)}")
        if row[0] != labels[i]:
            raise ValueError(f"{path}: line {i + 2} is labelled {row[0]!r}, expected {labels[i]!r}")
        try:
            out[i] = [float(v) for v in row[1:]]
        except ValueError as exc:
            raise ValueError(f"{path}: line {i + 2}: {exc}") from None
    return labels, out
