"""The two-branch A-GCN: learned label graph -> GCN classifiers -> logits on features.

Image features are supplied precomputed (a frozen feature provider); only the
label branch is learned.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Mapping

import numpy as np

from .data import Dataset
from .gcn import GcnStack, build_classifiers, init_stack
from .labelgraph import (VARIANTS, CorrelationGraph, EmbeddingMatrix, LgParams, init_lg_params,
                         learn_graph, normalize, sparse_loss)
from .metrics import MetricInputError, MetricReport, metric_report
from .numcore import (DimensionError, Matrix, Parameter, Tape, add, as_matrix, matmul, mul,
                      reduce_sum, scale, sigmoid, softplus, sub, transpose)

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


class DivergenceError(RuntimeError):
    def __init__(self, epoch: int, step: int, value: float, history=None):
        super().__init__(f"loss became non-finite ({value}) at epoch {epoch}, step {step}")
        self.epoch, self.step, self.value = epoch, step, value
        self.history = history or []


@dataclass
class ModelConfig:
    alpha: float = 1.0
    lg_variant: str = "default"
    latent_dim: int | None = None  # None: same as the embedding dim
    lg_bias: bool = False
    hidden_dims: tuple[int, ...] | None = None  # None: one hidden layer of width 2*d_e
    slope: float = 0.2
    lr: float = 1e-2
    momentum: float = 0.9
    weight_decay: float = 1e-4
    decay_factor: float = 10.0
    decay_every: int = 30
    epochs: int = 65
    batch_size: int = 32
    seed: int = 0
    la_reduction: str = "sum"

    def __post_init__(self):
        if self.hidden_dims is not None:
            self.hidden_dims = tuple(int(h) for h in self.hidden_dims)
        self.validate()

    def validate(self):
        if not self.alpha >= 0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")
        if not self.lr > 0:
            raise ConfigError(f"lr must be > 0, got {self.lr}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.lg_variant not in VARIANTS:
            raise ConfigError(f"lg_variant must be one of {VARIANTS}, got {self.lg_variant!r}")
        if not 0 <= self.momentum < 1:
            raise ConfigError("momentum must lie in [0, 1)")
        if self.weight_decay < 0:
            raise ConfigError("weight_decay must be >= 0")
        if self.decay_factor <= 0 or self.decay_every < 1:
            raise ConfigError("decay_factor must be > 0 and decay_every >= 1")
        if not 0 < self.slope < 1:
            raise ConfigError("slope must lie in (0, 1)")
        if self.la_reduction not in ("sum", "mean"):
            raise ConfigError("la_reduction must be 'sum' or 'mean'")

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["hidden_dims"] is not None:
            d["hidden_dims"] = list(d["hidden_dims"])
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "ModelConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown model settings {sorted(unknown)}")
        return cls(**d)

    def lr_at(self, epoch: int) -> float:
        """Step schedule: divide by ``decay_factor`` every ``decay_every`` epochs."""
        return self.lr / self.decay_factor ** (epoch // self.decay_every)


# ---------------------------------------------------------------------------
# losses and prediction


def predict(bank, x) -> Matrix:
    """Logits ``W x`` for one feature vector (returned as a 1 x C row) or a batch ``X W^T``."""
    bank = as_matrix(bank)
    x = np.asarray(x.data if isinstance(x, Matrix) else x, dtype=np.float64)
    feats = Matrix(x.reshape(1, -1) if x.ndim == 1 else x)
    if feats.cols != bank.cols:
        raise DimensionError(f"features have {feats.cols} dims but classifiers expect {bank.cols}")
    return matmul(feats, transpose(bank))


def bce_loss(logits, targets) -> Matrix:
    """Mean over samples of the per-label-averaged sigmoid cross-entropy.

    Uses ``softplus(p) - y p``, which equals ``-[y log s(p) + (1-y) log(1-s(p))]``
    and never evaluates log 0.
    """
    logits = as_matrix(logits)
    y = np.asarray(targets, dtype=np.float64).reshape(logits.shape)
    per_entry = sub(softplus(logits), mul(Matrix(y), logits))
    return scale(reduce_sum(per_entry), 1.0 / logits.data.size)


def total_loss(l_cls, l_a, alpha: float) -> Matrix:
    if alpha < 0:
        raise ConfigError("alpha must be >= 0")
    return add(as_matrix(l_cls), scale(as_matrix(l_a), alpha))


# ---------------------------------------------------------------------------
# optimizer


def sgd_step(params: Mapping[str, np.ndarray], grads: Mapping[str, np.ndarray],
             state: dict[str, np.ndarray], lr: float, momentum: float, weight_decay: float):
    """In-place momentum SGD with L2 folded into the gradient.

    v <- momentum * v + (g + weight_decay * w);  w <- w - lr * v
    """
    if not lr > 0:
        raise ConfigError("lr must be > 0")
    for name, w in params.items():
        v = state.get(name)
        if v is None:
            v = np.zeros_like(w)
        v = momentum * v + (grads[name] + weight_decay * w)
        state[name] = v
        w -= lr * v
    return params, state


class SGD:
    def __init__(self, params: Mapping[str, Parameter], lr: float, momentum: float = 0.9,
                 weight_decay: float = 1e-4):
        self.params = dict(params)
        self.lr = lr
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.velocity: dict[str, np.ndarray] = {}

    def zero_grad(self):
        for p in self.params.values():
            p.zero_grad()

    def step(self):
        sgd_step({k: p.data for k, p in self.params.items()},
                 {k: p.grad for k, p in self.params.items()},
                 self.velocity, self.lr, self.momentum, self.weight_decay)


# ---------------------------------------------------------------------------
# model


class AGCN:
    """Label embeddings + label-graph source + GCN stack.

    The graph comes either from a label-graph module (``lg``) or from a fixed
    normalized matrix supplied by the caller (``fixed_graph``), never both.
    """

    def __init__(self, embeddings: EmbeddingMatrix, stack: GcnStack, config: ModelConfig,
                 lg: LgParams | None = None, fixed_graph: np.ndarray | None = None):
        if (lg is None) == (fixed_graph is None):
            raise ConfigError("exactly one of a label-graph module or a fixed graph must be given")
        if stack.input_dim != embeddings.dim:
            raise DimensionError(f"stack input {stack.input_dim} != embedding dim {embeddings.dim}")
        if fixed_graph is not None:
            fixed_graph = np.array(fixed_graph, dtype=np.float64)
            c = embeddings.num_labels
            if fixed_graph.shape != (c, c):
                raise DimensionError(f"fixed graph {fixed_graph.shape} does not match {c} labels")
        self.embeddings = embeddings
        self.stack = stack
        self.config = config
        self.lg = lg
        self.fixed_graph = fixed_graph

    @classmethod
    def initialize(cls, embeddings: EmbeddingMatrix, feature_dim: int, config: ModelConfig,
                   fixed_graph: np.ndarray | None = None) -> "AGCN":
        rng = np.random.default_rng(config.seed)
        d_e = embeddings.dim
        lg = None
        if fixed_graph is None:
            lg = init_lg_params(config.lg_variant, d_e, embeddings.num_labels, rng,
                                latent_dim=config.latent_dim, bias=config.lg_bias)
        hidden = (2 * d_e,) if config.hidden_dims is None else tuple(config.hidden_dims)
        stack = init_stack([d_e, *hidden, feature_dim], rng, slope=config.slope)
        return cls(embeddings, stack, config, lg=lg, fixed_graph=fixed_graph)

    @property
    def labels(self) -> list[str]:
        return self.embeddings.labels

    @property
    def feature_dim(self) -> int:
        return self.stack.output_dim

    def parameters(self) -> dict[str, Parameter]:
        out = {} if self.lg is None else self.lg.named_parameters()
        out.update(self.stack.named_parameters())
        return out

    def graph(self) -> tuple[Matrix, Matrix]:
        """(raw, normalized) graph; taped when a tape is active."""
        if self.fixed_graph is not None:
            fixed = Matrix(self.fixed_graph)
            return fixed, fixed
        raw = learn_graph(self.embeddings, self.lg)
        return raw, normalize(raw)

    def correlation_graph(self) -> CorrelationGraph:
        raw, norm = self.graph()
        return CorrelationGraph(self.labels, raw.data.copy(), norm.data.copy())

    def classifiers(self, a_hat: Matrix | None = None) -> Matrix:
        if a_hat is None:
            a_hat = self.graph()[1]
        return build_classifiers(self.embeddings, a_hat, self.stack)

    def losses(self, features, targets) -> tuple[Matrix, Matrix, Matrix]:
        """(total, classifier, graph-sparsity) losses for one batch."""
        _, a_hat = self.graph()
        l_a = sparse_loss(a_hat, self.config.la_reduction)
        logits = predict(self.classifiers(a_hat), features)
        l_cls = bce_loss(logits, targets)
        return total_loss(l_cls, l_a, self.config.alpha), l_cls, l_a

    def logits(self, features) -> np.ndarray:
        return predict(self.classifiers(), features).data

    def predict_proba(self, features) -> np.ndarray:
        return sigmoid(self.logits(features)).data


# ---------------------------------------------------------------------------
# training


@dataclass
class TrainResult:
    model: AGCN
    optimizer: SGD
    history: list[dict] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.history[-1]["loss"] if self.history else float("nan")


def _check_compatible(model: AGCN, dataset: Dataset):
    if dataset.label_names != model.labels:
        raise ConfigError("dataset label order does not match the model's embeddings")
    if dataset.feature_dim != model.feature_dim:
        raise DimensionError(f"dataset features have {dataset.feature_dim} dims, model expects {model.feature_dim}")


def train(dataset: Dataset, embeddings: EmbeddingMatrix | None = None, config: ModelConfig | None = None,
          fixed_graph: np.ndarray | None = None, model: AGCN | None = None,
          optimizer: SGD | None = None,
          on_epoch: Callable[[dict], None] | None = None) -> TrainResult:
    """Minibatch SGD on L_cls + alpha * L_A with the step learning-rate schedule.

    Either pass ``embeddings`` + ``config`` for a fresh seeded model or an
    existing ``model`` (and optionally its ``optimizer``) to continue training.
    Raises :class:`DivergenceError` on the first non-finite loss.
    """
    if model is None:
        if embeddings is None or config is None:
            raise ConfigError("train needs either a model or embeddings + config")
        if dataset.num_labels != embeddings.num_labels:
            raise ConfigError(f"dataset has {dataset.num_labels} labels, embeddings {embeddings.num_labels}")
        model = AGCN.initialize(embeddings, dataset.feature_dim, config, fixed_graph=fixed_graph)
    config = model.config
    _check_compatible(model, dataset)
    if len(dataset) == 0:
        raise MetricInputError("training set is empty")
    if (dataset.targets.sum(axis=1) == 0).any():
        raise ConfigError("training samples must have at least one positive label")

    params = model.parameters()
    if optimizer is None:
        optimizer = SGD(params, config.lr, config.momentum, config.weight_decay)
    rng = np.random.default_rng(config.seed + 1)
    n = len(dataset)
    history: list[dict] = []
    step = 0
    for epoch in range(config.epochs):
        optimizer.lr = config.lr_at(epoch)
        order = rng.permutation(n)
        sums = np.zeros(3)
        batches = 0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            optimizer.zero_grad()
            with Tape() as tape:
                loss, l_cls, l_a = model.losses(dataset.features[idx], dataset.targets[idx])
                value = loss.item()
                if not np.isfinite(value):
                    raise DivergenceError(epoch, step, value, history)
                tape.backward(loss)
            optimizer.step()
            if not all(np.isfinite(p.data).all() for p in params.values()):
                raise DivergenceError(epoch, step, float("nan"), history)
            sums += (value, l_cls.item(), l_a.item())
            batches += 1
            step += 1
        rec = {"epoch": epoch, "lr": optimizer.lr, "loss": float(sums[0] / batches),
               "cls_loss": float(sums[1] / batches), "la_loss": float(sums[2] / batches)}
        history.append(rec)
        log.debug("epoch %d lr %.3g loss %.6f cls %.6f la %.6f", epoch, rec["lr"], rec["loss"],
                  rec["cls_loss"], rec["la_loss"])
        if on_epoch is not None:
            on_epoch(rec)
    return TrainResult(model, optimizer, history)


def dataset_loss(model: AGCN, dataset: Dataset) -> tuple[float, float, float]:
    total, l_cls, l_a = model.losses(dataset.features, dataset.targets)
    return total.item(), l_cls.item(), l_a.item()


def evaluate(model: AGCN, dataset: Dataset, threshold: float = 0.5, top_k: int | None = 3,
             topk_threshold: bool = False) -> MetricReport:
    _check_compatible(model, dataset)
    if len(dataset) == 0:
        raise MetricInputError("evaluation set is empty")
    scores = model.predict_proba(dataset.features)
    return metric_report(scores, dataset.targets.astype(np.int64), model.labels, threshold=threshold,
                         top_k=top_k, topk_threshold=topk_threshold)
