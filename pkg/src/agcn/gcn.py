"""Graph convolution stack mapping label embeddings to per-label classifiers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .labelgraph import EmbeddingMatrix, glorot_uniform
from .numcore import DimensionError, Matrix, Parameter, as_matrix, leaky_relu, matmul


@dataclass
class GcnLayer:
    weight: Parameter
    slope: float | None = 0.2  # None: linear layer

    @property
    def in_dim(self) -> int:
        return self.weight.rows

    @property
    def out_dim(self) -> int:
        return self.weight.cols


@dataclass
class GcnStack:
    layers: list[GcnLayer]

    def __post_init__(self):
        if not self.layers:
            raise ValueError("a GCN stack needs at least one layer")
        for lo, hi in zip(self.layers, self.layers[1:]):
            if lo.out_dim != hi.in_dim:
                raise DimensionError(f"layer widths do not chain: {lo.weight.shape} then {hi.weight.shape}")
        if self.layers[-1].slope is not None:
            raise ValueError("the final layer produces classifiers and must be linear (slope=None)")

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def dims(self) -> list[int]:
        return [self.input_dim] + [layer.out_dim for layer in self.layers]

    def named_parameters(self) -> dict[str, Parameter]:
        return {f"gcn.{i}": layer.weight for i, layer in enumerate(self.layers)}


def init_stack(dims: Sequence[int], rng: np.random.Generator, slope: float = 0.2) -> GcnStack:
    """Glorot-uniform stack ``dims[0] -> ... -> dims[-1]``; no activation after the last layer."""
    dims = [int(d) for d in dims]
    if len(dims) < 2 or min(dims) < 1:
        raise ValueError(f"invalid stack widths {dims}")
    layers = []
    for i, (d_in, d_out) in enumerate(zip(dims, dims[1:])):
        last = i == len(dims) - 2
        w = Parameter(glorot_uniform(rng, d_in, d_out), name=f"gcn.{i}")
        layers.append(GcnLayer(w, None if last else slope))
    return GcnStack(layers)


def gcn_layer_forward(h, a_hat, layer: GcnLayer) -> Matrix:
    """One propagation step: act(A_hat @ H @ W)."""
    h, a_hat = as_matrix(h), as_matrix(a_hat)
    if a_hat.shape != (h.rows, h.rows):
        raise DimensionError(f"graph {a_hat.shape} does not match {h.rows} node rows")
    if h.cols != layer.in_dim:
        raise DimensionError(f"node features {h.shape} do not fit layer weight {layer.weight.shape}")
    out = matmul(a_hat, matmul(h, layer.weight))
    if layer.slope is not None:
        out = leaky_relu(out, layer.slope)
    return out


def build_classifiers(E, a_hat, stack: GcnStack) -> Matrix:
    """Thread the embeddings through every layer over the same graph; returns ``C x D``."""
    h = E.matrix() if isinstance(E, EmbeddingMatrix) else as_matrix(E)
    if h.cols != stack.input_dim:
        raise DimensionError(f"embeddings have d_e={h.cols} but the stack expects {stack.input_dim}")
    for layer in stack.layers:
        h = gcn_layer_forward(h, a_hat, layer)
    return h
