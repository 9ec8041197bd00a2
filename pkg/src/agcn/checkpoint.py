"""Binary checkpoint container.

Layout (all integers little-endian)::

    magic        8 bytes   b"AGCNCKPT"
    version      u32       currently 1
    header_len   u32
    header       header_len bytes of UTF-8 JSON (sorted keys): config echo,
                 label list, graph source, stack slopes, epochs completed,
                 and the ordered list of array names
    then, for each array in header order:
    rows         u32
    cols         u32
    data         rows*cols float64, row-major

Arrays: ``embeddings``, every model parameter by name (``lg.w_phi``,
``gcn.0``, ...), ``fixed_graph`` when the model uses one, and
``opt.<param>`` for each optimizer velocity.  Writing the same state twice
produces identical bytes.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .gcn import GcnLayer, GcnStack
from .labelgraph import EmbeddingMatrix, LgParams
from .model import AGCN, SGD, ModelConfig
from .numcore import Parameter

MAGIC = b"AGCNCKPT"
VERSION = 1


class CheckpointError(ValueError):
    pass


def save_checkpoint(path, model: AGCN, optimizer: SGD | None = None, epochs_done: int = 0,
                    extra: dict | None = None):
    arrays: dict[str, np.ndarray] = {"embeddings": model.embeddings.vectors}
    for name, p in model.parameters().items():
        arrays[name] = p.data
    if model.fixed_graph is not None:
        arrays["fixed_graph"] = model.fixed_graph
    if optimizer is not None:
        for name, v in optimizer.velocity.items():
            arrays[f"opt.{name}"] = v
    header = {
        "config": model.config.to_dict(),
        "labels": model.labels,
        "graph_source": "fixed" if model.fixed_graph is not None else model.lg.variant,
        "slopes": [layer.slope for layer in model.stack.layers],
        "epochs_done": int(epochs_done),
        "optimizer_lr": None if optimizer is None else optimizer.lr,
        "arrays": list(arrays),
        "extra": extra or {},
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(blob)))
        fh.write(blob)
        for arr in arrays.values():
            arr = np.ascontiguousarray(arr, dtype="<f8")
            rows, cols = arr.shape
            fh.write(struct.pack("<II", rows, cols))
            fh.write(arr.tobytes())


def _read_exact(fh, n: int, what: str) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise CheckpointError(f"truncated checkpoint while reading {what}")
    return buf


def read_checkpoint(path) -> tuple[dict, dict[str, np.ndarray]]:
    with open(path, "rb") as fh:
        if _read_exact(fh, 8, "magic") != MAGIC:
            raise CheckpointError(f"{path}: not an A-GCN checkpoint")
        version, hlen = struct.unpack("<II", _read_exact(fh, 8, "version"))
        if version != VERSION:
            raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
        try:
            header = json.loads(_read_exact(fh, hlen, "header").decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CheckpointError(f"{path}: corrupt header ({exc})") from None
        arrays = {}
        for name in header.get("arrays", []):
            rows, cols = struct.unpack("<II", _read_exact(fh, 8, f"{name} shape"))
            data = _read_exact(fh, 8 * rows * cols, name)
            arrays[name] = np.frombuffer(data, dtype="<f8").reshape(rows, cols).astype(np.float64)
        if fh.read(1):
            raise CheckpointError(f"{path}: trailing bytes after last array")
    return header, arrays


def load_checkpoint(path) -> tuple[AGCN, SGD, dict]:
    """Rebuild the model and its optimizer; returns (model, optimizer, header)."""
    header, arrays = read_checkpoint(path)
    try:
        config = ModelConfig.from_dict(header["config"])
        emb = EmbeddingMatrix(header["labels"], arrays["embeddings"])
        slopes = header["slopes"]
        layers = [GcnLayer(Parameter(arrays[f"gcn.{i}"], name=f"gcn.{i}"), s) for i, s in enumerate(slopes)]
        stack = GcnStack(layers)
        lg = None
        fixed = None
        if header["graph_source"] == "fixed":
            fixed = arrays["fixed_graph"]
        else:
            kw = {k: Parameter(arrays[f"lg.{k}"], name=f"lg.{k}")
                  for k in ("w_phi", "w_theta", "w_l", "b_phi", "b_theta") if f"lg.{k}" in arrays}
            lg = LgParams(header["graph_source"], **kw)
        model = AGCN(emb, stack, config, lg=lg, fixed_graph=fixed)
    except (KeyError, ValueError, TypeError) as exc:
        raise CheckpointError(f"{path}: inconsistent checkpoint ({exc})") from None
    opt = SGD(model.parameters(), header.get("optimizer_lr") or config.lr, config.momentum,
              config.weight_decay)
    for name in model.parameters():
        if f"opt.{name}" in arrays:
            opt.velocity[name] = arrays[f"opt.{name}"]
    return model, opt, header


def checkpoint_bytes_equal(a, b) -> bool:
    return Path(a).read_bytes() == Path(b).read_bytes()
