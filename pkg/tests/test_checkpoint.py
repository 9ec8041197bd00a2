import numpy as np
import pytest

from agcn.checkpoint import CheckpointError, checkpoint_bytes_equal, load_checkpoint, read_checkpoint, save_checkpoint
from agcn.labelgraph import EmbeddingMatrix
from agcn.model import ModelConfig, train
from agcn.data import Dataset


@pytest.fixture
def trained():
    rng = np.random.default_rng(0)
    emb = EmbeddingMatrix(["a", "b", "c"], rng.standard_normal((3, 4)))
    y = (rng.random((20, 3)) < 0.5).astype(float)
    y[:, 1] = 1.0
    ds = Dataset(emb.labels, rng.standard_normal((20, 6)), y)
    return train(ds, emb, ModelConfig(epochs=2, batch_size=8, seed=3)), ds


def test_round_trip_bitwise(tmp_path, trained):
    res, ds = trained
    first, second = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
    save_checkpoint(first, res.model, res.optimizer, epochs_done=2)
    model, opt, header = load_checkpoint(first)
    save_checkpoint(second, model, opt, epochs_done=header["epochs_done"])
    assert checkpoint_bytes_equal(first, second)
    assert np.array_equal(model.predict_proba(ds.features), res.model.predict_proba(ds.features))
    for name, v in res.optimizer.velocity.items():
        assert np.array_equal(opt.velocity[name], v)


def test_fixed_graph_model(tmp_path):
    emb = EmbeddingMatrix(["a", "b"], np.eye(2))
    ds = Dataset(emb.labels, np.ones((4, 3)), [[1, 0], [0, 1], [1, 1], [1, 0]])
    res = train(ds, emb, ModelConfig(epochs=1, alpha=0.0), fixed_graph=np.eye(2))
    save_checkpoint(tmp_path / "f.ckpt", res.model)
    model, _, header = load_checkpoint(tmp_path / "f.ckpt")
    assert header["graph_source"] == "fixed" and np.array_equal(model.fixed_graph, np.eye(2))


def test_header_contents(tmp_path, trained):
    res, _ = trained
    save_checkpoint(tmp_path / "c.ckpt", res.model, res.optimizer, epochs_done=2)
    header, arrays = read_checkpoint(tmp_path / "c.ckpt")
    assert header["labels"] == ["a", "b", "c"]
    assert header["config"]["seed"] == 3
    assert {"embeddings", "lg.w_phi", "lg.w_theta", "gcn.0", "gcn.1", "opt.gcn.0"} <= set(arrays)


def test_bad_magic(tmp_path):
    p = tmp_path / "x.ckpt"
    p.write_bytes(b"NOTACKPT" + bytes(16))
    with pytest.raises(CheckpointError, match="not an A-GCN"):
        read_checkpoint(p)


def test_truncated(tmp_path, trained):
    res, _ = trained
    p = tmp_path / "t.ckpt"
    save_checkpoint(p, res.model)
    p.write_bytes(p.read_bytes()[:-5])
    with pytest.raises(CheckpointError, match="truncated"):
        read_checkpoint(p)
