"""Command-line harness: ``agcn <subcommand> --config run.cfg [--set key=value ...]``.

Subcommands: synth, train, eval, export-graph, plot, grad-check, sweep-alpha.

The run configuration is one plain-text file of ``key = value`` lines
(``#`` starts a comment).  ``--set key=value`` overrides any key.  The output
directory can additionally come from ``AGCN_OUTPUT_DIR``; precedence is file,
then environment, then ``--output-dir``/``--set``.  Relative paths in a
config file resolve against that file's directory.

Exit statuses: 0 success, 1 a check failed (grad-check), 2 usage error,
3 configuration error, 4 input error, 5 training diverged.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .data import (Dataset, LoadError, SpecError, SyntheticSpec, load_dataset, load_embeddings, save_dataset,
                   save_embeddings, synth_generate)
from .labelgraph import EmbeddingMatrix, read_graph_csv, write_graph_csv
from .metrics import MetricInputError, REPORT_KEYS, TOPK_KEYS
from .model import AGCN, ConfigError, DivergenceError, ModelConfig, evaluate, train
from .numcore import DimensionError, grad_check

log = logging.getLogger("agcn")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_CONFIG, EXIT_INPUT, EXIT_DIVERGED = 0, 1, 2, 3, 4, 5
OUTPUT_ENV = "AGCN_OUTPUT_DIR"


class InputError(ValueError):
    pass


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# run configuration

PATH_KEYS = ("embeddings", "train_set", "eval_set", "fixed_graph", "output_dir", "checkpoint", "plot_blocks")


@dataclass
class RunConfig:
    embeddings: Path | None = None
    train_set: Path | None = None
    eval_set: Path | None = None
    fixed_graph: Path | None = None
    output_dir: Path = Path("agcn_run")
    checkpoint: Path | None = None  # default: <output_dir>/model.ckpt
    threshold: float = 0.5
    top_k: int | None = 3
    topk_threshold: bool = False
    plot_blocks: Path | None = None
    plot_cmap: str = "viridis"
    synth_labels: int = 12
    synth_blocks: int = 3
    synth_embed_dim: int = 16
    synth_feature_dim: int = 32
    synth_n_train: int = 2000
    synth_n_test: int = 500
    synth_p_in: float = 0.6
    synth_p_out: float = 0.05
    synth_noise: float = 1.0
    synth_prototype_scale: float = 1.0
    synth_block_signal: float = 1.0
    synth_embed_noise: float = 0.3
    model: ModelConfig = field(default_factory=ModelConfig)
    explicit: set = field(default_factory=set)

    @property
    def checkpoint_path(self) -> Path:
        return self.checkpoint if self.checkpoint is not None else self.output_dir / "model.ckpt"

    def synth_spec(self) -> SyntheticSpec:
        return SyntheticSpec.even(
            self.synth_labels, self.synth_blocks, embed_dim=self.synth_embed_dim,
            feature_dim=self.synth_feature_dim, n_train=self.synth_n_train, n_test=self.synth_n_test,
            p_in=self.synth_p_in, p_out=self.synth_p_out, noise=self.synth_noise,
            prototype_scale=self.synth_prototype_scale, block_signal=self.synth_block_signal,
            embed_noise=self.synth_embed_noise, seed=self.model.seed)

    def require(self, *keys: str):
        for key in keys:
            value = getattr(self, key)
            if value is None:
                raise ConfigError(f"'{key}' is not set")
            if key in PATH_KEYS and not Path(value).exists():
                raise ConfigError(f"'{key}' points to {value}, which does not exist")

    def graph_source(self) -> str:
        if self.fixed_graph is not None and "lg_variant" in self.explicit:
            raise ConfigError("set either lg_variant or fixed_graph, not both")
        return "fixed" if self.fixed_graph is not None else self.model.lg_variant


_RUN_FIELDS = {f.name: f for f in fields(RunConfig) if f.name not in ("model", "explicit")}
_MODEL_FIELDS = {f.name: f for f in fields(ModelConfig)}


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _convert(key: str, text: str, base: Path | None):
    text = text.strip()
    annotation = str((_RUN_FIELDS.get(key) or _MODEL_FIELDS[key]).type)
    if text.lower() == "none" and "None" in annotation:
        return None
    if key in PATH_KEYS:
        p = Path(text).expanduser()
        return p if p.is_absolute() or base is None else base / p
    if key == "hidden_dims":
        return tuple(int(v) for v in text.split(",") if v.strip())
    if annotation.startswith("bool"):
        return _parse_bool(text)
    if annotation.startswith("int"):
        return int(text)
    if annotation.startswith("float"):
        return float(text)
    return text


def parse_assignments(pairs, base: Path | None = None, source: str = "--set") -> dict:
    """Turn ``key = value`` strings into typed values; errors name the source and line."""
    out = {}
    for lineno, raw in pairs:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}" if lineno else source
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _RUN_FIELDS and key not in _MODEL_FIELDS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key in out and lineno:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        try:
            out[key] = _convert(key, value, base)
        except ValueError as exc:
            raise ConfigError(f"{where}: bad value for {key!r}: {exc}") from None
    return out


def load_run_config(path=None, overrides=(), output_dir=None, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    values = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file {path} does not exist")
        lines = list(enumerate(path.read_text().splitlines(), 1))
        values.update(parse_assignments(lines, base=path.parent, source=str(path)))
    if environ.get(OUTPUT_ENV):
        values["output_dir"] = Path(environ[OUTPUT_ENV])
    values.update(parse_assignments([(0, s) for s in overrides]))
    if output_dir is not None:
        values["output_dir"] = Path(output_dir)
    run_kw = {k: v for k, v in values.items() if k in _RUN_FIELDS}
    model_kw = {k: v for k, v in values.items() if k in _MODEL_FIELDS}
    cfg = RunConfig(**run_kw, model=ModelConfig(**model_kw), explicit=set(values))
    if cfg.top_k is not None and cfg.top_k < 1:
        raise ConfigError("top_k must be >= 1 or none")
    return cfg


def format_run_config(cfg: RunConfig) -> str:
    lines = []
    for name in _RUN_FIELDS:
        v = getattr(cfg, name)
        lines.append(f"{name} = {'none' if v is None else v}")
    for name, v in cfg.model.to_dict().items():
        if isinstance(v, list):
            v = ",".join(map(str, v))
        lines.append(f"{name} = {'none' if v is None else v}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# helpers


def _load_inputs(cfg: RunConfig, need_train: bool = True):
    cfg.require("embeddings", *(("train_set",) if need_train else ()))
    source = cfg.graph_source()
    if source == "fixed":
        cfg.require("fixed_graph")
    emb = load_embeddings(cfg.embeddings)
    fixed = None
    if source == "fixed":
        labels, fixed = read_graph_csv(cfg.fixed_graph)
        if labels != emb.labels:
            raise InputError(f"{cfg.fixed_graph}: label order does not match the embeddings")
    ds = load_dataset(cfg.train_set, emb.labels) if need_train else None
    if ds is not None and ds.rejected:
        log.warning("%s: %d record(s) rejected (no positive label)", cfg.train_set, len(ds.rejected))
    return emb, ds, fixed


def _write_history(path: Path, history):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "lr", "loss", "cls_loss", "la_loss"])
        for h in history:
            w.writerow([h["epoch"], repr(h["lr"]), repr(h["loss"]), repr(h["cls_loss"]), repr(h["la_loss"])])


def _export(model: AGCN, out: Path) -> tuple[Path, Path]:
    g = model.correlation_graph()
    raw, norm = out / "graph_raw.csv", out / "graph_normalized.csv"
    write_graph_csv(raw, g.labels, g.raw)
    write_graph_csv(norm, g.labels, g.normalized)
    return raw, norm


def _write_reports(report, out: Path) -> list[Path]:
    thr = out / "report_threshold.txt"
    lines = [f"{k} = {format(report[k], '.17g')}" for k in REPORT_KEYS]
    lines.append(f"AP_all = {format(report['AP_all'], '.17g')}")
    lines.append(f"threshold = {report.threshold!r}")
    lines += [f"AP[{n}] = {format(a, '.17g')}" for n, a in zip(report.labels, report.per_class_ap)]
    lines.append(f"skipped_classes = {','.join(report.skipped_classes)}")
    lines += [f"flag = {f}" for f in report.flags if not f.startswith("top")]
    thr.write_text("\n".join(lines) + "\n")
    paths = [thr]
    if report.top_k is not None:
        k = report.top_k
        top = out / f"report_top{k}.txt"
        # mAP is decision-free, so it heads the top-k report as well
        lines = [f"mAP = {format(report['mAP'], '.17g')}"]
        lines += [f"top{k}_{key} = {format(report[f'top{k}_{key}'], '.17g')}" for key in TOPK_KEYS]
        lines += [f"flag = {f}" for f in report.flags if f.startswith("top")]
        top.write_text("\n".join(lines) + "\n")
        paths.append(top)
    (out / "report_table.txt").write_text(report.to_table())
    return paths


# ---------------------------------------------------------------------------
# subcommands


def cmd_synth(cfg: RunConfig, args) -> int:
    try:
        spec = cfg.synth_spec()
    except SpecError as exc:
        raise ConfigError(str(exc)) from None
    data = synth_generate(spec)
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    save_embeddings(out / "embeddings.txt", data.embeddings)
    save_dataset(out / "train.jsonl", data.train)
    save_dataset(out / "test.jsonl", data.test)
    write_graph_csv(out / "blocks.csv", data.embeddings.labels, data.block_matrix)
    # a ready-to-use run config pointing at the generated files
    keep = "\n".join(f"{k} = {v}" for k, v in sorted(_explicit_model(cfg).items()))
    (out / "run.cfg").write_text(
        "embeddings = embeddings.txt\ntrain_set = train.jsonl\neval_set = test.jsonl\n"
        "plot_blocks = blocks.csv\noutput_dir = .\n" + (keep + "\n" if keep else ""))
    print(f"wrote synthetic suite ({spec.num_labels} labels, {len(spec.blocks)} blocks) to {out}")
    return EXIT_OK


def _explicit_model(cfg: RunConfig) -> dict:
    d = cfg.model.to_dict()
    out = {}
    for k in sorted(cfg.explicit & set(_MODEL_FIELDS)):
        v = d[k]
        out[k] = "none" if v is None else (",".join(map(str, v)) if isinstance(v, list) else v)
    return out


def run_training(cfg: RunConfig, out: Path | None = None):
    """Train from a run config and write checkpoint, history, log and graphs to ``out``."""
    out = cfg.output_dir if out is None else out
    emb, ds, fixed = _load_inputs(cfg)
    out.mkdir(parents=True, exist_ok=True)
    log_path = out / "train.log"
    with open(log_path, "w") as fh:
        fh.write(f"# started {datetime.datetime.now().isoformat(timespec='seconds')}\n")
        # only the first line carries a timestamp; the rest is reproducible
        fh.writelines(f"# {line}\n" for line in format_run_config(cfg).splitlines())

        def on_epoch(rec):
            fh.write(f"epoch {rec['epoch']} lr {rec['lr']!r} loss {rec['loss']!r} "
                     f"cls {rec['cls_loss']!r} la {rec['la_loss']!r}\n")

        try:
            res = train(ds, emb, cfg.model, fixed_graph=fixed, on_epoch=on_epoch)
        except DivergenceError as exc:
            fh.write(f"diverged: {exc}\n")
            _write_history(out / "history.csv", exc.history)
            raise
    _write_history(out / "history.csv", res.history)
    save_checkpoint(out / "model.ckpt", res.model, res.optimizer, epochs_done=len(res.history))
    _export(res.model, out)
    return res


def cmd_train(cfg: RunConfig, args) -> int:
    res = run_training(cfg)
    print(f"trained {len(res.history)} epochs, final loss {res.final_loss:.6g}; outputs in {cfg.output_dir}")
    return EXIT_OK


def _load_model(cfg: RunConfig) -> AGCN:
    path = cfg.checkpoint_path
    if not path.exists():
        raise ConfigError(f"checkpoint {path} does not exist")
    model, _, _ = load_checkpoint(path)
    return model


def cmd_eval(cfg: RunConfig, args) -> int:
    cfg.require("eval_set")
    model = _load_model(cfg)
    if cfg.embeddings is not None and Path(cfg.embeddings).exists():
        if load_embeddings(cfg.embeddings).labels != model.labels:
            raise InputError("label order of the configured embeddings does not match the checkpoint")
    ds = load_dataset(cfg.eval_set, model.labels, training=False)
    report = evaluate(model, ds, threshold=cfg.threshold, top_k=cfg.top_k, topk_threshold=cfg.topk_threshold)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    _write_reports(report, cfg.output_dir)
    print(report.to_table(), end="")
    return EXIT_OK


def cmd_export_graph(cfg: RunConfig, args) -> int:
    model = _load_model(cfg)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    for p in _export(model, cfg.output_dir):
        print(p)
    return EXIT_OK


def block_order(blocks: np.ndarray) -> tuple[list[int], list[int]]:
    """Label order grouping co-members of a block matrix, plus the block boundaries."""
    c = blocks.shape[0]
    seen, order, bounds = set(), [], []
    for i in range(c):
        if i in seen:
            continue
        group = [j for j in range(c) if blocks[i, j] > 0 and j not in seen]
        seen.update(group)
        order += group
        bounds.append(len(order))
    return order, bounds[:-1]


def plot_heatmap(labels, matrix, path, blocks=None, title="", cmap="viridis"):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    order, bounds = (list(range(len(labels))), []) if blocks is None else block_order(blocks)
    m = np.asarray(matrix)[np.ix_(order, order)]
    names = [labels[i] for i in order]
    fig, ax = plt.subplots(figsize=(1.5 + 0.45 * len(names), 1 + 0.4 * len(names)))
    im = ax.imshow(m, cmap=cmap)
    ax.set_xticks(range(len(names)), names, rotation=90)
    ax.set_yticks(range(len(names)), names)
    for b in bounds:
        ax.axhline(b - 0.5, color="white", lw=1.5)
        ax.axvline(b - 0.5, color="white", lw=1.5)
    fig.colorbar(im, ax=ax)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)


def cmd_plot(cfg: RunConfig, args) -> int:
    if args.graph is not None:
        if not Path(args.graph).exists():
            raise ConfigError(f"graph file {args.graph} does not exist")
        labels, matrix = read_graph_csv(args.graph)
        stem = Path(args.graph).stem
    else:
        g = _load_model(cfg).correlation_graph()
        labels, matrix = g.labels, (g.raw if args.which == "raw" else g.normalized)
        stem = f"graph_{args.which}"
    blocks = None
    if cfg.plot_blocks is not None:
        cfg.require("plot_blocks")
        block_labels, blocks = read_graph_csv(cfg.plot_blocks)
        if block_labels != labels:
            raise InputError(f"{cfg.plot_blocks}: labels do not match the graph")
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.output_dir / f"{stem}.png"
    plot_heatmap(labels, matrix, path, blocks, title=stem, cmap=cfg.plot_cmap)
    print(path)
    return EXIT_OK


def cmd_grad_check(cfg: RunConfig, args) -> int:
    """Finite-difference check of the full loss; a small seeded instance unless data is configured."""
    if cfg.embeddings is not None:
        emb, ds, fixed = _load_inputs(cfg)
        ds = ds.subset(np.arange(min(len(ds), cfg.model.batch_size)))
        model = AGCN.initialize(emb, ds.feature_dim, cfg.model, fixed_graph=fixed)
    else:
        rng = np.random.default_rng(cfg.model.seed)
        emb = EmbeddingMatrix([f"l{i}" for i in range(4)], rng.standard_normal((4, 3)))
        y = (rng.random((6, 4)) < 0.5).astype(float)
        y[:, 0] = 1.0
        ds = Dataset(emb.labels, rng.standard_normal((6, 5)), y)
        model = AGCN.initialize(emb, 5, ModelConfig(**{**cfg.model.to_dict(), "hidden_dims": [5]}))
    rep = grad_check(lambda: model.losses(ds.features, ds.targets)[0], model.parameters(),
                     h=args.step, tol=args.tol)
    print(rep)
    return EXIT_OK if rep.passed else EXIT_CHECK_FAILED


def _sweep_one(cfg: RunConfig, alpha: float, eval_path) -> dict:
    run_cfg = RunConfig(**{**{k: getattr(cfg, k) for k in _RUN_FIELDS}, "explicit": cfg.explicit},
                        model=ModelConfig(**{**cfg.model.to_dict(), "alpha": alpha}))
    out = cfg.output_dir / f"alpha_{alpha:g}"
    row = {"alpha": alpha, "status": "ok", "epochs": 0, "final_loss": float("nan"),
           "mAP": float("nan"), "OF1": float("nan"), "CF1": float("nan")}
    try:
        res = run_training(run_cfg, out)
    except DivergenceError as exc:
        row.update(status=f"diverged@epoch{exc.epoch}", epochs=exc.epoch)
        return row
    row.update(epochs=len(res.history), final_loss=res.final_loss)
    if eval_path is not None:
        rep = evaluate(res.model, load_dataset(eval_path, res.model.labels, training=False),
                       threshold=cfg.threshold, top_k=cfg.top_k)
        row.update(mAP=rep["mAP"], OF1=rep["OF1"], CF1=rep["CF1"])
    return row


def run_sweep(cfg: RunConfig, alphas, jobs: int = 1) -> list[dict]:
    if len(alphas) < 2:
        raise UsageError("an alpha sweep needs at least two values")
    if any(a < 0 for a in alphas):
        raise ConfigError("alpha values must be >= 0")
    _load_inputs(cfg)  # fail fast before any run starts
    eval_path = cfg.eval_set if cfg.eval_set is not None and Path(cfg.eval_set).exists() else None
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_one, [cfg] * len(alphas), alphas, [eval_path] * len(alphas)))
    return [_sweep_one(cfg, a, eval_path) for a in alphas]


def write_sweep(rows, out: Path):
    keys = ["alpha", "status", "epochs", "final_loss", "mAP", "OF1", "CF1"]
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(keys)
        for r in rows:
            w.writerow([repr(r[k]) if isinstance(r[k], float) else r[k] for k in keys])

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ok = [r for r in rows if r["status"] == "ok" and np.isfinite(r["mAP"])]
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.plot([r["alpha"] for r in ok], [100 * r["mAP"] for r in ok], "o-")
    for r in rows:
        if r["status"] != "ok":
            ax.axvline(r["alpha"], color="red", ls=":", lw=1)
            ax.annotate("diverged", (r["alpha"], 0.02), xycoords=("data", "axes fraction"), color="red",
                        rotation=90, fontsize=8)
    ax.set_xlabel("alpha")
    ax.set_ylabel("mAP (%)")
    fig.tight_layout()
    fig.savefig(out / "sweep.png", dpi=100, metadata={"Software": None})
    plt.close(fig)


def cmd_sweep_alpha(cfg: RunConfig, args) -> int:
    try:
        alphas = [float(a) for a in args.alphas.split(",") if a.strip()]
    except ValueError:
        raise UsageError(f"--alphas must be a comma-separated list of numbers, got {args.alphas!r}") from None
    rows = run_sweep(cfg, alphas, jobs=args.jobs)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    write_sweep(rows, cfg.output_dir)
    print(f"{'alpha':>6s}  {'status':<18s}  {'mAP':>7s}")
    for r in rows:
        print(f"{r['alpha']:6g}  {r['status']:<18s}  {100 * r['mAP']:7.2f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point

COMMANDS = {
    "synth": cmd_synth, "train": cmd_train, "eval": cmd_eval, "export-graph": cmd_export_graph,
    "plot": cmd_plot, "grad-check": cmd_grad_check, "sweep-alpha": cmd_sweep_alpha,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="run configuration file (key = value lines)")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
    common.add_argument("-o", "--output-dir", help=f"output directory (also ${OUTPUT_ENV})")
    common.add_argument("--checkpoint", help="checkpoint to read (default <output_dir>/model.ckpt)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="agcn", description="Adaptive label-graph GCN for multi-label classification")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", parents=[common], help="generate a synthetic block co-occurrence suite")
    sub.add_parser("train", parents=[common], help="train and write checkpoint, history and graphs")
    sub.add_parser("eval", parents=[common], help="threshold and top-k metric reports for a checkpoint")
    sub.add_parser("export-graph", parents=[common], help="write raw and normalized graphs as CSV")
    sp = sub.add_parser("plot", parents=[common], help="heatmap PNG of a learned graph")
    sp.add_argument("--which", choices=("normalized", "raw"), default="normalized")
    sp.add_argument("--graph", help="plot this graph CSV instead of a checkpoint")
    sg = sub.add_parser("grad-check", parents=[common], help="finite-difference check of all gradients")
    sg.add_argument("--step", type=float, default=1e-5)
    sg.add_argument("--tol", type=float, default=1e-4)
    sw = sub.add_parser("sweep-alpha", parents=[common], help="one seeded run per alpha, table and plot")
    sw.add_argument("--alphas", default="0,0.5,1", help="comma-separated values (at least two)")
    sw.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        overrides = list(args.overrides)
        if args.checkpoint:
            overrides.append(f"checkpoint={args.checkpoint}")
        cfg = load_run_config(args.config, overrides, output_dir=args.output_dir)
        return COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        print(f"agcn: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, SpecError) as exc:
        print(f"agcn: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"agcn: training diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (InputError, LoadError, CheckpointError, MetricInputError, DimensionError, ValueError, OSError) as exc:
        print(f"agcn: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
