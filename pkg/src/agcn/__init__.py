"""Adaptive label-graph GCN for multi-label classification on precomputed features."""

from .checkpoint import load_checkpoint, save_checkpoint
from .data import (Dataset, LabeledSample, SyntheticData, SyntheticSpec, load_dataset,
                   load_embeddings, save_dataset, save_embeddings, synth_generate)
from .gcn import GcnLayer, GcnStack, build_classifiers, gcn_layer_forward, init_stack
from .labelgraph import (CorrelationGraph, EmbeddingMatrix, LgParams, init_lg_params, learn_graph,
                         lg_cos, lg_default, lg_dot, lg_fc, normalize, read_graph_csv, sparse_loss,
                         write_graph_csv)
from .metrics import (MetricReport, PredictionSet, ap_all, average_precision, mean_average_precision,
                      metric_report, prf_overall, prf_per_class, topk_decisions)
from .model import (AGCN, SGD, ConfigError, DivergenceError, ModelConfig, TrainResult, bce_loss,
                    evaluate, predict, sgd_step, total_loss, train)
from .numcore import Matrix, Parameter, Tape, grad_check

__version__ = "0.1.0"
