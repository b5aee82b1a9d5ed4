"""Biomedical event extraction with an optional GCN over dependency parses.

Submodules
----------
corpus      standoff / JSON-lines ingestion, BIO tags, candidate pairs
depgraph    CoNLL-U parses and the normalized adjacency
encoder     toy and pretrained token encoders
graphembed  two-layer GCN and head/dependent MLPs
heads       tagging and argument-role pair heads
assembler   BIO decoding, argument edges, nested events
scorer      TI / TC / AI / AC metrics
pipeline    training, evaluation, checkpoints and the graph ablation
synthetic   seeded corpora for offline runs
"""
from . import assembler, corpus, depgraph, encoder, errors, graphembed, heads, pipeline, scorer, synthetic
from .corpus import EventStructure, LabelSchema, Mention, Sentence, Token
from .pipeline import Checkpoint, RunConfig, ablate, evaluate, init_from, predict, train
from .scorer import MetricsReport, score, total

__version__ = "0.1.0"

__all__ = [
    "assembler", "corpus", "depgraph", "encoder", "errors", "graphembed", "heads", "pipeline",
    "scorer", "synthetic", "EventStructure", "LabelSchema", "Mention", "Sentence", "Token",
    "Checkpoint", "RunConfig", "ablate", "evaluate", "init_from", "predict", "train",
    "MetricsReport", "score", "total",
]
