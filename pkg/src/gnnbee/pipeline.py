"""Training, evaluation, checkpointing and the graph ablation for the two event extraction models."""
from __future__ import annotations

import dataclasses
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from . import depgraph
from .assembler import PredictedEdge, assemble_events, decode_bio
from .corpus import (NONE_ROLE, TRIGGER, LabelSchema, Sentence, encode_tags,
                     generate_candidate_pairs, load_json_corpus)
from .encoder import TrainScope, build_encoder
from .errors import IncompatibleCheckpointError, MissingParseError
from .graphembed import GCN, HeadDependentNetworks, embed, mention_vectors
from .heads import CONCAT, PairHead, TagHead, Vocab, softmax64
from .scorer import MetricsReport, score, to_markdown

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

NO_GRAPH_NAME = "BioBert-BEE"
GRAPH_NAME = "BioBert-GNN-BEE"


@dataclass
class RunConfig:
    data_train: Optional[str] = None
    data_dev: Optional[str] = None
    data_test: Optional[str] = None
    data_train_parse: Optional[str] = None
    data_dev_parse: Optional[str] = None
    data_test_parse: Optional[str] = None
    encoder_kind: str = "toy"
    encoder_model_name: Optional[str] = None
    encoder_train_scope: str = TrainScope.LAST_LAYER.value
    encoder_max_len: int = 512
    encoder_dim: int = 64
    gnn_enabled: bool = True
    gnn_hidden_dim: Optional[int] = None
    gnn_bias: bool = False
    mlp_hidden_dim: int = 64
    mlp_out_dim: int = 64
    head_mode: str = CONCAT
    lr: float = 1e-3
    encoder_lr: float = 1e-5
    epochs: int = 20
    batch_size: int = 8
    seed: int = 0
    loss_weight: float = 1.0
    output_dir: Optional[str] = None

    @classmethod
    def from_flat(cls, flat):
        names = {f.name for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in flat.items():
            name = key.replace(".", "_")
            if name not in names:
                raise KeyError(f"unknown config key {key!r}")
            kwargs[name] = value
        return cls(**kwargs)

    @classmethod
    def from_toml(cls, path):
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        flat = {}

        def walk(prefix, node):
            for k, v in node.items():
                key = f"{prefix}.{k}" if prefix else k
                if isinstance(v, dict):
                    walk(key, v)
                else:
                    flat[key] = v

        walk("", raw)
        cfg = cls.from_flat(flat)
        base = Path(path).parent
        for f in dataclasses.fields(cls):
            if f.name.startswith("data_") or f.name == "output_dir":
                v = getattr(cfg, f.name)
                if v is not None and not Path(v).is_absolute():
                    setattr(cfg, f.name, str(base / v))
        return cfg

    def to_dict(self):
        return dataclasses.asdict(self)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


class BEEModel(nn.Module):
    """Encoder, optional two-layer GCN, head/dependent MLPs, tagging and pair heads."""

    def __init__(self, schema: LabelSchema, encoder, gnn_enabled=True, gnn_hidden_dim=None,
                 gnn_bias=False, mlp_hidden_dim=64, mlp_out_dim=64, head_mode=CONCAT, seed=0):
        super().__init__()
        self.schema = schema
        self.tag_vocab = Vocab(schema.tag_vocab)
        self.role_vocab = Vocab(schema.role_vocab)
        self.encoder = encoder
        d = encoder.dim
        self.gcn = GCN(d, gnn_hidden_dim or d, d, bias=gnn_bias, seed=seed + 1) if gnn_enabled else None
        self.headdep = HeadDependentNetworks(d, mlp_hidden_dim, mlp_out_dim, seed=seed + 2)
        self.tag_head = TagHead(d, len(self.tag_vocab), seed=seed + 3)
        self.pair_head = PairHead(mlp_out_dim, len(self.role_vocab), head_mode, seed=seed + 4)

    @property
    def graph(self):
        return self.gcn is not None

    def token_reps(self, c, a_hat):
        return embed(c, a_hat, self.gcn)

    def pair_logits(self, rep, heads, deps):
        h = self.headdep.head(mention_vectors(rep, [m.span for m in heads]))
        d = self.headdep.dep(mention_vectors(rep, [m.span for m in deps]))
        return self.pair_head.logits(h, d)

    def head_state(self):
        """Parameters outside the encoder, by name."""
        return {k: v.detach().clone() for k, v in self.state_dict().items()
                if not k.startswith("encoder.")}


def build_model(config: RunConfig, schema: LabelSchema) -> BEEModel:
    enc = build_encoder(config.encoder_kind, config.encoder_model_name, config.encoder_max_len,
                        config.encoder_train_scope, config.encoder_dim, config.seed)
    if config.encoder_kind == "pretrained":
        enc.set_trainable_scope(config.encoder_train_scope)
    return BEEModel(schema, enc, config.gnn_enabled, config.gnn_hidden_dim, config.gnn_bias,
                    config.mlp_hidden_dim, config.mlp_out_dim, config.head_mode, config.seed)


@dataclass
class Checkpoint:
    state: dict
    encoder_delta: dict
    schema: dict
    tag_vocab: list
    role_vocab: list
    config: dict
    epoch: int = 0
    history: list = field(default_factory=list)

    @classmethod
    def from_model(cls, model, config, epoch=0, history=()):
        return cls(model.head_state(), model.encoder.delta_state(), model.schema.to_dict(),
                   list(model.tag_vocab.labels), list(model.role_vocab.labels), config.to_dict(),
                   epoch, list(history))

    @property
    def run_config(self):
        return RunConfig(**self.config)

    def to_model(self) -> BEEModel:
        model = build_model(self.run_config, LabelSchema.from_dict(self.schema))
        missing, unexpected = model.load_state_dict(self.state, strict=False)
        missing = [k for k in missing if not k.startswith("encoder.")]
        if missing or unexpected:
            raise IncompatibleCheckpointError(sorted({k.split(".")[0] for k in missing + unexpected}))
        model.encoder.load_delta_state(self.encoder_delta)
        return model

    def save(self, path):
        torch.save(dataclasses.asdict(self), path)

    @classmethod
    def load(cls, path):
        return cls(**torch.load(path, weights_only=True))


@dataclass
class Prepared:
    sentence: Sentence
    tag_ids: torch.Tensor
    a_hat: Optional[torch.Tensor]
    heads: list
    deps: list
    role_ids: torch.Tensor
    c: Optional[torch.Tensor] = None


def adjacency_tensor(sentence):
    if sentence.dep_edges is None:
        raise MissingParseError(f"sentence {sentence.doc_id!r} has no dependency parse")
    return torch.from_numpy(depgraph.sentence_graph(sentence).a_norm).float()


def require_parses(sentences):
    missing = [i for i, s in enumerate(sentences) if s.dep_edges is None]
    if missing:
        raise MissingParseError(f"{len(missing)} sentences lack a dependency parse (first: #{missing[0]})")


def _frozen_encoder(model):
    return not any(p.requires_grad for p in model.encoder.parameters())


def prepare(model: BEEModel, sentences, graph=None):
    """Tag ids, normalized adjacency and gold-trigger candidate pairs per sentence."""
    graph = model.graph if graph is None else graph
    if graph:
        require_parses(sentences)
    cache = _frozen_encoder(model)
    out = []
    for s in sentences:
        tags = torch.tensor(model.tag_vocab.encode(encode_tags(s).tags), dtype=torch.long)
        by_id = {m.id: m for m in s.mentions}
        pairs = generate_candidate_pairs(s, s.triggers, s.mentions)
        heads = [by_id[p.head_mention] for p in pairs]
        deps = [by_id[p.dep_mention] for p in pairs]
        roles = torch.tensor([model.role_vocab.index.get(p.gold_role, 0) for p in pairs], dtype=torch.long)
        a_hat = adjacency_tensor(s) if graph else None
        c = None
        if cache:
            with torch.no_grad():
                c = model.encoder.encode(s.words, s.doc_id)
        out.append(Prepared(s, tags, a_hat, heads, deps, roles, c))
    return out


def sentence_losses(model, item: Prepared):
    c = item.c if item.c is not None else model.encoder.encode(item.sentence.words, item.sentence.doc_id)
    rep = model.token_reps(c, item.a_hat)
    tag_loss = F.cross_entropy(model.tag_head.logits(rep), item.tag_ids)
    if item.heads:
        pair_loss = F.cross_entropy(model.pair_logits(rep, item.heads, item.deps), item.role_ids)
    else:
        pair_loss = rep.new_zeros(())
    return tag_loss, pair_loss


def _optimizer(model, config):
    enc = [p for p in model.encoder.parameters() if p.requires_grad]
    enc_ids = {id(p) for p in model.encoder.parameters()}
    rest = [p for p in model.parameters() if id(p) not in enc_ids and p.requires_grad]
    groups = [{"params": rest, "lr": config.lr}]
    if enc:
        groups.append({"params": enc, "lr": config.encoder_lr})
    return torch.optim.Adam(groups)


def train(config: RunConfig, train_sentences, dev_sentences=None, model: Optional[BEEModel] = None,
          schema: Optional[LabelSchema] = None) -> Checkpoint:
    """Train one model variant; returns the checkpoint with the best validation total.

    Without a validation split the final epoch is kept.
    """
    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)
    if model is None:
        schema = schema or LabelSchema.from_sentences(list(train_sentences) + list(dev_sentences or []))
        model = build_model(config, schema)
    items = prepare(model, train_sentences)
    if dev_sentences and model.graph:
        require_parses(dev_sentences)
    opt = _optimizer(model, config)
    history = []
    best = Checkpoint.from_model(model, config, 0, history)
    best_total = -1.0
    for epoch in range(1, config.epochs + 1):
        model.train()
        sums = np.zeros(3)
        order = rng.permutation(len(items))
        for start in range(0, len(order), config.batch_size):
            batch = [items[i] for i in order[start:start + config.batch_size]]
            opt.zero_grad()
            tag_l, pair_l = zip(*(sentence_losses(model, it) for it in batch))
            tag_loss = torch.stack(tag_l).mean()
            pair_loss = torch.stack(pair_l).mean()
            loss = tag_loss + config.loss_weight * pair_loss
            if not torch.isfinite(loss):
                raise FloatingPointError(f"non-finite loss at epoch {epoch}")
            loss.backward()
            opt.step()
            sums += np.array([loss.item(), tag_loss.item(), pair_loss.item()]) * len(batch)
        n = max(len(items), 1)
        record = {"epoch": epoch, "loss": float(sums[0] / n), "tag_loss": float(sums[1] / n),
                  "pair_loss": float(sums[2] / n)}
        if dev_sentences:
            report = evaluate_model(model, dev_sentences)
            record["dev"] = report.to_dict()
            improved = report.total > best_total
            if improved:
                best_total = report.total
        else:
            improved = True
        history.append(record)
        logger.info("epoch %d loss %.4f%s", epoch, record["loss"],
                    f" dev total {record['dev']['total']:.2f}" if dev_sentences else "")
        if improved:
            best = Checkpoint.from_model(model, config, epoch, [])
    best.history = history
    if config.output_dir:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.json").write_text(json.dumps(history, indent=2, sort_keys=True))
    return best


def predict(model: BEEModel, sentences, collect=None):
    """End-to-end inference; predicted triggers feed the pair classifier.

    If ``collect`` is a list, every emitted probability vector is appended to it.
    """
    if model.graph:
        require_parses(sentences)
    model.eval()
    out = []
    next_id = {}
    with torch.no_grad():
        for s in sentences:
            c = model.encoder.encode(s.words, s.doc_id)
            a_hat = adjacency_tensor(s) if model.graph else None
            rep = model.token_reps(c, a_hat)
            tag_probs = model.tag_head(rep)
            first = next_id.get(s.doc_id, 1)
            mentions = decode_bio(tag_probs, model.schema, model.tag_vocab.labels, "T", first)
            next_id[s.doc_id] = first + len(mentions)
            triggers = [m for m in mentions if m.kind == TRIGGER]
            pairs = generate_candidate_pairs(Sentence(s.tokens), triggers, mentions)
            edges = []
            if pairs:
                by_id = {m.id: m for m in mentions}
                heads = [by_id[p.head_mention] for p in pairs]
                deps = [by_id[p.dep_mention] for p in pairs]
                probs = softmax64(model.pair_logits(rep, heads, deps))
                conf, idx = probs.max(dim=-1)
                for p, k, q in zip(pairs, idx.tolist(), conf.tolist()):
                    role = model.role_vocab[k]
                    if role != NONE_ROLE:
                        edges.append(PredictedEdge(p.head_mention, p.dep_mention, role, q))
                if collect is not None:
                    collect.extend(probs)
            if collect is not None:
                collect.extend(tag_probs)
            events = assemble_events(triggers, edges)
            out.append(Sentence(list(s.tokens), mentions, events, s.doc_id, s.dep_edges))
    return out


def evaluate_model(model, sentences) -> MetricsReport:
    return score(sentences, predict(model, sentences))


def evaluate(checkpoint, sentences) -> MetricsReport:
    """Score a checkpoint (or a live model) end to end against gold sentences."""
    model = checkpoint.to_model() if isinstance(checkpoint, Checkpoint) else checkpoint
    return evaluate_model(model, sentences)


_COPIED_GROUPS = ("headdep", "tag_head", "pair_head")


def init_from(source: Checkpoint, config: RunConfig) -> BEEModel:
    """Graph model whose encoder and heads start from a no-graph checkpoint; the GCN is freshly seeded."""
    src_cfg = source.run_config
    if src_cfg.gnn_enabled:
        raise IncompatibleCheckpointError(["gnn.enabled (source must be the no-graph model)"])
    config = config.replace(gnn_enabled=True)
    schema = LabelSchema.from_dict(source.schema)
    model = build_model(config, schema)
    bad = []
    if (src_cfg.encoder_kind, src_cfg.encoder_model_name, src_cfg.encoder_dim) != \
            (config.encoder_kind, config.encoder_model_name, config.encoder_dim):
        bad.append("encoder")
    target = model.state_dict()
    for group in _COPIED_GROUPS:
        keys = [k for k in target if k.startswith(group + ".")]
        src_keys = [k for k in source.state if k.startswith(group + ".")]
        if sorted(keys) != sorted(src_keys) or any(target[k].shape != source.state[k].shape for k in keys):
            bad.append(group)
    if bad:
        raise IncompatibleCheckpointError(bad)
    model.load_state_dict({k: v for k, v in source.state.items()}, strict=False)
    model.encoder.load_delta_state(source.encoder_delta)
    return model


def load_split(config: RunConfig, split, graph):
    """Read a corpus split; parse sidecars are only opened in graph mode."""
    path = getattr(config, f"data_{split}")
    if path is None:
        return None
    sentences = load_json_corpus(path)
    if graph:
        parse_path = getattr(config, f"data_{split}_parse")
        if parse_path is not None:
            parses = depgraph.parse_conllu_file(Path(parse_path).read_text(encoding="utf-8"))
            depgraph.attach_parses(sentences, parses)
        require_parses(sentences)
    return sentences


def ablate(config: RunConfig, train_sentences=None, dev_sentences=None, test_sentences=None):
    """Train the no-graph model, initialise the graph model from it, train that, score both on test.

    In-memory splits override the config paths. Writes ``metrics.json`` and
    ``report.md`` when ``config.output_dir`` is set.
    """
    no_cfg = config.replace(gnn_enabled=False, output_dir=None)
    g_cfg = config.replace(gnn_enabled=True, output_dir=None)
    if train_sentences is None:
        train_sentences = load_split(config, "train", graph=False)
        dev_sentences = load_split(config, "dev", graph=False)
        test_sentences = load_split(config, "test", graph=False)
        g_splits = [load_split(config, s, graph=True) for s in ("train", "dev", "test")]
    else:
        g_splits = [train_sentences, dev_sentences, test_sentences]
        for split in g_splits:
            if split:
                require_parses(split)

    ck_no = train(no_cfg, train_sentences, dev_sentences)
    rep_no = evaluate(ck_no, test_sentences)
    model_g = init_from(ck_no, g_cfg)
    ck_g = train(g_cfg, g_splits[0], g_splits[1], model=model_g)
    rep_g = evaluate(ck_g, g_splits[2])

    if config.output_dir:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        metrics = {
            NO_GRAPH_NAME: {"history": ck_no.history, "best_epoch": ck_no.epoch, "test": rep_no.to_dict()},
            GRAPH_NAME: {"history": ck_g.history, "best_epoch": ck_g.epoch, "test": rep_g.to_dict()},
        }
        (out / "metrics.json").write_text(json.dumps(metrics, indent=2, sort_keys=True))
        (out / "report.md").write_text(ablation_table(rep_no, rep_g))
        ck_no.save(out / "no_graph.pt")
        ck_g.save(out / "graph.pt")
    return rep_no, rep_g


def ablation_table(report_no_graph, report_graph):
    return to_markdown([(NO_GRAPH_NAME, report_no_graph), (GRAPH_NAME, report_graph)])
