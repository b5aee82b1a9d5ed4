"""Command line entry points: ``train``, ``evaluate``, ``ablate`` and ``score``."""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from pathlib import Path

from . import depgraph
from .corpus import dump_json_corpus, load_json_corpus, to_standoff
from .errors import BEEError
from .pipeline import Checkpoint, RunConfig, ablate, ablation_table, evaluate_model, load_split, predict, train
from .scorer import score, to_markdown, to_markdown_detail

logger = logging.getLogger("gnnbee")


def _load_data(path, parse=None):
    sentences = load_json_corpus(path)
    if parse:
        depgraph.attach_parses(sentences, depgraph.parse_conllu_file(Path(parse).read_text(encoding="utf-8")))
    return sentences


def _safe_name(doc_id, i):
    name = re.sub(r"[^A-Za-z0-9._-]+", "_", doc_id or "")
    return name or f"doc{i}"


def write_predictions(sentences, out_dir):
    """``predictions.jsonl`` plus one ``.a1``/``.a2`` pair per document."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dump_json_corpus(sentences, out / "predictions.jsonl")
    docs = {}
    for s in sentences:
        docs.setdefault(s.doc_id, []).append(s)
    for i, (doc_id, sents) in enumerate(docs.items()):
        a1, a2 = to_standoff(sents)
        stem = _safe_name(doc_id, i)
        (out / f"{stem}.a1").write_text(a1, encoding="utf-8")
        (out / f"{stem}.a2").write_text(a2, encoding="utf-8")


def cmd_train(args):
    config = RunConfig.from_toml(args.config)
    graph = config.gnn_enabled
    train_s = load_split(config, "train", graph)
    if train_s is None:
        raise SystemExit("data.train is required")
    dev_s = load_split(config, "dev", graph)
    ckpt = train(config, train_s, dev_s)
    out = Path(config.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    ckpt.save(out / "model.pt")
    print(f"saved {out / 'model.pt'} (best epoch {ckpt.epoch})")
    return 0


def cmd_evaluate(args):
    ckpt = Checkpoint.load(args.ckpt)
    model = ckpt.to_model()
    gold = _load_data(args.data, args.parse)
    pred = predict(model, gold)
    report = score(gold, pred)
    if args.out:
        write_predictions(pred, args.out)
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print(to_markdown_detail(report), end="")
    return 0


def cmd_ablate(args):
    config = RunConfig.from_toml(args.config)
    if args.output_dir:
        config = config.replace(output_dir=args.output_dir)
    rep_no, rep_g = ablate(config)
    print(ablation_table(rep_no, rep_g), end="")
    return 0


def cmd_score(args):
    gold = load_json_corpus(args.gold)
    pred = load_json_corpus(args.pred)
    report = score(gold, pred)
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print(to_markdown([(args.name, report)]), end="")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="gnnbee", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="log per-epoch progress")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train one model variant from a TOML config")
    t.add_argument("--config", required=True)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("evaluate", help="score a checkpoint on a JSON-lines corpus")
    e.add_argument("--ckpt", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--parse", help="CoNLL-U parses for --data (graph checkpoints)")
    e.add_argument("--out", help="directory for predictions.jsonl and .a1/.a2 dumps")
    e.add_argument("--format", choices=("json", "markdown"), default="json")
    e.set_defaults(func=cmd_evaluate)

    a = sub.add_parser("ablate", help="train and compare the no-graph and graph models")
    a.add_argument("--config", required=True)
    a.add_argument("--output-dir", help="overrides output_dir from the config")
    a.set_defaults(func=cmd_ablate)

    s = sub.add_parser("score", help="score predicted against gold JSON-lines corpora")
    s.add_argument("--gold", required=True)
    s.add_argument("--pred", required=True)
    s.add_argument("--format", choices=("json", "markdown"), default="json")
    s.add_argument("--name", default="pred", help="row label in markdown output")
    s.set_defaults(func=cmd_score)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (BEEError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
