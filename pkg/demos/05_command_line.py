"""The same workflow through the command line.

Writes a small corpus with CoNLL-U parse sidecars and a TOML config to a
temporary directory, then runs ``train``, ``evaluate`` and ``score``
exactly as one would from a shell (``gnnbee ...`` or ``python -m gnnbee ...``).
Twenty training sentences are far too few for good held-out scores; the
point here is the file formats and commands.
"""
import tempfile
from pathlib import Path

from gnnbee.cli import main
from gnnbee.corpus import dump_json_corpus
from gnnbee.depgraph import to_conllu
from gnnbee.synthetic import overfit_corpus

work = Path(tempfile.mkdtemp(prefix="gnnbee-"))
data = overfit_corpus(30, seed=5)
for name, part in (("train", data[:20]), ("dev", data[20:25]), ("test", data[25:])):
    dump_json_corpus(part, work / f"{name}.jsonl")
    (work / f"{name}.conllu").write_text(to_conllu(part))

(work / "cfg.toml").write_text("""\
epochs = 60
lr = 3e-3
seed = 0
output_dir = "run"

[data]
train = "train.jsonl"
dev = "dev.jsonl"
test = "test.jsonl"
train_parse = "train.conllu"
dev_parse = "dev.conllu"
test_parse = "test.conllu"

[gnn]
enabled = true
hidden_dim = 128
""")

main(["train", "--config", str(work / "cfg.toml")])
main(["evaluate", "--ckpt", str(work / "run" / "model.pt"), "--data", str(work / "test.jsonl"),
      "--parse", str(work / "test.conllu"), "--out", str(work / "pred"), "--format", "markdown"])
main(["score", "--gold", str(work / "test.jsonl"), "--pred", str(work / "pred" / "predictions.jsonl"),
      "--format", "markdown", "--name", "BioBert-GNN-BEE"])
print(f"files in {work}:", sorted(p.name for p in (work / "pred").iterdir()))
