"""Train the graph model on 20 synthetic sentences until it memorizes them.

The synthetic corpus has four entity types, three trigger types, three
roles, nested regulation events and a dependency parse per sentence. A
working model should drive the end-to-end total close to 100.
"""
import logging

from gnnbee.pipeline import RunConfig, evaluate, train
from gnnbee.scorer import to_markdown_detail
from gnnbee.synthetic import overfit_corpus

logging.basicConfig(level=logging.INFO, format="%(message)s")

corpus = overfit_corpus(20, seed=0)
print(" ".join(corpus[0].words))
print([(m.label, m.span) for m in corpus[0].mentions])

config = RunConfig(epochs=200, lr=3e-3, gnn_hidden_dim=128, seed=0)
checkpoint = train(config, corpus, corpus)  # selecting the epoch on the training data itself
print(f"best epoch {checkpoint.epoch}")
print(to_markdown_detail(evaluate(checkpoint, corpus)))
