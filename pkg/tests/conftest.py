import numpy as np
import pytest
import torch

from gnnbee.corpus import ENTITY, TRIGGER, EventStructure, Mention, Sentence, Token


def make_sentence(words, mentions=(), events=(), doc_id="d", edges=None):
    tokens, pos = [], 0
    for i, w in enumerate(words):
        tokens.append(Token(i, w, pos, pos + len(w)))
        pos += len(w) + 1
    return Sentence(tokens, list(mentions), list(events), doc_id, edges)


@pytest.fixture
def pc_sentence():
    """A pathway-curation style sentence with a nested regulation event."""
    words = "TRAF2 inhibits the phosphorylation of IkB in Jurkat cells".split()
    mentions = [
        Mention("T1", ENTITY, "Gene_or_gene_product", 0, 0),
        Mention("T2", TRIGGER, "Negative_regulation", 1, 1),
        Mention("T3", TRIGGER, "Phosphorylation", 3, 3),
        Mention("T4", ENTITY, "Gene_or_gene_product", 5, 5),
        Mention("T5", ENTITY, "Cell", 7, 8),
    ]
    events = [EventStructure("T3", (("Theme", "T4"), ("AtLoc", "T5"))),
              EventStructure("T2", (("Cause", "T1"), ("Theme", "T3")))]
    return make_sentence(words, mentions, events, "PMID-1")


@pytest.fixture(autouse=True)
def _seed():
    torch.manual_seed(0)
    np.random.seed(0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
