"""Dependency parses and the normalized adjacency consumed by the GCN."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AlignmentError, ContractError, DepRangeError, ParseError


@dataclass(frozen=True)
class DepEdge:
    head: int
    dependent: int
    relation: str = "dep"


@dataclass
class DepGraph:
    n: int
    edges: list
    a_norm: np.ndarray = field(repr=False)

    @classmethod
    def from_edges(cls, n, edges):
        return cls(n, list(edges), normalize_adjacency(build_adjacency(n, edges)))


def _parse_block(lines):
    rows = []
    for lineno, line in lines:
        cols = line.split("\t")
        if len(cols) < 8:
            raise ParseError(f"expected 10 CoNLL-U columns, got {len(cols)}", lineno)
        tid = cols[0]
        if "-" in tid or "." in tid:  # multiword ranges and empty nodes
            continue
        try:
            idx = int(tid)
        except ValueError:
            raise ParseError(f"non-integer ID {tid!r}", lineno) from None
        try:
            head = int(cols[6])
        except ValueError:
            raise ParseError(f"non-integer HEAD {cols[6]!r}", lineno) from None
        rows.append((lineno, idx, head, cols[7]))
    n = len(rows)
    edges = []
    for pos, (lineno, idx, head, rel) in enumerate(rows, 1):
        if idx != pos:
            raise ParseError(f"token ID {idx} out of sequence (expected {pos})", lineno)
        if head < 0 or head > n:
            raise DepRangeError(f"HEAD {head} outside 0..{n}", lineno)
        if head == idx:
            raise DepRangeError(f"token {idx} is its own head", lineno)
        if head:
            edges.append(DepEdge(head - 1, idx - 1, rel))
    return n, edges


def parse_conllu(text):
    """Parse one CoNLL-U sentence into ``(n, edges)`` with 0-based indices.

    Root attachments (HEAD 0) produce no edge.
    """
    blocks = parse_conllu_file(text)
    if len(blocks) != 1:
        raise ParseError(f"expected one sentence, found {len(blocks)}")
    return blocks[0]


def parse_conllu_file(text):
    """Parse every blank-line separated sentence of a CoNLL-U document."""
    blocks, cur = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r")
        if line.startswith("#"):
            continue
        if not line.strip():
            if cur:
                blocks.append(_parse_block(cur))
                cur = []
            continue
        cur.append((lineno, line))
    if cur:
        blocks.append(_parse_block(cur))
    return blocks


def to_conllu(sentences):
    """CoNLL-U text for sentences carrying ``dep_edges``; unattached tokens hang off the root."""
    blocks = []
    for s in sentences:
        if s.dep_edges is None:
            raise AlignmentError(f"sentence {s.doc_id!r} has no dependency parse")
        head = {e.dependent: (e.head + 1, e.relation) for e in s.dep_edges}
        rows = []
        for i, w in enumerate(s.words):
            h, rel = head.get(i, (0, "root"))
            rows.append(f"{i + 1}\t{w}\t_\t_\t_\t_\t{h}\t{rel}\t_\t_")
        blocks.append("\n".join(rows) + "\n")
    return "\n".join(blocks)


def check_alignment(sentence, n):
    if len(sentence.tokens) != n:
        raise AlignmentError(
            f"parse has {n} tokens but sentence {sentence.doc_id!r} has {len(sentence.tokens)}")


def attach_parses(sentences, parses):
    """Attach ``(n, edges)`` parses to sentences in order, checking token counts."""
    if len(parses) != len(sentences):
        raise AlignmentError(f"{len(parses)} parses for {len(sentences)} sentences")
    for s, (n, edges) in zip(sentences, parses):
        check_alignment(s, n)
        s.dep_edges = list(edges)
    return sentences


def build_adjacency(n, edges):
    """Symmetric 0/1 adjacency with zero diagonal; direction and labels are discarded."""
    a = np.zeros((n, n), dtype=np.float64)
    for e in edges:
        h, d = e.head, e.dependent
        if not (0 <= h < n and 0 <= d < n) or h == d:
            raise ContractError(f"invalid edge {h}->{d} for n={n}")
        a[h, d] = a[d, h] = 1.0
    return a


def normalize_adjacency(a):
    """D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I."""
    a = np.asarray(a, dtype=np.float64)
    a_tilde = a + np.eye(a.shape[0])
    inv_sqrt = 1.0 / np.sqrt(a_tilde.sum(axis=1))
    return np.outer(inv_sqrt, inv_sqrt) * a_tilde


def sentence_graph(sentence):
    """DepGraph of a sentence that carries ``dep_edges``."""
    if sentence.dep_edges is None:
        raise AlignmentError(f"sentence {sentence.doc_id!r} has no dependency parse")
    return DepGraph.from_edges(len(sentence.tokens), sentence.dep_edges)
