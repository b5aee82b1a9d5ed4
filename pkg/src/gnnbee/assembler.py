"""Decode head outputs into mentions, argument edges and nested events."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import NONE_ROLE, OUTSIDE, EventStructure, Mention
from .errors import ContractError, DecodeError


@dataclass(frozen=True)
class PredictedEdge:
    head_mention: str
    dep_mention: str
    role: str
    confidence: float

    def __post_init__(self):
        if self.role == NONE_ROLE:
            raise ContractError("a predicted edge cannot carry the NONE role")
        if not 0.0 < self.confidence <= 1.0:
            raise ContractError(f"confidence {self.confidence} outside (0, 1]")


def _split_tag(tag, schema):
    if tag == OUTSIDE:
        return None, None
    prefix, _, label = tag.partition("-")
    if prefix not in ("B", "I") or not label:
        raise DecodeError(f"malformed tag {tag!r}")
    try:
        kind = schema.kind_of(label)
    except KeyError:
        raise DecodeError(f"tag {tag!r} is outside the vocabulary") from None
    return prefix, (kind, label)


def decode_bio(tags, schema, tag_vocab=None, id_prefix="T", first_id=1):
    """Turn BIO tags (or per-token tag distributions) into mentions.

    An ``I-t`` that does not continue a ``t`` run opens a new mention.
    Mention kind comes from the inventory holding ``t``.
    """
    if not isinstance(tags, (list, tuple)):
        arr = np.asarray(tags.detach().cpu() if hasattr(tags, "detach") else tags)
        vocab = tag_vocab if tag_vocab is not None else schema.tag_vocab
        tags = [vocab[i] for i in arr.argmax(axis=-1).tolist()]
    spans = []
    cur = None
    for i, tag in enumerate(tags):
        prefix, kl = _split_tag(tag, schema)
        if prefix == "I" and cur is not None and cur[2] == kl:
            cur[1] = i
            continue
        if cur is not None:
            spans.append(cur)
            cur = None
        if prefix is not None:
            cur = [i, i, kl]
    if cur is not None:
        spans.append(cur)
    return [Mention(f"{id_prefix}{first_id + k}", kind, label, s, e)
            for k, (s, e, (kind, label)) in enumerate(spans)]


def _find_cycle(edges):
    """Edges of one directed cycle, or None. Deterministic for a given edge order."""
    out = {}
    for e in sorted(edges, key=lambda e: (e.head_mention, e.dep_mention, e.role)):
        out.setdefault(e.head_mention, []).append(e)
    state = {}  # 1 = on stack, 2 = done
    for root in sorted(out):
        if state.get(root):
            continue
        stack = [(root, iter(out.get(root, ())))]
        path = []
        state[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
                if path:
                    path.pop()
                continue
            tgt = nxt.dep_mention
            if state.get(tgt) == 1:
                idx = next((i for i, e in enumerate(path) if e.head_mention == tgt), len(path))
                return path[idx:] + [nxt]
            if not state.get(tgt):
                state[tgt] = 1
                path.append(nxt)
                stack.append((tgt, iter(out.get(tgt, ()))))
    return None


def break_cycles(edges, trigger_ids):
    """Remove lowest-confidence trigger-to-trigger edges until no cycle remains."""
    live = list(edges)
    while True:
        cycle = _find_cycle([e for e in live if e.dep_mention in trigger_ids])
        if cycle is None:
            return live
        victim = min(cycle, key=lambda e: (e.confidence, e.head_mention, e.dep_mention, e.role))
        live.remove(victim)


def assemble_events(triggers, edges):
    """One event per trigger with surviving outgoing edges; the nesting graph is acyclic."""
    trigger_ids = {t.id for t in triggers}
    for e in edges:
        if e.head_mention not in trigger_ids:
            raise ContractError(f"edge head {e.head_mention!r} is not a trigger")
    live = break_cycles(edges, trigger_ids)
    events = []
    for t in triggers:
        args = tuple((e.role, e.dep_mention) for e in live if e.head_mention == t.id)
        if args:
            events.append(EventStructure(t.id, args))
    return events


def nesting_edges(events, trigger_ids):
    return [(ev.trigger_id, arg) for ev in events for _, arg in ev.args if arg in trigger_ids]


def is_acyclic(pairs):
    """Kahn's algorithm over (head, dependent) pairs."""
    nodes = {x for p in pairs for x in p}
    indeg = {x: 0 for x in nodes}
    out = {x: [] for x in nodes}
    for h, d in pairs:
        out[h].append(d)
        indeg[d] += 1
    queue = [x for x in nodes if indeg[x] == 0]
    seen = 0
    while queue:
        x = queue.pop()
        seen += 1
        for y in out[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                queue.append(y)
    return seen == len(nodes)
