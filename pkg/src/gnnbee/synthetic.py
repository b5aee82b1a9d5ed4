"""Seeded synthetic corpora with dependency parses, for offline training runs."""
from __future__ import annotations

import numpy as np

from .corpus import ENTITY, TRIGGER, EventStructure, Mention, Sentence, Token
from .depgraph import DepEdge

ENTITY_WORDS = {
    "Protein": ["p53", "STAT3", "TRAF2", "IkB", "BRCA1", "MDM2"],
    "Chemical": ["ATP", "cisplatin", "glucose", "calcium"],
    "Cell": ["lymphocytes", "macrophages", "fibroblasts"],
    "Gene": ["IL2", "TP53", "EGFR", "MYC"],
}
MULTI_WORD = {"Cell": [("Jurkat", "clones")], "Protein": [("nuclear", "kinase")]}
TRIGGER_WORDS = {
    "Phosphorylation": ["phosphorylates", "phosphorylation"],
    "Binding": ["binds", "binding", "complexes"],
    "Regulation": ["regulates", "inhibits", "controls"],
}
FILLERS = ["the", "of", "in", "was", "and", "with", "by", "a", "to", "we", "observed", "strongly",
           "after", "that", "this", "which"]
ROLE_BY_TYPE = {"Protein": "Theme", "Gene": "Theme", "Chemical": "Cause", "Cell": "Site"}


def _pick(rng, seq):
    return seq[int(rng.integers(len(seq)))]


def _assemble(doc_id, words, mentions, events, edges):
    tokens, pos = [], 0
    for i, w in enumerate(words):
        tokens.append(Token(i, w, pos, pos + len(w)))
        pos += len(w) + 1
    mentions = sorted(mentions, key=lambda m: (m.start, m.end, m.kind, m.id))
    return Sentence(tokens, mentions, events, doc_id, edges)


def _place(rng, units):
    """Shuffle units (each a list of words with a payload) into a flat word list."""
    order = rng.permutation(len(units))
    words, starts = [], {}
    for k in order:
        starts[k] = len(words)
        words.extend(units[k][0])
    return words, starts


def _random_tree(rng, n, root, fixed=None, forbid=None):
    """Random spanning tree over ``range(n)`` as ``{child: parent}``.

    ``fixed`` pins some parents; ``forbid`` maps nodes to parents they may not take.
    """
    fixed = dict(fixed or {})
    forbid = forbid or {}
    parent = dict(fixed)
    attached = {root}
    pending = [v for v in rng.permutation(n).tolist() if v != root]
    while pending:
        progressed = False
        for v in list(pending):
            if v in fixed:
                if fixed[v] in attached:
                    attached.add(v)
                    pending.remove(v)
                    progressed = True
                continue
            options = sorted(u for u in attached if u not in forbid.get(v, ()))
            if options:
                parent[v] = options[int(rng.integers(len(options)))]
                attached.add(v)
                pending.remove(v)
                progressed = True
        if not progressed:
            raise RuntimeError("cannot complete the tree under the given constraints")
    return parent


def overfit_corpus(n_sentences=20, seed=0):
    """Sentences with 4 entity types, 3 trigger types, 3 roles and some nested events.

    Each non-Regulation trigger takes the entities of its clause as arguments
    with a role fixed by entity type; a Regulation trigger takes the other
    trigger as Theme. Parses attach arguments to their trigger.
    """
    rng = np.random.default_rng(seed)
    ent_types = list(ENTITY_WORDS)
    out = []
    for si in range(n_sentences):
        nested = si % 3 == 0
        units = []  # (words, kind, label)
        inner_type = ["Phosphorylation", "Binding"][int(rng.integers(2))]
        units.append(([_pick(rng, TRIGGER_WORDS[inner_type])], TRIGGER, inner_type))
        if nested:
            units.append(([_pick(rng, TRIGGER_WORDS["Regulation"])], TRIGGER, "Regulation"))
        for _ in range(int(rng.integers(2, 4))):
            et = ent_types[int(rng.integers(len(ent_types)))]
            if et in MULTI_WORD and rng.random() < 0.3:
                words = list(MULTI_WORD[et][0])
            else:
                words = [_pick(rng, ENTITY_WORDS[et])]
            units.append((words, ENTITY, et))
        for _ in range(int(rng.integers(2, 5))):
            units.append(([_pick(rng, FILLERS)], None, None))
        words, starts = _place(rng, units)
        mentions, head_tok = [], {}
        for k, (ws, kind, label) in enumerate(units):
            head_tok[k] = starts[k]
            if kind is not None:
                mentions.append(Mention(f"T{k + 1}", kind, label, starts[k], starts[k] + len(ws) - 1))
        args = [(ROLE_BY_TYPE[label], f"T{k + 1}")
                for k, (_, kind, label) in enumerate(units) if kind == ENTITY]
        events = [EventStructure("T1", tuple(args))]
        if nested:
            events.append(EventStructure("T2", (("Theme", "T1"),)))
        # parse: inner trigger is root; entities hang off it; multiword second token off the first
        n = len(words)
        fixed = {}
        for k, (ws, kind, _) in enumerate(units):
            if kind == ENTITY:
                fixed[head_tok[k]] = head_tok[0]
            if kind == TRIGGER and k == 1:
                fixed[head_tok[k]] = head_tok[0]
            for off in range(1, len(ws)):
                fixed[starts[k] + off] = starts[k]
        parent = _random_tree(rng, n, head_tok[0], fixed)
        edges = [DepEdge(p, c, "dep") for c, p in sorted(parent.items())]
        out.append(_assemble(f"overfit-{seed}-{si}", words, mentions, events, edges))
    return out


def _leveled_tree(rng, trig, adjacent, bystanders, fillers, min_distance):
    """Tree rooted at ``trig`` whose children are the ``adjacent`` leaves plus one filler.

    Every bystander sits at least ``min_distance`` arcs from the trigger.
    Returns ``{child: parent}``.
    """
    parent, level = {}, {trig: 0}
    fillers = list(fillers)
    prev = trig
    for depth in range(1, min_distance):  # filler chain reaching the bystander zone
        f = fillers.pop()
        parent[f], level[f] = prev, depth
        prev = f
    for a in adjacent:
        parent[a], level[a] = trig, 1
    for f in fillers:
        options = sorted(v for v in level if v != trig and v not in adjacent)
        p = options[int(rng.integers(len(options)))]
        parent[f], level[f] = p, level[p] + 1
    for b in bystanders:
        options = sorted(v for v in level if level[v] >= min_distance - 1 and v != trig)
        p = options[int(rng.integers(len(options)))]
        parent[b], level[b] = p, level[p] + 1
    return parent


def graph_signal_corpus(n_sentences=200, seed=0, n_entities=4, n_fillers=(4, 7), adjacent=(1, 2),
                        min_distance=2):
    """Role of each (trigger, entity) pair is Theme iff a dependency edge joins them.

    One trigger per sentence. Word choice and token order are random, so
    only the parse tells arguments apart from bystander entities, which sit
    at least ``min_distance`` arcs from the trigger.
    """
    if n_fillers[0] < min_distance - 1:
        raise ValueError("too few fillers to place bystanders that far away")
    rng = np.random.default_rng(seed)
    ent_types = list(ENTITY_WORDS)
    trig_types = list(TRIGGER_WORDS)
    out = []
    for si in range(n_sentences):
        tt = _pick(rng, trig_types)
        units = [([_pick(rng, TRIGGER_WORDS[tt])], TRIGGER, tt)]
        for _ in range(n_entities):
            et = _pick(rng, ent_types)
            units.append(([_pick(rng, ENTITY_WORDS[et])], ENTITY, et))
        for _ in range(int(rng.integers(n_fillers[0], n_fillers[1] + 1))):
            units.append(([_pick(rng, FILLERS)], None, None))
        words, starts = _place(rng, units)
        ent_idx = list(range(1, n_entities + 1))
        n_adj = int(rng.integers(adjacent[0], adjacent[1] + 1))
        chosen = sorted(int(k) for k in rng.permutation(ent_idx)[:n_adj])
        others = [starts[k] for k in rng.permutation(ent_idx).tolist() if k not in chosen]
        filler_tok = [starts[k] for k in rng.permutation(range(n_entities + 1, len(units))).tolist()]
        parent = _leveled_tree(rng, starts[0], [starts[k] for k in chosen], others, filler_tok,
                               min_distance)
        edges = [DepEdge(p, c, "dep") for c, p in sorted(parent.items())]
        mentions = [Mention(f"T{k + 1}", kind, label, starts[k], starts[k])
                    for k, (_, kind, label) in enumerate(units) if kind is not None]
        args = tuple(("Theme", f"T{k + 1}") for k in chosen)
        out.append(_assemble(f"graph-{seed}-{si}", words, mentions,
                             [EventStructure("T1", args)], edges))
    return out
