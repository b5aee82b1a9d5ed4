"""Independent reference implementations used by the tests."""
import itertools

from gnnbee.scorer import SUBTASKS


def max_matching(gold, pred):
    """Largest number of equal (gold, pred) pairs over all one-to-one matchings, by enumeration."""
    if len(pred) > len(gold):
        gold, pred = pred, gold
    best = 0
    for perm in itertools.permutations(range(len(gold)), len(pred)):
        best = max(best, sum(1 for p, g in zip(pred, perm) if gold[g] == p))
    return best


def items(sentence):
    """Scored items written out straight from the subtask definitions."""
    by_id = {m.id: m for m in sentence.mentions}
    trig = [m for m in sentence.mentions if m.kind == "trigger"]
    out = {"TI": [(m.start, m.end) for m in trig], "TC": [((m.start, m.end), m.label) for m in trig],
           "AI": [], "AC": []}
    for ev in sentence.events:
        t = by_id[ev.trigger_id]
        for role, arg in ev.args:
            a = by_id[arg]
            out["AI"].append((t.label, (a.start, a.end)))
            out["AC"].append((t.label, (a.start, a.end), role))
    return out


def brute_force_counts(gold_sents, pred_sents):
    counts = {t: [0, 0, 0] for t in SUBTASKS}
    for g, p in zip(gold_sents, pred_sents):
        gi, pi = items(g), items(p)
        for t in SUBTASKS:
            tp = max_matching(gi[t], pi[t])
            counts[t][0] += tp
            counts[t][1] += len(pi[t]) - tp
            counts[t][2] += len(gi[t]) - tp
    return {t: tuple(v) for t, v in counts.items()}


def reaches(pairs, src, dst):
    seen, stack = set(), [src]
    while stack:
        x = stack.pop()
        if x == dst:
            return True
        if x not in seen:
            seen.add(x)
            stack.extend(d for h, d in pairs if h == x)
    return False


def has_cycle(nodes, pairs):
    """Depth-first reachability check: does any node reach itself?"""
    succ = {n: [d for h, d in pairs if h == n] for n in nodes}
    for start in nodes:
        seen, stack = set(), list(succ[start])
        while stack:
            x = stack.pop()
            if x == start:
                return True
            if x not in seen:
                seen.add(x)
                stack.extend(succ.get(x, ()))
    return False


def random_instance(rng, n_tokens=6, max_mentions=5, max_events=3):
    """Random gold or predicted sentence with at most ``max_mentions`` mentions."""
    from gnnbee.corpus import ENTITY, TRIGGER, EventStructure, Mention
    from conftest import make_sentence

    mentions = []
    for k in range(int(rng.integers(0, max_mentions + 1))):
        s = int(rng.integers(0, n_tokens))
        e = min(n_tokens - 1, s + int(rng.integers(0, 2)))
        kind = TRIGGER if rng.random() < 0.5 else ENTITY
        label = ["X", "Y"][int(rng.integers(2))] if kind == TRIGGER else "P"
        mentions.append(Mention(f"T{k + 1}", kind, label, s, e))
    trig = [m for m in mentions if m.kind == TRIGGER]
    events = []
    for _ in range(int(rng.integers(0, max_events + 1)) if trig else 0):
        t = trig[int(rng.integers(len(trig)))]
        others = [m for m in mentions if m.id != t.id]
        args = []
        for _ in range(int(rng.integers(1, 3)) if others else 0):
            a = others[int(rng.integers(len(others)))]
            args.append((["Theme", "Cause"][int(rng.integers(2))], a.id))
        events.append(EventStructure(t.id, tuple(args)))
    return make_sentence(["w"] * n_tokens, mentions, events)


def random_pair(rng, **kwargs):
    """A gold sentence and a prediction derived from it by random edits.

    Edits relabel or shift mentions, change or drop roles, drop events and
    add spurious events, so matches, near misses and duplicates all occur.
    """
    from gnnbee.corpus import EventStructure, Mention
    from conftest import make_sentence

    gold = random_instance(rng, **kwargs)
    if rng.random() < 0.2:
        return gold, random_instance(rng, **kwargs)
    n = len(gold.tokens)
    mentions = []
    for m in gold.mentions:
        r = rng.random()
        if r < 0.1:
            m = Mention(m.id, m.kind, "Y" if m.label == "X" else ("X" if m.kind == "trigger" else m.label),
                        m.start, m.end)
        elif r < 0.2:
            s = min(n - 1, m.start + 1)
            m = Mention(m.id, m.kind, m.label, s, max(s, m.end))
        mentions.append(m)
    events = []
    for ev in gold.events:
        if rng.random() < 0.15:
            continue
        args = []
        for role, arg in ev.args:
            r = rng.random()
            if r < 0.15:
                continue
            if r < 0.3:
                role = "Cause" if role == "Theme" else "Theme"
            args.append((role, arg))
        events.append(EventStructure(ev.trigger_id, tuple(args)))
    ids = {m.id for m in mentions}
    trigger_ids = {m.id for m in mentions if m.kind == "trigger"}
    for e in random_instance(rng, **kwargs).events:  # spurious events over the same mention ids
        if rng.random() < 0.3 and e.trigger_id in trigger_ids and all(a in ids for _, a in e.args):
            events.append(e)
    return gold, make_sentence(["w"] * n, mentions, events)
