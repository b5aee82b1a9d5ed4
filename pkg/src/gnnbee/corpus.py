"""Corpus ingestion: BioNLP standoff and JSON-lines sentences, BIO tags, candidate pairs."""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import AlignmentError, DanglingReferenceError, ParseError, SchemaError

logger = logging.getLogger(__name__)

ENTITY = "entity"
TRIGGER = "trigger"
NONE_ROLE = "NONE"
OUTSIDE = "O"

_TOKEN_RE = re.compile(r"[A-Za-z0-9]+|[^\sA-Za-z0-9]")


@dataclass(frozen=True)
class Token:
    index: int
    text: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class Mention:
    """A typed token span; ``start`` and ``end`` are inclusive token indices."""

    id: str
    kind: str
    label: str
    start: int
    end: int

    @property
    def span(self):
        return (self.start, self.end)

    def key(self):
        """Identity of the mention ignoring its id."""
        return (self.kind, self.label, self.start, self.end)

    def __len__(self):
        return self.end - self.start + 1


@dataclass(frozen=True)
class EventStructure:
    trigger_id: str
    args: tuple = ()  # of (role, arg_id)


@dataclass
class Sentence:
    tokens: list
    mentions: list = field(default_factory=list)
    events: list = field(default_factory=list)
    doc_id: str = ""
    dep_edges: Optional[list] = None  # list of depgraph.DepEdge, or None when no parse is attached

    def __len__(self):
        return len(self.tokens)

    @property
    def words(self):
        return [t.text for t in self.tokens]

    @property
    def entities(self):
        return [m for m in self.mentions if m.kind == ENTITY]

    @property
    def triggers(self):
        return [m for m in self.mentions if m.kind == TRIGGER]

    def mention(self, mention_id):
        for m in self.mentions:
            if m.id == mention_id:
                return m
        raise DanglingReferenceError(f"no mention {mention_id!r} in sentence of {self.doc_id!r}")


@dataclass
class TagSequence:
    tags: list
    dropped: int = 0

    def __len__(self):
        return len(self.tags)


@dataclass(frozen=True)
class CandidatePair:
    head_mention: str
    dep_mention: str
    gold_role: str = NONE_ROLE


@dataclass(frozen=True)
class LabelSchema:
    """Closed type inventories of a dataset.

    Entity and trigger inventories must be disjoint so a decoded tag
    determines the mention kind.
    """

    entity_types: tuple
    trigger_types: tuple
    roles: tuple

    def __post_init__(self):
        clash = set(self.entity_types) & set(self.trigger_types)
        if clash:
            raise SchemaError(f"types used as both entity and trigger: {sorted(clash)}")

    @classmethod
    def from_sentences(cls, sentences: Iterable[Sentence]) -> "LabelSchema":
        ents, trigs, roles = set(), set(), set()
        for s in sentences:
            for m in s.mentions:
                (ents if m.kind == ENTITY else trigs).add(m.label)
            for ev in s.events:
                roles.update(role for role, _ in ev.args)
        return cls(tuple(sorted(ents)), tuple(sorted(trigs)), tuple(sorted(roles)))

    @property
    def tag_vocab(self):
        tags = [OUTSIDE]
        for t in self.entity_types + self.trigger_types:
            tags += [f"B-{t}", f"I-{t}"]
        return tags

    @property
    def role_vocab(self):
        return [NONE_ROLE] + [r for r in self.roles if r != NONE_ROLE]

    def kind_of(self, label):
        if label in self.entity_types:
            return ENTITY
        if label in self.trigger_types:
            return TRIGGER
        raise KeyError(label)

    def to_dict(self):
        return {"entity_types": list(self.entity_types),
                "trigger_types": list(self.trigger_types),
                "roles": list(self.roles)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["entity_types"]), tuple(d["trigger_types"]), tuple(d["roles"]))


def tokenize_spans(text, start=0, end=None):
    """Character spans of alphanumeric runs and single punctuation marks."""
    end = len(text) if end is None else end
    return [(m.start(), m.end()) for m in _TOKEN_RE.finditer(text, start, end)]


def _mention_order(m):
    return (m.start, m.end, m.kind, m.id)


# ---------------------------------------------------------------------------
# standoff


@dataclass
class _TLine:
    id: str
    label: str
    start: int
    end: int
    lineno: int
    source: str


def _parse_offsets(chunk, lineno):
    # discontinuous "s1 e1;s2 e2" spans collapse to their outer extent
    starts, ends = [], []
    for frag in chunk.split(";"):
        parts = frag.split()
        if len(parts) != 2:
            raise ParseError(f"bad offsets {chunk!r}", lineno)
        try:
            s, e = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer offsets {chunk!r}", lineno) from None
        if s >= e:
            raise ParseError(f"empty span {s}-{e}", lineno)
        starts.append(s)
        ends.append(e)
    return min(starts), max(ends)


def _parse_standoff(content, source):
    tlines, elines = [], []
    for lineno, raw in enumerate(content.splitlines(), 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        prefix = line[0]
        if prefix in "AMNR*#":
            continue
        fields = line.split("\t")
        if prefix == "T":
            if len(fields) < 2:
                raise ParseError(f"T-line needs id and annotation fields: {line!r}", lineno)
            head = fields[1].split(" ", 1)
            if len(head) != 2:
                raise ParseError(f"T-line missing offsets: {line!r}", lineno)
            start, end = _parse_offsets(head[1], lineno)
            tlines.append(_TLine(fields[0], head[0], start, end, lineno, source))
        elif prefix == "E":
            if len(fields) < 2:
                raise ParseError(f"E-line needs id and annotation fields: {line!r}", lineno)
            items = fields[1].split()
            pairs = []
            for item in items:
                if ":" not in item:
                    raise ParseError(f"expected Role:Id, got {item!r}", lineno)
                role, ref = item.rsplit(":", 1)
                pairs.append((role, ref))
            if not pairs:
                raise ParseError("E-line without trigger", lineno)
            elines.append((fields[0], pairs[0][1], pairs[1:], lineno))
        else:
            raise ParseError(f"unrecognised annotation line {line!r}", lineno)
    return tlines, elines


def _sentence_spans(text):
    spans, pos = [], 0
    for line in text.split("\n"):
        if line.strip():
            spans.append((pos, pos + len(line)))
        pos += len(line) + 1
    return spans


def load_standoff(txt, a1="", a2="", doc_id="", sentence_spans=None, token_spans=None):
    """Build sentences from a BioNLP text plus its .a1/.a2 annotations.

    Sentences follow ``sentence_spans`` (character ranges) or one per
    non-empty line. Tokens follow ``token_spans`` or a regex split into
    alphanumeric runs and punctuation marks. Every T-line must start and
    end on token boundaries.
    """
    spans = list(sentence_spans) if sentence_spans is not None else _sentence_spans(txt)
    if token_spans is None:
        tok_spans = [tokenize_spans(txt, s, e) for s, e in spans]
    else:
        tok_spans = [[(a, b) for a, b in token_spans if a >= s and b <= e] for s, e in spans]
    sentences = []
    starts, ends = [], []
    for (s, e), tspans in zip(spans, tok_spans):
        tokens = [Token(i, txt[a:b], a, b) for i, (a, b) in enumerate(tspans)]
        sentences.append(Sentence(tokens=tokens, doc_id=doc_id))
        starts.append({t.char_start: t.index for t in tokens})
        ends.append({t.char_end: t.index for t in tokens})

    t1, e1 = _parse_standoff(a1, "a1")
    t2, e2 = _parse_standoff(a2, "a2")
    if e1:
        raise ParseError(f"event line {e1[0][0]} found in .a1", e1[0][3])
    trigger_ids = {trig for _, trig, _, _ in e2}
    event_trigger = {eid: trig for eid, trig, _, _ in e2}

    located = {}  # T-id -> sentence index
    bad = []
    for tl in t1 + t2:
        kind = TRIGGER if tl.source == "a2" and tl.id in trigger_ids else ENTITY
        for si, (s, e) in enumerate(spans):
            if s <= tl.start and tl.end <= e:
                break
        else:
            bad.append((tl.id, tl.start, tl.end))
            continue
        ts, te = starts[si].get(tl.start), ends[si].get(tl.end)
        if ts is None or te is None:
            bad.append((tl.id, tl.start, tl.end))
            continue
        sentences[si].mentions.append(Mention(tl.id, kind, tl.label, ts, te))
        located[tl.id] = si
    if bad:
        listing = ", ".join(f"{tid}@{s}-{e}" for tid, s, e in bad)
        raise AlignmentError(f"spans not on token boundaries in {doc_id or 'document'}: {listing}")

    dropped = 0
    for eid, trig, args, lineno in e2:
        if trig not in located:
            raise DanglingReferenceError(f"line {lineno}: event {eid} trigger {trig} is undefined")
        resolved = []
        for role, ref in args:
            target = event_trigger.get(ref, ref) if ref.startswith("E") else ref
            if target not in located:
                raise DanglingReferenceError(f"line {lineno}: event {eid} argument {ref} is undefined")
            resolved.append((role, target))
        si = located[trig]
        if any(located[a] != si for _, a in resolved):
            dropped += 1
            continue
        sentences[si].events.append(EventStructure(trig, tuple(resolved)))
    if dropped:
        logger.info("%s: dropped %d cross-sentence events", doc_id or "document", dropped)
    for s in sentences:
        s.mentions.sort(key=_mention_order)
    return sentences


def _mention_text(sentence, m, text):
    a, b = sentence.tokens[m.start].char_start, sentence.tokens[m.end].char_end
    if text is not None:
        return text[a:b]
    out = []
    pos = a
    for tok in sentence.tokens[m.start:m.end + 1]:
        out.append(" " * (tok.char_start - pos) + tok.text)
        pos = tok.char_end
    return "".join(out)


def to_standoff(sentences: Sequence[Sentence], text=None):
    """Serialize sentences of one document to ``(a1, a2)`` strings.

    Entities go to .a1 and triggers plus events to .a2. Arguments that
    point at a trigger with an event reference that trigger's first event.
    """
    a1, a2 = [], []
    event_lines = []
    first_event = {}
    n = 0
    for s in sentences:
        for ev in s.events:
            n += 1
            first_event.setdefault(ev.trigger_id, f"E{n}")
    n = 0
    for s in sentences:
        for m in s.mentions:
            a, b = s.tokens[m.start].char_start, s.tokens[m.end].char_end
            line = f"{m.id}\t{m.label} {a} {b}\t{_mention_text(s, m, text)}"
            (a1 if m.kind == ENTITY else a2).append(line)
        trig_label = {m.id: m.label for m in s.mentions}
        for ev in s.events:
            n += 1
            eid = f"E{n}"
            parts = [f"{trig_label[ev.trigger_id]}:{ev.trigger_id}"]
            for role, arg in ev.args:
                ref = first_event.get(arg, arg)
                if ref == eid:
                    ref = arg
                parts.append(f"{role}:{ref}")
            event_lines.append(f"{eid}\t{' '.join(parts)}")
    a2 += event_lines
    return "\n".join(a1) + ("\n" if a1 else ""), "\n".join(a2) + ("\n" if a2 else "")


# ---------------------------------------------------------------------------
# JSON lines

_REQUIRED = ("tokens", "entities", "triggers", "events")


def _require(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{where}: missing required field {key!r}")
    return obj[key]


def sentence_from_record(rec, where="record"):
    from .depgraph import DepEdge  # local import keeps corpus importable alone

    for key in _REQUIRED:
        _require(rec, key, where)
    words = rec["tokens"]
    if not isinstance(words, list) or not all(isinstance(w, str) for w in words):
        raise SchemaError(f"{where}: tokens must be a list of strings")
    spans = rec.get("char_spans")
    if spans is None:
        spans, pos = [], 0
        for w in words:
            spans.append((pos, pos + len(w)))
            pos += len(w) + 1
    if len(spans) != len(words):
        raise SchemaError(f"{where}: {len(spans)} char_spans for {len(words)} tokens")
    tokens = [Token(i, w, int(a), int(b)) for i, (w, (a, b)) in enumerate(zip(words, spans))]

    mentions = []
    for kind, key in ((ENTITY, "entities"), (TRIGGER, "triggers")):
        for item in rec[key]:
            vals = [_require(item, f, f"{where}.{key}") for f in ("id", "label", "start", "end")]
            mid, label, start, end = vals
            if not (isinstance(start, int) and isinstance(end, int) and 0 <= start <= end < len(tokens)):
                raise SchemaError(f"{where}: mention {mid!r} span ({start}, {end}) outside sentence")
            mentions.append(Mention(str(mid), kind, str(label), start, end))
    ids = [m.id for m in mentions]
    if len(set(ids)) != len(ids):
        raise SchemaError(f"{where}: duplicate mention ids")
    trig_ids = {m.id for m in mentions if m.kind == TRIGGER}
    all_ids = set(ids)

    events = []
    for ev in rec["events"]:
        tid = _require(ev, "trigger_id", f"{where}.events")
        if tid not in trig_ids:
            raise DanglingReferenceError(f"{where}: event trigger {tid!r} is not a trigger mention")
        args = []
        for pair in _require(ev, "args", f"{where}.events"):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise SchemaError(f"{where}: event argument must be [role, id], got {pair!r}")
            role, aid = pair
            if aid not in all_ids:
                raise DanglingReferenceError(f"{where}: event argument {aid!r} is undefined")
            args.append((str(role), str(aid)))
        events.append(EventStructure(tid, tuple(args)))

    dep_edges = None
    if "dep_edges" in rec and rec["dep_edges"] is not None:
        dep_edges = []
        for e in rec["dep_edges"]:
            if len(e) != 3:
                raise SchemaError(f"{where}: dep edge must be [head, dependent, rel], got {e!r}")
            dep_edges.append(DepEdge(int(e[0]), int(e[1]), str(e[2])))
    mentions.sort(key=_mention_order)
    return Sentence(tokens, mentions, events, str(rec.get("doc_id", "")), dep_edges)


def sentence_to_record(s: Sentence):
    def ment(m):
        return {"id": m.id, "label": m.label, "start": m.start, "end": m.end}

    rec = {
        "doc_id": s.doc_id,
        "tokens": s.words,
        "char_spans": [[t.char_start, t.char_end] for t in s.tokens],
        "entities": [ment(m) for m in s.entities],
        "triggers": [ment(m) for m in s.triggers],
        "events": [{"trigger_id": e.trigger_id, "args": [list(a) for a in e.args]} for e in s.events],
    }
    if s.dep_edges is not None:
        rec["dep_edges"] = [[e.head, e.dependent, e.relation] for e in s.dep_edges]
    return rec


def loads_json_corpus(text, source="<string>"):
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{source}: invalid JSON ({exc.msg})", lineno) from None
        out.append(sentence_from_record(rec, f"{source}:{lineno}"))
    return out


def load_json_corpus(path):
    """Read a JSON-lines corpus, one sentence record per line."""
    path = Path(path)
    return loads_json_corpus(path.read_text(encoding="utf-8"), str(path))


def dumps_json_corpus(sentences):
    return "".join(json.dumps(sentence_to_record(s)) + "\n" for s in sentences)


def dump_json_corpus(sentences, path):
    Path(path).write_text(dumps_json_corpus(sentences), encoding="utf-8")


# ---------------------------------------------------------------------------
# tags and pairs


def resolve_overlaps(mentions):
    """Drop mentions so the rest are token-disjoint.

    Longer spans win; on equal length an entity beats a trigger, then the
    earlier start and the smaller id. Returns ``(kept, dropped_count)``.
    """
    ranked = sorted(mentions, key=lambda m: (-len(m), m.kind != ENTITY, m.start, m.id))
    taken = set()
    kept = []
    for m in ranked:
        cells = set(range(m.start, m.end + 1))
        if cells & taken:
            continue
        taken |= cells
        kept.append(m)
    kept.sort(key=_mention_order)
    return kept, len(mentions) - len(kept)


def encode_tags(s: Sentence) -> TagSequence:
    """BIO tags over the joint entity and trigger label space."""
    kept, dropped = resolve_overlaps(s.mentions)
    if dropped:
        logger.debug("%s: dropped %d overlapping mentions", s.doc_id, dropped)
    tags = [OUTSIDE] * len(s.tokens)
    for m in kept:
        tags[m.start] = f"B-{m.label}"
        for i in range(m.start + 1, m.end + 1):
            tags[i] = f"I-{m.label}"
    return TagSequence(tags, dropped)


def generate_candidate_pairs(s: Sentence, triggers, mentions) -> list:
    """Pair every trigger with every other mention, labelled from gold events."""
    gold = {}
    for ev in s.events:
        for role, arg in ev.args:
            key = (ev.trigger_id, arg)
            if key in gold and gold[key] != role:
                logger.debug("%s: pair %s has roles %s and %s; keeping the first",
                             s.doc_id, key, gold[key], role)
            gold.setdefault(key, role)
    heads = sorted(triggers, key=_mention_order)
    deps = sorted(mentions, key=_mention_order)
    return [CandidatePair(t.id, m.id, gold.get((t.id, m.id), NONE_ROLE))
            for t in heads for m in deps if m.id != t.id]
