"""TI / TC / AI / AC precision, recall and F1, micro-averaged over a corpus."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import AlignmentError

SUBTASKS = ("TI", "TC", "AI", "AC")


def prf(tp, fp, fn):
    """Precision, recall, F1 as fractions; zero denominators give 0."""
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def total(f1s):
    """Mean of the four F1 percentages, to 2 decimals."""
    f1s = list(f1s)
    if len(f1s) != 4:
        raise ValueError(f"expected four F1 values, got {len(f1s)}")
    return round(sum(f1s) / 4, 2)


@dataclass(frozen=True)
class Counts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other):
        return Counts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    @property
    def scores(self):
        """(P, R, F1) in percent."""
        return tuple(100.0 * x for x in prf(self.tp, self.fp, self.fn))


@dataclass(frozen=True)
class MetricsReport:
    counts: dict  # subtask -> Counts

    def precision(self, task):
        return self.counts[task].scores[0]

    def recall(self, task):
        return self.counts[task].scores[1]

    def f1(self, task):
        return self.counts[task].scores[2]

    @property
    def total(self):
        return sum(self.f1(t) for t in SUBTASKS) / 4

    def to_dict(self):
        out = {}
        for t in SUBTASKS:
            p, r, f = self.counts[t].scores
            c = self.counts[t]
            out[t] = {"precision": round(p, 2), "recall": round(r, 2), "f1": round(f, 2),
                      "tp": c.tp, "fp": c.fp, "fn": c.fn}
        out["total"] = round(self.total, 2)
        return out


def sentence_items(s):
    """Scored items of one sentence, keyed by subtask, in document order."""
    trig = sorted(s.triggers, key=lambda m: (m.start, m.end, m.id))
    items = {"TI": [m.span for m in trig], "TC": [(m.span, m.label) for m in trig],
             "AI": [], "AC": []}
    for ev in s.events:
        etype = s.mention(ev.trigger_id).label
        for role, arg in ev.args:
            span = s.mention(arg).span
            items["AI"].append((etype, span))
            items["AC"].append((etype, span, role))
    return items


def greedy_matches(gold, pred):
    """Count one-to-one matches; each prediction takes the first unused equal gold item."""
    used = [False] * len(gold)
    tp = 0
    for p in pred:
        for i, g in enumerate(gold):
            if not used[i] and g == p:
                used[i] = True
                tp += 1
                break
    return tp


def _check_aligned(gold, pred):
    if len(gold) != len(pred):
        raise AlignmentError(f"{len(gold)} gold sentences but {len(pred)} predicted")
    for i, (g, p) in enumerate(zip(gold, pred)):
        if g.doc_id != p.doc_id or len(g.tokens) != len(p.tokens):
            raise AlignmentError(
                f"sentence {i}: gold ({g.doc_id!r}, {len(g.tokens)} tokens) vs "
                f"pred ({p.doc_id!r}, {len(p.tokens)} tokens)")


def sentence_counts(g, p):
    gi, pi = sentence_items(g), sentence_items(p)
    out = {}
    for t in SUBTASKS:
        tp = greedy_matches(gi[t], pi[t])
        out[t] = Counts(tp, len(pi[t]) - tp, len(gi[t]) - tp)
    return out


def score(gold, pred) -> MetricsReport:
    """Micro-averaged metrics over sentence-aligned gold and predicted corpora."""
    _check_aligned(gold, pred)
    acc = {t: Counts() for t in SUBTASKS}
    for g, p in zip(gold, pred):
        for t, c in sentence_counts(g, p).items():
            acc[t] = acc[t] + c
    return MetricsReport(acc)


def to_markdown(rows):
    """Table of ``(model name, MetricsReport)`` rows with TI/TC/AI/AC F1 and total."""
    lines = ["| Model | TI | TC | AI | AC | total |", "|---|---|---|---|---|---|"]
    for name, rep in rows:
        cells = [f"{rep.f1(t):.2f}" for t in SUBTASKS] + [f"{rep.total:.2f}"]
        lines.append(f"| {name} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def to_markdown_detail(report):
    lines = ["| Subtask | P | R | F1 |", "|---|---|---|---|"]
    for t in SUBTASKS:
        p, r, f = report.counts[t].scores
        lines.append(f"| {t} | {p:.2f} | {r:.2f} | {f:.2f} |")
    lines.append(f"| total | | | {report.total:.2f} |")
    return "\n".join(lines) + "\n"
