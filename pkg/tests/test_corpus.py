import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnnbee.assembler import decode_bio
from gnnbee.corpus import (ENTITY, NONE_ROLE, TRIGGER, LabelSchema, Mention, encode_tags,
                           generate_candidate_pairs, load_standoff, loads_json_corpus,
                           dumps_json_corpus, resolve_overlaps, to_standoff, tokenize_spans)
from gnnbee.errors import AlignmentError, DanglingReferenceError, ParseError, SchemaError

from conftest import make_sentence

TXT = "TRAF2 inhibits the phosphorylation of IkB.\nIt binds p53.\n"
A1 = "T1\tProtein 0 5\tTRAF2\nT2\tProtein 38 41\tIkB\nT3\tProtein 52 55\tp53\n"
A2 = ("T4\tNegative_regulation 6 14\tinhibits\nT5\tPhosphorylation 19 34\tphosphorylation\n"
      "T6\tBinding 46 51\tbinds\n"
      "E1\tPhosphorylation:T5 Theme:T2\nE2\tNegative_regulation:T4 Theme:E1 Cause:T1\n"
      "E3\tBinding:T6 Theme:T3\nM1\tNegation E3\n")


def test_tokenize_splits_punctuation():
    text = "IL-2 (p53)."
    assert [text[a:b] for a, b in tokenize_spans(text)] == ["IL", "-", "2", "(", "p53", ")", "."]


def test_standoff_sentences_and_nesting():
    sents = load_standoff(TXT, A1, A2, doc_id="doc")
    assert len(sents) == 2
    s0 = sents[0]
    assert s0.words == ["TRAF2", "inhibits", "the", "phosphorylation", "of", "IkB", "."]
    kinds = {m.id: m.kind for m in s0.mentions}
    assert kinds == {"T1": ENTITY, "T2": ENTITY, "T4": TRIGGER, "T5": TRIGGER}
    nested = [e for e in s0.events if e.trigger_id == "T4"][0]
    # the E1 reference resolves to its trigger mention
    assert ("Theme", "T5") in nested.args and ("Cause", "T1") in nested.args
    assert sents[1].events[0].args == (("Theme", "T3"),)


def test_standoff_round_trip_preserves_offsets():
    sents = load_standoff(TXT, A1, A2, doc_id="doc")
    a1, a2 = to_standoff(sents, TXT)
    again = load_standoff(TXT, a1, a2, doc_id="doc")
    for s, t in zip(sents, again):
        assert [m.key() for m in s.mentions] == [m.key() for m in t.mentions]
        assert [(m.id, s.tokens[m.start].char_start, s.tokens[m.end].char_end) for m in s.mentions] == \
               [(m.id, t.tokens[m.start].char_start, t.tokens[m.end].char_end) for m in t.mentions]
        assert s.events == t.events
    # offsets in the written a1 are the original ones
    assert "T1\tProtein 0 5\tTRAF2" in a1


def test_standoff_misaligned_span_lists_ids():
    with pytest.raises(AlignmentError, match="T9@1-4"):
        load_standoff(TXT, "T9\tProtein 1 4\tRAF\n", "")


def test_standoff_dangling_reference():
    with pytest.raises(DanglingReferenceError):
        load_standoff(TXT, A1, "T4\tBinding 6 14\tinhibits\nE1\tBinding:T4 Theme:T99\n")


def test_standoff_bad_line_reports_line_number():
    with pytest.raises(ParseError, match="line 2"):
        load_standoff(TXT, "T1\tProtein 0 5\tTRAF2\nX1\tjunk\n", "")


def test_standoff_discontinuous_span_uses_outer_extent():
    sents = load_standoff(TXT, "T1\tProtein 0 5;6 14\tTRAF2 inhibits\n", "")
    assert sents[0].mentions[0].span == (0, 1)


def test_standoff_cross_sentence_event_dropped():
    a2 = "T6\tBinding 46 51\tbinds\nE1\tBinding:T6 Theme:T1\n"
    sents = load_standoff(TXT, A1, a2)
    assert all(not s.events for s in sents)


def test_json_round_trip(pc_sentence):
    text = dumps_json_corpus([pc_sentence])
    (back,) = loads_json_corpus(text)
    assert back.words == pc_sentence.words
    assert back.mentions == sorted(pc_sentence.mentions, key=lambda m: (m.start, m.end, m.kind, m.id))
    assert back.events == pc_sentence.events


def test_json_missing_field():
    with pytest.raises(SchemaError, match="events"):
        loads_json_corpus(json.dumps({"tokens": ["a"], "entities": [], "triggers": []}))


def test_json_invalid_line_number():
    good = json.dumps({"tokens": ["a"], "entities": [], "triggers": [], "events": []})
    with pytest.raises(ParseError, match="line 2"):
        loads_json_corpus(good + "\n{oops\n")


def test_json_dangling_argument():
    rec = {"tokens": ["a", "b"], "entities": [], "events": [{"trigger_id": "T1", "args": [["Theme", "T7"]]}],
           "triggers": [{"id": "T1", "label": "Binding", "start": 0, "end": 0}]}
    with pytest.raises(DanglingReferenceError):
        loads_json_corpus(json.dumps(rec))


def test_pc_sentence_record(pc_sentence):
    """End-to-end ingestion of a single annotated record: tags and candidate pairs."""
    tags = encode_tags(pc_sentence).tags
    assert tags == ["B-Gene_or_gene_product", "B-Negative_regulation", "O", "B-Phosphorylation", "O",
                    "B-Gene_or_gene_product", "O", "B-Cell", "I-Cell"]
    pairs = generate_candidate_pairs(pc_sentence, pc_sentence.triggers, pc_sentence.mentions)
    gold = {(p.head_mention, p.dep_mention): p.gold_role for p in pairs}
    assert gold[("T2", "T3")] == "Theme" and gold[("T2", "T1")] == "Cause"
    assert gold[("T3", "T5")] == "AtLoc" and gold[("T3", "T1")] == NONE_ROLE


@pytest.mark.parametrize("e,t", [(0, 1), (1, 1), (3, 2), (5, 3), (0, 4)])
def test_candidate_pair_count(e, t):
    mentions = [Mention(f"E{i}", ENTITY, "Protein", i, i) for i in range(e)]
    mentions += [Mention(f"T{i}", TRIGGER, "Binding", e + i, e + i) for i in range(t)]
    s = make_sentence(["w"] * (e + t), mentions)
    pairs = generate_candidate_pairs(s, s.triggers, s.mentions)
    assert len(pairs) == t * (e + t - 1)
    assert all(p.head_mention != p.dep_mention for p in pairs)


def test_adjacent_same_type_mentions():
    s = make_sentence(["p53", "MDM2"], [Mention("T1", ENTITY, "Protein", 0, 0),
                                        Mention("T2", ENTITY, "Protein", 1, 1)])
    assert encode_tags(s).tags == ["B-Protein", "B-Protein"]


def test_overlap_resolution_prefers_longer_then_entity():
    long_ = Mention("T1", TRIGGER, "Binding", 0, 1)
    short = Mention("T2", ENTITY, "Protein", 1, 1)
    kept, dropped = resolve_overlaps([short, long_])
    assert kept == [long_] and dropped == 1
    ent = Mention("T3", ENTITY, "Protein", 0, 0)
    trig = Mention("T4", TRIGGER, "Binding", 0, 0)
    assert resolve_overlaps([trig, ent])[0] == [ent]


def test_schema_rejects_shared_type():
    with pytest.raises(SchemaError):
        LabelSchema(("Protein",), ("Protein",), ())


@st.composite
def non_overlapping(draw):
    n = draw(st.integers(1, 14))
    cuts = sorted(draw(st.sets(st.integers(0, n - 1), max_size=n)))
    mentions, pos = [], 0
    for k, start in enumerate(cuts):
        if start < pos:
            continue
        end = draw(st.integers(start, min(n - 1, start + 2)))
        if any(c > start and c <= end for c in cuts):
            end = start
        kind = draw(st.sampled_from([ENTITY, TRIGGER]))
        label = draw(st.sampled_from(["A", "B"] if kind == ENTITY else ["X", "Y"]))
        mentions.append(Mention(f"T{len(mentions) + 1}", kind, label, start, end))
        pos = end + 1
    return n, mentions


@settings(max_examples=200, deadline=None)
@given(non_overlapping())
def test_bio_round_trip_property(case):
    n, mentions = case
    schema = LabelSchema(("A", "B"), ("X", "Y"), ())
    s = make_sentence(["w"] * n, mentions)
    assert decode_bio(encode_tags(s).tags, schema) == mentions


def test_single_event_standoff_file():
    (s,) = load_standoff("p53 binds", "T1\tProtein 0 3\tp53\n", "T2\tBinding 4 9\tbinds\nE1\tBinding:T2 Theme:T1\n")
    assert s.mentions[0] == Mention("T1", ENTITY, "Protein", 0, 0)
    assert s.events[0].trigger_id == "T2" and s.events[0].args == (("Theme", "T1"),)


def test_two_event_nested_file():
    text = "p53 binds and regulates"
    a2 = ("T2\tBinding 4 9\tbinds\nT3\tRegulation 14 23\tregulates\n"
          "E1\tBinding:T2 Theme:T1\nE2\tRegulation:T3 Theme:E1\n")
    (s,) = load_standoff(text, "T1\tProtein 0 3\tp53\n", a2)
    assert [e for e in s.events if e.trigger_id == "T3"][0].args == (("Theme", "T2"),)


def test_empty_json_corpus():
    assert loads_json_corpus("") == []


def test_pc_record_has_nested_events(pc_sentence):
    (s,) = loads_json_corpus(dumps_json_corpus([pc_sentence]))
    trig = {m.id for m in s.triggers}
    assert len(s.events) >= 2
    assert [(e.trigger_id, a) for e in s.events for _, a in e.args if a in trig] == [("T2", "T3")]


def test_encode_tags_examples():
    assert encode_tags(make_sentence(["a", "b"])).tags == ["O", "O"]
    s = make_sentence(list("abcd"), [Mention("T1", ENTITY, "Protein", 1, 2)])
    assert encode_tags(s).tags == ["O", "B-Protein", "I-Protein", "O"]


def test_one_trigger_two_entities_gives_two_pairs():
    ms = [Mention("T1", ENTITY, "Protein", 0, 0), Mention("T2", TRIGGER, "Binding", 1, 1),
          Mention("T3", ENTITY, "Protein", 2, 2)]
    from gnnbee.corpus import EventStructure
    s = make_sentence(["a", "b", "c"], ms, [EventStructure("T2", (("Theme", "T1"),))])
    pairs = generate_candidate_pairs(s, s.triggers, s.mentions)
    assert [(p.head_mention, p.dep_mention, p.gold_role) for p in pairs] == \
           [("T2", "T1", "Theme"), ("T2", "T3", NONE_ROLE)]


def test_every_gold_triple_appears_once():
    from gnnbee.synthetic import overfit_corpus

    for s in overfit_corpus(15, seed=4):
        pairs = generate_candidate_pairs(s, s.triggers, s.mentions)
        labelled = [(p.head_mention, p.gold_role, p.dep_mention) for p in pairs if p.gold_role != NONE_ROLE]
        gold = [(e.trigger_id, r, a) for e in s.events for r, a in e.args]
        assert sorted(labelled) == sorted(gold)
