"""From BioNLP standoff annotations to the tagger and pair-classifier targets.

A document is a text plus .a1 (entities) and .a2 (triggers and events).
We load it, look at the BIO tags the tagger is trained on, and at the
candidate (trigger, mention) pairs the role classifier scores.
"""
from gnnbee.corpus import encode_tags, generate_candidate_pairs, load_standoff, to_standoff

text = "TRAF2 inhibits the phosphorylation of IkB in Jurkat cells.\n"
a1 = ("T1\tGene_or_gene_product 0 5\tTRAF2\n"
      "T2\tGene_or_gene_product 38 41\tIkB\n"
      "T3\tCell 45 57\tJurkat cells\n")
a2 = ("T4\tNegative_regulation 6 14\tinhibits\n"
      "T5\tPhosphorylation 19 34\tphosphorylation\n"
      "E1\tPhosphorylation:T5 Theme:T2 AtLoc:T3\n"
      "E2\tNegative_regulation:T4 Theme:E1 Cause:T1\n")

(sentence,) = load_standoff(text, a1, a2, doc_id="demo")

# The nested event E2 takes the whole E1 event as its Theme; internally the
# argument points at E1's trigger mention T5.
for ev in sentence.events:
    print(ev.trigger_id, ev.args)

# Entities and triggers share one BIO tag space.
for word, tag in zip(sentence.words, encode_tags(sentence).tags):
    print(f"{word:16s} {tag}")

# Every trigger is paired with every other mention; unrelated pairs get NONE.
pairs = generate_candidate_pairs(sentence, sentence.triggers, sentence.mentions)
print(f"{len(pairs)} candidate pairs")
for p in pairs:
    print(f"  {p.head_mention} -> {p.dep_mention}: {p.gold_role}")

# Writing back gives the same character offsets.
new_a1, new_a2 = to_standoff([sentence], text)
print(new_a1 + new_a2)
