"""From a parsed sentence to schema elements: statistical keyphrases, tree
node merging, and verb-relation triples.

Run from the repository root:  python3 demos/02_keyphrases_and_schemas.py
"""

from pathlib import Path

from gapquest import extract_keyphrases, extract_sentence_schema, load_contexts
from gapquest.pipeline import context_keyphrases, context_schema

TOY = Path(__file__).resolve().parent.parent / "data" / "toy"
contexts = load_contexts(TOY / "contexts.jsonl")

# The running example: a prior buyer question on the laptop-bag product.
bag1 = next(c for c in contexts if c.id == "bag1")
question = bag1.sentences[2][0]
print("sentence:", question.text)

# Keyphrases are unigrams/bigrams scored by corpus-free statistics (casing,
# position, frequency, context relatedness, sentence spread). Lower score =
# more important, and every phrase must contain a noun.
phrases = extract_keyphrases([question], top_k=5)
for p in phrases:
    print(f"  {p.text():<16} score={p.score:.4f}")

# Each keyphrase becomes one schema element. Bigrams first collapse into a
# single tree node; then the nearest verb ancestor supplies the verb, and
# the verb's immediate child on the path supplies the relation:
#
#   bag  --nsubj-->  hold            => (bag, hold, nsubj)
#   [gaming laptop]  --obj--> hold   => (gaming laptop, hold, obj)
#   iPad --conj--> laptop --obj--> hold  => (iPad, hold, obj)
schema = extract_sentence_schema(question, phrases)
print("\nschema elements:")
for el in schema:
    if el.kind == "triple":
        print(f"  ({el.text()}, {el.verb}, {el.relation})")
    else:
        print(f"  {el.text()}  [bare]")

# A context's local schema is the deduplicated union over its sentences.
local, raw = context_schema(bag1)
print(f"\nlocal schema of {bag1.id}: {len(local)} elements")
for el in local:
    print("  ", el.to_json())

# The per-sentence phrase assignment is also available on its own.
per_sentence = context_keyphrases(bag1)
print("\nphrases per sentence:", [[p.text() for p in ps] for ps in per_sentence])
