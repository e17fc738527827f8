"""Walk through the ingestion layer: contexts, dependency parses, and the
word-embedding primitives everything downstream matches with.

Run from the repository root:  python3 demos/01_corpus_and_embeddings.py
"""

from pathlib import Path

from gapquest import cosine, embed_phrase, load_contexts, load_embeddings

TOY = Path(__file__).resolve().parent.parent / "data" / "toy"

# The corpus is JSON-lines, one context per line. Product contexts keep
# their parses in the sidecar contexts.conllu (keyed by context id + block
# index); the dialog contexts carry theirs inline.
contexts = load_contexts(TOY / "contexts.jsonl")
print(f"{len(contexts)} contexts:",
      ", ".join(f"{c.id}[{c.scenario}/{c.split}]" for c in contexts))

# Every block of text arrives pre-parsed; nothing here runs a parser.
cam1 = next(c for c in contexts if c.id == "cam1")
print("\ncam1 blocks:")
for block, sents in zip(cam1.blocks, cam1.sentences):
    print(f"  {block.kind}: {block.text!r} ({len(sents)} parsed sentence(s))")

sent = cam1.sentences[1][0]
print("\nfirst description sentence, token by token:")
for tok in sent.tokens:
    print(f"  {tok.index:>2} {tok.surface:<14} {tok.lemma:<14} {tok.upos:<6} "
          f"{tok.xpos or '_':<4} head={tok.head} {tok.deprel}")

# Embeddings are a plain text table: word, then the vector components. The
# dimension is whatever the file says (the toy table is small on purpose).
with open(TOY / "embeddings.txt", encoding="utf-8") as fh:
    table = load_embeddings(fh)
print(f"\nembedding table: {len(table)} words, dimension {table.dimension}")

# Phrase embeddings are token averages; unknown words are skipped, and a
# phrase with no known word at all is flagged so it can never match.
for phrase in (["camcorder"], ["digital", "zoom"], ["flux", "capacitor"]):
    pv = embed_phrase(table, phrase)
    print(f"  embed {' '.join(phrase):<18} all_oov={pv.all_oov}")

# Cosine similarity underlies clustering (threshold 0.6) and schema
# matching (threshold 0.8). The toy vectors were built so camcorder~camera
# clusters while tablet~ipad matches.
pairs = [("camcorder", "camera"), ("tablet", "ipad"), ("battery", "zoom")]
for a, b in pairs:
    sim = cosine(table.get(a), table.get(b))
    print(f"  cosine({a}, {b}) = {sim:.3f}")
