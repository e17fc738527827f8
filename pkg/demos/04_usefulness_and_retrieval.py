"""Label questions for usefulness, train the linear scorer, and retrieve +
re-rank clarification questions for a context's missing schema.

Run from the repository root:  python3 demos/04_usefulness_and_retrieval.py
"""

import json
from pathlib import Path

from gapquest import (
    binarize_scores,
    build_index,
    cluster_dialog_classes,
    load_contexts,
    load_embeddings,
    make_negative_samples,
    missing_schema,
    rerank_useful,
    retrieve,
    split_hierarchy_classes,
    train_usefulness,
    usefulness_score,
)
from gapquest.pipeline import build_class_globals, local_schemas

TOY = Path(__file__).resolve().parent.parent / "data" / "toy"
contexts = load_contexts(TOY / "contexts.jsonl")
with open(TOY / "embeddings.txt", encoding="utf-8") as fh:
    table = load_embeddings(fh)

# Two ways to get binary usefulness labels:
#  1. human scores in [0,5], split at 3 (product questions);
#  2. negative sampling: every true (context, question) pair is positive,
#     a question from another context is its negative (dialog style).
scores = [
    (row["question"], row["score"])
    for row in map(json.loads, (TOY / "scores.jsonl").read_text().splitlines())
]
human = binarize_scores(scores)
print("binarized human scores:", [(l.question[:28], l.label) for l in human[:4]])

pairs = [(c.id, c.target.text) for c in contexts if c.target]
sampled = make_negative_samples(pairs, seed=0)
print(f"negative sampling: {len(pairs)} pairs -> {len(sampled)} labeled "
      f"({sum(l.label for l in sampled)} positive)")

# The model is a linear separator over averaged question-token embeddings,
# trained by seeded SGD on the hinge objective: deterministic end to end.
model = train_usefulness(human, table)
print(f"trained: final objective {model.loss_history[-1]:.4f}")
for q in ("Do the speakers include a mounting bracket?", "Is it good?"):
    print(f"  usefulness({q!r}) = {usefulness_score(model, q, table):.3f}")

# Retrieval: index the train-split questions by their schemas, then rank by
# how many question elements talk about the query context's missing schema.
qa = [c for c in contexts if c.scenario == "communityQA"]
dialogs = [c for c in contexts if c.scenario == "dialog"]
assignment = split_hierarchy_classes(qa, cap=400).assignment
assignment.update(cluster_dialog_classes(dialogs, k=2, seed=0).assignment)
schemas, _ = local_schemas(contexts)
globals_ = build_class_globals(contexts, assignment, table, schemas)

index = build_index(
    [(assignment[c.id], c.target) for c in contexts if c.target and c.split == "train"]
)
cam1_missing = missing_schema(globals_[assignment["cam1"]], schemas["cam1"], table)
print(f"\ncam1 missing keyphrases: {[' '.join(k) for k in cam1_missing.keyphrases()]}")

candidates = retrieve(index, cam1_missing, table, k=3)
reranked = rerank_useful(candidates, model, table, alpha=0.5)
print("\nretrieved and re-ranked (combined = 0.5*overlap + 0.5*usefulness):")
for cand in reranked:
    print(f"  {cand.combined:.3f}  overlap={cand.overlap}  "
          f"useful={cand.usefulness:.2f}  {cand.question}")
    for q_el, m_el in cand.trace:
        print(f"      {q_el.text()!r} answers missing {m_el.text()!r}")
