"""Score generated questions with the automatic metrics and run the
robustness / length analyses.

Run from the repository root:  python3 demos/05_evaluation_and_analysis.py
"""

from pathlib import Path

from gapquest import (
    bleu4,
    bleu4_sentence,
    build_index,
    cluster_dialog_classes,
    distinct2,
    length_stats,
    load_contexts,
    load_embeddings,
    meteor_lite,
    missinfo_overlap,
    missing_schema,
    retrieve,
    robustness_report,
    split_hierarchy_classes,
)
from gapquest.pipeline import build_class_globals, local_schemas

TOY = Path(__file__).resolve().parent.parent / "data" / "toy"
contexts = load_contexts(TOY / "contexts.jsonl")
with open(TOY / "embeddings.txt", encoding="utf-8") as fh:
    table = load_embeddings(fh)

# Rebuild the pipeline pieces and generate: top-1 retrieval per test context.
qa = [c for c in contexts if c.scenario == "communityQA"]
dialogs = [c for c in contexts if c.scenario == "dialog"]
assignment = split_hierarchy_classes(qa, cap=400).assignment
assignment.update(cluster_dialog_classes(dialogs, k=2, seed=0).assignment)
schemas, _ = local_schemas(contexts)
globals_ = build_class_globals(contexts, assignment, table, schemas)
index = build_index(
    [(assignment[c.id], c.target) for c in contexts if c.target and c.split == "train"]
)

test_contexts = [c for c in contexts if c.split == "test"]
outputs, references, missing_list = [], [], []
for ctx in test_contexts:
    missing = missing_schema(globals_[assignment[ctx.id]], schemas[ctx.id], table)
    (top,) = retrieve(index, missing, table, k=1)
    outputs.append(top.question)
    references.append([ctx.target.text])
    missing_list.append(missing)
    print(f"{ctx.id}: generated {top.question!r}   (reference {ctx.target.text!r})")

# Corpus metrics. BLEU-4 needs shared 4-grams, so retrieval usually scores
# low here; METEOR's stem-level alignment is more forgiving; Distinct-2
# rewards retrieval for returning diverse human questions.
print(f"\nBLEU-4            {bleu4(outputs, references):7.2f}   (0-100)")
print(f"METEOR            {meteor_lite(outputs, references):7.3f}   (0-1)")
print(f"Distinct-2        {distinct2(outputs):7.3f}   (0-1)")

# How much of each question talks about genuinely missing information: the
# share of its keyphrases that match the context's missing schema.
print(f"missing-info overlap {missinfo_overlap(outputs, missing_list, table):6.1f}%")

# Robustness: split examples at the median context length and the median
# global-schema size; small per-group gaps mean generation quality does not
# hinge on how much information was available.
per_example = [bleu4_sentence(out, refs) for out, refs in zip(outputs, references)]
report = robustness_report(per_example, test_contexts, globals_, assignment)
for key in ("by_context_length", "by_global_schema_size"):
    part = report[key]
    print(f"{key}: low={part['low_mean']:.2f} high={part['high_mean']:.2f} "
          f"diff={part['diff']:.2f}")

# Question length, overall and against the usefulness labels of the toy
# annotation file (useful questions tend to run longer).
import json

rows = [json.loads(line) for line in (TOY / "scores.jsonl").read_text().splitlines()]
stats = length_stats(
    [r["question"] for r in rows],
    labels=[1 if r["score"] >= 3 else 0 for r in rows],
)
print(f"\nquestion lengths: mean={stats['mean']:.2f} median={stats['median']:.1f}")
for label, group in stats["by_label"].items():
    print(f"  label {label}: mean={group['mean']:.2f} over {group['count']} questions")
