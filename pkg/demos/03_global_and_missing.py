"""Class assignment, global schemas, and the set difference that yields a
context's missing information.

Run from the repository root:  python3 demos/03_global_and_missing.py
"""

from pathlib import Path

from gapquest import (
    cluster_dialog_classes,
    extend_global,
    load_contexts,
    load_embeddings,
    missing_schema,
    split_hierarchy_classes,
)
from gapquest.pipeline import build_class_globals, local_schemas

TOY = Path(__file__).resolve().parent.parent / "data" / "toy"
contexts = load_contexts(TOY / "contexts.jsonl")
with open(TOY / "embeddings.txt", encoding="utf-8") as fh:
    table = load_embeddings(fh)

# Products group by their category hierarchy (a class holds at most 400
# products; oversized categories descend a level). Dialogs have no
# hierarchy, so TF-IDF + k-means groups them instead.
qa = [c for c in contexts if c.scenario == "communityQA"]
dialogs = [c for c in contexts if c.scenario == "dialog"]
assignment = split_hierarchy_classes(qa, cap=400).assignment
assignment.update(cluster_dialog_classes(dialogs, k=2, seed=0).assignment)
print("class assignment:")
for cid, klass in sorted(assignment.items()):
    print(f"  {cid:<6} -> {klass}")

# A class's global schema clusters the union of its members' schema
# elements (single-linkage at cosine > 0.6, keyphrases only) and keeps the
# top 60% of clusters by frequency.
schemas, _ = local_schemas(contexts)
globals_ = build_class_globals(contexts, assignment, table, schemas)
camera = globals_["Camera & Photo"]
print(f"\n'Camera & Photo' global schema: {len(camera.clusters)} clusters, "
      f"{camera.retained_count()} retained")
for cluster in camera.clusters:
    members = ", ".join(m.text() for m in cluster.members)
    print(f"  freq={cluster.frequency}  rep={cluster.representative.text():<14} [{members}]")

# Missing schema = retained clusters with no semantic match (cosine >= 0.8,
# any member vs any local keyphrase) in the context's own schema.
cam1 = next(c for c in contexts if c.id == "cam1")
missing = missing_schema(camera, schemas["cam1"], table)
print(f"\nmissing for {cam1.id} ({cam1.blocks[0].text!r}):")
for el in missing.elements:
    print("  ", el.to_json())

# The global view can grow without retraining anything: fold in products
# that appeared later, and the next missing schema sees the new clusters.
new_products = load_contexts(TOY / "new_products.jsonl")
new_schemas, _ = local_schemas(new_products)
extended = extend_global(camera, list(new_schemas.values()), table)
print(f"\nafter extending with {len(new_products)} new products: "
      f"{len(extended.clusters)} clusters, {extended.retained_count()} retained")
missing_after = missing_schema(extended, schemas["cam1"], table)
added = set(missing_after.keyphrases()) - set(missing.keyphrases())
print("newly missing keyphrases:", sorted(" ".join(k) for k in added))
