"""Class-level schema aggregation and differencing.

A class's global schema is built by clustering the union of its contexts'
schema elements (single-linkage over keyphrase cosine similarity, realized
as connected components of the threshold graph) and keeping the most
frequent clusters. The missing schema of a context is the set of retained
cluster representatives with no semantic match in the context's own schema.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .embeddings import EmbeddingTable, embed_phrase, phrases_match
from .schema import Schema, SchemaElement, element_sort_key


@dataclass
class ElementCluster:
    member_counts: dict[SchemaElement, int]

    def __post_init__(self):
        if not self.member_counts:
            raise ValueError("cluster needs at least one member")

    @property
    def members(self) -> list[SchemaElement]:
        return sorted(self.member_counts, key=element_sort_key)

    @property
    def frequency(self) -> int:
        return sum(self.member_counts.values())

    @property
    def representative(self) -> SchemaElement:
        return min(self.member_counts, key=lambda el: (-self.member_counts[el], element_sort_key(el)))

    @property
    def exemplar_verb_relation(self) -> tuple[str, str] | None:
        """Most frequent (verb, relation) among triple members, for seeding
        templated prompts from missing elements."""
        pairs: Counter = Counter()
        for el, count in self.member_counts.items():
            if el.verb is not None:
                pairs[(el.verb, el.relation)] += count
        if not pairs:
            return None
        return min(pairs, key=lambda p: (-pairs[p], p))

    def keyphrases(self) -> set[tuple[str, ...]]:
        return {el.keyphrase for el in self.member_counts}

    def to_json(self) -> dict:
        obj = {
            "representative": self.representative.to_json(),
            "frequency": self.frequency,
            "members": [
                {"element": el.to_json(), "count": self.member_counts[el]}
                for el in self.members
            ],
        }
        ex = self.exemplar_verb_relation
        if ex is not None:
            obj["exemplar"] = {"verb": ex[0], "relation": ex[1]}
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "ElementCluster":
        return cls(
            member_counts={
                SchemaElement.from_json(m["element"]): m["count"] for m in obj["members"]
            }
        )


def _cluster_sort_key(cluster: ElementCluster) -> tuple:
    return (-cluster.frequency, element_sort_key(cluster.representative))


@dataclass
class GlobalSchema:
    class_id: str
    clusters: list[ElementCluster]  # frequency desc, representative asc
    retain_fraction: float = 0.6
    cluster_theta: float = 0.6

    def retained_count(self) -> int:
        return math.ceil(self.retain_fraction * len(self.clusters))

    def retained_clusters(self) -> list[ElementCluster]:
        return self.clusters[: self.retained_count()]

    def size(self) -> int:
        return self.retained_count()

    def to_json(self) -> dict:
        return {
            "class_id": self.class_id,
            "retain_fraction": self.retain_fraction,
            "cluster_theta": self.cluster_theta,
            "clusters": [c.to_json() for c in self.clusters],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GlobalSchema":
        return cls(
            class_id=obj["class_id"],
            clusters=[ElementCluster.from_json(c) for c in obj["clusters"]],
            retain_fraction=obj["retain_fraction"],
            cluster_theta=obj.get("cluster_theta", 0.6),
        )


@dataclass(frozen=True)
class MissingSchema:
    context_id: str
    elements: tuple[SchemaElement, ...]  # retained-cluster order

    def element_set(self) -> frozenset[SchemaElement]:
        return frozenset(self.elements)

    def keyphrases(self) -> list[tuple[str, ...]]:
        return [el.keyphrase for el in self.elements]

    def to_json(self) -> dict:
        return {
            "context_id": self.context_id,
            "elements": [el.to_json() for el in self.elements],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MissingSchema":
        return cls(
            context_id=obj["context_id"],
            elements=tuple(SchemaElement.from_json(e) for e in obj["elements"]),
        )


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            # anchor to the smaller index for deterministic components
            if rj < ri:
                ri, rj = rj, ri
            self.parent[rj] = ri


def aggregate_counts(
    items: Iterable[tuple[SchemaElement, int]] | Mapping[SchemaElement, int]
) -> dict[SchemaElement, int]:
    counts: Counter = Counter()
    pairs = items.items() if isinstance(items, Mapping) else items
    for el, count in pairs:
        counts[el] += count
    return dict(counts)


def cluster_keyphrases(
    element_counts: Iterable[tuple[SchemaElement, int]] | Mapping[SchemaElement, int],
    table: EmbeddingTable,
    theta: float = 0.6,
) -> list[ElementCluster]:
    """Single-linkage clustering at a fixed threshold: connected components
    of the graph with an edge whenever two keyphrases exceed `theta` cosine
    similarity. Triples are compared by keyphrase only; elements sharing a
    keyphrase are always one node. Out-of-vocabulary keyphrases never gain
    edges and stay singletons."""
    if not 0 < theta <= 1:
        raise ValueError(f"theta must be in (0, 1], got {theta}")
    counts = aggregate_counts(element_counts)
    if not counts:
        return []

    by_phrase: dict[tuple[str, ...], dict[SchemaElement, int]] = {}
    for el, count in counts.items():
        by_phrase.setdefault(el.keyphrase, {})[el] = count
    phrases = sorted(by_phrase)

    vectors = np.zeros((len(phrases), table.dimension))
    usable = np.zeros(len(phrases), dtype=bool)
    for idx, phrase in enumerate(phrases):
        pv = embed_phrase(table, phrase)
        if not pv.all_oov:
            vectors[idx] = pv.vector
            usable[idx] = True

    uf = _UnionFind(len(phrases))
    live = np.flatnonzero(usable)
    if live.size > 1:
        mat = vectors[live]
        norms = np.linalg.norm(mat, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        sims = (mat / norms) @ (mat / norms).T
        for a in range(live.size):
            for b in range(a + 1, live.size):
                if sims[a, b] > theta:
                    uf.union(int(live[a]), int(live[b]))

    groups: dict[int, dict[SchemaElement, int]] = {}
    for idx, phrase in enumerate(phrases):
        root = uf.find(idx)
        bucket = groups.setdefault(root, {})
        for el, count in by_phrase[phrase].items():
            bucket[el] = bucket.get(el, 0) + count

    clusters = [ElementCluster(member_counts=g) for g in groups.values()]
    clusters.sort(key=_cluster_sort_key)
    return clusters


def schema_element_counts(locals_: Sequence[Schema]) -> dict[SchemaElement, int]:
    """Element frequencies with set semantics: each context contributes one
    count per element it contains."""
    counts: Counter = Counter()
    for schema in locals_:
        for el in schema.elements:
            counts[el] += 1
    return dict(counts)


def build_global_schema(
    class_id: str,
    locals_: Sequence[Schema],
    table: EmbeddingTable,
    theta: float = 0.6,
    retain: float = 0.6,
    counts: Mapping[SchemaElement, int] | None = None,
) -> GlobalSchema:
    """Union the class's local schemata, cluster, and keep the top `retain`
    fraction of clusters by frequency. `counts` overrides the default
    once-per-context frequency semantics (e.g. raw per-sentence counts)."""
    if not locals_:
        raise ValueError(f"class {class_id!r} has no contexts")
    if not 0 < retain <= 1:
        raise ValueError(f"retain must be in (0, 1], got {retain}")
    if counts is None:
        counts = schema_element_counts(locals_)
    clusters = cluster_keyphrases(counts, table, theta=theta)
    return GlobalSchema(
        class_id=class_id,
        clusters=clusters,
        retain_fraction=retain,
        cluster_theta=theta,
    )


def missing_schema(
    global_schema: GlobalSchema,
    local: Schema,
    table: EmbeddingTable,
    match_theta: float = 0.8,
) -> MissingSchema:
    """Set difference between the retained global clusters and the local
    schema: a cluster is covered when any of its member keyphrases matches
    any local keyphrase at `match_theta` or above; the representatives of
    the uncovered clusters are the missing elements."""
    retained = global_schema.retained_clusters()
    if not retained:
        raise ValueError(f"global schema {global_schema.class_id!r} has no retained clusters")
    local_phrases = local.keyphrases()
    missing = []
    for cluster in retained:
        covered = any(
            phrases_match(table, member_kp, local_kp, match_theta)
            for member_kp in sorted(cluster.keyphrases())
            for local_kp in local_phrases
        )
        if not covered:
            missing.append(cluster.representative)
    return MissingSchema(context_id=local.source, elements=tuple(missing))


def extend_global(
    global_schema: GlobalSchema,
    new_locals: Sequence[Schema],
    table: EmbeddingTable,
    class_id: str | None = None,
    counts: Mapping[SchemaElement, int] | None = None,
) -> GlobalSchema:
    """Fold new contexts of the same class into an existing global schema
    without rebuilding it: an element joins the most similar existing
    cluster when any member keyphrase exceeds the cluster threshold,
    otherwise the leftovers form new clusters. Frequencies and pruning are
    recomputed; no model retraining is involved."""
    if class_id is not None and class_id != global_schema.class_id:
        raise ValueError(
            f"class mismatch: schema is {global_schema.class_id!r}, contexts are {class_id!r}"
        )
    if not new_locals:
        return GlobalSchema(
            class_id=global_schema.class_id,
            clusters=[ElementCluster(dict(c.member_counts)) for c in global_schema.clusters],
            retain_fraction=global_schema.retain_fraction,
            cluster_theta=global_schema.cluster_theta,
        )
    if counts is None:
        counts = schema_element_counts(new_locals)
    theta = global_schema.cluster_theta

    phrase_home: dict[tuple[str, ...], int] = {}
    for pos, cluster in enumerate(global_schema.clusters):
        for kp in cluster.keyphrases():
            phrase_home[kp] = pos

    updated = [dict(c.member_counts) for c in global_schema.clusters]
    leftovers: dict[SchemaElement, int] = {}
    for el in sorted(counts, key=element_sort_key):
        count = counts[el]
        if el.keyphrase in phrase_home:
            home = phrase_home[el.keyphrase]
        else:
            pv = embed_phrase(table, el.keyphrase)
            best: tuple[float, int] | None = None
            if not pv.all_oov:
                for pos, cluster in enumerate(global_schema.clusters):
                    for kp in sorted(cluster.keyphrases()):
                        sim = _phrase_cosine(table, pv.vector, kp)
                        if sim > theta and (best is None or sim > best[0]):
                            best = (sim, pos)
            if best is None:
                leftovers[el] = leftovers.get(el, 0) + count
                continue
            home = best[1]
            phrase_home[el.keyphrase] = home
        updated[home][el] = updated[home].get(el, 0) + count

    clusters = [ElementCluster(member_counts=mc) for mc in updated]
    if leftovers:
        clusters.extend(cluster_keyphrases(leftovers, table, theta=theta))
    clusters.sort(key=_cluster_sort_key)
    return GlobalSchema(
        class_id=global_schema.class_id,
        clusters=clusters,
        retain_fraction=global_schema.retain_fraction,
        cluster_theta=theta,
    )


def _phrase_cosine(table: EmbeddingTable, vec: np.ndarray, phrase: tuple[str, ...]) -> float:
    other = embed_phrase(table, phrase)
    if other.all_oov:
        return 0.0
    nu = float(np.linalg.norm(vec))
    nv = float(np.linalg.norm(other.vector))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(vec, other.vector) / (nu * nv))
