"""Grouping contexts into classes: category-hierarchy splitting with a size
cap for product corpora, TF-IDF + k-means clustering for dialog corpora."""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corpus import Context
from .keyphrase import default_stopwords
from .textutil import is_punct

log = logging.getLogger(__name__)

UNCATEGORIZED = "uncategorized"


@dataclass
class TfIdfVector:
    doc_id: str
    weights: dict[str, float]


@dataclass
class ClassAssignment:
    assignment: dict[str, str]  # context id -> class id
    kmeans_fallback: list[str] = field(default_factory=list)

    def classes(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for ctx_id in sorted(self.assignment):
            out.setdefault(self.assignment[ctx_id], []).append(ctx_id)
        return out

    def class_of(self, ctx_id: str) -> str:
        return self.assignment[ctx_id]

    def validate(self, corpus_size: int) -> None:
        if len(self.assignment) != corpus_size:
            raise ValueError(
                f"assigned {len(self.assignment)} contexts, corpus has {corpus_size}"
            )
        for class_id, members in self.classes().items():
            if not members:
                raise ValueError(f"class {class_id!r} is empty")

    def to_json(self) -> dict:
        classes = self.classes()
        return {
            "assignment": dict(sorted(self.assignment.items())),
            "classes": {cid: {"size": len(m), "label": cid} for cid, m in classes.items()},
            "kmeans_fallback": sorted(self.kmeans_fallback),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ClassAssignment":
        return cls(
            assignment=dict(obj["assignment"]),
            kmeans_fallback=list(obj.get("kmeans_fallback", [])),
        )


def context_terms(ctx: Context, remove_stopwords: bool = True) -> list[str]:
    """Lemma stream for document vectors: the same canonical lemmas keyphrase
    extraction sees, minus punctuation and (by default) stopwords."""
    stop = default_stopwords() if remove_stopwords else frozenset()
    terms = []
    for sent in ctx.all_sentences():
        for tok in sent.tokens:
            if tok.upos == "PUNCT" or is_punct(tok.surface):
                continue
            lemma = tok.lemma.lower()
            if lemma in stop:
                continue
            terms.append(lemma)
    return terms


def tfidf(docs: Sequence[tuple[str, Sequence[str]]]) -> list[TfIdfVector]:
    """Plain tf-idf: tf = count / document length, idf = ln(N / df)."""
    if not docs:
        raise ValueError("tfidf needs a nonempty corpus")
    n = len(docs)
    df: Counter = Counter()
    for _, terms in docs:
        df.update(set(terms))

    vectors = []
    for doc_id, terms in docs:
        weights: dict[str, float] = {}
        if terms:
            counts = Counter(terms)
            length = len(terms)
            for term, count in counts.items():
                idf = math.log(n / df[term])
                w = (count / length) * idf
                if w != 0.0:
                    weights[term] = w
        vectors.append(TfIdfVector(doc_id=doc_id, weights=weights))
    return vectors


def vectorize(vectors: Sequence[TfIdfVector]) -> tuple[np.ndarray, list[str]]:
    """Densify sparse tf-idf maps over the sorted corpus vocabulary."""
    vocab = sorted({t for v in vectors for t in v.weights})
    index = {t: i for i, t in enumerate(vocab)}
    mat = np.zeros((len(vectors), len(vocab)))
    for row, v in enumerate(vectors):
        for term, w in v.weights.items():
            mat[row, index[term]] = w
    return mat, vocab


@dataclass
class KMeansResult:
    assignment: np.ndarray
    centroids: np.ndarray
    sse: float
    iterations: int
    sse_history: list[float]


def _sq_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    return ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)


def _farthest_point_init(points: np.ndarray, k: int, seed: int) -> np.ndarray:
    """First centroid drawn by the seeded RNG, the rest by maximal minimum
    distance (ties to the lowest index): deterministic given (data, k, seed)."""
    rng = np.random.default_rng(seed)
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    min_d = ((points - points[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < k:
        nxt = int(np.argmax(min_d))
        chosen.append(nxt)
        min_d = np.minimum(min_d, ((points - points[nxt]) ** 2).sum(axis=1))
    return points[chosen].copy()


def kmeans(points: np.ndarray, k: int, seed: int = 0, max_iter: int = 100) -> KMeansResult:
    """Lloyd's algorithm with farthest-point initialization.

    The within-cluster sum of squares is checked to be non-increasing on
    every iteration; assignment ties go to the lowest centroid index.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if k < 1 or k > n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    centroids = _farthest_point_init(points, k, seed)

    assignment = np.full(n, -1, dtype=int)
    history: list[float] = []
    for iteration in range(1, max_iter + 1):
        dists = _sq_distances(points, centroids)
        new_assignment = np.argmin(dists, axis=1)
        sse = float(dists[np.arange(n), new_assignment].sum())
        if history and sse > history[-1] + 1e-9:
            raise AssertionError(
                f"SSE increased at iteration {iteration}: {history[-1]} -> {sse}"
            )
        history.append(sse)
        if np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment
        for c in range(k):
            mask = assignment == c
            if mask.any():
                centroids[c] = points[mask].mean(axis=0)
            # empty clusters keep their previous centroid

    return KMeansResult(
        assignment=assignment,
        centroids=centroids,
        sse=history[-1],
        iterations=len(history),
        sse_history=history,
    )


def choose_k(
    points: np.ndarray,
    k_range: Sequence[int],
    seed: int = 0,
    restarts: int = 5,
    max_iter: int = 100,
) -> int:
    """Elbow rule over an SSE sweep: the k with the largest second difference
    of best-of-`restarts` SSE wins. Degenerate sweeps (no curvature anywhere)
    fall back to the smallest k."""
    k_range = sorted(k_range)
    n = len(points)
    if any(k < 2 or k > n for k in k_range):
        raise ValueError(f"k_range must lie within [2, {n}]")
    if len(k_range) < 3:
        mid = k_range[len(k_range) // 2]
        log.warning("k sweep %s too short for an elbow; returning midpoint %d", k_range, mid)
        return mid

    sse = {
        k: min(kmeans(points, k, seed=seed + r, max_iter=max_iter).sse for r in range(restarts))
        for k in k_range
    }
    curvature = {
        k_range[i]: sse[k_range[i - 1]] - 2 * sse[k_range[i]] + sse[k_range[i + 1]]
        for i in range(1, len(k_range) - 1)
    }
    best = max(curvature.values())
    if best <= 1e-12:
        return k_range[0]
    return min(k for k, c in curvature.items() if c == best)


def cluster_dialog_classes(
    contexts: Sequence[Context],
    k: int,
    seed: int = 0,
    k_sweep: Sequence[int] | None = None,
    remove_stopwords: bool = True,
) -> ClassAssignment:
    """TF-IDF + k-means class assignment for dialog corpora. When `k_sweep`
    is given, the elbow rule picks k inside that range."""
    docs = [(ctx.id, context_terms(ctx, remove_stopwords)) for ctx in contexts]
    mat, _ = vectorize(tfidf(docs))
    if k_sweep is not None:
        k = choose_k(mat, k_sweep, seed=seed)
    result = kmeans(mat, k, seed=seed)
    width = len(str(max(k - 1, 0)))
    assignment = {
        ctx.id: f"dialog-{int(label):0{width}d}"
        for ctx, label in zip(contexts, result.assignment)
    }
    return ClassAssignment(assignment=assignment)


def split_hierarchy_classes(
    products: Sequence[Context],
    cap: int = 400,
    seed: int = 0,
    remove_stopwords: bool = True,
) -> ClassAssignment:
    """Group products by category path, descending one hierarchy level
    whenever a group exceeds `cap`; groups with no deeper level left are
    partitioned by k-means over their TF-IDF vectors into ceil(size/cap)
    parts. Products without a category path land in an 'uncategorized'
    class with a warning."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    assignment: dict[str, str] = {}
    fallback: list[str] = []

    with_path = []
    for ctx in products:
        if ctx.class_hint:
            with_path.append(ctx)
        else:
            log.warning("context %s has no category path; assigning %r", ctx.id, UNCATEGORIZED)
            assignment[ctx.id] = UNCATEGORIZED

    def class_name(path: tuple[str, ...]) -> str:
        return "/".join(path)

    def descend(group: list[Context], depth: int, label: tuple[str, ...]) -> None:
        if len(group) <= cap:
            for ctx in group:
                assignment[ctx.id] = class_name(label)
            return
        deeper = [ctx for ctx in group if len(ctx.class_hint) > depth]
        if not deeper:
            _kmeans_partition(group, label)
            return
        shallow = [ctx for ctx in group if len(ctx.class_hint) <= depth]
        for ctx in shallow:
            assignment[ctx.id] = class_name(label)
        subgroups: dict[str, list[Context]] = {}
        for ctx in deeper:
            subgroups.setdefault(ctx.class_hint[depth], []).append(ctx)
        for key in sorted(subgroups):
            descend(subgroups[key], depth + 1, label + (key,))

    def _kmeans_partition(group: list[Context], label: tuple[str, ...]) -> None:
        parts = math.ceil(len(group) / cap)
        docs = [(ctx.id, context_terms(ctx, remove_stopwords)) for ctx in group]
        mat, _ = vectorize(tfidf(docs))
        result = kmeans(mat, parts, seed=seed)
        for ctx, cluster in zip(group, result.assignment):
            cid = f"{class_name(label)}#k{int(cluster)}"
            assignment[ctx.id] = cid
            if cid not in fallback:
                fallback.append(cid)
        log.warning(
            "leaf category %r (%d products) exceeded cap %d; split into %d k-means parts",
            class_name(label), len(group), cap, parts,
        )

    by_top: dict[str, list[Context]] = {}
    for ctx in with_path:
        by_top.setdefault(ctx.class_hint[0], []).append(ctx)
    for key in sorted(by_top):
        descend(by_top[key], 1, (key,))

    ca = ClassAssignment(assignment=assignment, kmeans_fallback=fallback)
    ca.validate(len(products))
    return ca
