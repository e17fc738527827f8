import logging
import math

import numpy as np
import pytest
from sklearn.metrics import adjusted_rand_score

from conftest import compact_sentence

from gapquest.classes import (
    choose_k,
    cluster_dialog_classes,
    context_terms,
    kmeans,
    split_hierarchy_classes,
    tfidf,
    vectorize,
)
from gapquest.corpus import Block, Context


def test_tfidf_term_in_every_doc_is_zero():
    vectors = tfidf([("d1", ["x", "a"]), ("d2", ["x", "b"])])
    assert "x" not in vectors[0].weights
    assert "x" not in vectors[1].weights


def test_tfidf_empty_doc_zero_vector():
    vectors = tfidf([("d1", []), ("d2", ["a"])])
    assert vectors[0].weights == {}


def test_tfidf_hand_computation():
    # doc1: term appears 2 of 4 tokens -> tf 0.5; df 1 of 2 docs -> idf ln 2
    vectors = tfidf([("d1", ["t", "t", "x", "y"]), ("d2", ["x", "z"])])
    assert vectors[0].weights["t"] == pytest.approx(0.5 * math.log(2))


def test_tfidf_empty_corpus_rejected():
    with pytest.raises(ValueError):
        tfidf([])


def blobs(rng, centers, n_per, scale=0.1):
    points = []
    labels = []
    for label, center in enumerate(centers):
        points.append(rng.normal(loc=center, scale=scale, size=(n_per, len(center))))
        labels.extend([label] * n_per)
    return np.vstack(points), np.array(labels)


def test_kmeans_k_equals_n_sse_zero():
    rng = np.random.default_rng(0)
    points = rng.normal(size=(6, 3))
    result = kmeans(points, k=6, seed=1)
    assert result.sse == pytest.approx(0.0, abs=1e-12)


def test_kmeans_k_one_centroid_is_mean():
    rng = np.random.default_rng(1)
    points = rng.normal(size=(20, 2))
    result = kmeans(points, k=1, seed=0)
    assert np.allclose(result.centroids[0], points.mean(axis=0))
    expected_sse = ((points - points.mean(axis=0)) ** 2).sum()
    assert result.sse == pytest.approx(expected_sse)


def test_kmeans_recovers_separated_blobs():
    rng = np.random.default_rng(7)
    points, labels = blobs(rng, [[0, 0], [5, 5]], n_per=40)
    result = kmeans(points, k=2, seed=3)
    assert adjusted_rand_score(labels, result.assignment) >= 0.99


def test_kmeans_sse_non_increasing():
    rng = np.random.default_rng(2)
    for trial in range(10):
        points = rng.normal(size=(30, 4))
        result = kmeans(points, k=4, seed=trial)
        for prev, cur in zip(result.sse_history, result.sse_history[1:]):
            assert cur <= prev + 1e-9


def test_kmeans_deterministic():
    rng = np.random.default_rng(3)
    points = rng.normal(size=(25, 3))
    r1 = kmeans(points, k=3, seed=11)
    r2 = kmeans(points, k=3, seed=11)
    assert np.array_equal(r1.assignment, r2.assignment)
    assert r1.sse == r2.sse


def test_kmeans_k_out_of_range():
    points = np.zeros((3, 2))
    with pytest.raises(ValueError):
        kmeans(points, k=4, seed=0)
    with pytest.raises(ValueError):
        kmeans(points, k=0, seed=0)


def test_choose_k_finds_three_blobs():
    rng = np.random.default_rng(5)
    points, _ = blobs(rng, [[0, 0], [6, 0], [0, 6]], n_per=30)
    assert choose_k(points, range(2, 9), seed=0) == 3


def test_choose_k_identical_points_returns_k_min():
    points = np.ones((10, 2))
    assert choose_k(points, range(2, 6), seed=0) == 2


def test_choose_k_short_range_midpoint_with_warning(caplog):
    points = np.random.default_rng(0).normal(size=(10, 2))
    with caplog.at_level(logging.WARNING):
        assert choose_k(points, [3, 4], seed=0) == 4
    assert "midpoint" in caplog.text


def test_choose_k_range_validation():
    points = np.zeros((4, 2))
    with pytest.raises(ValueError):
        choose_k(points, [2, 3, 9], seed=0)


def _product(ctx_id, path, tokens=("thing",)):
    spec = "\n".join(f"{t} {t} NOUN NN 0 root" for t in tokens[:1])
    # single-token sentence keeps fixtures light; terms drive the fallback only
    sent = compact_sentence(spec)
    return Context(
        id=ctx_id,
        scenario="communityQA",
        blocks=[Block("title", " ".join(tokens))],
        sentences=[[sent]],
        class_hint=tuple(path) if path else None,
    )


def test_hierarchy_under_cap_single_class():
    products = [_product(f"p{i}", ["Electronics", "Cameras"]) for i in range(350)]
    ca = split_hierarchy_classes(products, cap=400)
    assert set(ca.assignment.values()) == {"Electronics"}


def test_hierarchy_descends_one_level():
    products = []
    for child in ("B1", "B2", "B3"):
        for i in range(300):
            products.append(_product(f"{child}-{i}", ["A", child]))
    ca = split_hierarchy_classes(products, cap=400)
    classes = ca.classes()
    assert set(classes) == {"A/B1", "A/B2", "A/B3"}
    assert all(len(m) == 300 for m in classes.values())
    assert ca.kmeans_fallback == []


def test_hierarchy_missing_path_goes_uncategorized(caplog):
    products = [_product("p0", ["A"]), _product("p1", None)]
    with caplog.at_level(logging.WARNING):
        ca = split_hierarchy_classes(products, cap=400)
    assert ca.assignment["p1"] == "uncategorized"


def test_hierarchy_leaf_over_cap_uses_kmeans_fallback():
    words = ["camera", "lens", "tripod", "flash"]
    products = [
        _product(f"p{i}", ["A", "B"], tokens=(words[i % 4],)) for i in range(10)
    ]
    ca = split_hierarchy_classes(products, cap=4)
    assert len(ca.kmeans_fallback) == math.ceil(10 / 4)
    for cid in ca.assignment.values():
        assert cid.startswith("A/B#k")
    # flagged classes may exceed the cap; everything else must not
    classes = ca.classes()
    for cid, members in classes.items():
        if cid not in ca.kmeans_fallback:
            assert len(members) <= 4


def test_assignment_total_and_nonempty():
    products = [_product(f"p{i}", ["A"]) for i in range(5)]
    ca = split_hierarchy_classes(products, cap=400)
    ca.validate(5)
    assert len(ca.assignment) == 5


def test_dialog_clustering_total(toy_dir):
    from gapquest.corpus import load_contexts

    dialogs = [c for c in load_contexts(toy_dir / "contexts.jsonl") if c.scenario == "dialog"]
    ca = cluster_dialog_classes(dialogs, k=2, seed=0)
    assert len(ca.assignment) == len(dialogs)
    assert len(ca.classes()) == 2
    again = cluster_dialog_classes(dialogs, k=2, seed=0)
    assert again.assignment == ca.assignment


def test_context_terms_drop_stopwords_and_punct(toy_dir):
    from gapquest.corpus import load_contexts

    ctx = next(c for c in load_contexts(toy_dir / "contexts.jsonl") if c.id == "cam1")
    terms = context_terms(ctx)
    assert "the" not in terms
    assert "." not in terms
    assert "camcorder" in terms
    kept = context_terms(ctx, remove_stopwords=False)
    assert "the" in kept


def test_vectorize_shape():
    vectors = tfidf([("d1", ["a", "b"]), ("d2", ["b", "c"])])
    mat, vocab = vectorize(vectors)
    assert mat.shape == (2, len(vocab))
    assert vocab == sorted(vocab)
