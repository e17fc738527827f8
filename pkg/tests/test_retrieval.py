import math
import random

import numpy as np
import pytest

from conftest import compact_sentence, make_table

from gapquest.corpus import TargetQuestion
from gapquest.globalschema import MissingSchema
from gapquest.retrieval import (
    RankedCandidate,
    build_index,
    overlap_score,
    rerank_useful,
    retrieve,
)
from gapquest.schema import Schema, SchemaElement
from gapquest.usefulness import TrainConfig, UsefulnessModel


def bare(word):
    return SchemaElement((word,))


def schema_of(source, *words):
    return Schema(elements=frozenset(bare(w) for w in words), source=source)


def missing_of(*words):
    return MissingSchema(context_id="q", elements=tuple(bare(w) for w in words))


def ortho(words):
    return make_table(
        {w: [1.0 if i == j else 0.0 for j in range(len(words))] for i, w in enumerate(words)}
    )


BAG_Q = TargetQuestion(
    text="Does the bag fit a tablet?",
    sentences=[
        compact_sentence("""
            Does do AUX VBZ 4 aux
            the the DET DT 3 det
            bag bag NOUN NN 4 nsubj
            fit fit VERB VB 0 root
            a a DET DT 6 det
            tablet tablet NOUN NN 4 obj
            ? ? PUNCT . 4 punct
        """)
    ],
)


def test_build_index_single_pair():
    index = build_index([("K", BAG_Q)])
    assert len(index) == 1
    entry = index.entries[0]
    assert SchemaElement(("bag",), "fit", "nsubj") in entry.schema
    assert SchemaElement(("tablet",), "fit", "obj") in entry.schema
    assert not entry.schema_less


def test_build_index_dedups_questions():
    other = TargetQuestion(text="does the bag fit a tablet?", sentences=BAG_Q.sentences)
    index = build_index([("K", BAG_Q), ("K2", other)])
    assert len(index) == 1


def test_build_index_flags_parse_less_questions():
    q = TargetQuestion(text="Anything else?", sentences=[])
    index = build_index([("K", q)])
    assert index.entries[0].schema_less


def test_build_index_empty_rejected():
    with pytest.raises(ValueError):
        build_index([])


def test_build_index_three_pair_manual_trace():
    q2 = TargetQuestion(
        text="Which partition holds the logs?",
        sentences=[
            compact_sentence("""
                Which which DET WDT 2 det
                partition partition NOUN NN 3 nsubj
                holds hold VERB VBZ 0 root
                the the DET DT 5 det
                logs log NOUN NNS 3 obj
                ? ? PUNCT . 3 punct
            """)
        ],
    )
    q3 = TargetQuestion(
        text="Is the screen size three inches?",
        sentences=[
            compact_sentence("""
                Is be AUX VBZ 6 cop
                the the DET DT 4 det
                screen screen NOUN NN 4 compound
                size size NOUN NN 6 nsubj
                three three NUM CD 6 nummod
                inches inch NOUN NNS 0 root
                ? ? PUNCT . 6 punct
            """)
        ],
    )
    index = build_index([("K", BAG_Q), ("K", q2), ("K", q3)])
    schemas = {e.question: e.schema for e in index.entries}
    assert SchemaElement(("partition",), "hold", "nsubj") in schemas[q2.text]
    assert SchemaElement(("log",), "hold", "obj") in schemas[q2.text]
    # copular question: no VB/VBG/VBZ on the path, everything stays bare
    assert all(el.kind == "bare" for el in schemas[q3.text])
    assert SchemaElement(("screen", "size")) in schemas[q3.text]


def test_overlap_empty_missing_is_zero():
    table = ortho(["bag"])
    count, trace = overlap_score(schema_of("q", "bag"), missing_of(), table)
    assert count == 0 and trace == []


def test_overlap_identical_counts_all():
    table = ortho(["a", "b", "c"])
    count, trace = overlap_score(schema_of("q", "a", "b", "c"), missing_of("a", "b", "c"), table)
    assert count == 3
    assert len(trace) == 3


def test_overlap_partial_semantic():
    # two of four question phrases match the missing schema at >= 0.8
    table = make_table(
        {
            "a": [1, 0, 0, 0],
            "a2": [0.9, math.sqrt(1 - 0.81), 0, 0],
            "b": [0, 0, 1, 0],
            "b2": [0, 0, 0.9, math.sqrt(1 - 0.81)],
            "x": [0, 0, 0, 1.0],
            "y": [0, 1.0, 0, 0],
        }
    )
    question = schema_of("q", "a2", "b2", "x", "y")
    count, trace = overlap_score(question, missing_of("a", "b"), table)
    assert count == 2
    matched = {q.text() for q, _ in trace}
    assert matched == {"a2", "b2"}


def test_overlap_each_question_element_counted_once():
    table = make_table({"a": [1.0, 0.0], "a2": [0.9, math.sqrt(1 - 0.81)]})
    count, _ = overlap_score(schema_of("q", "a"), missing_of("a", "a2"), table)
    assert count == 1


def test_retrieve_all_zero_overlaps_lexicographic():
    table = ortho(["z"])
    questions = [
        TargetQuestion(text=t, sentences=[]) for t in ["delta?", "alpha?", "charlie?", "bravo?"]
    ]
    index = build_index([("K", q) for q in questions])
    out = retrieve(index, missing_of("z"), table, k=3)
    assert [c.question for c in out] == ["alpha?", "bravo?", "charlie?"]
    assert all(c.overlap == 0 for c in out)


def test_retrieve_dominant_first(bag_sentence):
    table = ortho(["bag", "tablet", "partition"])
    q2 = TargetQuestion(text="Anything else?", sentences=[])
    index = build_index([("K", BAG_Q), ("K", q2)])
    out = retrieve(index, missing_of("bag", "tablet"), table, k=2)
    assert out[0].question == BAG_Q.text
    assert out[0].overlap == 2


def test_retrieve_errors():
    table = ortho(["a"])
    index = build_index([("K", BAG_Q)])
    with pytest.raises(ValueError):
        retrieve(index, missing_of("a"), table, k=0)
    with pytest.raises(ValueError):
        retrieve(index, missing_of("a"), table, k=1, class_filter="NOPE")


def random_index_world(rng: random.Random, n_entries=12, n_words=10):
    """Synthetic index: entry schemas are explicit unigram bags."""
    from gapquest.retrieval import IndexEntry, QuestionIndex

    words = [f"w{i}" for i in range(n_words)]
    vectors = {}
    for w in words:
        v = np.array([rng.gauss(0, 1) for _ in range(5)])
        vectors[w] = (v / np.linalg.norm(v)).tolist()
    table = make_table(vectors)
    entries = []
    for i in range(n_entries):
        qwords = rng.sample(words, rng.randint(1, 4))
        entries.append(
            IndexEntry(
                question=f"q{i} about {' '.join(qwords)}?",
                schema=schema_of(f"q{i}", *qwords),
                class_id=f"K{rng.randint(0, 2)}",
            )
        )
    missing = missing_of(*rng.sample(words, rng.randint(1, 5)))
    return table, QuestionIndex(entries=entries), missing


def brute_force_top1(table, index, missing, theta):
    """Independent oracle: raw nested loops and numpy cosines only."""
    scored = []
    for entry in index.entries:
        qwords = [el.keyphrase[0] for el in entry.schema.elements]
        count = 0
        for qw in qwords:
            hit = False
            for el in missing.elements:
                mw = el.keyphrase[0]
                if qw == mw:
                    hit = True
                    break
                u, v = np.array(table.get(qw)), np.array(table.get(mw))
                nu, nv = np.linalg.norm(u), np.linalg.norm(v)
                if nu > 0 and nv > 0 and float(u @ v / (nu * nv)) >= theta:
                    hit = True
                    break
            if hit:
                count += 1
        scored.append((count, entry.question))
    best_overlap = max(c for c, _ in scored)
    best_question = min(q for c, q in scored if c == best_overlap)
    return best_overlap, best_question


@pytest.mark.parametrize("seed", range(30))
@pytest.mark.parametrize("theta", [0.8, 1.01])
def test_retrieve_top1_matches_brute_force(seed, theta):
    rng = random.Random(seed)
    table, index, missing = random_index_world(rng)
    expected_overlap, expected_question = brute_force_top1(table, index, missing, theta)
    got = retrieve(index, missing, table, k=1, match_theta=theta)[0]
    assert (got.overlap, got.question) == (expected_overlap, expected_question)


def test_retrieve_total_order_transitive():
    rng = random.Random(1)
    table, index, missing = random_index_world(rng)
    ranked = retrieve(index, missing, table, k=len(index))
    keys = [(-c.overlap, -c.usefulness, c.question) for c in ranked]
    assert keys == sorted(keys)


def test_trace_elements_satisfy_match_predicate():
    table = make_table({"a": [1.0, 0.0], "a2": [0.9, math.sqrt(1 - 0.81)], "z": [0.0, 1.0]})
    pairs = [("K", TargetQuestion(text="about a2 and z?", sentences=[
        compact_sentence("a2 a2 NOUN NN 0 root\nz z NOUN NN 1 conj")]))]
    index = build_index(pairs)
    missing = missing_of("a")
    (cand,) = retrieve(index, missing, table, k=1)
    from gapquest.embeddings import phrases_match

    assert cand.trace, "expected at least one matched element"
    for q_el, m_el in cand.trace:
        assert m_el in missing.elements
        assert phrases_match(table, q_el.keyphrase, m_el.keyphrase, 0.8)


def exact_sigmoid_model():
    # margins ln(9) and ln(1/4) make usefulness exactly 0.9 and 0.2
    table = make_table({"useful": [math.log(9.0)], "meh": [math.log(0.25)]})
    model = UsefulnessModel(weights=np.array([1.0]), bias=0.0, config=TrainConfig())
    return table, model


def test_rerank_hand_arithmetic_flips_order():
    table, model = exact_sigmoid_model()
    candidates = [
        RankedCandidate(question="meh", overlap=2),
        RankedCandidate(question="useful", overlap=1),
    ]
    out = rerank_useful(candidates, model, table, alpha=0.5)
    combined = {c.question: c.combined for c in out}
    assert combined["meh"] == pytest.approx(0.5 * 1.0 + 0.5 * 0.2)  # 0.6
    assert combined["useful"] == pytest.approx(0.5 * 0.5 + 0.5 * 0.9)  # 0.7
    assert [c.question for c in out] == ["useful", "meh"]


def test_rerank_alpha_one_keeps_retrieve_order():
    table, model = exact_sigmoid_model()
    candidates = [
        RankedCandidate(question="meh", overlap=2),
        RankedCandidate(question="useful", overlap=1),
    ]
    out = rerank_useful(candidates, model, table, alpha=1.0)
    assert [c.question for c in out] == ["meh", "useful"]


def test_rerank_alpha_zero_pure_usefulness():
    table, model = exact_sigmoid_model()
    candidates = [
        RankedCandidate(question="meh", overlap=5),
        RankedCandidate(question="useful", overlap=0),
    ]
    out = rerank_useful(candidates, model, table, alpha=0.0)
    assert [c.question for c in out] == ["useful", "meh"]


def test_rerank_zero_overlaps_normalize_to_zero():
    table, model = exact_sigmoid_model()
    out = rerank_useful([RankedCandidate(question="meh", overlap=0)], model, table, alpha=0.5)
    assert out[0].combined == pytest.approx(0.5 * 0.2)


def test_rerank_is_permutation():
    table, model = exact_sigmoid_model()
    candidates = [
        RankedCandidate(question="useful", overlap=1),
        RankedCandidate(question="meh", overlap=2),
    ]
    out = rerank_useful(candidates, model, table, alpha=0.3)
    assert sorted(c.question for c in out) == sorted(c.question for c in candidates)


def test_rerank_validation():
    table, model = exact_sigmoid_model()
    with pytest.raises(ValueError):
        rerank_useful([], model, table)
    with pytest.raises(ValueError):
        rerank_useful([RankedCandidate(question="meh", overlap=1)], model, table, alpha=1.5)
