import random

import pytest

from conftest import make_table

from gapquest.globalschema import MissingSchema
from gapquest.metrics import (
    bleu4,
    bleu4_sentence,
    distinct2,
    length_stats,
    load_synonym_pairs,
    meteor_lite,
    missinfo_overlap,
    partition_diff,
    question_overlap_ratio,
    robustness_report,
)
from gapquest.schema import SchemaElement
from gapquest.stem import porter_stem
from gapquest.textutil import tokenize

# Two-sentence fixture with hand-counted clipped n-grams (counted before the
# implementation existed):
#   A: "Will this tripod in work low light" vs "will this camera work in low light"
#      1g 6/7 (tripod misses), 2g 2/6 (will-this, low-light), 3g 0/5, 4g 0/4
#   B: output equals its reference: 4/4, 3/3, 2/2, 1/1
#   corpus p = (10/11)(5/9)(2/7)(1/5); lengths 11 vs 11 -> BP 1
#   BLEU-4 = 100 * (20/693)^(1/4) = 41.2167923480
HAND_OUTPUTS = ["Will this tripod in work low light", "is it battery powered"]
HAND_REFS = [["will this camera work in low light"], ["is it battery powered"]]
HAND_BLEU = 41.2167923480


def test_bleu_identical_corpora_is_100():
    outs = ["the quick brown fox jumps", "a tiny red laptop bag"]
    assert bleu4(outs, [[o] for o in outs]) == pytest.approx(100.0)


def test_bleu_zero_fourgram_matches_is_zero():
    assert bleu4(["a b c d e"], [["x y z w v"]]) == 0.0
    # unigrams overlap but no 4-gram does: still exactly zero, no smoothing
    assert bleu4(["a b c d"], [["a x b y c z d w"]]) == 0.0


def test_bleu_two_sentence_hand_fixture():
    assert bleu4(HAND_OUTPUTS, HAND_REFS) == pytest.approx(HAND_BLEU, abs=0.1)


def test_bleu_corpus_order_invariant():
    a = bleu4(HAND_OUTPUTS, HAND_REFS)
    b = bleu4(HAND_OUTPUTS[::-1], HAND_REFS[::-1])
    assert a == pytest.approx(b)


def test_bleu_brevity_penalty_applies():
    # same matches, shorter output -> BP < 1 reduces the score
    long_ref = "a b c d e f g h"
    assert bleu4(["a b c d e"], [[long_ref]]) < bleu4(
        ["a b c d e f g h"], [[long_ref]]
    )


def test_bleu_adding_same_length_reference_never_decreases():
    rng = random.Random(0)
    vocab = list("abcdefg")
    for _ in range(30):
        out = " ".join(rng.choices(vocab, k=6))
        ref1 = " ".join(rng.choices(vocab, k=6))
        ref2 = " ".join(rng.choices(vocab, k=6))  # same length keeps BP fixed
        base = bleu4([out], [[ref1]])
        widened = bleu4([out], [[ref1, ref2]])
        assert widened >= base - 1e-12


def test_bleu_validation():
    with pytest.raises(ValueError):
        bleu4([], [])
    with pytest.raises(ValueError):
        bleu4(["a"], [])
    with pytest.raises(ValueError):
        bleu4(["a"], [[]])


def test_bleu_sentence_smoothing_nonzero():
    score = bleu4_sentence("a b c d e", ["a b x y z"])
    assert 0.0 < score < 100.0


def test_meteor_identical_three_tokens():
    # F-mean 1, one chunk of three matches: 1 - 0.5*(1/3)^3 = 53/54
    assert meteor_lite(["battery powered drill"], [["battery powered drill"]]) == pytest.approx(
        0.981481481482, abs=1e-3
    )


def test_meteor_zero_overlap_is_zero():
    assert meteor_lite(["aa bb"], [["cc dd"]]) == 0.0


def test_meteor_stem_stage_matches_inflections():
    assert porter_stem("running") == "run"
    score = meteor_lite(["running"], [["run"]])
    assert score > 0.0


def test_meteor_adding_reference_never_decreases():
    rng = random.Random(1)
    vocab = list("abcdefg")
    for _ in range(30):
        out = " ".join(rng.choices(vocab, k=5))
        refs = [" ".join(rng.choices(vocab, k=rng.randint(2, 7))) for _ in range(2)]
        assert meteor_lite([out], [refs]) >= meteor_lite([out], [refs[:1]]) - 1e-12


def test_meteor_synonym_stage_is_optional():
    synonyms = load_synonym_pairs("sofa couch\n")
    without = meteor_lite(["sofa"], [["couch"]])
    with_table = meteor_lite(["sofa"], [["couch"]], synonyms=synonyms)
    assert without == 0.0
    assert with_table > 0.0


def test_meteor_fragmentation_penalty():
    # same unigram matches, scrambled order -> more chunks -> lower score
    contiguous = meteor_lite(["a b c d"], [["a b c d"]])
    scrambled = meteor_lite(["a c b d"], [["a b c d"]])
    assert scrambled < contiguous


def test_distinct2_single_output():
    assert distinct2(["a b c"]) == pytest.approx(2 / 3)


def test_distinct2_repetition():
    assert distinct2(["a b c"] * 10) == pytest.approx(2 / 30)


def test_distinct2_duplication_strictly_decreases():
    outputs = ["a b c", "b c d"]
    assert distinct2(outputs + ["a b c"]) < distinct2(outputs)


def test_distinct2_range_and_errors():
    assert 0 < distinct2(["x y"]) <= 1.0
    with pytest.raises(ValueError):
        distinct2([])
    with pytest.raises(ValueError):
        distinct2([""])


def _missing(*words):
    return MissingSchema(
        context_id="c", elements=tuple(SchemaElement((w,)) for w in words)
    )


def _ortho(words):
    return make_table(
        {w: [1.0 if i == j else 0.0 for j in range(len(words))] for i, w in enumerate(words)}
    )


def test_missinfo_full_match_is_100():
    # stopword separators keep the keyphrases to exactly the two missing
    # representatives
    table = _ortho(["battery", "charger"])
    score = missinfo_overlap(["battery and charger"], [_missing("battery", "charger")], table)
    assert score == pytest.approx(100.0)


def test_missinfo_bigram_phrase_matches_through_averaging():
    # cos(charger, battery)=0.9, so avg(battery, charger) vs battery ~ 0.97:
    # all three extracted phrases (battery, charger, battery charger) match
    import math

    table = make_table(
        {"battery": [1.0, 0.0], "charger": [0.9, math.sqrt(1 - 0.81)]}
    )
    score = missinfo_overlap(["battery charger"], [_missing("battery")], table)
    assert score == pytest.approx(100.0)


def test_missinfo_half_match():
    # question keyphrases: battery, charger, tripod, flash -> 2 of 4 match
    table = _ortho(["battery", "charger", "tripod", "flash"])
    ratio = question_overlap_ratio(
        "battery and charger with tripod and flash", _missing("battery", "charger"), table
    )
    assert ratio == pytest.approx(0.5)


def test_missinfo_keyphrase_free_outputs_skipped():
    table = _ortho(["battery"])
    score = missinfo_overlap(
        ["battery", "is it the a"], [_missing("battery"), _missing("battery")], table
    )
    assert score == pytest.approx(100.0)
    with pytest.raises(ValueError):
        missinfo_overlap(["is it the a"], [_missing("battery")], table)


def test_missinfo_alignment_validation():
    table = _ortho(["a"])
    with pytest.raises(ValueError):
        missinfo_overlap(["x"], [], table)


def test_partition_diff_identical_scores():
    out = partition_diff([1.0, 1.0, 1.0], [1, 2, 3])
    assert out["diff"] == 0.0
    assert not out["degenerate"]


def test_partition_diff_constructed_gap():
    # long contexts score exactly +0.1
    scores = [0.5, 0.5, 0.6, 0.6]
    values = [10, 20, 30, 40]
    out = partition_diff(scores, values)
    assert out["diff"] == pytest.approx(0.1)


def test_partition_diff_median_element_goes_low():
    out = partition_diff([1.0, 2.0, 3.0], [1, 2, 3])
    assert out["low_count"] == 2  # values 1 and 2 (median) in the lower group
    assert out["high_count"] == 1


def test_partition_diff_degenerate_all_equal_values():
    out = partition_diff([1.0, 2.0], [5, 5])
    assert out["degenerate"]
    assert out["diff"] == 0.0


def test_robustness_report_shapes(toy_dir):
    from gapquest.corpus import load_contexts
    from gapquest.globalschema import build_global_schema
    from gapquest.embeddings import load_embeddings
    from gapquest.pipeline import local_schemas

    contexts = [c for c in load_contexts(toy_dir / "contexts.jsonl") if c.scenario == "communityQA"]
    with open(toy_dir / "embeddings.txt", encoding="utf-8") as fh:
        table = load_embeddings(fh)
    schemas, _ = local_schemas(contexts)
    assignment = {c.id: "all" for c in contexts}
    globals_ = {"all": build_global_schema("all", list(schemas.values()), table)}
    scores = [float(i) for i in range(len(contexts))]
    report = robustness_report(scores, contexts, globals_, assignment)
    assert set(report) >= {"by_context_length", "by_global_schema_size", "note"}
    assert report["by_global_schema_size"]["degenerate"]  # single class: all sizes equal
    assert report["by_context_length"]["low_count"] + report["by_context_length"]["high_count"] == len(contexts)


def test_length_stats_mean():
    stats = length_stats(["a b", "a b c d"])
    assert stats["mean"] == pytest.approx(3.0)
    assert stats["median"] == pytest.approx(3.0)


def test_length_stats_grouped():
    stats = length_stats(["a b", "a b c d", "a"], labels=[1, 1, 0])
    assert stats["by_label"]["1"]["mean"] == pytest.approx(3.0)
    assert stats["by_label"]["0"]["mean"] == pytest.approx(1.0)


def test_tokenizer_rules():
    assert tokenize("Is it battery-powered?") == ["is", "it", "battery-powered", "?"]
    assert tokenize("A B  c") == ["a", "b", "c"]
    assert tokenize("don't stop") == ["don't", "stop"]
