"""Automatic evaluation: corpus BLEU-4, a METEOR-style aligned score with
stem matching ("meteor_lite"), Distinct-2 diversity, missing-information
overlap, robustness partitions, and question-length statistics.

All metrics tokenize identically (lowercase, punctuation detached,
whitespace split) so scores are reproducible across implementations.
"""

from __future__ import annotations

import math
import statistics
from collections import Counter
from typing import Mapping, Sequence

from .embeddings import EmbeddingTable, phrases_match
from .globalschema import GlobalSchema, MissingSchema
from .keyphrase import extract_keyphrases_text
from .stem import porter_stem
from .textutil import tokenize


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _check_corpus(outputs, references):
    if not outputs:
        raise ValueError("empty corpus")
    if len(outputs) != len(references):
        raise ValueError(f"{len(outputs)} outputs but {len(references)} reference lists")
    if any(not refs for refs in references):
        raise ValueError("every output needs at least one reference")


def bleu4(outputs: Sequence[str], references: Sequence[Sequence[str]]) -> float:
    """Corpus-level BLEU-4 in [0, 100]: clipped modified n-gram precisions
    aggregated over the corpus before the geometric mean, brevity penalty
    from the closest reference length (ties to the shorter). No smoothing:
    any zero aggregate precision gives 0.0."""
    _check_corpus(outputs, references)
    clipped = [0] * 5
    totals = [0] * 5
    out_len = 0
    ref_len = 0
    for out, refs in zip(outputs, references):
        out_toks = tokenize(out)
        ref_toks = [tokenize(r) for r in refs]
        out_len += len(out_toks)
        ref_len += min((abs(len(rt) - len(out_toks)), len(rt)) for rt in ref_toks)[1]
        for n in range(1, 5):
            counts = _ngrams(out_toks, n)
            max_ref: Counter = Counter()
            for rt in ref_toks:
                for gram, cnt in _ngrams(rt, n).items():
                    if cnt > max_ref[gram]:
                        max_ref[gram] = cnt
            totals[n] += sum(counts.values())
            clipped[n] += sum(min(cnt, max_ref[gram]) for gram, cnt in counts.items())

    if out_len == 0:
        raise ValueError("no output tokens")
    if any(totals[n] == 0 or clipped[n] == 0 for n in range(1, 5)):
        return 0.0
    log_precision = sum(math.log(clipped[n] / totals[n]) for n in range(1, 5)) / 4.0
    bp = 1.0 if out_len >= ref_len else math.exp(1.0 - ref_len / out_len)
    return 100.0 * bp * math.exp(log_precision)


def bleu4_sentence(output: str, references: Sequence[str]) -> float:
    """Sentence-level BLEU-4 with add-one smoothing on zero counts, used for
    the per-example scores behind the robustness partitions."""
    if not references:
        raise ValueError("need at least one reference")
    out_toks = tokenize(output)
    ref_toks = [tokenize(r) for r in references]
    if not out_toks:
        return 0.0
    log_precision = 0.0
    for n in range(1, 5):
        counts = _ngrams(out_toks, n)
        max_ref: Counter = Counter()
        for rt in ref_toks:
            for gram, cnt in _ngrams(rt, n).items():
                if cnt > max_ref[gram]:
                    max_ref[gram] = cnt
        total = sum(counts.values())
        good = sum(min(cnt, max_ref[gram]) for gram, cnt in counts.items())
        if good == 0:
            good, total = good + 1, total + 1
        log_precision += math.log(good / total)
    ref_len = min((abs(len(rt) - len(out_toks)), len(rt)) for rt in ref_toks)[1]
    bp = 1.0 if len(out_toks) >= ref_len else math.exp(1.0 - ref_len / len(out_toks))
    return 100.0 * bp * math.exp(log_precision / 4.0)


def load_synonym_pairs(text: str) -> dict[str, set[str]]:
    """Optional synonym resource: one pair per line, `word1 word2`."""
    table: dict[str, set[str]] = {}
    for line in text.splitlines():
        parts = line.split()
        if len(parts) != 2:
            continue
        a, b = parts[0].lower(), parts[1].lower()
        table.setdefault(a, set()).add(b)
        table.setdefault(b, set()).add(a)
    return table


def _align(
    out_toks: list[str],
    ref_toks: list[str],
    synonyms: Mapping[str, set[str]] | None,
) -> list[tuple[int, int]]:
    """Staged unigram alignment: exact, then stem, then synonym matches.
    Within a stage, output tokens take the first unmatched reference token,
    left to right."""
    pairs: list[tuple[int, int]] = []
    out_used: set[int] = set()
    ref_used: set[int] = set()

    def run_stage(match) -> None:
        for i, ot in enumerate(out_toks):
            if i in out_used:
                continue
            for j, rt in enumerate(ref_toks):
                if j in ref_used:
                    continue
                if match(ot, rt):
                    pairs.append((i, j))
                    out_used.add(i)
                    ref_used.add(j)
                    break

    run_stage(lambda a, b: a == b)
    run_stage(lambda a, b: porter_stem(a) == porter_stem(b))
    if synonyms:
        run_stage(lambda a, b: b in synonyms.get(a, ()))
    return sorted(pairs)


def _chunks(pairs: list[tuple[int, int]]) -> int:
    """Contiguous runs that are consecutive in both output and reference."""
    count = 0
    prev = None
    for i, j in pairs:
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            count += 1
        prev = (i, j)
    return count


def meteor_lite(
    outputs: Sequence[str],
    references: Sequence[Sequence[str]],
    synonyms: Mapping[str, set[str]] | None = None,
) -> float:
    """Unigram F-mean weighted toward recall with a fragmentation penalty:

        Fmean = 10PR / (R + 9P),  penalty = 0.5 * (chunks / matches)^3,
        score = Fmean * (1 - penalty)

    Per example the best reference is kept; the corpus score is the mean.
    Stem matching is always on; synonym matching needs a user-supplied
    pairs table."""
    _check_corpus(outputs, references)
    scores = []
    for out, refs in zip(outputs, references):
        out_toks = tokenize(out)
        best = 0.0
        for ref in refs:
            ref_toks = tokenize(ref)
            if not out_toks or not ref_toks:
                continue
            pairs = _align(out_toks, ref_toks, synonyms)
            m = len(pairs)
            if m == 0:
                continue
            precision = m / len(out_toks)
            recall = m / len(ref_toks)
            fmean = 10.0 * precision * recall / (recall + 9.0 * precision)
            penalty = 0.5 * (_chunks(pairs) / m) ** 3
            best = max(best, fmean * (1.0 - penalty))
        scores.append(best)
    return sum(scores) / len(scores)


def distinct2(outputs: Sequence[str]) -> float:
    """Unique bigrams across all outputs divided by the total token count."""
    if not outputs:
        raise ValueError("empty outputs")
    bigrams: set[tuple[str, str]] = set()
    total_tokens = 0
    for out in outputs:
        toks = tokenize(out)
        total_tokens += len(toks)
        bigrams.update(zip(toks, toks[1:]))
    if total_tokens == 0:
        raise ValueError("outputs contain no tokens")
    return len(bigrams) / total_tokens


def question_overlap_ratio(
    output: str,
    missing: MissingSchema,
    table: EmbeddingTable,
    match_theta: float = 0.8,
) -> float | None:
    """Fraction of the question's keyphrases that appear in the missing
    schema (semantic match). None when the question has no keyphrases."""
    phrases = extract_keyphrases_text(output)
    if not phrases:
        return None
    missing_phrases = missing.keyphrases()
    matched = sum(
        1
        for p in phrases
        if any(phrases_match(table, p.words, mk, match_theta) for mk in missing_phrases)
    )
    return matched / len(phrases)


def missinfo_overlap(
    outputs: Sequence[str],
    missing_schemas: Sequence[MissingSchema],
    table: EmbeddingTable,
    match_theta: float = 0.8,
) -> float:
    """Corpus-mean missing-information overlap, in percent. Outputs without
    any keyphrase are skipped (but must not be the whole corpus)."""
    if len(outputs) != len(missing_schemas):
        raise ValueError("need one missing schema per output")
    ratios = []
    for out, missing in zip(outputs, missing_schemas):
        ratio = question_overlap_ratio(out, missing, table, match_theta)
        if ratio is not None:
            ratios.append(ratio)
    if not ratios:
        raise ValueError("no output produced any keyphrase")
    return 100.0 * sum(ratios) / len(ratios)


def partition_diff(
    scores: Sequence[float], values: Sequence[float], threshold: float | None = None
) -> dict:
    """Mean score on each side of a threshold split (default: median, with
    values equal to it going to the lower group) and the absolute gap."""
    if len(scores) != len(values):
        raise ValueError("scores and values must align")
    if threshold is None:
        threshold = float(statistics.median(values))
    low = [s for s, v in zip(scores, values) if v <= threshold]
    high = [s for s, v in zip(scores, values) if v > threshold]
    degenerate = not low or not high
    low_mean = statistics.fmean(low) if low else 0.0
    high_mean = statistics.fmean(high) if high else low_mean
    if degenerate:
        diff = 0.0
    else:
        diff = abs(high_mean - low_mean)
    return {
        "threshold": threshold,
        "low_mean": low_mean,
        "high_mean": high_mean,
        "low_count": len(low),
        "high_count": len(high),
        "diff": diff,
        "degenerate": degenerate,
    }


def robustness_report(
    per_example_scores: Sequence[float],
    contexts: Sequence,
    globals_: Mapping[str, GlobalSchema],
    assignment: Mapping[str, str] | None = None,
    length_threshold: float | None = None,
    size_threshold: float | None = None,
) -> dict:
    """How much the score moves with the amount of available information:
    split the examples at the median context token length and at the median
    global-schema size, and report each group's mean plus the gap. Fixed
    thresholds (e.g. 200) may replace the medians."""
    if len(per_example_scores) != len(contexts):
        raise ValueError("one score per context required")
    lengths = [ctx.token_length() for ctx in contexts]
    sizes = []
    for ctx in contexts:
        class_id = assignment[ctx.id] if assignment else "/".join(ctx.class_hint or ())
        if class_id not in globals_:
            raise ValueError(f"no global schema for class {class_id!r} (context {ctx.id})")
        sizes.append(globals_[class_id].size())
    report = {
        "note": "per-example scores are sentence-level BLEU-4 with add-one smoothing on zero counts",
        "by_context_length": partition_diff(per_example_scores, lengths, length_threshold),
        "by_global_schema_size": partition_diff(per_example_scores, sizes, size_threshold),
    }
    for key in ("by_context_length", "by_global_schema_size"):
        if report[key]["degenerate"]:
            report[key]["warning"] = "degenerate partition: all values on one side"
    return report


def length_stats(outputs: Sequence[str], labels: Sequence[int] | None = None) -> dict:
    """Mean/median token lengths, overall and per label group."""
    lengths = [len(tokenize(out)) for out in outputs]
    stats: dict = {
        "count": len(lengths),
        "mean": statistics.fmean(lengths) if lengths else 0.0,
        "median": float(statistics.median(lengths)) if lengths else 0.0,
    }
    if labels is not None:
        if len(labels) != len(outputs):
            raise ValueError("labels must align with outputs")
        groups: dict[int, list[int]] = {}
        for length, label in zip(lengths, labels):
            groups.setdefault(label, []).append(length)
        stats["by_label"] = {
            str(label): {
                "count": len(vals),
                "mean": statistics.fmean(vals),
                "median": float(statistics.median(vals)),
            }
            for label, vals in sorted(groups.items())
        }
    return stats
