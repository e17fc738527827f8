"""Glue between the corpus and the schema machinery: per-context keyphrase
assignment, local schema extraction, and batch global-schema construction."""

from __future__ import annotations

from collections import Counter
from typing import Mapping, Sequence

from .corpus import Context
from .embeddings import EmbeddingTable
from .globalschema import GlobalSchema, build_global_schema
from .keyphrase import KeyPhrase, extract_keyphrases, phrase_occurrences
from .schema import Schema, extract_sentence_schema, union_schemas


def context_keyphrases(
    ctx: Context,
    top_k: int = 5,
    stopwords: frozenset[str] | None = None,
    window: int = 2,
) -> list[list[KeyPhrase]]:
    """Keyphrases per sentence, aligned with `ctx.all_sentences()`.

    Extraction runs per block (title, description, each utterance), keeping
    `top_k` phrases per block; a phrase is then attached to every sentence
    of the block where its lemma sequence occurs."""
    per_sentence: list[list[KeyPhrase]] = []
    for block_sents in ctx.sentences:
        block_phrases = extract_keyphrases(
            block_sents, top_k=top_k, stopwords=stopwords, window=window
        )
        for sent in block_sents:
            per_sentence.append(
                [p for p in block_phrases if phrase_occurrences(sent, p.words)]
            )
    return per_sentence


def context_schema(
    ctx: Context,
    top_k: int = 5,
    stopwords: frozenset[str] | None = None,
    window: int = 2,
) -> tuple[Schema, Counter]:
    """Local schema of a context plus raw per-sentence element counts."""
    phrases = context_keyphrases(ctx, top_k=top_k, stopwords=stopwords, window=window)
    raw: Counter = Counter()
    schemas = []
    for sent, sent_phrases in zip(ctx.all_sentences(), phrases):
        schema = extract_sentence_schema(sent, sent_phrases)
        raw.update(schema.elements)
        schemas.append(schema)
    return union_schemas(schemas, source=ctx.id), raw


def local_schemas(
    contexts: Sequence[Context],
    top_k: int = 5,
    stopwords: frozenset[str] | None = None,
    window: int = 2,
) -> tuple[dict[str, Schema], dict[str, Counter]]:
    schemas: dict[str, Schema] = {}
    raw_counts: dict[str, Counter] = {}
    for ctx in contexts:
        schema, raw = context_schema(ctx, top_k=top_k, stopwords=stopwords, window=window)
        schemas[ctx.id] = schema
        raw_counts[ctx.id] = raw
    return schemas, raw_counts


def target_schema(
    ctx: Context,
    top_k: int = 5,
    stopwords: frozenset[str] | None = None,
    window: int = 2,
) -> Schema | None:
    """Schema of the context's paired question, when it carries a parse."""
    if ctx.target is None or not ctx.target.sentences:
        return None
    per_sentence = []
    for sent in ctx.target.sentences:
        phrases = extract_keyphrases([sent], top_k=top_k, stopwords=stopwords, window=window)
        per_sentence.append(extract_sentence_schema(sent, phrases))
    return union_schemas(per_sentence, source=f"{ctx.id}#target")


def build_class_globals(
    contexts: Sequence[Context],
    assignment: Mapping[str, str],
    table: EmbeddingTable,
    schemas: Mapping[str, Schema],
    raw_counts: Mapping[str, Counter] | None = None,
    theta: float = 0.6,
    retain: float = 0.6,
    target_schemas: Mapping[str, Schema] | None = None,
) -> dict[str, GlobalSchema]:
    """One global schema per class. Frequencies count each element once per
    context unless `raw_counts` (per-sentence multiplicities) is passed.

    `target_schemas` folds train-split target questions into the class
    counts; validation and test targets are never consulted, so nothing the
    pipeline must later predict leaks into the global view."""
    by_class: dict[str, list[Context]] = {}
    for ctx in contexts:
        by_class.setdefault(assignment[ctx.id], []).append(ctx)

    globals_: dict[str, GlobalSchema] = {}
    for class_id in sorted(by_class):
        members = by_class[class_id]
        locals_ = [schemas[ctx.id] for ctx in members]
        counts: Counter = Counter()
        for ctx in members:
            contribution = set(schemas[ctx.id].elements)
            if target_schemas is not None and ctx.split == "train":
                tgt = target_schemas.get(ctx.id)
                if tgt is not None:
                    contribution |= tgt.elements
            if raw_counts is not None:
                per_ctx: Counter = Counter(raw_counts[ctx.id])
                for el in contribution - set(per_ctx):
                    per_ctx[el] = 1
                counts.update(per_ctx)
            else:
                counts.update(contribution)
        globals_[class_id] = build_global_schema(
            class_id, locals_, table, theta=theta, retain=retain, counts=dict(counts)
        )
    return globals_
