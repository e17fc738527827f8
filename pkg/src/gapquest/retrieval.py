"""Retrieval-based question generation: pick training questions whose
schemas overlap most with a context's missing schema, then re-rank by the
usefulness model. The generator surface is a plain callable contract, so a
neural generator can be dropped in externally."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .embeddings import EmbeddingTable, phrases_match
from .globalschema import MissingSchema
from .keyphrase import extract_keyphrases
from .schema import Schema, SchemaElement, element_sort_key, extract_sentence_schema, union_schemas
from .usefulness import UsefulnessModel, usefulness_score


class QuestionGenerator(Protocol):
    """Anything that maps a missing schema to ranked question strings."""

    def __call__(self, missing: MissingSchema, k: int) -> list[str]: ...


@dataclass(frozen=True)
class IndexEntry:
    question: str
    schema: Schema
    class_id: str

    @property
    def schema_less(self) -> bool:
        return len(self.schema) == 0


@dataclass
class QuestionIndex:
    entries: list[IndexEntry]

    def __len__(self):
        return len(self.entries)

    def to_json(self) -> dict:
        return {
            "entries": [
                {"question": e.question, "schema": e.schema.to_json(), "class_id": e.class_id}
                for e in self.entries
            ]
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QuestionIndex":
        return cls(
            entries=[
                IndexEntry(
                    question=e["question"],
                    schema=Schema.from_json(e["schema"]),
                    class_id=e["class_id"],
                )
                for e in obj["entries"]
            ]
        )


@dataclass
class RankedCandidate:
    question: str
    overlap: int
    usefulness: float = 0.0
    combined: float = 0.0
    trace: list[tuple[SchemaElement, SchemaElement]] = field(default_factory=list)
    # trace pairs: (question schema element, missing element it matched)

    def to_json(self) -> dict:
        return {
            "question": self.question,
            "overlap": self.overlap,
            "usefulness": self.usefulness,
            "combined": self.combined,
            "trace": [
                {"question_element": q.to_json(), "missing_element": m.to_json()}
                for q, m in self.trace
            ],
        }


def _normalize_question(text: str) -> str:
    return " ".join(text.lower().split())


def build_index(
    train_pairs: Sequence[tuple[str, object]],
    top_k: int = 5,
) -> QuestionIndex:
    """Index the training split's questions by their schemas.

    `train_pairs` holds (class_id, question) pairs where each question is a
    TargetQuestion-like object with `.text` and parsed `.sentences`.
    Questions without a parse are kept (flagged schema-less by an empty
    schema); duplicate question strings collapse to their first entry.
    """
    if not train_pairs:
        raise ValueError("cannot build an index from an empty training set")
    seen: set[str] = set()
    entries: list[IndexEntry] = []
    for class_id, question in train_pairs:
        key = _normalize_question(question.text)
        if key in seen:
            continue
        seen.add(key)
        if question.sentences:
            per_sentence = []
            for sent in question.sentences:
                phrases = extract_keyphrases([sent], top_k=top_k)
                per_sentence.append(extract_sentence_schema(sent, phrases))
            schema = union_schemas(per_sentence, source=key)
        else:
            schema = Schema(elements=frozenset(), source=key)
        entries.append(IndexEntry(question=question.text, schema=schema, class_id=class_id))
    return QuestionIndex(entries=entries)


def overlap_score(
    question_schema: Schema,
    missing: MissingSchema,
    table: EmbeddingTable,
    match_theta: float = 0.8,
) -> tuple[int, list[tuple[SchemaElement, SchemaElement]]]:
    """How many of the question's schema elements talk about missing
    information: each question element counts once if its keyphrase matches
    any missing element's keyphrase. Returns the count and the matched
    (question element, missing element) trace."""
    trace = []
    for q_el in sorted(question_schema.elements, key=element_sort_key):
        for m_el in missing.elements:
            if phrases_match(table, q_el.keyphrase, m_el.keyphrase, match_theta):
                trace.append((q_el, m_el))
                break
    return len(trace), trace


def retrieve(
    index: QuestionIndex,
    missing: MissingSchema,
    table: EmbeddingTable,
    k: int = 5,
    match_theta: float = 0.8,
    class_filter: str | None = None,
) -> list[RankedCandidate]:
    """Top-k index questions by missing-schema overlap (ties: usefulness
    desc, then question text). A full scan of the index, optionally
    restricted to one class."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not index.entries:
        raise ValueError("question index is empty")
    entries = index.entries
    if class_filter is not None:
        entries = [e for e in entries if e.class_id == class_filter]
        if not entries:
            raise ValueError(f"no index entries for class {class_filter!r}")

    candidates = []
    for entry in entries:
        overlap, trace = overlap_score(entry.schema, missing, table, match_theta)
        candidates.append(
            RankedCandidate(question=entry.question, overlap=overlap, trace=trace)
        )
    candidates.sort(key=lambda c: (-c.overlap, -c.usefulness, c.question))
    return candidates[:k]


def rerank_useful(
    candidates: Sequence[RankedCandidate],
    model: UsefulnessModel,
    table: EmbeddingTable,
    alpha: float = 0.5,
) -> list[RankedCandidate]:
    """Blend overlap and usefulness:

        combined = alpha * overlap / max_overlap + (1 - alpha) * usefulness

    (overlap normalized by the best candidate's, 0 when all overlaps are
    zero), then stable-sort by combined descending. alpha=1 reproduces the
    retrieval order; alpha=0 orders purely by usefulness."""
    if not candidates:
        raise ValueError("no candidates to rerank")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    max_overlap = max(c.overlap for c in candidates)
    reranked = []
    for c in candidates:
        useful = usefulness_score(model, c.question, table)
        norm = c.overlap / max_overlap if max_overlap > 0 else 0.0
        reranked.append(
            RankedCandidate(
                question=c.question,
                overlap=c.overlap,
                usefulness=useful,
                combined=alpha * norm + (1.0 - alpha) * useful,
                trace=list(c.trace),
            )
        )
    reranked.sort(key=lambda c: -c.combined)
    return reranked
