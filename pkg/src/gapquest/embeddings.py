"""Word-embedding table with the phrase-averaging and similarity primitives
used by clustering, schema differencing, and retrieval."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

log = logging.getLogger(__name__)


class EmbeddingError(ValueError):
    pass


class EmbeddingTable:
    """Immutable word -> vector map. Lookup is lowercase-canonical."""

    def __init__(self, vectors: dict[str, np.ndarray], dimension: int, duplicates: int = 0):
        if dimension <= 0:
            raise EmbeddingError(f"dimension must be positive, got {dimension}")
        self.dimension = dimension
        self.duplicates = duplicates
        self._vectors = vectors

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def get(self, word: str) -> np.ndarray | None:
        return self._vectors.get(word.lower())

    def words(self) -> Iterable[str]:
        return self._vectors.keys()


def load_embeddings(stream: TextIO | str) -> EmbeddingTable:
    """Read a plain-text embedding file (`word v1 v2 ... vd` per line).

    The dimension is inferred from the first line; lines with a different
    dimension or non-numeric components raise. Duplicate words: last one
    wins, with a warning counter kept on the table.
    """
    if isinstance(stream, str):
        lines: Iterable[str] = stream.splitlines()
    else:
        lines = stream

    vectors: dict[str, np.ndarray] = {}
    dimension = 0
    duplicates = 0
    for line_no, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        parts = line.split(" ")
        word = parts[0].lower()
        try:
            vec = np.array([float(x) for x in parts[1:] if x != ""], dtype=np.float64)
        except ValueError:
            raise EmbeddingError(f"line {line_no}: non-numeric vector component") from None
        if dimension == 0:
            dimension = vec.size
            if dimension == 0:
                raise EmbeddingError(f"line {line_no}: no vector components")
        elif vec.size != dimension:
            raise EmbeddingError(
                f"line {line_no}: expected {dimension} components, got {vec.size}"
            )
        if word in vectors:
            duplicates += 1
            log.warning("duplicate embedding for %r (line %d), keeping the later one", word, line_no)
        vec.setflags(write=False)
        vectors[word] = vec
    return EmbeddingTable(vectors, dimension or 1, duplicates=duplicates)


@dataclass(frozen=True)
class PhraseVector:
    vector: np.ndarray
    all_oov: bool


def embed_phrase(table: EmbeddingTable, words: Sequence[str]) -> PhraseVector:
    """Componentwise mean of the in-vocabulary word vectors.

    Out-of-vocabulary words are skipped; a phrase with no known word gets a
    zero vector flagged all_oov so downstream matching treats it as
    never-similar.
    """
    if not words:
        raise ValueError("embed_phrase requires at least one word")
    found = [table.get(w) for w in words]
    found = [v for v in found if v is not None]
    if not found:
        return PhraseVector(np.zeros(table.dimension), all_oov=True)
    return PhraseVector(np.mean(found, axis=0), all_oov=False)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; 0.0 when either vector has zero norm."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def phrase_similarity(table: EmbeddingTable, a: Sequence[str], b: Sequence[str]) -> float:
    """Cosine between averaged phrase embeddings; 0 when either side is
    entirely out of vocabulary."""
    pa = embed_phrase(table, a)
    pb = embed_phrase(table, b)
    if pa.all_oov or pb.all_oov:
        return 0.0
    return cosine(pa.vector, pb.vector)


def phrases_match(
    table: EmbeddingTable, a: Sequence[str], b: Sequence[str], theta: float
) -> bool:
    """Semantic match predicate shared by schema differencing and overlap
    scoring.

    Identical word sequences always match; otherwise both phrases must be
    in-vocabulary and their cosine must reach `theta`. A theta above 1
    therefore reduces matching to exact equality.
    """
    if tuple(a) == tuple(b):
        return True
    return phrase_similarity(table, a, b) >= theta
