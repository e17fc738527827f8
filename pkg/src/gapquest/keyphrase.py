"""Statistical keyphrase extraction (unigrams and bigrams, lower score =
more important) with a noun-containing filter.

Term scores combine five corpus-free features — casing, sentence position,
normalized frequency, context relatedness, and sentence dispersion:

    S(t) = (rel * pos) / (case + freq / rel + disp / rel)

and a candidate phrase is scored

    S(kw) = prod(S(t)) / (TF(kw) * (1 + sum(S(t))))

Candidates are contiguous windows of 1-2 non-stopword, non-punctuation
tokens, canonicalized by lemma. Only phrases containing at least one noun
survive when part-of-speech tags are available.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

from .conllu import ParsedSentence
from .textutil import is_punct, tokenize

NOUN_TAGS = {"NOUN", "PROPN"}

# verbs and auxiliaries stay out of candidate phrases: a keyphrase that
# swallowed a verb could not be paired with it in the dependency tree
_NON_CANDIDATE_UPOS = {"VERB", "AUX"}


def load_stopwords(path: Path | None = None) -> frozenset[str]:
    """Bundled stopword list, or a one-word-per-line override file."""
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = resources.files("gapquest.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


_DEFAULT_STOPWORDS: frozenset[str] | None = None


def default_stopwords() -> frozenset[str]:
    global _DEFAULT_STOPWORDS
    if _DEFAULT_STOPWORDS is None:
        _DEFAULT_STOPWORDS = load_stopwords()
    return _DEFAULT_STOPWORDS


@dataclass(frozen=True)
class KeyPhrase:
    words: tuple[str, ...]  # 1 or 2 lemmas
    score: float
    span: tuple[int, tuple[int, int]]  # (sentence index, (first, last) token index)

    def text(self) -> str:
        return " ".join(self.words)


@dataclass
class _Slot:
    term: str  # lowercased lemma, the scoring key
    surface: str
    noun: bool
    stop: bool  # excluded from candidate windows (stopword or verb/aux)
    token_index: int


def _sentence_slots(sent: ParsedSentence, stopwords: frozenset[str]) -> list[_Slot]:
    slots = []
    for tok in sent.tokens:
        if tok.upos == "PUNCT" or is_punct(tok.surface):
            continue
        term = tok.lemma.lower()
        stop = (
            term in stopwords
            or tok.surface.lower() in stopwords
            or tok.upos in _NON_CANDIDATE_UPOS
        )
        slots.append(
            _Slot(term=term, surface=tok.surface, noun=tok.upos in NOUN_TAGS,
                  stop=stop, token_index=tok.index)
        )
    return slots


def _text_slots(text: str) -> list[_Slot]:
    """Parse-free slots for raw text: lemma = lowercased surface, no POS."""
    slots = []
    stopwords = default_stopwords()
    for i, tok in enumerate(tokenize(text, lowercase=False), start=1):
        if is_punct(tok):
            continue
        slots.append(
            _Slot(term=tok.lower(), surface=tok, noun=False,
                  stop=tok.lower() in stopwords, token_index=i)
        )
    return slots


class _TermStats:
    __slots__ = ("tf", "tf_upper", "tf_acronym", "sentences", "left", "right")

    def __init__(self):
        self.tf = 0
        self.tf_upper = 0
        self.tf_acronym = 0
        self.sentences: set[int] = set()
        self.left: list[str] = []
        self.right: list[str] = []


def _collect_stats(sentences: list[list[_Slot]], window: int) -> dict[str, _TermStats]:
    stats: dict[str, _TermStats] = {}
    for s_idx, slots in enumerate(sentences):
        for pos, slot in enumerate(slots):
            st = stats.setdefault(slot.term, _TermStats())
            st.tf += 1
            st.sentences.add(s_idx)
            surf = slot.surface
            if len(surf) > 1 and surf.isupper():
                st.tf_acronym += 1
            elif pos > 0 and surf[:1].isupper():
                st.tf_upper += 1
            st.left.extend(sl.term for sl in slots[max(0, pos - window):pos])
            st.right.extend(sl.term for sl in slots[pos + 1:pos + 1 + window])
    return stats


def _term_scores(
    sentences: list[list[_Slot]], stopwords_seen: set[str], window: int
) -> dict[str, float]:
    stats = _collect_stats(sentences, window)
    if not stats:
        return {}
    # frequency statistics over content terms only; every term still scored
    tfs = [st.tf for t, st in stats.items() if t not in stopwords_seen] or [
        st.tf for st in stats.values()
    ]
    mean_tf = statistics.fmean(tfs)
    std_tf = statistics.pstdev(tfs)
    max_tf = max(st.tf for st in stats.values())
    n_sentences = len(sentences)

    scores: dict[str, float] = {}
    for term, st in stats.items():
        case = max(st.tf_upper, st.tf_acronym) / (1.0 + math.log(st.tf))
        pos = math.log(math.log(3.0 + statistics.median(sorted(st.sentences))))
        freq = st.tf / (mean_tf + std_tf)
        dl = len(set(st.left)) / len(st.left) if st.left else 0.0
        dr = len(set(st.right)) / len(st.right) if st.right else 0.0
        rel = 1.0 + (dl + dr) * st.tf / max_tf
        disp = len(st.sentences) / n_sentences
        scores[term] = (rel * pos) / (case + freq / rel + disp / rel)
    return scores


def _candidates(
    sentences: list[list[_Slot]], require_noun: bool
) -> dict[tuple[str, ...], dict]:
    """Contiguous 1-2 slot windows with no stopwords, keyed by lemma tuple.

    Contiguity is judged on the original token indices, so a skipped
    punctuation token breaks a window.
    """
    cands: dict[tuple[str, ...], dict] = {}

    def add(words, nouns, s_idx, first, last):
        if require_noun and not nouns:
            return
        entry = cands.setdefault(words, {"tf": 0, "span": (s_idx, (first, last))})
        entry["tf"] += 1

    for s_idx, slots in enumerate(sentences):
        for i, slot in enumerate(slots):
            if slot.stop:
                continue
            add((slot.term,), slot.noun, s_idx, slot.token_index, slot.token_index)
            if i + 1 < len(slots):
                nxt = slots[i + 1]
                if not nxt.stop and nxt.token_index == slot.token_index + 1:
                    add((slot.term, nxt.term), slot.noun or nxt.noun,
                        s_idx, slot.token_index, nxt.token_index)
    return cands


def _score_and_rank(
    sentences: list[list[_Slot]],
    top_k: int | None,
    window: int,
    require_noun: bool,
) -> list[KeyPhrase]:
    if not sentences:
        return []
    stop_terms = {sl.term for slots in sentences for sl in slots if sl.stop}
    term_scores = _term_scores(sentences, stop_terms, window)
    phrases = []
    for words, entry in _candidates(sentences, require_noun).items():
        s_terms = [term_scores[w] for w in words]
        score = math.prod(s_terms) / (entry["tf"] * (1.0 + sum(s_terms)))
        phrases.append(KeyPhrase(words=words, score=score, span=entry["span"]))
    phrases.sort(key=lambda p: (p.score, p.words))
    if top_k is not None:
        phrases = phrases[:top_k]
    return phrases


def extract_keyphrases(
    sentences: Sequence[ParsedSentence],
    top_k: int = 5,
    stopwords: frozenset[str] | None = None,
    window: int = 2,
) -> list[KeyPhrase]:
    """Top `top_k` noun-containing keyphrases for a group of parsed
    sentences, sorted by (score ascending, lexicographic). Deduplicated by
    lemma sequence; the span points at the first occurrence."""
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    if stopwords is None:
        stopwords = default_stopwords()
    slot_lists = [_sentence_slots(s, stopwords) for s in sentences]
    return _score_and_rank(slot_lists, top_k, window, require_noun=True)


def extract_keyphrases_text(
    text: str, top_k: int | None = None, window: int = 2
) -> list[KeyPhrase]:
    """Keyphrases from raw text with no parse available: no lemmas, no noun
    filter. Used for analyzing generated questions."""
    slots = _text_slots(text)
    return _score_and_rank([slots], top_k, window, require_noun=False)


def phrase_occurrences(sent: ParsedSentence, words: Sequence[str]) -> list[tuple[int, int]]:
    """(first, last) token-index pairs where `words` occurs as a contiguous
    lemma run in the sentence."""
    lemmas = {t.index: t.lemma.lower() for t in sent.tokens}
    indices = sorted(lemmas)
    words = [w.lower() for w in words]
    out = []
    for start in indices:
        span = [start + off for off in range(len(words))]
        if all(lemmas.get(i) == w for i, w in zip(span, words)):
            out.append((span[0], span[-1]))
    return out
