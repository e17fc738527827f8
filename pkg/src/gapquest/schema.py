"""Schema elements mined from dependency trees.

Each keyphrase becomes one element: a (keyphrase, verb, relation) triple
when a verb governs it in the tree, or a bare keyphrase otherwise. The verb
chosen is the nearest verb ancestor; the relation is the dependency label
of that verb's immediate child on the path down to the keyphrase.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .conllu import ParsedSentence, Token
from .keyphrase import KeyPhrase, phrase_occurrences

log = logging.getLogger(__name__)

VERB_XPOS = {"VB", "VBG", "VBZ"}


def is_schema_verb(tok: Token) -> bool:
    """Verb tag set used for triple mining; falls back to the coarse tag
    when no fine-grained tag is present."""
    if tok.xpos is not None:
        return tok.xpos in VERB_XPOS
    return tok.upos == "VERB"


@dataclass(frozen=True, order=True)
class SchemaElement:
    keyphrase: tuple[str, ...]
    verb: str | None = None
    relation: str | None = None

    def __post_init__(self):
        if (self.verb is None) != (self.relation is None):
            raise ValueError("triple elements need both a verb and a relation")

    @property
    def kind(self) -> str:
        return "triple" if self.verb is not None else "bare"

    def text(self) -> str:
        return " ".join(self.keyphrase)

    def to_json(self) -> dict:
        obj: dict = {"kind": self.kind, "keyphrase": list(self.keyphrase)}
        if self.verb is not None:
            obj["verb"] = self.verb
            obj["relation"] = self.relation
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "SchemaElement":
        return cls(
            keyphrase=tuple(obj["keyphrase"]),
            verb=obj.get("verb"),
            relation=obj.get("relation"),
        )


# dataclass order=True sorts None-free tuples only; sort via explicit key
def element_sort_key(el: SchemaElement) -> tuple:
    return (el.keyphrase, el.verb or "", el.relation or "")


@dataclass(frozen=True)
class Schema:
    elements: frozenset[SchemaElement]
    source: str = ""

    def __iter__(self):
        return iter(sorted(self.elements, key=element_sort_key))

    def __len__(self):
        return len(self.elements)

    def __contains__(self, el: SchemaElement) -> bool:
        return el in self.elements

    def keyphrases(self) -> list[tuple[str, ...]]:
        return sorted({el.keyphrase for el in self.elements})

    def union(self, other: "Schema", source: str | None = None) -> "Schema":
        return Schema(
            elements=self.elements | other.elements,
            source=source if source is not None else self.source,
        )

    def to_json(self) -> dict:
        return {"source": self.source, "elements": [el.to_json() for el in self]}

    @classmethod
    def from_json(cls, obj: dict) -> "Schema":
        return cls(
            elements=frozenset(SchemaElement.from_json(e) for e in obj["elements"]),
            source=obj.get("source", ""),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def merge_bigram_nodes(tree: ParsedSentence, phrase: KeyPhrase) -> ParsedSentence:
    """Collapse a bigram keyphrase's two tree nodes into one.

    The merged node keeps the head and relation of whichever constituent
    attaches outside the pair; children of both constituents re-attach to
    it. When the two nodes are not linked to each other (both heads lie
    outside the pair) the tree is returned unchanged with a warning.
    """
    if len(phrase.words) != 2:
        return tree
    spans = phrase_occurrences(tree, phrase.words)
    if not spans:
        return tree
    i, j = spans[0]
    a, b = tree.token(i), tree.token(j)

    if a.head == b.index:
        inner, outer = a, b
    elif b.head == a.index:
        inner, outer = b, a
    else:
        log.warning(
            "bigram %r not merged: tokens %d and %d do not attach to each other",
            phrase.text(), i, j,
        )
        return tree

    merged = Token(
        index=min(i, j),
        surface=f"{a.surface} {b.surface}",
        lemma=f"{a.lemma} {b.lemma}",
        upos=outer.upos,
        xpos=outer.xpos,
        head=outer.head,
        deprel=outer.deprel,
    )
    tokens = [merged]
    pair = {i, j}
    for t in tree.tokens:
        if t.index in pair:
            continue
        if t.head in pair:
            t = Token(t.index, t.surface, t.lemma, t.upos, t.xpos, merged.index, t.deprel)
        tokens.append(t)
    tokens.sort(key=lambda t: t.index)
    return ParsedSentence(tokens=tokens, text=tree.text)


def _anchor_index(tree: ParsedSentence, words: tuple[str, ...]) -> int | None:
    """Tree node standing for the phrase: the merged node when present,
    otherwise the phrase's own tokens; phrases absorbed into a wider merged
    node (or unmerged bigrams) anchor at the node containing them."""
    target = " ".join(words).lower()
    lowered = [w.lower() for w in words]
    for t in tree.tokens:
        if t.lemma.lower() == target:
            return t.index
    spans = phrase_occurrences(tree, words)
    if spans:
        return spans[0][0]
    for t in tree.tokens:
        parts = t.lemma.lower().split(" ")
        if any(parts[i : i + len(lowered)] == lowered for i in range(len(parts))):
            return t.index
    for w in lowered:
        for t in tree.tokens:
            if w in t.lemma.lower().split(" "):
                return t.index
    return None


def extract_sentence_schema(tree: ParsedSentence, phrases: Sequence[KeyPhrase]) -> Schema:
    """One schema element per keyphrase of the sentence.

    Bigram phrases are merged into single nodes first. For each phrase, the
    verbs having the phrase in their subtree compete on path length (ties:
    earlier verb in the sentence wins); without any such verb the phrase
    stays a bare element.
    """
    work = tree
    for phrase in phrases:
        if len(phrase.words) == 2:
            work = merge_bigram_nodes(work, phrase)

    verbs = [t for t in work.tokens if is_schema_verb(t)]
    verb_order = {t.index: rank for rank, t in enumerate(verbs)}

    elements: set[SchemaElement] = set()
    for phrase in phrases:
        anchor = _anchor_index(work, phrase.words)
        if anchor is None:
            log.warning("phrase %r not found in sentence %r", phrase.text(), work.text)
            elements.add(SchemaElement(keyphrase=phrase.words))
            continue

        chain = [work.token(anchor)] + list(work.ancestors(anchor))
        hit = None
        for step, tok in enumerate(chain[1:], start=1):
            if is_schema_verb(tok):
                hit = (step, tok)
                break
        if hit is None:
            elements.add(SchemaElement(keyphrase=phrase.words))
            continue

        step, verb_tok = hit
        # the nearest verb ancestor is also the shortest-path verb among all
        # verbs whose subtree contains the anchor; keep a guard for parses
        # where the tag sets disagree
        if verb_tok.index not in verb_order:
            log.info("rootward walk stopped at unpaired verb %r", verb_tok.lemma)
        relation = chain[step - 1].deprel
        elements.add(
            SchemaElement(
                keyphrase=phrase.words, verb=verb_tok.lemma.lower(), relation=relation
            )
        )
    return Schema(elements=frozenset(elements), source="")


def union_schemas(schemas: Iterable[Schema], source: str) -> Schema:
    elements: frozenset[SchemaElement] = frozenset()
    for schema in schemas:
        elements = elements | schema.elements
    return Schema(elements=elements, source=source)


def local_schema(context, phrases_per_sentence: Sequence[Sequence[KeyPhrase]]) -> Schema:
    """Deduplicated union of every sentence's schema for one context.

    `phrases_per_sentence` aligns with `context.all_sentences()`.
    """
    sentences = context.all_sentences()
    if len(phrases_per_sentence) != len(sentences):
        raise ValueError(
            f"context {context.id}: {len(sentences)} sentences but "
            f"{len(phrases_per_sentence)} phrase groups"
        )
    per_sentence = [
        extract_sentence_schema(sent, phrases)
        for sent, phrases in zip(sentences, phrases_per_sentence)
    ]
    return union_schemas(per_sentence, source=context.id)
