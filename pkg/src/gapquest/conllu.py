"""Dependency-parse ingestion: CoNLL-U reading, tree validation, traversal."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, TextIO


class ConlluError(ValueError):
    """Malformed CoNLL-U input (bad columns, bad head links)."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


@dataclass(frozen=True)
class Token:
    """One word of a parsed sentence. `head` is the 1-based index of the
    governing token, 0 for the sentence root."""

    index: int
    surface: str
    lemma: str
    upos: str
    xpos: str | None
    head: int
    deprel: str


@dataclass
class ParsedSentence:
    tokens: list[Token]
    text: str = ""
    _by_index: dict[int, Token] = field(init=False, repr=False)
    _children: dict[int, list[int]] = field(init=False, repr=False)

    def __post_init__(self):
        self._reindex()

    def _reindex(self):
        self._by_index = {t.index: t for t in self.tokens}
        self._children = {t.index: [] for t in self.tokens}
        self._children[0] = []
        for t in self.tokens:
            if t.head in self._children:
                self._children[t.head].append(t.index)

    def __len__(self):
        return len(self.tokens)

    def token(self, index: int) -> Token:
        return self._by_index[index]

    def has_index(self, index: int) -> bool:
        return index in self._by_index

    def root(self) -> Token:
        return next(t for t in self.tokens if t.head == 0)

    def children(self, index: int) -> list[Token]:
        return [self._by_index[i] for i in self._children.get(index, [])]

    def ancestors(self, index: int) -> Iterable[Token]:
        """Tokens on the path from `index` (exclusive) to the root (inclusive)."""
        head = self._by_index[index].head
        while head != 0:
            tok = self._by_index[head]
            yield tok
            head = tok.head

    def subtree(self, index: int) -> set[int]:
        """Indices of all descendants of `index`, excluding `index` itself."""
        out: set[int] = set()
        stack = list(self._children.get(index, []))
        while stack:
            i = stack.pop()
            out.add(i)
            stack.extend(self._children.get(i, []))
        return out

    def depth(self, index: int) -> int:
        return sum(1 for _ in self.ancestors(index)) + 1

    def validate(self) -> None:
        """Check the structural invariants: unique indices, heads in range,
        exactly one root, acyclic and connected head links."""
        n = len(self.tokens)
        if n == 0:
            raise ConlluError("empty sentence")
        indices = [t.index for t in self.tokens]
        if len(set(indices)) != n:
            raise ConlluError(f"duplicate token indices in {indices}")
        roots = [t for t in self.tokens if t.head == 0]
        if len(roots) != 1:
            raise ConlluError(f"expected exactly one root, found {len(roots)}")
        index_set = set(indices)
        for t in self.tokens:
            if t.head != 0 and t.head not in index_set:
                raise ConlluError(f"token {t.index} has dangling head {t.head}")
            if not t.deprel:
                raise ConlluError(f"token {t.index} has empty deprel")
        # BFS from the root covers every token iff links are acyclic + connected
        seen: set[int] = set()
        queue = [roots[0].index]
        while queue:
            i = queue.pop()
            if i in seen:
                raise ConlluError(f"cycle through token {i}")
            seen.add(i)
            queue.extend(self._children.get(i, []))
        if seen != index_set:
            missing = sorted(index_set - seen)
            raise ConlluError(f"head links do not form a tree; unreachable: {missing}")


def _parse_token_line(line: str, line_no: int) -> Token | None:
    cols = line.split("\t")
    if len(cols) != 10:
        raise ConlluError(f"expected 10 tab-separated columns, got {len(cols)}", line_no)
    tid = cols[0]
    if "-" in tid or "." in tid:
        # multiword-token ranges and empty nodes carry no tree structure
        return None
    try:
        index = int(tid)
        head = int(cols[6])
    except ValueError as exc:
        raise ConlluError(f"non-integer ID or HEAD: {exc}", line_no) from None
    xpos = cols[4] if cols[4] != "_" else None
    lemma = cols[2] if cols[2] != "_" else cols[1].lower()
    return Token(
        index=index,
        surface=cols[1],
        lemma=lemma,
        upos=cols[3],
        xpos=xpos,
        head=head,
        deprel=cols[7],
    )


def parse_conllu(stream: TextIO | str) -> list[ParsedSentence]:
    """Parse a CoNLL-U stream into validated sentences.

    Blank lines separate sentences; `#` lines are comments (`# text = ...`
    is kept as the sentence text); multiword-token range lines are skipped.
    Raises ConlluError with a line number on malformed input.
    """
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = [ln.rstrip("\n") for ln in stream]

    sentences: list[ParsedSentence] = []
    tokens: list[Token] = []
    text = ""

    def flush():
        nonlocal tokens, text
        if tokens:
            sent = ParsedSentence(tokens=tokens, text=text)
            sent.validate()
            sentences.append(sent)
        tokens, text = [], ""

    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("text") and "=" in body:
                text = body.split("=", 1)[1].strip()
            continue
        tok = _parse_token_line(line, line_no)
        if tok is not None:
            tokens.append(tok)
    flush()
    return sentences


def serialize_conllu(sentences: Iterable[ParsedSentence]) -> str:
    """Inverse of parse_conllu for the token fields we keep."""
    chunks = []
    for sent in sentences:
        lines = []
        if sent.text:
            lines.append(f"# text = {sent.text}")
        for t in sorted(sent.tokens, key=lambda t: t.index):
            lines.append(
                "\t".join(
                    [
                        str(t.index),
                        t.surface,
                        t.lemma,
                        t.upos,
                        t.xpos if t.xpos is not None else "_",
                        "_",
                        str(t.head),
                        t.deprel,
                        "_",
                        "_",
                    ]
                )
            )
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + ("\n" if chunks else "")


def sentence_to_json(sent: ParsedSentence) -> dict:
    return {
        "text": sent.text,
        "tokens": [
            {
                "index": t.index,
                "surface": t.surface,
                "lemma": t.lemma,
                "upos": t.upos,
                "xpos": t.xpos,
                "head": t.head,
                "deprel": t.deprel,
            }
            for t in sent.tokens
        ],
    }


def sentence_from_json(obj: dict) -> ParsedSentence:
    tokens = [Token(**tok) for tok in obj["tokens"]]
    return ParsedSentence(tokens=tokens, text=obj.get("text", ""))


def replace_token(sent: ParsedSentence, index: int, **changes) -> ParsedSentence:
    """New sentence with one token's fields replaced."""
    tokens = [replace(t, **changes) if t.index == index else t for t in sent.tokens]
    return ParsedSentence(tokens=tokens, text=sent.text)
