"""Context corpus: JSON-lines loading, block structure, parse attachment."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .conllu import ParsedSentence, parse_conllu, sentence_from_json, sentence_to_json

SCENARIOS = ("communityQA", "dialog")


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class Block:
    kind: str  # title | description | question | utterance
    text: str


@dataclass
class TargetQuestion:
    """The reference clarification question paired with a context, with an
    optional dependency parse so its schema can be extracted."""

    text: str
    sentences: list[ParsedSentence] = field(default_factory=list)


SPLITS = ("train", "validation", "test")


@dataclass
class Context:
    id: str
    scenario: str
    blocks: list[Block]
    sentences: list[list[ParsedSentence]]  # one list per block
    class_hint: tuple[str, ...] | None = None
    target: TargetQuestion | None = None
    split: str = "train"

    def all_sentences(self) -> list[ParsedSentence]:
        return [s for block in self.sentences for s in block]

    def token_length(self) -> int:
        return sum(len(s) for s in self.all_sentences())

    def validate(self) -> None:
        if not any(self.sentences) or not self.all_sentences():
            raise CorpusError(f"context {self.id}: no parsed sentences")
        if self.scenario not in SCENARIOS:
            raise CorpusError(f"context {self.id}: unknown scenario {self.scenario!r}")
        if self.split not in SPLITS:
            raise CorpusError(f"context {self.id}: unknown split {self.split!r}")
        if len(self.blocks) != len(self.sentences):
            raise CorpusError(
                f"context {self.id}: {len(self.blocks)} blocks but "
                f"{len(self.sentences)} parse groups"
            )
        if self.scenario == "dialog":
            utterances = sum(1 for b in self.blocks if b.kind == "utterance")
            if not 5 <= utterances <= 10:
                raise CorpusError(
                    f"context {self.id}: dialog needs 5..10 utterances, has {utterances}"
                )


def _parse_block_parses(raw) -> list[ParsedSentence]:
    """Inline parses for one block: a CoNLL-U string or a list of them."""
    if isinstance(raw, str):
        return parse_conllu(raw)
    sentences: list[ParsedSentence] = []
    for chunk in raw:
        sentences.extend(parse_conllu(chunk))
    return sentences


def load_sidecar_conllu(path: Path) -> dict[tuple[str, int], list[ParsedSentence]]:
    """Read a .conllu file whose sentences carry `# context = <id>` and
    `# block = <int>` comments, grouped by (context id, block index)."""
    groups: dict[tuple[str, int], list[ParsedSentence]] = {}
    current: list[str] = []
    ctx_id: str | None = None
    block_idx: int | None = None

    def flush():
        nonlocal current, ctx_id, block_idx
        chunk = "\n".join(current).strip()
        if chunk:
            if ctx_id is None or block_idx is None:
                raise CorpusError("sidecar sentence missing `# context` / `# block` keys")
            groups.setdefault((ctx_id, block_idx), []).extend(parse_conllu(chunk))
        current, ctx_id, block_idx = [], None, None

    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            flush()
            continue
        if line.startswith("# context"):
            ctx_id = line.split("=", 1)[1].strip()
        elif line.startswith("# block"):
            block_idx = int(line.split("=", 1)[1].strip())
        current.append(line)
    flush()
    return groups


def context_from_json(
    obj: dict, sidecar: dict[tuple[str, int], list[ParsedSentence]] | None = None
) -> Context:
    try:
        ctx_id = obj["id"]
        scenario = obj["scenario"]
        blocks = [Block(kind=b["kind"], text=b["text"]) for b in obj["blocks"]]
    except KeyError as exc:
        raise CorpusError(f"context object missing key {exc}") from None

    class_hint = tuple(obj["class_hint"]) if obj.get("class_hint") else None

    if "parses" in obj:
        raw_parses = obj["parses"]
        if len(raw_parses) != len(blocks):
            raise CorpusError(f"context {ctx_id}: parses/blocks length mismatch")
        sentences = [_parse_block_parses(raw) for raw in raw_parses]
    elif sidecar is not None:
        sentences = [sidecar.get((ctx_id, i), []) for i in range(len(blocks))]
    else:
        raise CorpusError(f"context {ctx_id}: no inline parses and no sidecar file")

    target = None
    if obj.get("target"):
        t = obj["target"]
        tsents = parse_conllu(t["conllu"]) if t.get("conllu") else []
        target = TargetQuestion(text=t["text"], sentences=tsents)

    ctx = Context(
        id=ctx_id,
        scenario=scenario,
        blocks=blocks,
        sentences=sentences,
        class_hint=class_hint,
        target=target,
        split=obj.get("split", "train"),
    )
    ctx.validate()
    return ctx


def load_contexts(path: Path, sidecar_path: Path | None = None) -> list[Context]:
    """Load a JSON-lines context file. When `sidecar_path` is not given and a
    file named `<stem>.conllu` sits next to the corpus, it is used for any
    context without inline parses."""
    path = Path(path)
    if sidecar_path is None:
        candidate = path.with_suffix(".conllu")
        sidecar_path = candidate if candidate.exists() else None
    sidecar = load_sidecar_conllu(Path(sidecar_path)) if sidecar_path else None

    contexts = []
    seen: set[str] = set()
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path}:{line_no}: invalid JSON ({exc})") from None
        ctx = context_from_json(obj, sidecar)
        if ctx.id in seen:
            raise CorpusError(f"{path}:{line_no}: duplicate context id {ctx.id!r}")
        seen.add(ctx.id)
        contexts.append(ctx)
    return contexts


def context_to_json(ctx: Context) -> dict:
    obj = {
        "id": ctx.id,
        "scenario": ctx.scenario,
        "split": ctx.split,
        "blocks": [{"kind": b.kind, "text": b.text} for b in ctx.blocks],
        "sentences": [[sentence_to_json(s) for s in block] for block in ctx.sentences],
    }
    if ctx.class_hint:
        obj["class_hint"] = list(ctx.class_hint)
    if ctx.target:
        obj["target"] = {
            "text": ctx.target.text,
            "sentences": [sentence_to_json(s) for s in ctx.target.sentences],
        }
    return obj


def context_from_normalized_json(obj: dict) -> Context:
    """Inverse of context_to_json (already-parsed sentence records)."""
    target = None
    if obj.get("target"):
        target = TargetQuestion(
            text=obj["target"]["text"],
            sentences=[sentence_from_json(s) for s in obj["target"].get("sentences", [])],
        )
    return Context(
        id=obj["id"],
        scenario=obj["scenario"],
        blocks=[Block(kind=b["kind"], text=b["text"]) for b in obj["blocks"]],
        sentences=[[sentence_from_json(s) for s in block] for block in obj["sentences"]],
        class_hint=tuple(obj["class_hint"]) if obj.get("class_hint") else None,
        target=target,
        split=obj.get("split", "train"),
    )
