import math
from pathlib import Path

import numpy as np
import pytest

from gapquest.conllu import parse_conllu
from gapquest.embeddings import EmbeddingTable

REPO = Path(__file__).resolve().parent.parent
TOY = REPO / "data" / "toy"


@pytest.fixture(scope="session")
def toy_dir() -> Path:
    return TOY


def make_table(vectors: dict[str, list[float]]) -> EmbeddingTable:
    dim = len(next(iter(vectors.values())))
    return EmbeddingTable(
        {w: np.asarray(v, dtype=np.float64) for w, v in vectors.items()}, dim
    )


def unit_mix(dim: int, anchor: int, own: int, cos: float) -> list[float]:
    """Vector with exactly `cos` similarity to the `anchor` basis axis."""
    v = [0.0] * dim
    v[anchor] = cos
    v[own] = math.sqrt(1.0 - cos * cos)
    return v


def compact_sentence(spec: str, text: str = ""):
    """Expand `surface lemma upos xpos head deprel` rows into a parsed
    sentence; the same shorthand the toy-corpus generator uses."""
    lines = [f"# text = {text}"] if text else []
    rows = [r.split() for r in spec.strip().splitlines() if r.strip()]
    for i, (surface, lemma, upos, xpos, head, deprel) in enumerate(rows, start=1):
        lines.append(f"{i}\t{surface}\t{lemma}\t{upos}\t{xpos}\t_\t{head}\t{deprel}\t_\t_")
    return parse_conllu("\n".join(lines))[0]


# The Fig.-2-style sentence used across schema tests: a bigram keyphrase, a
# coordinated noun, and one verb governing everything.
BAG_SPEC = """
    Will will AUX MD 4 aux
    this this DET DT 3 det
    bag bag NOUN NN 4 nsubj
    hold hold VERB VB 0 root
    a a DET DT 7 det
    gaming gaming NOUN NN 7 compound
    laptop laptop NOUN NN 4 obj
    and and CCONJ CC 10 cc
    an an DET DT 10 det
    iPad ipad PROPN NNP 7 conj
    ? ? PUNCT . 4 punct
"""


@pytest.fixture
def bag_sentence():
    return compact_sentence(BAG_SPEC, "Will this bag hold a gaming laptop and an iPad?")
