"""Shared tokenization rules so metric scores and text-mode keyphrase
extraction are reproducible bit-for-bit.

A token is a maximal run of alphanumerics (apostrophes and hyphens allowed
inside); every other non-space character becomes its own single-character
token. Lowercasing is applied unless casing is explicitly kept.
"""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"[A-Za-z0-9_]+(?:['\-][A-Za-z0-9_]+)*|[^\sA-Za-z0-9_]")


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    tokens = _TOKEN_RE.findall(text)
    if lowercase:
        tokens = [t.lower() for t in tokens]
    return tokens


def is_punct(token: str) -> bool:
    return not any(ch.isalnum() for ch in token)
