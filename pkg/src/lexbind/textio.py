"""Line-oriented corpus I/O.

All corpus files are UTF-8 text, one sentence per line, tokens separated by
single spaces.  Aligned files pair up line by line.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Iterator


class CorpusError(ValueError):
    """Raised for malformed corpus input (empty line, bad alignment, ...)."""


def tokenize(line: str) -> list[str]:
    return line.split()


def read_corpus(path: str) -> list[list[str]]:
    """Read a tokenized corpus; empty lines are rejected."""
    sentences = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            tokens = line.split()
            if not tokens:
                raise CorpusError(f"{path}:{lineno}: empty sentence")
            sentences.append(tokens)
    return sentences


def iter_corpus(path: str) -> Iterator[list[str]]:
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            tokens = line.split()
            if not tokens:
                raise CorpusError(f"{path}:{lineno}: empty sentence")
            yield tokens


def write_corpus(path: str, sentences: Iterable[list[str]]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for tokens in sentences:
            f.write(" ".join(tokens))
            f.write("\n")


def count_lines(path: str) -> int:
    n = 0
    with open(path, encoding="utf-8") as f:
        for _ in f:
            n += 1
    return n


def file_digest(path: str) -> str:
    """Hex sha256 of a file's raw bytes."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
