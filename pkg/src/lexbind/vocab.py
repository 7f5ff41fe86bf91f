"""Joint target-first vocabulary with a restricted decoder output slice.

Index layout is specials ++ target-side words ++ source-only words; every
index below target_size (= |specials| + |target words|) is a legal decoder
output, everything above is input-only.  Words seen on both sides land in
the target part so they stay decodable; annotation tags are force-included
on the target side for the same reason.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .annotator import TAGS

PAD, UNK, BOS, EOS = 0, 1, 2, 3
SPECIALS = ("<pad>", "<unk>", "<bos>", "<eos>")


@dataclass
class JointVocab:
    tgt_words: list[str]
    src_words: list[str]
    specials: tuple[str, ...] = SPECIALS
    _tokens: list = field(default_factory=list, repr=False, compare=False)
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._tokens = list(self.specials) + self.tgt_words + self.src_words
        if len(set(self._tokens)) != len(self._tokens):
            raise ValueError("duplicate token in vocabulary")
        self._index = {t: i for i, t in enumerate(self._tokens)}

    @property
    def tokens(self) -> list[str]:
        return list(self._tokens)

    @property
    def target_size(self) -> int:
        return len(self.specials) + len(self.tgt_words)

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def index(self, token: str) -> int:
        return self._index.get(token, UNK)

    def token(self, index: int) -> str:
        if not 0 <= index < len(self):
            raise IndexError(f"vocab index {index} out of range [0,{len(self)})")
        return self._tokens[index]


def _ordered_side(counts: Counter, min_freq: int, forced: Sequence[str] = ()) -> list[str]:
    keep = {t for t, c in counts.items() if c >= min_freq}
    keep.update(forced)
    return sorted(keep, key=lambda t: (-counts.get(t, 0), t))


def build_vocab(
    src_corpus: Iterable[Sequence[str]],
    tgt_corpus: Iterable[Sequence[str]],
    min_freq: int = 1,
    max_side_size: Optional[int] = None,
) -> JointVocab:
    """Count per side, threshold by min_freq, order by falling frequency then
    lexicographically; source tokens already present on the target side (or
    colliding with a reserved symbol) are dropped from the source part."""
    src_counts: Counter = Counter()
    tgt_counts: Counter = Counter()
    for sent in src_corpus:
        src_counts.update(sent)
    for sent in tgt_corpus:
        tgt_counts.update(sent)

    tgt_words = _ordered_side(tgt_counts, min_freq, forced=TAGS)
    src_words = _ordered_side(src_counts, min_freq)
    if max_side_size is not None:
        tgt_words = tgt_words[:max_side_size]
        for tag in TAGS:
            if tag not in tgt_words:
                tgt_words.append(tag)
        src_words = src_words[:max_side_size]
    taken = set(SPECIALS) | set(tgt_words)
    src_words = [t for t in src_words if t not in taken]
    return JointVocab(tgt_words=tgt_words, src_words=src_words)


def encode(sent: Sequence[str], v: JointVocab) -> list[int]:
    return [v.index(t) for t in sent]


def decode(indices: Sequence[int], v: JointVocab) -> list[str]:
    return [v.token(i) for i in indices]


def restriction_mask(v: JointVocab) -> np.ndarray:
    """Boolean vector over the full index space; True iff decodable."""
    mask = np.zeros(len(v), dtype=bool)
    mask[: v.target_size] = True
    return mask


def save_vocab(path: str, v: JointVocab) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"#target_size={v.target_size}\n")
        for token in v.tokens:
            f.write(token + "\n")


def load_vocab(path: str) -> JointVocab:
    with open(path, encoding="utf-8") as f:
        header = f.readline().rstrip("\n")
        if not header.startswith("#target_size="):
            raise ValueError(f"{path}: bad header {header!r}")
        target_size = int(header.split("=", 1)[1])
        tokens = [line.rstrip("\n") for line in f]
    while tokens and tokens[-1] == "":
        tokens.pop()
    if tokens[: len(SPECIALS)] != list(SPECIALS):
        raise ValueError(f"{path}: reserved symbols missing or reordered")
    if not len(SPECIALS) <= target_size <= len(tokens):
        raise ValueError(f"{path}: target_size {target_size} out of range")
    return JointVocab(
        tgt_words=tokens[len(SPECIALS) : target_size],
        src_words=tokens[target_size:],
    )
