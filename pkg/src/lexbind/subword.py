"""Byte-pair encoding with protected tokens and the `@@` continuation marker.

Learning and segmentation run on a compiled kernel (lexbind._bpe_fast) when
the extension was built, falling back to the pure-Python twin otherwise; set
LEXBIND_PURE_PYTHON=1 to force the fallback.  Annotation tags are protected:
they are excluded from merge statistics and pass through segmentation
unchanged.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .annotator import TAGS

if os.environ.get("LEXBIND_PURE_PYTHON") == "1":
    from . import _bpe_py as _kernel
else:
    try:
        from . import _bpe_fast as _kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _bpe_py as _kernel

KERNEL = _kernel.KERNEL
MARKER = "@@"
DEFAULT_PROTECTED = frozenset(TAGS)


@dataclass
class BpeModel:
    merges: list[tuple[str, str]]
    protected: frozenset[str] = DEFAULT_PROTECTED
    marker: str = MARKER
    _ranks: dict = field(default_factory=dict, repr=False, compare=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.merges)) != len(self.merges):
            raise ValueError("duplicate merge rule")
        self.protected = frozenset(self.protected) | DEFAULT_PROTECTED
        self._ranks = {pair: rank for rank, pair in enumerate(self.merges)}
        self._cache = {}

    def segment(self, token: str) -> list[str]:
        """Pieces for one token, continuation markers attached."""
        if token in self.protected:
            return [token]
        pieces = self._cache.get(token)
        if pieces is None:
            raw = _kernel.segment(token, self._ranks)
            pieces = [p + self.marker for p in raw[:-1]] + [raw[-1]]
            self._cache[token] = pieces
        return list(pieces)


def bpe_learn(
    sentences: Iterable[Sequence[str]],
    max_merges: int,
    protected: Iterable[str] = (),
) -> BpeModel:
    """Learn merge rules from a token stream (order-insensitive)."""
    protected_set = frozenset(protected) | DEFAULT_PROTECTED
    freqs: Counter = Counter()
    for sent in sentences:
        freqs.update(sent)
    for token in protected_set:
        freqs.pop(token, None)
    merges = _kernel.learn_merges(dict(freqs), max_merges)
    return BpeModel(merges=merges, protected=protected_set)


def bpe_apply(sent: Sequence[str], model: BpeModel) -> list[str]:
    out: list[str] = []
    for token in sent:
        out.extend(model.segment(token))
    return out


def bpe_apply_with_types(
    sent: Sequence[str], types: Sequence[int], model: BpeModel
) -> tuple[list[str], list[int]]:
    """Segment a sentence and replicate each token's type over its pieces."""
    if len(sent) != len(types):
        raise ValueError(f"types length {len(types)} != sentence length {len(sent)}")
    out: list[str] = []
    out_types: list[int] = []
    for token, ttype in zip(sent, types):
        pieces = model.segment(token)
        out.extend(pieces)
        out_types.extend([ttype] * len(pieces))
    return out, out_types


def bpe_undo(sent: Sequence[str], marker: str = MARKER) -> tuple[list[str], int]:
    """Concatenate marker-suffixed pieces back into words.

    A dangling marker at sentence end is dropped; the second return value
    counts such repairs.
    """
    out: list[str] = []
    buf: Optional[str] = None
    repairs = 0
    for token in sent:
        if token.endswith(marker):
            stem = token[: -len(marker)]
            buf = stem if buf is None else buf + stem
        elif buf is not None:
            out.append(buf + token)
            buf = None
        else:
            out.append(token)
    if buf is not None:
        repairs = 1
        if buf:
            out.append(buf)
    return out, repairs


def save_bpe_model(path: str, model: BpeModel) -> None:
    """`#bpe v1 <n>` header, one `left right` merge per line, then the
    protected tokens after a `#protected` line."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"#bpe v1 {len(model.merges)}\n")
        for left, right in model.merges:
            f.write(f"{left} {right}\n")
        f.write("#protected\n")
        for token in sorted(model.protected):
            f.write(token + "\n")


def load_bpe_model(path: str) -> BpeModel:
    with open(path, encoding="utf-8") as f:
        header = f.readline().rstrip("\n")
        fields = header.split()
        if len(fields) != 3 or fields[0] != "#bpe" or fields[1] != "v1":
            raise ValueError(f"{path}: bad header {header!r}")
        n_merges = int(fields[2])
        merges: list[tuple[str, str]] = []
        protected: list[str] = []
        in_protected = False
        for lineno, line in enumerate(f, 2):
            line = line.rstrip("\n")
            if line == "#protected":
                in_protected = True
                continue
            if not line:
                continue
            if in_protected:
                protected.append(line)
            else:
                parts = line.split(" ")
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: bad merge line {line!r}")
                merges.append((parts[0], parts[1]))
    if len(merges) != n_merges:
        raise ValueError(f"{path}: header says {n_merges} merges, found {len(merges)}")
    return BpeModel(merges=merges, protected=frozenset(protected))
