"""Corpus annotation with the tagging / replacement / mixed-phrase schemes.

A matched source phrase p with mandated translation q is rewritten as

    base : p                                (unchanged)
    t    : <start> p <end>
    r    : q
    m    : p q
    tr   : <start> q <end>
    tm   : <start> p <middle> q <end>

On the target side the t / tr / tm schemes wrap the occurrence of q in
<start> ... <end>; r, m and base leave the target alone.  With the extra
channel enabled, a token-type letter is emitted per source token: s for
original p tokens, t for inserted q tokens, n for everything else
(including the tags themselves).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from .miner import Lexicon, TranslationPair, MAX_PHRASE_LEN
from .textio import count_lines, iter_corpus

TAG_START = "<start>"
TAG_MIDDLE = "<middle>"
TAG_END = "<end>"
TAGS = (TAG_START, TAG_MIDDLE, TAG_END)

METHODS = ("base", "t", "r", "m", "tr", "tm")


class TokenType(enum.IntEnum):
    """Row index into the extra-embedding table."""

    N = 0  # normal token (incl. tags)
    S = 1  # original source-phrase token
    TGT = 2  # inserted target-phrase token
    PAD = 3  # padding; never serialized

    @property
    def letter(self) -> str:
        return {0: "n", 1: "s", 2: "t", 3: "p"}[int(self)]


_LETTER_TO_TYPE = {"n": TokenType.N, "s": TokenType.S, "t": TokenType.TGT}


def types_to_letters(types: Sequence[int]) -> str:
    return " ".join(TokenType(t).letter for t in types)


def letters_to_types(line: str) -> list[TokenType]:
    try:
        return [_LETTER_TO_TYPE[c] for c in line.split()]
    except KeyError as e:
        raise ValueError(f"bad token-type letter {e.args[0]!r}") from None


@dataclass(frozen=True)
class AnnotationScheme:
    method: str = "base"
    extra: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")

    @property
    def tags_target(self) -> bool:
        return self.method in ("t", "tr", "tm")


@dataclass(frozen=True)
class Constraint:
    pair: TranslationPair
    src_span: tuple[int, int]  # offsets in the original source sentence


@dataclass
class AnnotatedExample:
    src: list[str]
    tgt: Optional[list[str]]
    types: Optional[list[TokenType]]
    constraints: list[Constraint]


class AnnotationError(ValueError):
    pass


def _lower(tokens: Sequence[str]) -> tuple[str, ...]:
    return tuple(t.lower() for t in tokens)


class _OccurrenceTracker:
    """Allocates disjoint occurrences of phrases in one target sentence.

    Each accepted constraint consumes one occurrence left to right, so k
    constraints needing the same phrase require k disjoint occurrences.
    """

    def __init__(self, tgt_tokens: Sequence[str]):
        self.tokens = _lower(tgt_tokens)
        self.taken = [False] * len(tgt_tokens)

    def allocate(self, phrase: Sequence[str]) -> Optional[tuple[int, int]]:
        n = len(phrase)
        if n == 0:
            return None
        phrase = tuple(phrase)
        for i in range(len(self.tokens) - n + 1):
            if self.tokens[i : i + n] != phrase:
                continue
            if any(self.taken[i : i + n]):
                continue
            for j in range(i, i + n):
                self.taken[j] = True
            return (i, i + n)
        return None


def match_phrases(
    src: Sequence[str],
    tgt: Optional[Sequence[str]],
    lexicon: Lexicon,
    max_n: int = MAX_PHRASE_LEN,
) -> list[Constraint]:
    """Greedy longest-match-first left-to-right scan of source n-grams.

    In training mode (tgt given) a match is accepted only if its target
    phrase can still be found in the target sentence, disjoint from the
    occurrences already claimed by earlier matches; in test mode (tgt = None)
    lexicon hits are accepted unconditionally.  Accepted matches never
    overlap on the source side.
    """
    lowered = _lower(src)
    tracker = _OccurrenceTracker(tgt) if tgt is not None else None
    constraints: list[Constraint] = []
    i = 0
    n_src = len(src)
    while i < n_src:
        matched = False
        for n in range(min(max_n, n_src - i), 0, -1):
            pair = lexicon.get(lowered[i : i + n])
            if pair is None:
                continue
            if tracker is not None and tracker.allocate(pair.tgt_phrase) is None:
                continue
            # record the surface form as it occurred, not the lexicon key,
            # so replacement schemes stay invertible on cased text
            surface = TranslationPair(tuple(src[i : i + n]), pair.tgt_phrase, pair.score)
            constraints.append(Constraint(surface, (i, i + n)))
            i += n
            matched = True
            break
        if not matched:
            i += 1
    return constraints


def annotate(
    src: Sequence[str],
    tgt: Optional[Sequence[str]],
    constraints: Sequence[Constraint],
    scheme: AnnotationScheme,
) -> AnnotatedExample:
    """Apply one annotation scheme to a sentence pair.

    Constraints must be sorted and non-overlapping (as produced by
    match_phrases).  Raises AnnotationError if the target side must be tagged
    but some q cannot be located.
    """
    last = 0
    for c in constraints:
        s, e = c.src_span
        if s < last or e > len(src):
            raise AnnotationError(f"constraint span ({s},{e}) overlaps or out of range")
        if _lower(src[s:e]) != _lower(c.pair.src_phrase):
            raise AnnotationError(
                f"span ({s},{e}) does not match source phrase {' '.join(c.pair.src_phrase)!r}"
            )
        last = e

    out_src: list[str] = []
    out_types: list[TokenType] = []

    def emit(tokens: Sequence[str], ttype: TokenType) -> None:
        out_src.extend(tokens)
        out_types.extend([ttype] * len(tokens))

    pos = 0
    method = scheme.method
    for c in constraints:
        s, e = c.src_span
        emit(src[pos:s], TokenType.N)
        p = list(src[s:e])
        q = list(c.pair.tgt_phrase)
        if method == "base":
            emit(p, TokenType.S)
        elif method == "t":
            emit([TAG_START], TokenType.N)
            emit(p, TokenType.S)
            emit([TAG_END], TokenType.N)
        elif method == "r":
            emit(q, TokenType.TGT)
        elif method == "m":
            emit(p, TokenType.S)
            emit(q, TokenType.TGT)
        elif method == "tr":
            emit([TAG_START], TokenType.N)
            emit(q, TokenType.TGT)
            emit([TAG_END], TokenType.N)
        elif method == "tm":
            emit([TAG_START], TokenType.N)
            emit(p, TokenType.S)
            emit([TAG_MIDDLE], TokenType.N)
            emit(q, TokenType.TGT)
            emit([TAG_END], TokenType.N)
        pos = e
    emit(src[pos:], TokenType.N)

    out_tgt: Optional[list[str]] = list(tgt) if tgt is not None else None
    if tgt is not None and scheme.tags_target and constraints:
        tracker = _OccurrenceTracker(tgt)
        spans = []
        for c in constraints:
            span = tracker.allocate(c.pair.tgt_phrase)
            if span is None:
                raise AnnotationError(
                    f"target phrase {' '.join(c.pair.tgt_phrase)!r} not found in target"
                )
            spans.append(span)
        out_tgt = []
        opens = {s for s, _ in spans}
        closes = {e for _, e in spans}
        for i, token in enumerate(tgt):
            if i in opens:
                out_tgt.append(TAG_START)
            out_tgt.append(token)
            if i + 1 in closes:
                out_tgt.append(TAG_END)
        if len(tgt) in opens:  # cannot happen (allocate needs >= 1 token)
            out_tgt.append(TAG_START)

    return AnnotatedExample(
        src=out_src,
        tgt=out_tgt,
        types=out_types if scheme.extra else None,
        constraints=list(constraints),
    )


def detag(sent: Sequence[str]) -> tuple[list[str], int]:
    """Strip annotation tags from a sentence.

    Well-formed `<start> a.. <middle> b.. <end>` groups keep only the b
    segment (dropping mixed-source residue); `<start> x.. <end>` keeps x.
    Malformed tag structure falls back to dropping the tag tokens alone;
    the second return value counts such repairs.
    """
    out: list[str] = []
    malformed = 0
    i = 0
    n = len(sent)
    while i < n:
        token = sent[i]
        if token == TAG_START:
            j = i + 1
            middles = []
            end = -1
            while j < n:
                if sent[j] == TAG_START:
                    break
                if sent[j] == TAG_MIDDLE:
                    middles.append(j)
                elif sent[j] == TAG_END:
                    end = j
                    break
                j += 1
            if end == -1:
                malformed += 1  # stray <start>: drop tag, keep scanning inside
                i += 1
                continue
            if len(middles) == 1:
                out.extend(sent[middles[0] + 1 : end])
            elif not middles:
                out.extend(sent[i + 1 : end])
            else:
                malformed += 1
                out.extend(t for t in sent[i + 1 : end] if t != TAG_MIDDLE)
            i = end + 1
        elif token in (TAG_MIDDLE, TAG_END):
            malformed += 1
            i += 1
        else:
            out.append(token)
            i += 1
    return out, malformed


def unannotate(
    annotated_src: Sequence[str],
    constraints: Sequence[Constraint],
    scheme: AnnotationScheme,
    original_len: Optional[int] = None,
) -> list[str]:
    """Invert annotate() on the source side using sidecar constraint data.

    Walks the annotated sentence block by block and substitutes each
    annotation block back with nothing but position bookkeeping; the original
    p tokens are recovered from the (annotated) blocks themselves for
    p-preserving schemes and from the constraint record otherwise, so the
    result is byte-identical to the original source.
    """
    method = scheme.method
    out: list[str] = []
    pos = 0
    prev_end = 0
    for c in constraints:
        s, e = c.src_span
        plen = e - s
        qlen = len(c.pair.tgt_phrase)
        gap = s - prev_end
        out.extend(annotated_src[pos : pos + gap])
        pos += gap
        if method == "base":
            block_p = annotated_src[pos : pos + plen]
            pos += plen
        elif method == "t":
            block_p = annotated_src[pos + 1 : pos + 1 + plen]
            pos += plen + 2
        elif method == "r":
            block_p = None
            pos += qlen
        elif method == "m":
            block_p = annotated_src[pos : pos + plen]
            pos += plen + qlen
        elif method == "tr":
            block_p = None
            pos += qlen + 2
        else:  # tm
            block_p = annotated_src[pos + 1 : pos + 1 + plen]
            pos += plen + qlen + 3
        if block_p is None:
            # replacement schemes: p survives only in the constraint record,
            # which stores the surface form verbatim
            out.extend(c.pair.src_phrase)
        else:
            out.extend(block_p)
        prev_end = e
    out.extend(annotated_src[pos:])
    if original_len is not None and len(out) != original_len:
        raise AnnotationError(
            f"reconstruction length {len(out)} != original {original_len}"
        )
    return out


@dataclass
class AnnotationStats:
    sentences: int = 0
    sentences_with_constraints: int = 0
    constraints: int = 0
    detag_repairs: int = 0

    def as_text(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in vars(self).items())


def annotate_corpus(
    src_path: str,
    tgt_path: Optional[str],
    lexicon: Lexicon,
    scheme: AnnotationScheme,
    out_src: str,
    out_tgt: Optional[str] = None,
    out_types: Optional[str] = None,
    out_sidecar: Optional[str] = None,
    max_n: int = MAX_PHRASE_LEN,
) -> AnnotationStats:
    """Stream a corpus through match_phrases + annotate.

    Training mode (tgt_path given) verifies every match against the target
    sentence and rewrites both sides; test mode touches only the source.
    Aligned line counts are checked before anything is written.
    """
    if tgt_path is not None:
        n_src, n_tgt = count_lines(src_path), count_lines(tgt_path)
        if n_src != n_tgt:
            raise AnnotationError(
                f"line count mismatch: {src_path} has {n_src}, {tgt_path} has {n_tgt}"
            )
    if scheme.extra and out_types is None:
        raise ValueError("scheme.extra=True requires out_types")

    stats = AnnotationStats()
    src_iter = iter_corpus(src_path)
    tgt_iter = iter_corpus(tgt_path) if tgt_path is not None else None

    f_src = open(out_src, "w", encoding="utf-8")
    f_tgt = open(out_tgt, "w", encoding="utf-8") if out_tgt and tgt_path else None
    f_types = open(out_types, "w", encoding="utf-8") if out_types else None
    f_side = open(out_sidecar, "w", encoding="utf-8") if out_sidecar else None
    try:
        for lineno, src in enumerate(src_iter):
            tgt = next(tgt_iter) if tgt_iter is not None else None
            constraints = match_phrases(src, tgt, lexicon, max_n=max_n)
            example = annotate(src, tgt, constraints, scheme)
            stats.sentences += 1
            if constraints:
                stats.sentences_with_constraints += 1
                stats.constraints += len(constraints)
            f_src.write(" ".join(example.src) + "\n")
            if f_tgt is not None:
                f_tgt.write(" ".join(example.tgt) + "\n")
            if f_types is not None:
                types = example.types or [TokenType.N] * len(example.src)
                f_types.write(types_to_letters(types) + "\n")
            if f_side is not None:
                for c in constraints:
                    s, e = c.src_span
                    f_side.write(
                        f"{lineno}\t{s}\t{e}\t{' '.join(c.pair.src_phrase)}"
                        f"\t{' '.join(c.pair.tgt_phrase)}\n"
                    )
    finally:
        f_src.close()
        for f in (f_tgt, f_types, f_side):
            if f is not None:
                f.close()
    return stats


def load_sidecar(path: str) -> dict[int, list[Constraint]]:
    """Read the constraints sidecar back, grouped by line number."""
    by_line: dict[int, list[Constraint]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 columns")
            idx, start, end = int(fields[0]), int(fields[1]), int(fields[2])
            pair = TranslationPair(
                tuple(fields[3].split()), tuple(fields[4].split()), 1.0
            )
            by_line.setdefault(idx, []).append(Constraint(pair, (start, end)))
    return by_line
