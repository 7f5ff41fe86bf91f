"""Bilingual lexicon mining from a parallel corpus, a phrase table and NE spans.

The lexicon maps a source phrase (1-5 tokens) to exactly one target phrase
with a score.  Candidates come from phrase-table entries whose source side
equals an NE surface form and whose target side actually occurs, contiguously,
in the aligned target sentence; per source phrase the highest-scoring
candidate is kept.  All matching is done on lowercased tokens.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_PHRASE_LEN = 5


class PhraseTableError(ValueError):
    """Malformed phrase-table line; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class SpanError(ValueError):
    """NE span indexes outside its sentence."""


@dataclass(frozen=True)
class PhraseTableEntry:
    src: tuple[str, ...]
    tgt: tuple[str, ...]
    scores: tuple[float, float, float, float]


@dataclass(frozen=True)
class NESpan:
    sentence_index: int
    start: int
    end: int  # exclusive


@dataclass(frozen=True)
class TranslationPair:
    src_phrase: tuple[str, ...]
    tgt_phrase: tuple[str, ...]
    score: float


# Lexicon: mapping src_phrase -> TranslationPair (exactly one entry per phrase)
Lexicon = dict[tuple[str, ...], TranslationPair]


@dataclass
class MiningReport:
    spans_seen: int = 0
    spans_too_long: int = 0
    spans_unverified: int = 0
    candidates: int = 0
    entries: int = 0

    def as_text(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in vars(self).items())


def parse_phrase_table(
    lines: Iterable[str], on_malformed: str = "error"
) -> tuple[list[PhraseTableEntry], list[tuple[int, str]]]:
    """Parse `src ||| tgt ||| s1 s2 s3 s4` lines.

    on_malformed: "error" raises PhraseTableError at the first bad line;
    "skip" collects (lineno, reason) pairs instead.  Returns (entries, skipped).
    """
    if on_malformed not in ("error", "skip"):
        raise ValueError(f"bad on_malformed: {on_malformed!r}")
    entries: list[PhraseTableEntry] = []
    skipped: list[tuple[int, str]] = []

    def bad(lineno: int, reason: str) -> None:
        if on_malformed == "error":
            raise PhraseTableError(lineno, reason)
        skipped.append((lineno, reason))

    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\n")
        if not line.strip():
            bad(lineno, "empty line")
            continue
        fields = line.split(" ||| ")
        if len(fields) != 3:
            bad(lineno, f"expected 3 fields, got {len(fields)}")
            continue
        src = tuple(fields[0].split())
        tgt = tuple(fields[1].split())
        score_fields = fields[2].split()
        if not src or not tgt:
            bad(lineno, "empty source or target phrase")
            continue
        if len(score_fields) != 4:
            bad(lineno, f"expected 4 scores, got {len(score_fields)}")
            continue
        try:
            scores = tuple(float(s) for s in score_fields)
        except ValueError:
            bad(lineno, f"non-numeric score in {score_fields}")
            continue
        if any(s < 0.0 or s > 1.0 for s in scores):
            bad(lineno, f"score outside [0,1] in {score_fields}")
            continue
        entries.append(PhraseTableEntry(src, tgt, scores))  # type: ignore[arg-type]
    return entries, skipped


def load_phrase_table(path: str, on_malformed: str = "error"):
    with open(path, encoding="utf-8") as f:
        return parse_phrase_table(f, on_malformed=on_malformed)


def _lower(tokens: Sequence[str]) -> tuple[str, ...]:
    return tuple(t.lower() for t in tokens)


def contains_subsequence(haystack: Sequence[str], needle: Sequence[str]) -> bool:
    """True if needle occurs as a contiguous run inside haystack."""
    n = len(needle)
    if n == 0 or n > len(haystack):
        return False
    first = needle[0]
    for i in range(len(haystack) - n + 1):
        if haystack[i] == first and tuple(haystack[i : i + n]) == tuple(needle):
            return True
    return False


def mine_lexicon(
    src_corpus: Sequence[Sequence[str]],
    tgt_corpus: Sequence[Sequence[str]],
    spans: Iterable[NESpan],
    table: Iterable[PhraseTableEntry],
    score_index: int = 2,
) -> tuple[Lexicon, MiningReport]:
    """Build the lexicon from NE occurrences verified against target sentences.

    score_index selects which of the four phrase-table scores acts as "the
    probability" (default: third, the direct phrase translation probability).
    Ties on score break toward the lexicographically smallest target phrase.
    """
    if len(src_corpus) != len(tgt_corpus):
        raise ValueError(
            f"corpus sides differ: {len(src_corpus)} vs {len(tgt_corpus)} sentences"
        )
    if not 0 <= score_index < 4:
        raise ValueError(f"score_index must be in 0..3, got {score_index}")

    by_src: dict[tuple[str, ...], list[PhraseTableEntry]] = {}
    for entry in table:
        by_src.setdefault(_lower(entry.src), []).append(entry)

    lowered_tgt = [_lower(sent) for sent in tgt_corpus]
    report = MiningReport()
    best: Lexicon = {}

    for span in spans:
        report.spans_seen += 1
        if not 0 <= span.sentence_index < len(src_corpus):
            raise SpanError(f"span sentence {span.sentence_index} out of range")
        sent = src_corpus[span.sentence_index]
        if not (0 <= span.start < span.end <= len(sent)):
            raise SpanError(
                f"span [{span.start},{span.end}) out of bounds for sentence "
                f"{span.sentence_index} of length {len(sent)}"
            )
        if span.end - span.start > MAX_PHRASE_LEN:
            report.spans_too_long += 1
            continue
        surface = _lower(sent[span.start : span.end])
        tgt_sent = lowered_tgt[span.sentence_index]
        verified = False
        for entry in by_src.get(surface, ()):
            tgt = _lower(entry.tgt)
            if not contains_subsequence(tgt_sent, tgt):
                continue
            verified = True
            report.candidates += 1
            score = entry.scores[score_index]
            cand = TranslationPair(surface, tgt, score)
            cur = best.get(surface)
            if (
                cur is None
                or score > cur.score
                or (score == cur.score and tgt < cur.tgt_phrase)
            ):
                best[surface] = cand
        if not verified:
            report.spans_unverified += 1

    report.entries = len(best)
    return best, report


def apply_gazetteer(
    src_corpus: Sequence[Sequence[str]],
    gazetteer: Iterable[Sequence[str]],
) -> list[NESpan]:
    """Greedy longest-match left-to-right NE spotting against a phrase list.

    Fallback span source for running the pipeline without an external NER
    step; matching is case-insensitive and spans never overlap.
    """
    phrases = set()
    for p in gazetteer:
        if not 0 < len(p) <= MAX_PHRASE_LEN:
            raise ValueError(f"gazetteer phrase length must be 1..5, got {len(p)}")
        phrases.add(_lower(p))
    max_n = max((len(p) for p in phrases), default=0)
    spans: list[NESpan] = []
    if not phrases:
        return spans
    for idx, sent in enumerate(src_corpus):
        lowered = _lower(sent)
        i = 0
        while i < len(lowered):
            for n in range(min(max_n, len(lowered) - i), 0, -1):
                if lowered[i : i + n] in phrases:
                    spans.append(NESpan(idx, i, i + n))
                    i += n
                    break
            else:
                i += 1
    return spans


def save_lexicon(path: str, lexicon: Lexicon) -> None:
    """TSV `src_phrase<TAB>tgt_phrase<TAB>score`, sorted by source phrase."""
    with open(path, "w", encoding="utf-8") as f:
        for src in sorted(lexicon):
            pair = lexicon[src]
            f.write(f"{' '.join(src)}\t{' '.join(pair.tgt_phrase)}\t{pair.score!r}\n")


def load_lexicon(path: str) -> Lexicon:
    lexicon: Lexicon = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 columns")
            src = tuple(fields[0].split())
            tgt = tuple(fields[1].split())
            if not src or not tgt:
                raise ValueError(f"{path}:{lineno}: empty phrase")
            if len(src) > MAX_PHRASE_LEN:
                raise ValueError(f"{path}:{lineno}: source phrase longer than 5 tokens")
            if src in lexicon:
                raise ValueError(f"{path}:{lineno}: duplicate source phrase")
            lexicon[src] = TranslationPair(src, tgt, float(fields[2]))
    return lexicon


def load_spans(path: str) -> list[NESpan]:
    """TSV `sentence_index<TAB>start<TAB>end`."""
    spans = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 columns")
            try:
                spans.append(NESpan(int(fields[0]), int(fields[1]), int(fields[2])))
            except ValueError as e:
                raise ValueError(f"{path}:{lineno}: {e}") from None
    return spans


def save_spans(path: str, spans: Iterable[NESpan]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for span in spans:
            f.write(f"{span.sentence_index}\t{span.start}\t{span.end}\n")
