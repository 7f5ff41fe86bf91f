"""Pure-Python BPE kernels: merge learning and word segmentation.

This is the fallback implementation of the hot inner loops; lexbind.subword
transparently prefers the compiled twin (lexbind._bpe_fast) when it was built.
Both implement the identical algorithm and must produce identical output:

  * learning splits each word into characters plus a final end-of-word
    sentinel, then repeatedly merges the most frequent adjacent symbol pair;
    frequency ties break toward the lexicographically greatest pair
  * segmentation replays the learned merges by rank until none applies
"""

from __future__ import annotations

EOW = "</w>"

KERNEL = "python"


def _pair_counts(word: list[str]) -> dict[tuple[str, str], int]:
    counts: dict[tuple[str, str], int] = {}
    prev = word[0]
    for sym in word[1:]:
        key = (prev, sym)
        counts[key] = counts.get(key, 0) + 1
        prev = sym
    return counts


def _merge_word(word: list[str], a: str, b: str, ab: str) -> list[str]:
    out: list[str] = []
    i = 0
    n = len(word)
    while i < n:
        if i + 1 < n and word[i] == a and word[i + 1] == b:
            out.append(ab)
            i += 2
        else:
            out.append(word[i])
            i += 1
    return out


def learn_merges(word_freqs: dict[str, int], max_merges: int) -> list[tuple[str, str]]:
    """Learn up to max_merges merge rules from a word-frequency table."""
    if max_merges < 0:
        raise ValueError(f"max_merges must be >= 0, got {max_merges}")
    words: list[list[str]] = []
    freqs: list[int] = []
    for word, freq in word_freqs.items():
        if freq <= 0 or not word:
            continue
        words.append(list(word) + [EOW])
        freqs.append(freq)

    stats: dict[tuple[str, str], int] = {}
    index: dict[tuple[str, str], dict[int, int]] = {}
    for widx, word in enumerate(words):
        freq = freqs[widx]
        for pair, occ in _pair_counts(word).items():
            stats[pair] = stats.get(pair, 0) + occ * freq
            index.setdefault(pair, {})[widx] = occ

    merges: list[tuple[str, str]] = []
    for _ in range(max_merges):
        if not stats:
            break
        best_pair, best_count = max(stats.items(), key=lambda kv: (kv[1], kv[0]))
        if best_count < 1:
            break
        a, b = best_pair
        merges.append(best_pair)
        merged = a + b
        for widx, occ in list(index.get(best_pair, {}).items()):
            if occ < 1:
                continue
            word = words[widx]
            freq = freqs[widx]
            old_pairs = _pair_counts(word)
            new_word = _merge_word(word, a, b, merged)
            new_pairs = _pair_counts(new_word) if len(new_word) > 1 else {}
            for pair in old_pairs.keys() | new_pairs.keys():
                delta = new_pairs.get(pair, 0) - old_pairs.get(pair, 0)
                if delta == 0:
                    continue
                count = stats.get(pair, 0) + delta * freq
                if count > 0:
                    stats[pair] = count
                else:
                    stats.pop(pair, None)
                widx_map = index.setdefault(pair, {})
                occ2 = widx_map.get(widx, 0) + delta
                if occ2 > 0:
                    widx_map[widx] = occ2
                else:
                    widx_map.pop(widx, None)
            words[widx] = new_word
        stats.pop(best_pair, None)
        index.pop(best_pair, None)
    return merges


def segment(word: str, ranks: dict[tuple[str, str], int]) -> list[str]:
    """Split one word into subword pieces by replaying merges in rank order.

    Pieces carry no continuation markers; the caller renders those.
    """
    symbols = list(word) + [EOW]
    while len(symbols) > 1:
        best_rank = -1
        best_pair = None
        prev = symbols[0]
        for sym in symbols[1:]:
            rank = ranks.get((prev, sym), -1)
            if rank != -1 and (best_rank == -1 or rank < best_rank):
                best_rank = rank
                best_pair = (prev, sym)
            prev = sym
        if best_pair is None:
            break
        symbols = _merge_word(symbols, best_pair[0], best_pair[1], best_pair[0] + best_pair[1])
    if symbols[-1] == EOW:
        symbols.pop()
    elif symbols[-1].endswith(EOW):
        symbols[-1] = symbols[-1][: -len(EOW)]
    return symbols
