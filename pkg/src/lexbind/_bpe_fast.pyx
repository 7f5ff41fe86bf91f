# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled BPE kernels; algorithm identical to lexbind._bpe_py.

The pair-statistics loop of merge learning and the merge replay of
segmentation dominate corpus preprocessing time, so they are the only parts
of the package that get a compiled lane.
"""

EOW = "</w>"

KERNEL = "cython"


cdef dict _pair_counts(list word):
    cdef dict counts = {}
    cdef Py_ssize_t i, n = len(word)
    cdef tuple key
    for i in range(n - 1):
        key = (word[i], word[i + 1])
        counts[key] = counts.get(key, 0) + 1
    return counts


cdef list _merge_word(list word, str a, str b, str ab):
    cdef list out = []
    cdef Py_ssize_t i = 0, n = len(word)
    while i < n:
        if i + 1 < n and <str>word[i] == a and <str>word[i + 1] == b:
            out.append(ab)
            i += 2
        else:
            out.append(word[i])
            i += 1
    return out


def learn_merges(dict word_freqs, int max_merges):
    """Learn up to max_merges merge rules from a word-frequency table."""
    if max_merges < 0:
        raise ValueError(f"max_merges must be >= 0, got {max_merges}")
    cdef list words = []
    cdef list freqs = []
    cdef str word
    cdef long freq
    for word_obj, freq_obj in word_freqs.items():
        word = <str>word_obj
        freq = <long>freq_obj
        if freq <= 0 or len(word) == 0:
            continue
        words.append(list(word) + [EOW])
        freqs.append(freq)

    cdef dict stats = {}
    cdef dict index = {}
    cdef dict widx_map, pairs
    cdef Py_ssize_t widx
    cdef tuple pair
    cdef long occ
    for widx in range(len(words)):
        freq = <long>freqs[widx]
        pairs = _pair_counts(<list>words[widx])
        for pair_obj, occ_obj in pairs.items():
            pair = <tuple>pair_obj
            occ = <long>occ_obj
            stats[pair] = stats.get(pair, 0) + occ * freq
            widx_map = <dict>index.setdefault(pair, {})
            widx_map[widx] = occ

    cdef list merges = []
    cdef long best_count, count, delta, occ2
    cdef tuple best_pair
    cdef str a, b, merged
    cdef list cur, new_word
    cdef dict old_pairs, new_pairs
    cdef int step
    for step in range(max_merges):
        if not stats:
            break
        best_count = -1
        best_pair = None
        for pair_obj, count_obj in stats.items():
            count = <long>count_obj
            pair = <tuple>pair_obj
            if count > best_count or (count == best_count and pair > best_pair):
                best_count = count
                best_pair = pair
        if best_count < 1:
            break
        a = <str>best_pair[0]
        b = <str>best_pair[1]
        merges.append(best_pair)
        merged = a + b
        for widx_obj, occ_obj in list((<dict>index.get(best_pair, {})).items()):
            widx = <Py_ssize_t>widx_obj
            occ = <long>occ_obj
            if occ < 1:
                continue
            cur = <list>words[widx]
            freq = <long>freqs[widx]
            old_pairs = _pair_counts(cur)
            new_word = _merge_word(cur, a, b, merged)
            new_pairs = _pair_counts(new_word) if len(new_word) > 1 else {}
            for pair_obj in set(old_pairs.keys()) | set(new_pairs.keys()):
                pair = <tuple>pair_obj
                delta = <long>new_pairs.get(pair, 0) - <long>old_pairs.get(pair, 0)
                if delta == 0:
                    continue
                count = <long>stats.get(pair, 0) + delta * freq
                if count > 0:
                    stats[pair] = count
                else:
                    stats.pop(pair, None)
                widx_map = <dict>index.setdefault(pair, {})
                occ2 = <long>widx_map.get(widx, 0) + delta
                if occ2 > 0:
                    widx_map[widx] = occ2
                else:
                    widx_map.pop(widx, None)
            words[widx] = new_word
        stats.pop(best_pair, None)
        index.pop(best_pair, None)
    return merges


def segment(str word, dict ranks):
    """Split one word into subword pieces by replaying merges in rank order."""
    cdef list symbols = list(word) + [EOW]
    cdef Py_ssize_t i, n
    cdef long best_rank, rank
    cdef tuple best_pair, key
    cdef str last
    while len(symbols) > 1:
        best_rank = -1
        best_pair = None
        n = len(symbols)
        for i in range(n - 1):
            key = (symbols[i], symbols[i + 1])
            rank = <long>ranks.get(key, -1)
            if rank != -1 and (best_rank == -1 or rank < best_rank):
                best_rank = rank
                best_pair = key
        if best_pair is None:
            break
        symbols = _merge_word(
            symbols, <str>best_pair[0], <str>best_pair[1],
            <str>best_pair[0] + <str>best_pair[1],
        )
    last = <str>symbols[len(symbols) - 1]
    if last == EOW:
        symbols.pop()
    elif last.endswith(EOW):
        symbols[len(symbols) - 1] = last[: len(last) - len(EOW)]
    return symbols
