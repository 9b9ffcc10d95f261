"""Independent brute-force oracles.

Everything here is written from the operation definitions alone, using the
most direct algorithm available (nested loops, linear scans, textbook DP).
Implementations under src/ must never be imported; these exist so the tests
can cross-check the real code against an unrelated computation path.
"""

from __future__ import annotations

import math
from collections import Counter
from itertools import product


# --- keypoint interpolation -------------------------------------------------


def nearest_donor_fill(frames: list[list[tuple[float, float, float]]], threshold: float):
    """Per-landmark nearest-confident-donor fill via linear outward scan.

    ``frames[t][k]`` is an (x, y, conf) triple.  Returns (filled frames,
    n_filled, n_unresolved).  Equidistant donors resolve to the earlier frame.
    """
    n_frames = len(frames)
    n_landmarks = len(frames[0])
    out = [list(frame) for frame in frames]
    filled = 0
    unresolved = 0
    for t in range(n_frames):
        for k in range(n_landmarks):
            if frames[t][k][2] >= threshold:
                continue
            donor = None
            for dist in range(1, n_frames):
                left = t - dist
                right = t + dist
                if left >= 0 and frames[left][k][2] >= threshold:
                    donor = left
                    break
                if right < n_frames and frames[right][k][2] >= threshold:
                    donor = right
                    break
            if donor is None:
                unresolved += 1
            else:
                x, y, _ = frames[donor][k]
                out[t][k] = (x, y, frames[t][k][2])
                filled += 1
    return out, filled, unresolved


def selection_index_map(frame_stacked, body_idx, face_idx, n_body=33, n_face=468, n_hand=21):
    """Flatten a stacked (543, 3) landmark list by explicit index lookup."""
    values = []
    order = (
        list(body_idx)
        + [n_body + i for i in face_idx]
        + [n_body + n_face + i for i in range(n_hand)]
        + [n_body + n_face + n_hand + i for i in range(n_hand)]
    )
    for g in order:
        values.append(frame_stacked[g][0])
        values.append(frame_stacked[g][1])
    return values


# --- template expansion -----------------------------------------------------


def enumerate_sentences(elements, lexicon):
    """All distinct constraint-satisfying sentences via plain nested loops.

    ``elements`` is a list of either a literal string or a
    (category, {feature: variable}) slot tuple; ``lexicon`` maps category ->
    list of (word, {feature: value}) pairs.  Returns sentences in first-seen
    order of the full cartesian product (slot candidate indices, leftmost
    slot outermost), deduplicated on the token tuple.
    """
    slots = [e for e in elements if not isinstance(e, str)]
    candidate_lists = [lexicon[category] for category, _ in slots]
    seen = set()
    out = []
    for combo in product(*candidate_lists):
        bindings: dict[str, object] = {}
        ok = True
        for (category, constraints), (word, features) in zip(slots, combo):
            for feature, var in constraints.items():
                value = features.get(feature)
                if var in bindings and bindings[var] != value:
                    ok = False
                    break
                bindings[var] = value
            if not ok:
                break
        if not ok:
            continue
        it = iter(combo)
        tokens = tuple(e if isinstance(e, str) else next(it)[0] for e in elements)
        if tokens not in seen:
            seen.add(tokens)
            out.append(tokens)
    return out


# --- corpus operations ------------------------------------------------------


def match_rate_loop(tokens, vocab) -> float:
    hits = 0
    for tok in tokens:
        if tok.lower() in vocab:
            hits += 1
    return hits / len(tokens)


def token_multiset(sentences) -> Counter:
    counts: Counter = Counter()
    for tokens in sentences:
        for tok in tokens:
            counts[tok] += 1
    return counts


# --- BLEU / ROUGE -----------------------------------------------------------


def ngrams(tokens, n):
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def clipped_precision_counts(candidates, references, n):
    """Corpus-level clipped n-gram matches and candidate n-gram total."""
    matches = 0
    total = 0
    for cand, ref in zip(candidates, references):
        cand_counts = Counter(ngrams(cand, n))
        ref_counts = Counter(ngrams(ref, n))
        for gram, count in cand_counts.items():
            matches += min(count, ref_counts.get(gram, 0))
        total += max(len(cand) - n + 1, 0)
    return matches, total


def bleu_corpus_reference(candidates, references, max_n=4):
    """Textbook corpus BLEU on [0, 100]; any zero precision zeroes the score."""
    c = sum(len(x) for x in candidates)
    r = sum(len(x) for x in references)
    if c == 0:
        return {n: 0.0 for n in range(1, max_n + 1)}
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)
    precisions = []
    for n in range(1, max_n + 1):
        matches, total = clipped_precision_counts(candidates, references, n)
        precisions.append(matches / total if total > 0 else 0.0)
    scores = {}
    for n in range(1, max_n + 1):
        if any(p == 0.0 for p in precisions[:n]):
            scores[n] = 0.0
        else:
            log_mean = sum(math.log(p) for p in precisions[:n]) / n
            scores[n] = bp * math.exp(log_mean) * 100.0
    return scores


def rouge_n_reference(candidate, reference, n):
    cand_counts = Counter(ngrams(candidate, n))
    ref_counts = Counter(ngrams(reference, n))
    overlap = sum(min(c, ref_counts.get(g, 0)) for g, c in cand_counts.items())
    n_cand = sum(cand_counts.values())
    n_ref = sum(ref_counts.values())
    precision = overlap / n_cand if n_cand else 0.0
    recall = overlap / n_ref if n_ref else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def lcs_length(a, b) -> int:
    """Classic O(len(a)*len(b)) dynamic program."""
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[len(a)][len(b)]


def rouge_l_reference(candidate, reference):
    if not candidate or not reference:
        return 0.0, 0.0, 0.0
    lcs = lcs_length(candidate, reference)
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


# --- BPE --------------------------------------------------------------------


def most_frequent_pair(words_with_counts):
    """Highest-count adjacent symbol pair; ties to the lexicographically
    smaller pair.  ``words_with_counts`` maps symbol tuples to frequencies."""
    pair_counts: Counter = Counter()
    for symbols, count in words_with_counts.items():
        for i in range(len(symbols) - 1):
            pair_counts[(symbols[i], symbols[i + 1])] += count
    if not pair_counts:
        return None
    pair, count = min(pair_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return pair, count
