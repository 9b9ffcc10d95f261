"""Corpus-level BLEU-1..4 and ROUGE-1/2/L.

BLEU follows the standard corpus protocol: clipped n-gram precisions
aggregated over the corpus, geometric mean, brevity penalty, scaled to
[0, 100].  The default profile applies no smoothing (any zero precision
zeroes the score); the "exp" profile halves a running smoothing constant
into each zero-count precision instead.  ROUGE is reported per pair and
aggregated as the mean of per-pair (precision, recall, F1).

Metric tokenization is whitespace splitting on lowercased text; use
tokenize_for_metrics when starting from raw strings.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

Tokens = Sequence[str]


@dataclass(frozen=True)
class EvalReport:
    bleu: Mapping[int, float] = field(default_factory=dict)
    rouge1: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rouge2: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rougeL: tuple[float, float, float] = (0.0, 0.0, 0.0)
    n_pairs: int = 0
    profile: str = "none"  # smoothing profile used for BLEU

    def __post_init__(self) -> None:
        object.__setattr__(self, "bleu", dict(self.bleu))
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be >= 1")
        for n, score in self.bleu.items():
            if not 0.0 <= score <= 100.0:
                raise ValueError(f"BLEU-{n} out of range: {score}")
        for name in ("rouge1", "rouge2", "rougeL"):
            if any(not 0.0 <= v <= 1.0 for v in getattr(self, name)):
                raise ValueError(f"{name} out of range")

    def as_dict(self) -> dict:
        def triple(t):
            return {"precision": t[0], "recall": t[1], "f1": t[2]}

        return {
            "bleu": {str(n): s for n, s in sorted(self.bleu.items())},
            "rouge1": triple(self.rouge1),
            "rouge2": triple(self.rouge2),
            "rougeL": triple(self.rougeL),
            "n_pairs": self.n_pairs,
            "profile": self.profile,
        }


def tokenize_for_metrics(text: str) -> list[str]:
    return text.lower().split()


def _ngram_counts(tokens: Tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_corpus(
    candidates: Sequence[Tokens],
    references: Sequence[Tokens],
    max_n: int = 4,
    smooth: bool = False,
) -> dict[int, float]:
    """Corpus BLEU-n for every n in 1..max_n, on the [0, 100] scale."""
    if len(candidates) != len(references):
        raise ValueError(
            f"candidate/reference count mismatch: {len(candidates)} vs {len(references)}"
        )
    if not candidates:
        raise ValueError("empty corpus")
    if not 1 <= max_n <= 4:
        raise ValueError(f"max_n must be in [1, 4], got {max_n}")

    c = sum(len(tokens) for tokens in candidates)
    r = sum(len(tokens) for tokens in references)
    if c == 0:
        return {n: 0.0 for n in range(1, max_n + 1)}
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)

    precisions: list[float] = []
    smooth_scale = 1.0
    for n in range(1, max_n + 1):
        matches = 0
        total = 0
        for cand, ref in zip(candidates, references):
            cand_counts = _ngram_counts(cand, n)
            if not cand_counts:
                continue
            ref_counts = _ngram_counts(ref, n)
            matches += sum(min(k, ref_counts[g]) for g, k in cand_counts.items())
            total += sum(cand_counts.values())
        if total == 0:
            precisions.append(0.0)
        elif matches == 0 and smooth:
            smooth_scale *= 2.0
            precisions.append(1.0 / (smooth_scale * total))
        else:
            precisions.append(matches / total)

    scores: dict[int, float] = {}
    for n in range(1, max_n + 1):
        window = precisions[:n]
        if any(p == 0.0 for p in window):
            scores[n] = 0.0
        else:
            scores[n] = bp * math.exp(sum(math.log(p) for p in window) / n) * 100.0
    return scores


def _prf(overlap: float, n_cand: int, n_ref: int) -> tuple[float, float, float]:
    precision = overlap / n_cand if n_cand else 0.0
    recall = overlap / n_ref if n_ref else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def rouge_n(candidate: Tokens, reference: Tokens, n: int) -> tuple[float, float, float]:
    """Multiset n-gram overlap as (precision, recall, f1)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    cand_counts = _ngram_counts(candidate, n)
    ref_counts = _ngram_counts(reference, n)
    overlap = sum(min(k, ref_counts[g]) for g, k in cand_counts.items())
    return _prf(overlap, sum(cand_counts.values()), sum(ref_counts.values()))


def rouge_l(candidate: Tokens, reference: Tokens) -> tuple[float, float, float]:
    """Longest-common-subsequence overlap as (precision, recall, f1)."""
    if not candidate or not reference:
        return 0.0, 0.0, 0.0
    # Two-row LCS dynamic program.
    prev = [0] * (len(reference) + 1)
    for a in candidate:
        row = [0]
        for j, b in enumerate(reference, start=1):
            if a == b:
                row.append(prev[j - 1] + 1)
            else:
                row.append(max(prev[j], row[-1]))
        prev = row
    return _prf(prev[-1], len(candidate), len(reference))


def eval_pairs(
    pairs: Sequence[tuple[Tokens, Tokens]], smooth: bool = False
) -> EvalReport:
    """Full report over (candidate, reference) pairs."""
    if not pairs:
        raise ValueError("empty corpus")
    candidates = [cand for cand, _ in pairs]
    references = [ref for _, ref in pairs]
    bleu = bleu_corpus(candidates, references, max_n=4, smooth=smooth)

    def mean_triples(triples: list[tuple[float, float, float]]) -> tuple[float, float, float]:
        k = len(triples)
        return (
            sum(t[0] for t in triples) / k,
            sum(t[1] for t in triples) / k,
            sum(t[2] for t in triples) / k,
        )

    return EvalReport(
        bleu=bleu,
        rouge1=mean_triples([rouge_n(c, r, 1) for c, r in pairs]),
        rouge2=mean_triples([rouge_n(c, r, 2) for c, r in pairs]),
        rougeL=mean_triples([rouge_l(c, r) for c, r in pairs]),
        n_pairs=len(pairs),
        profile="exp" if smooth else "none",
    )
