"""Byte-pair-encoding tokenizer: training, encode/decode, model file.

Words are split into characters with an end-of-word marker suffixed onto the
final character; training repeatedly merges the most frequent adjacent
symbol pair (ties break to the lexicographically smaller pair) until the
vocabulary budget is spent or no pair occurs twice.  Special tokens are
atomic: they take the lowest ids, are never split, and never participate in
merges.

The base alphabet contains both the plain and the end-marked variant of
every character seen in training, so any string over the training alphabet
survives an encode/decode round trip exactly.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

END_OF_WORD = "</w>"
UNK = "<unk>"
DEFAULT_SPECIALS = ("<pad>", "<bos>", "<eos>", UNK, "<PERSON>", "<UNKNOWN>")

MODEL_VERSION = "bpe-v1"


@dataclass(frozen=True)
class BpeModel:
    merges: tuple[tuple[str, str], ...]
    vocab: Mapping[str, int]
    specials: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "merges", tuple((a, b) for a, b in self.merges))
        object.__setattr__(self, "vocab", dict(self.vocab))
        object.__setattr__(self, "specials", tuple(self.specials))
        if len(set(self.merges)) != len(self.merges):
            raise ValueError("duplicate merges in model")
        if sorted(self.vocab.values()) != list(range(len(self.vocab))):
            raise ValueError("token ids must be dense in [0, |vocab|)")
        for a, b in self.merges:
            if a + b not in self.vocab:
                raise ValueError(f"merge result {a + b!r} missing from vocab")
        for i, special in enumerate(self.specials):
            if self.vocab.get(special) != i:
                raise ValueError(f"special {special!r} must have reserved id {i}")

    @property
    def unk_id(self) -> int:
        return self.vocab[UNK]

    def id_to_token(self) -> dict[int, str]:
        return {i: tok for tok, i in self.vocab.items()}


def _word_symbols(word: str) -> tuple[str, ...]:
    return tuple(word[:-1]) + (word[-1] + END_OF_WORD,)


def bpe_train(
    corpus: Iterable[Sequence[str]],
    vocab_size: int,
    specials: Sequence[str] = DEFAULT_SPECIALS,
) -> BpeModel:
    """Train a BPE model over tokenized sentences.

    vocab_size counts everything: specials, the base alphabet, and one slot
    per merge.  A budget equal to specials + alphabet yields zero merges;
    anything smaller is an error.
    """
    specials = tuple(specials)
    if UNK not in specials:
        specials = specials + (UNK,)
    special_set = set(specials)

    word_counts: Counter = Counter()
    charset: set[str] = set()
    for sentence in corpus:
        for token in sentence:
            if not token or token in special_set:
                continue
            word_counts[token] += 1
            charset.update(token)
    if not word_counts:
        raise ValueError("empty corpus")

    alphabet = sorted(c for ch in charset for c in (ch, ch + END_OF_WORD))
    n_reserved = len(specials) + len(alphabet)
    if vocab_size < n_reserved:
        raise ValueError(
            f"vocab_size {vocab_size} too small: need >= {n_reserved} "
            f"({len(specials)} specials + {len(alphabet)} alphabet symbols)"
        )

    words = {_word_symbols(w): c for w, c in word_counts.items()}
    merges: list[tuple[str, str]] = []
    while len(merges) < vocab_size - n_reserved:
        pair_counts: Counter = Counter()
        for symbols, count in words.items():
            for i in range(len(symbols) - 1):
                pair_counts[(symbols[i], symbols[i + 1])] += count
        if not pair_counts:
            break
        pair, best_count = min(pair_counts.items(), key=lambda kv: (-kv[1], kv[0]))
        if best_count < 2:
            break
        merges.append(pair)
        words = {_merge_word(symbols, pair): count for symbols, count in words.items()}

    vocab: dict[str, int] = {}
    for token in (*specials, *alphabet, *(a + b for a, b in merges)):
        if token not in vocab:
            vocab[token] = len(vocab)
    return BpeModel(merges=tuple(merges), vocab=vocab, specials=specials)


def _merge_word(symbols: tuple[str, ...], pair: tuple[str, str]) -> tuple[str, ...]:
    """Replace every adjacent occurrence of pair, scanning left to right."""
    merged = pair[0] + pair[1]
    out: list[str] = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == pair[0] and symbols[i + 1] == pair[1]:
            out.append(merged)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


def _encode_word(word: str, ranks: Mapping[tuple[str, str], int]) -> tuple[str, ...]:
    """Greedily apply the lowest-ranked merge until none applies."""
    symbols = _word_symbols(word)
    while len(symbols) > 1:
        best_rank = None
        best_pair = None
        for i in range(len(symbols) - 1):
            rank = ranks.get((symbols[i], symbols[i + 1]))
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
                best_pair = (symbols[i], symbols[i + 1])
        if best_pair is None:
            break
        symbols = _merge_word(symbols, best_pair)
    return symbols


def encode(model: BpeModel, text: str) -> list[int]:
    """Tokenize text to ids; specials match atomically, unknown symbols map
    to the unknown id."""
    ranks = {pair: i for i, pair in enumerate(model.merges)}
    special_set = set(model.specials)
    ids: list[int] = []
    cache: dict[str, tuple[str, ...]] = {}
    for word in text.split():
        if word in special_set:
            ids.append(model.vocab[word])
            continue
        symbols = cache.get(word)
        if symbols is None:
            symbols = _encode_word(word, ranks)
            cache[word] = symbols
        unk = model.unk_id
        ids.extend(model.vocab.get(sym, unk) for sym in symbols)
    return ids


def decode(model: BpeModel, ids: Sequence[int]) -> str:
    """Inverse of encode; end-of-word markers become spaces."""
    inverse = model.id_to_token()
    special_set = set(model.specials)
    words: list[str] = []
    buf = ""
    for i in ids:
        try:
            token = inverse[i]
        except KeyError:
            raise ValueError(f"unknown token id {i}") from None
        if token in special_set:
            if buf:
                words.append(buf)
                buf = ""
            words.append(token)
        elif token.endswith(END_OF_WORD):
            words.append(buf + token[: -len(END_OF_WORD)])
            buf = ""
        else:
            buf += token
    if buf:
        words.append(buf)
    return " ".join(words)


def save_model(path, model: BpeModel) -> None:
    payload = {
        "version": MODEL_VERSION,
        "merges": [list(pair) for pair in model.merges],
        "vocab": dict(model.vocab),
        "specials": list(model.specials),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)
        fh.write("\n")


def load_model(path) -> BpeModel:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {payload.get('version')!r}")
    return BpeModel(
        merges=tuple((a, b) for a, b in payload["merges"]),
        vocab=payload["vocab"],
        specials=tuple(payload["specials"]),
    )
