#!/usr/bin/env python3
"""Build a self-contained toy workspace for the pipeline demo.

Creates, under --out:
  raw/<word>.jsonl     synthetic extractor output for the 20 toy words
                       (smooth random-walk motion, occasional low-confidence
                       landmarks so interpolation has work to do)
  lexicon/<word>.psp   processed pose clips (via the ingest stage)
  vocab.txt            the word list, one per line
  names.txt            gazetteer copy for the postprocess stage
  corpus.txt           small raw text corpus over the toy vocabulary

Usage: python scripts/make_toy_dataset.py --out toy_workspace
"""

from __future__ import annotations

import argparse
import shutil
from importlib import resources
from pathlib import Path

import numpy as np

from signsynth.cli import cli
from signsynth.io import write_raw_landmark_file
from signsynth.pose import RawLandmarkFrame
from signsynth.templates import load_slot_lexicon

LITERAL_WORDS = {"and", "see", "that", "should", "can"}


def random_walk_frames(rng: np.random.Generator, n_frames: int) -> list[RawLandmarkFrame]:
    pos = rng.random((543, 2))
    frames = []
    for _ in range(n_frames):
        pos = np.clip(pos + rng.normal(0.0, 0.01, (543, 2)), 0.0, 1.0)
        conf = np.where(
            rng.random(543) < 0.05, rng.uniform(0.0, 0.5, 543), rng.uniform(0.85, 1.0, 543)
        )
        frames.append(RawLandmarkFrame.from_stacked(np.column_stack([pos, conf])))
    return frames


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="toy_workspace")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--min-frames", type=int, default=12)
    parser.add_argument("--max-frames", type=int, default=36)
    args = parser.parse_args()

    out = Path(args.out)
    raw_dir = out / "raw"
    raw_dir.mkdir(parents=True, exist_ok=True)

    data = resources.files("signsynth.data")
    with resources.as_file(data / "toy_slot_lexicon.jsonl") as lpath:
        words = sorted(load_slot_lexicon(lpath).words() | LITERAL_WORDS)

    rng = np.random.default_rng(args.seed)
    for word in words:
        n = int(rng.integers(args.min_frames, args.max_frames + 1))
        write_raw_landmark_file(raw_dir / f"{word}.jsonl", random_walk_frames(rng, n))
    print(f"wrote {len(words)} raw landmark files to {raw_dir}")

    code = cli(["ingest", "--raw-dir", str(raw_dir), "--out-dir", str(out / "lexicon")])
    if code != 0:
        raise SystemExit(code)

    (out / "vocab.txt").write_text("\n".join(words) + "\n")
    with resources.as_file(data / "toy_names.txt") as npath:
        shutil.copy(npath, out / "names.txt")

    corpus_rng = np.random.default_rng(args.seed + 1)
    lines = []
    for _ in range(200):
        k = int(corpus_rng.integers(2, 8))
        lines.append(" ".join(corpus_rng.choice(words, size=k)))
    # A few sentences with out-of-vocabulary noise, so filtering has work.
    for i in range(20):
        k = int(corpus_rng.integers(2, 8))
        tokens = list(corpus_rng.choice(words, size=k)) + [f"noise{i}"]
        lines.append(" ".join(tokens))
    (out / "corpus.txt").write_text("\n".join(lines) + "\n")
    print(f"toy workspace ready under {out}")


if __name__ == "__main__":
    main()
