from __future__ import annotations

import numpy as np
import pytest

from signsynth.pose import (
    BODY_LANDMARKS,
    FACE_LANDMARKS,
    HAND_LANDMARKS,
    RawLandmarkFrame,
)


def random_raw_frame(rng: np.random.Generator, confidence=None) -> RawLandmarkFrame:
    """A random well-formed landmark frame; confidence may be fixed or None
    for uniform random confidences."""

    def group(n):
        pts = rng.random((n, 3))
        if confidence is not None:
            pts[:, 2] = confidence
        return pts

    return RawLandmarkFrame(
        body=group(BODY_LANDMARKS),
        face=group(FACE_LANDMARKS),
        left_hand=group(HAND_LANDMARKS),
        right_hand=group(HAND_LANDMARKS),
    )


def indexed_raw_frame(scale: float = 1000.0) -> RawLandmarkFrame:
    """Frame whose landmark g has (x, y) = (g/scale, g/scale) in the global
    body -> face -> left hand -> right hand ordering."""
    total = BODY_LANDMARKS + FACE_LANDMARKS + 2 * HAND_LANDMARKS
    g = np.arange(total, dtype=np.float64) / scale
    stacked = np.stack([g, g, np.ones(total)], axis=1)
    return RawLandmarkFrame.from_stacked(stacked)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
