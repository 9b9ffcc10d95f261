"""Core pose-domain types shared by all pipeline stages.

A raw extractor frame carries 543 landmarks (33 body, 468 face, 21 per hand),
each an (x, y, confidence) triple with normalized coordinates.  The pipeline
reduces every frame to 76 selected keypoints flattened into a 152-value
vector with the canonical layout::

    [body (11 kp), face (23 kp), left hand (21 kp), right hand (21 kp)]

with each keypoint contributing adjacent (x, y) values and indices ascending
within each group.  All types are immutable values (backing arrays are
read-only copies), so they are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

import numpy as np

BODY_LANDMARKS = 33
FACE_LANDMARKS = 468
HAND_LANDMARKS = 21
TOTAL_LANDMARKS = BODY_LANDMARKS + FACE_LANDMARKS + 2 * HAND_LANDMARKS  # 543

SELECTED_BODY = 11
SELECTED_FACE = 23
SELECTED_KEYPOINTS = SELECTED_BODY + SELECTED_FACE + 2 * HAND_LANDMARKS  # 76
FRAME_DIM = 2 * SELECTED_KEYPOINTS  # 152

# Global landmark index ranges in the canonical body -> face -> left -> right
# ordering used whenever frames are stacked into a single (543, 3) array.
GROUP_OFFSETS = {
    "body": 0,
    "face": BODY_LANDMARKS,
    "left_hand": BODY_LANDMARKS + FACE_LANDMARKS,
    "right_hand": BODY_LANDMARKS + FACE_LANDMARKS + HAND_LANDMARKS,
}

# Body landmarks dropped from the 33-point set: legs, feet, hips, inner/outer
# eyes, mouth corners, and the redundant hand stubs on the body skeleton.
EXCLUDED_BODY = frozenset(
    {26, 28, 30, 32, 25, 27, 29, 31, 1, 3, 4, 6, 9, 10, 17, 18, 19, 20, 21, 22, 23, 24}
)

# Face mesh points kept: mouth corners, outer lips, eyebrows, eye contours,
# and the nose top.
SELECTED_FACE_INDICES = (
    0, 9, 17, 33, 61, 70, 105, 107, 133, 153, 158, 161, 163,
    263, 291, 300, 334, 336, 362, 380, 385, 388, 390,
)


def _frozen_array(values, shape: tuple[int, ...], name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float32)
    if arr.shape != shape:
        raise ValueError(f"{name}: expected shape {shape}, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name}: contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RawLandmarkFrame:
    """One video frame of raw extractor landmarks.

    Each group is an (N, 3) array of (x, y, confidence); coordinates are
    normalized image coordinates and confidences lie in [0, 1].
    """

    body: np.ndarray
    face: np.ndarray
    left_hand: np.ndarray
    right_hand: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "body", _frozen_array(self.body, (BODY_LANDMARKS, 3), "body"))
        object.__setattr__(self, "face", _frozen_array(self.face, (FACE_LANDMARKS, 3), "face"))
        object.__setattr__(
            self, "left_hand", _frozen_array(self.left_hand, (HAND_LANDMARKS, 3), "left_hand")
        )
        object.__setattr__(
            self, "right_hand", _frozen_array(self.right_hand, (HAND_LANDMARKS, 3), "right_hand")
        )
        for name in ("body", "face", "left_hand", "right_hand"):
            conf = getattr(self, name)[:, 2]
            if conf.min() < 0.0 or conf.max() > 1.0:
                raise ValueError(f"{name}: confidence outside [0, 1]")

    def stacked(self) -> np.ndarray:
        """All 543 landmarks as one (543, 3) array in canonical group order."""
        return np.concatenate([self.body, self.face, self.left_hand, self.right_hand], axis=0)

    @classmethod
    def from_stacked(cls, stacked: np.ndarray) -> "RawLandmarkFrame":
        b = GROUP_OFFSETS
        return cls(
            body=stacked[b["body"] : b["face"]],
            face=stacked[b["face"] : b["left_hand"]],
            left_hand=stacked[b["left_hand"] : b["right_hand"]],
            right_hand=stacked[b["right_hand"] :],
        )


@dataclass(frozen=True)
class PoseFrame:
    """A selected, flattened 152-value pose vector."""

    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen_array(self.values, (FRAME_DIM,), "values"))

    def __len__(self) -> int:
        return FRAME_DIM


@dataclass(frozen=True)
class PoseSequence:
    """Ordered pose frames for one word clip or one stitched sentence.

    ``frames`` is a read-only (T, 152) float32 array; row t is frame t.
    """

    frames: np.ndarray
    source_id: str = ""
    fps_hint: Optional[float] = None

    def __post_init__(self) -> None:
        arr = np.array(self.frames, dtype=np.float32)
        if arr.ndim != 2 or arr.shape[1] != FRAME_DIM:
            raise ValueError(f"frames: expected (T, {FRAME_DIM}), got {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("frames: sequence must be non-empty")
        if not np.isfinite(arr).all():
            raise ValueError("frames: contains non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "frames", arr)

    def __len__(self) -> int:
        return self.frames.shape[0]

    def __iter__(self) -> Iterator[PoseFrame]:
        return (PoseFrame(row) for row in self.frames)

    def frame(self, i: int) -> PoseFrame:
        return PoseFrame(self.frames[i])


WORD_ORDERS = ("swo", "rwo")


@dataclass(frozen=True)
class SentenceRecord:
    """One manifest row: sentence text plus provenance and pose reference."""

    id: str
    text: tuple[str, ...]
    phenomenon: str = "custom"
    word_order: str = "swo"
    pose_path: Optional[str] = None
    n_frames: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "text", tuple(self.text))
        if not self.text:
            raise ValueError(f"record {self.id!r}: text must be non-empty")
        if self.word_order not in WORD_ORDERS:
            raise ValueError(f"record {self.id!r}: word_order must be one of {WORD_ORDERS}")
        if self.pose_path is not None and (self.n_frames is None or self.n_frames <= 0):
            raise ValueError(f"record {self.id!r}: pose_path set but n_frames missing or <= 0")

    def with_pose(self, pose_path: str, n_frames: int) -> "SentenceRecord":
        return replace(self, pose_path=pose_path, n_frames=n_frames)


def _validated_indices(indices, size: int, bound: int, name: str) -> tuple[int, ...]:
    idx = tuple(int(i) for i in indices)
    if len(idx) != size:
        raise ValueError(f"{name}: expected {size} indices, got {len(idx)}")
    if len(set(idx)) != len(idx):
        raise ValueError(f"{name}: indices must be distinct")
    if list(idx) != sorted(idx):
        raise ValueError(f"{name}: indices must be sorted ascending")
    if idx and (idx[0] < 0 or idx[-1] >= bound):
        raise ValueError(f"{name}: indices must lie in [0, {bound})")
    return idx


@dataclass(frozen=True)
class KeypointSelection:
    """Which body and face landmarks survive selection (hands always do)."""

    body_indices: tuple[int, ...] = field(default_factory=tuple)
    face_indices: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "body_indices",
            _validated_indices(self.body_indices, SELECTED_BODY, BODY_LANDMARKS, "body_indices"),
        )
        object.__setattr__(
            self,
            "face_indices",
            _validated_indices(self.face_indices, SELECTED_FACE, FACE_LANDMARKS, "face_indices"),
        )

    def global_indices(self) -> np.ndarray:
        """Selected landmark positions into the stacked 543-landmark array."""
        body = np.asarray(self.body_indices) + GROUP_OFFSETS["body"]
        face = np.asarray(self.face_indices) + GROUP_OFFSETS["face"]
        left = np.arange(HAND_LANDMARKS) + GROUP_OFFSETS["left_hand"]
        right = np.arange(HAND_LANDMARKS) + GROUP_OFFSETS["right_hand"]
        return np.concatenate([body, face, left, right])


def default_selection() -> KeypointSelection:
    """The standard 76-keypoint selection: 11 body + 23 face + both hands."""
    body = tuple(i for i in range(BODY_LANDMARKS) if i not in EXCLUDED_BODY)
    return KeypointSelection(body_indices=body, face_indices=SELECTED_FACE_INDICES)
