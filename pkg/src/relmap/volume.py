"""Multi-sequence 3D volumes: types, normalization, cropping, and bundle I/O.

A volume bundle is a directory holding `meta.json` plus raw files:

    {"dims": [D, H, W],
     "sequences": {"T2w": "t2w.f32", ...},
     "ground_truth": "seg.u8"}

`.f32` files are raw little-endian IEEE-754 float32 in C-order (z, y, x);
`.u8` files are one byte per voxel, 0/1. Unknown JSON keys are ignored.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    BundleMetadataError,
    BundleMissingFileError,
    BundleSizeMismatchError,
    DimensionError,
    UnknownSequenceError,
    ValidationError,
)

logger = logging.getLogger(__name__)

Dims = tuple[int, int, int]


class SequenceKind(str, Enum):
    """The four MRI sequences; serialization order is fixed."""

    T1w = "T1w"
    T1wCE = "T1wCE"
    T2w = "T2w"
    FLAIR = "FLAIR"


SEQUENCE_ORDER: tuple[SequenceKind, ...] = (
    SequenceKind.T1w,
    SequenceKind.T1wCE,
    SequenceKind.T2w,
    SequenceKind.FLAIR,
)


@dataclass(frozen=True)
class ScalarVolume:
    """Single scalar 3D volume, float32, C-order (z, y, x). Treat as immutable."""

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3:
            raise ValidationError(f"volume must be 3D, got shape {self.data.shape}")
        if self.data.size == 0:
            raise ValidationError("volume must have at least one voxel")
        if self.data.dtype != np.float32:
            object.__setattr__(self, "data", self.data.astype(np.float32))
        if not np.isfinite(self.data).all():
            raise ValidationError("volume contains non-finite values")

    @property
    def dims(self) -> Dims:
        return tuple(self.data.shape)  # type: ignore[return-value]


@dataclass(frozen=True)
class BinaryMask:
    """Per-voxel boolean mask, C-order (z, y, x)."""

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3:
            raise ValidationError(f"mask must be 3D, got shape {self.data.shape}")
        if self.data.dtype != np.bool_:
            object.__setattr__(self, "data", self.data.astype(np.bool_))

    @property
    def dims(self) -> Dims:
        return tuple(self.data.shape)  # type: ignore[return-value]

    @property
    def voxel_count(self) -> int:
        return int(self.data.sum())


@dataclass(frozen=True)
class MultiSequenceVolume:
    """Aligned set of per-sequence volumes sharing one voxel grid."""

    sequences: dict[SequenceKind, ScalarVolume]

    def __post_init__(self):
        if not self.sequences:
            raise ValidationError("at least one sequence is required")
        dims = {v.dims for v in self.sequences.values()}
        if len(dims) != 1:
            raise DimensionError(f"sequences have mismatched dims: {sorted(dims)}")

    @property
    def dims(self) -> Dims:
        return next(iter(self.sequences.values())).dims

    @property
    def is_complete(self) -> bool:
        return all(k in self.sequences for k in SEQUENCE_ORDER)

    def to_array(self) -> np.ndarray:
        """Stack complete volume as (4, D, H, W) float32 in fixed sequence order."""
        if not self.is_complete:
            missing = [k.value for k in SEQUENCE_ORDER if k not in self.sequences]
            raise ValidationError(f"volume is incomplete, missing {missing}")
        return np.stack([self.sequences[k].data for k in SEQUENCE_ORDER])

    @staticmethod
    def from_array(arr: np.ndarray) -> "MultiSequenceVolume":
        """Inverse of to_array: (4, D, H, W) → complete volume."""
        if arr.ndim != 4 or arr.shape[0] != len(SEQUENCE_ORDER):
            raise DimensionError(f"expected (4, D, H, W), got {arr.shape}")
        return MultiSequenceVolume(
            {k: ScalarVolume(np.ascontiguousarray(arr[i])) for i, k in enumerate(SEQUENCE_ORDER)}
        )


def min_max_normalize(v: ScalarVolume) -> ScalarVolume:
    """Affinely map intensities to [0, 1]; a constant volume maps to all zeros."""
    lo = float(v.data.min())
    hi = float(v.data.max())
    if hi == lo:
        logger.warning("constant volume (value %g): normalizing to all zeros", lo)
        return ScalarVolume(np.zeros_like(v.data))
    return ScalarVolume((v.data - lo) / (hi - lo))


def normalize_all(mv: MultiSequenceVolume) -> MultiSequenceVolume:
    """Min-max normalize each sequence independently."""
    return MultiSequenceVolume({k: min_max_normalize(v) for k, v in mv.sequences.items()})


def _crop_starts(src: Dims, target: Dims) -> Dims:
    for s, t in zip(src, target):
        if t > s:
            raise DimensionError(f"crop target {target} exceeds source dims {src}")
        if t < 1:
            raise DimensionError(f"crop target {target} must be positive")
    return tuple((s - t) // 2 for s, t in zip(src, target))  # type: ignore[return-value]


def center_crop(v: ScalarVolume, target: Dims) -> ScalarVolume:
    """Crop the centered target-sized subvolume; odd remainders floor toward zero."""
    z0, y0, x0 = _crop_starts(v.dims, target)
    d, h, w = target
    return ScalarVolume(np.ascontiguousarray(v.data[z0 : z0 + d, y0 : y0 + h, x0 : x0 + w]))


def center_crop_mask(mask: BinaryMask, target: Dims) -> BinaryMask:
    """Center-crop a binary mask with the same offset rule as center_crop."""
    z0, y0, x0 = _crop_starts(mask.dims, target)
    d, h, w = target
    return BinaryMask(np.ascontiguousarray(mask.data[z0 : z0 + d, y0 : y0 + h, x0 : x0 + w]))


def center_crop_all(mv: MultiSequenceVolume, target: Dims) -> MultiSequenceVolume:
    """Center-crop every sequence to the same target dims."""
    return MultiSequenceVolume({k: center_crop(v, target) for k, v in mv.sequences.items()})


# ---------------------------------------------------------------------------
# Raw-file and bundle I/O


def save_mask(mask: BinaryMask, path: str | Path) -> None:
    """Write one byte (0/1) per voxel, C-order."""
    Path(path).write_bytes(mask.data.astype(np.uint8).tobytes())


def load_mask(path: str | Path, dims: Dims) -> BinaryMask:
    path = Path(path)
    raw = np.frombuffer(path.read_bytes(), dtype=np.uint8)
    expected = int(np.prod(dims))
    if raw.size != expected:
        raise BundleSizeMismatchError(
            f"{path}: expected {expected} bytes for dims {dims}, got {raw.size}"
        )
    return BinaryMask(raw.reshape(dims) != 0)


def _save_f32(data: np.ndarray, path: Path) -> None:
    path.write_bytes(np.ascontiguousarray(data, dtype="<f4").tobytes())


def _load_f32(path: Path, dims: Dims) -> np.ndarray:
    if not path.is_file():
        raise BundleMissingFileError(f"missing volume file: {path}")
    raw = np.frombuffer(path.read_bytes(), dtype="<f4")
    expected = int(np.prod(dims))
    if raw.size != expected:
        raise BundleSizeMismatchError(
            f"{path}: expected {expected} float32 values for dims {dims}, got {raw.size}"
        )
    return raw.reshape(dims).astype(np.float32)


def load_bundle(path: str | Path) -> tuple[MultiSequenceVolume, BinaryMask | None]:
    """Load a volume bundle directory; ground-truth mask is optional."""
    root = Path(path)
    meta_path = root / "meta.json"
    if not meta_path.is_file():
        raise BundleMetadataError(f"missing meta.json in {root}")
    try:
        meta = json.loads(meta_path.read_text())
    except json.JSONDecodeError as e:
        raise BundleMetadataError(f"{meta_path}: invalid JSON: {e}") from e

    try:
        dims = tuple(int(x) for x in meta["dims"])
        seq_files = dict(meta["sequences"])
    except (KeyError, TypeError, ValueError) as e:
        raise BundleMetadataError(f"{meta_path}: bad or missing dims/sequences: {e}") from e
    if len(dims) != 3 or any(d < 1 for d in dims):
        raise BundleMetadataError(f"{meta_path}: dims must be three positive ints, got {dims}")

    sequences: dict[SequenceKind, ScalarVolume] = {}
    for name, fname in seq_files.items():
        try:
            kind = SequenceKind(name)
        except ValueError:
            raise UnknownSequenceError(f"{meta_path}: unknown sequence {name!r}") from None
        sequences[kind] = ScalarVolume(_load_f32(root / fname, dims))
    mv = MultiSequenceVolume(sequences)

    mask = None
    if "ground_truth" in meta:
        gt_path = root / meta["ground_truth"]
        if not gt_path.is_file():
            raise BundleMissingFileError(f"missing ground-truth file: {gt_path}")
        mask = load_mask(gt_path, dims)
    return mv, mask


def save_bundle(
    mv: MultiSequenceVolume,
    path: str | Path,
    ground_truth: BinaryMask | None = None,
) -> None:
    """Write a bundle directory (meta.json + raw files); overwrites byte-stably."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    seq_files = {}
    for kind in SEQUENCE_ORDER:
        if kind not in mv.sequences:
            continue
        fname = f"{kind.value.lower()}.f32"
        _save_f32(mv.sequences[kind].data, root / fname)
        seq_files[kind.value] = fname
    meta: dict = {"dims": list(mv.dims), "sequences": seq_files}
    if ground_truth is not None:
        if ground_truth.dims != mv.dims:
            raise DimensionError(
                f"ground-truth dims {ground_truth.dims} != volume dims {mv.dims}"
            )
        save_mask(ground_truth, root / "seg.u8")
        meta["ground_truth"] = "seg.u8"
    (root / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
