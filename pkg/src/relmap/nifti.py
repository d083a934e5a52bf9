"""Minimal read-only NIfTI-1 loader (.nii, .nii.gz).

Only the fields needed to get voxels out are honored: sizeof_hdr, dim,
datatype, bitpix, vox_offset, scl_slope/scl_inter, magic. Orientation and
affines are ignored; the voxel grid is taken as stored. File order has x
fastest, so the flat body reshapes directly to C-order (z, y, x).
"""

from __future__ import annotations

import gzip
import struct
from pathlib import Path

import numpy as np

from .errors import NiftiParseError
from .volume import ScalarVolume

HEADER_SIZE = 348

# NIfTI datatype code → numpy dtype (little-endian)
_DTYPES = {
    2: np.dtype("<u1"),   # uint8
    4: np.dtype("<i2"),   # int16
    16: np.dtype("<f4"),  # float32
    64: np.dtype("<f8"),  # float64
}
_BITPIX = {2: 8, 4: 16, 16: 32, 64: 64}


def _read_bytes(path: Path) -> bytes:
    blob = path.read_bytes()
    if blob[:2] == b"\x1f\x8b":
        blob = gzip.decompress(blob)
    return blob


def load_nifti(path: str | Path) -> ScalarVolume:
    """Parse a 3D NIfTI-1 file into a float32 volume, scl_slope/inter applied."""
    path = Path(path)
    blob = _read_bytes(path)
    if len(blob) < HEADER_SIZE:
        raise NiftiParseError(f"{path}: file shorter than the {HEADER_SIZE}-byte header")

    magic = blob[344:348]
    if magic == b"ni1\x00":
        raise NiftiParseError(f"{path}: two-file (.hdr/.img) NIfTI is not supported")
    if magic != b"n+1\x00":
        raise NiftiParseError(f"{path}: bad magic {magic!r} at offset 344 (want b'n+1\\x00')")

    (sizeof_hdr,) = struct.unpack_from("<i", blob, 0)
    if sizeof_hdr != HEADER_SIZE:
        raise NiftiParseError(
            f"{path}: sizeof_hdr at offset 0 is {sizeof_hdr}, want {HEADER_SIZE} "
            "(big-endian files are not supported)"
        )

    dim = struct.unpack_from("<8h", blob, 40)
    if dim[0] != 3:
        raise NiftiParseError(f"{path}: dim[0] at offset 40 is {dim[0]}, only 3D supported")
    nx, ny, nz = dim[1], dim[2], dim[3]
    if min(nx, ny, nz) < 1:
        raise NiftiParseError(f"{path}: non-positive dims {dim[1:4]} at offset 40")

    (datatype,) = struct.unpack_from("<h", blob, 70)
    if datatype not in _DTYPES:
        raise NiftiParseError(
            f"{path}: unsupported datatype {datatype} at offset 70 "
            f"(supported: {sorted(_DTYPES)})"
        )
    (bitpix,) = struct.unpack_from("<h", blob, 72)
    if bitpix != _BITPIX[datatype]:
        raise NiftiParseError(
            f"{path}: bitpix {bitpix} at offset 72 inconsistent with datatype {datatype}"
        )

    (vox_offset,) = struct.unpack_from("<f", blob, 108)
    offset = int(vox_offset) if vox_offset > 0 else 352
    (scl_slope,) = struct.unpack_from("<f", blob, 112)
    (scl_inter,) = struct.unpack_from("<f", blob, 116)

    count = nx * ny * nz
    dtype = _DTYPES[datatype]
    need = offset + count * dtype.itemsize
    if len(blob) < need:
        raise NiftiParseError(
            f"{path}: body truncated, need {need} bytes for {nx}x{ny}x{nz} "
            f"{dtype.name} at offset {offset}, have {len(blob)}"
        )

    flat = np.frombuffer(blob, dtype=dtype, count=count, offset=offset)
    data = flat.reshape((nz, ny, nx)).astype(np.float32)
    if scl_slope != 0.0:
        data = data * np.float32(scl_slope) + np.float32(scl_inter)
    return ScalarVolume(np.ascontiguousarray(data))
