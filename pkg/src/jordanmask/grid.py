"""Raster image primitives: grayscale/binary images and deterministic file I/O.

Pixel coordinates exposed by this package are 1-based, with ``x`` selecting the
column and ``y`` the row, origin at the top-left corner.  Arrays are stored
row-major as ``(height, width)`` numpy arrays; conversion between the two views
happens only at the API boundary.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, UnsupportedFormatError

__all__ = [
    "GrayImage",
    "BinaryImage",
    "Polarity",
    "to_grayscale",
    "resize_nearest",
    "zero_pad",
    "binarize",
    "read_image",
    "read_mask",
    "write_image",
]

# Integer luma weights: round(0.299 R + 0.587 G + 0.114 B).
_LUMA = (0.299, 0.587, 0.114)


class Polarity(Enum):
    """Which side of a threshold counts as foreground."""

    ABOVE = "above"
    BELOW = "below"
    AUTO = "auto"


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit single-channel image; ``pixels`` has shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.size == 0:
            raise UnsupportedFormatError(
                f"grayscale image must be a non-empty 2-d array, got shape {arr.shape}"
            )
        if arr.dtype != np.uint8:
            raise UnsupportedFormatError(f"grayscale image must be uint8, got {arr.dtype}")
        object.__setattr__(self, "pixels", _freeze(arr))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def at(self, x: int, y: int) -> int:
        """Intensity at 1-based coordinate (x, y)."""
        return int(self.pixels[y - 1, x - 1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Binary mask; ``bits`` has shape (height, width) with values in {0, 1}."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.bits)
        if arr.ndim != 2 or arr.size == 0:
            raise UnsupportedFormatError(
                f"binary image must be a non-empty 2-d array, got shape {arr.shape}"
            )
        arr = arr.astype(np.uint8, copy=True)
        if arr.max(initial=0) > 1:
            raise ValueError("binary image values must be 0 or 1")
        object.__setattr__(self, "bits", _freeze(arr))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def at(self, x: int, y: int) -> int:
        """Bit at 1-based coordinate (x, y)."""
        return int(self.bits[y - 1, x - 1])

    def foreground_count(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)


def to_grayscale(pixels: np.ndarray) -> GrayImage:
    """Collapse a decoded image array to 8-bit luma.

    3-channel input uses round(0.299 R + 0.587 G + 0.114 B); single-channel
    input passes through unchanged.  Other channel counts are rejected.
    """
    arr = np.asarray(pixels)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.ndim == 2:
        return GrayImage(arr.astype(np.uint8))
    if arr.ndim == 3 and arr.shape[2] == 3:
        luma = (
            _LUMA[0] * arr[:, :, 0].astype(np.float64)
            + _LUMA[1] * arr[:, :, 1]
            + _LUMA[2] * arr[:, :, 2]
        )
        out = np.floor(luma + 0.5)
        np.clip(out, 0, 255, out=out)
        return GrayImage(out.astype(np.uint8))
    raise UnsupportedFormatError(f"expected 1 or 3 channels, got array of shape {arr.shape}")


def _nearest_indices(new_n: int, old_n: int) -> np.ndarray:
    # Output cell i (0-based) samples source cell floor((i + 0.5) * old / new),
    # evaluated in exact integer arithmetic.
    i = np.arange(new_n, dtype=np.int64)
    return (2 * i + 1) * old_n // (2 * new_n)


def resize_nearest(img: GrayImage | BinaryImage, new_width: int, new_height: int):
    """Nearest-neighbor resample to ``new_width`` x ``new_height`` (same type out)."""
    if new_width < 1 or new_height < 1:
        raise ValueError(f"target size must be positive, got {new_width}x{new_height}")
    arr = img.pixels if isinstance(img, GrayImage) else img.bits
    rows = _nearest_indices(new_height, arr.shape[0])
    cols = _nearest_indices(new_width, arr.shape[1])
    out = arr[np.ix_(rows, cols)]
    if isinstance(img, GrayImage):
        return GrayImage(out)
    return BinaryImage(out)


def zero_pad(mask: BinaryImage, margin: int = 1) -> BinaryImage:
    """Surround a mask with a background border of ``margin`` pixels."""
    if margin < 1:
        raise ValueError(f"margin must be >= 1, got {margin}")
    return BinaryImage(np.pad(mask.bits, margin))


def binarize(img: GrayImage, threshold: float, polarity: Polarity = Polarity.ABOVE) -> BinaryImage:
    """Threshold a grayscale image.

    With ``Polarity.ABOVE`` a pixel is foreground iff intensity > threshold;
    with ``Polarity.BELOW`` iff intensity <= threshold (exact complements).
    """
    if not 0.0 <= threshold <= 255.0:
        raise ValueError(f"threshold must lie in [0, 255], got {threshold}")
    if polarity is Polarity.AUTO:
        raise ValueError("binarize needs a resolved polarity (above or below), not auto")
    above = img.pixels > threshold
    bits = above if polarity is Polarity.ABOVE else ~above
    return BinaryImage(bits.astype(np.uint8))


# ---------------------------------------------------------------------------
# File I/O.  PGM (P5) is parsed and written by hand so byte offsets can be
# reported precisely and round-trips are bit-exact; everything else goes
# through Pillow.
# ---------------------------------------------------------------------------


def _parse_pgm(data: bytes, name: str) -> np.ndarray:
    def fail(msg: str, offset: int) -> None:
        raise DecodeError(f"{name}: {msg} at byte offset {offset}")

    if data[:2] != b"P5":
        fail("expected 'P5' magic", 0)
    pos = 2
    fields: list[tuple[int, int]] = []  # (value, offset where the field started)
    while len(fields) < 3:
        while pos < len(data):
            c = data[pos : pos + 1]
            if c.isspace():
                pos += 1
            elif c == b"#":
                while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and data[pos : pos + 1].isdigit():
            pos += 1
        if pos == start:
            fail("expected a decimal header field", start)
        fields.append((int(data[start:pos]), start))
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        fail("expected single whitespace after maxval", pos)
    pos += 1
    (width, w_off), (height, _), (maxval, m_off) = fields
    if width < 1 or height < 1:
        fail(f"invalid dimensions {width}x{height}", w_off)
    if maxval != 255:
        fail(f"unsupported maxval {maxval} (only 8-bit handled)", m_off)
    need = width * height
    if len(data) - pos < need:
        fail(f"truncated payload: expected {need} bytes, found {len(data) - pos}", len(data))
    payload = np.frombuffer(data, dtype=np.uint8, count=need, offset=pos)
    return payload.reshape(height, width).copy()


def _encode_pgm(arr: np.ndarray) -> bytes:
    h, w = arr.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + arr.tobytes()


def _decode_with_pillow(path: Path) -> GrayImage:
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode == "L":
                return GrayImage(np.asarray(im, dtype=np.uint8))
            if im.mode in ("1", "I;16", "I", "LA"):
                return GrayImage(np.asarray(im.convert("L"), dtype=np.uint8))
            if im.mode in ("RGB", "RGBA", "P", "PA", "CMYK", "YCbCr"):
                return to_grayscale(np.asarray(im.convert("RGB"), dtype=np.uint8))
            raise UnsupportedFormatError(f"{path}: unsupported image mode {im.mode!r}")
    except UnidentifiedImageError as exc:
        raise DecodeError(f"{path}: not a decodable image ({exc})") from exc
    except (OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"{path}: decode failed ({exc})") from exc


def read_image(path: str | Path) -> GrayImage:
    """Decode a grayscale image from PGM (P5), PNG, or JPEG."""
    p = Path(path)
    if p.suffix.lower() == ".pgm":
        try:
            data = p.read_bytes()
        except OSError as exc:
            raise DecodeError(f"{p}: cannot read file ({exc})") from exc
        return GrayImage(_parse_pgm(data, str(p)))
    return _decode_with_pillow(p)


def read_mask(path: str | Path) -> BinaryImage:
    """Decode a mask file: any nonzero pixel counts as foreground."""
    gray = read_image(path)
    return BinaryImage((gray.pixels != 0).astype(np.uint8))


def write_image(img: GrayImage | BinaryImage, path: str | Path) -> None:
    """Encode to PGM (P5) or PNG, chosen by file extension.

    Binary images are written with foreground as 255 so any viewer shows them.
    """
    p = Path(path)
    arr = img.pixels if isinstance(img, GrayImage) else img.bits * np.uint8(255)
    suffix = p.suffix.lower()
    if suffix == ".pgm":
        p.write_bytes(_encode_pgm(arr))
    elif suffix == ".png":
        buf = io.BytesIO()
        Image.fromarray(arr, mode="L").save(buf, format="PNG")
        p.write_bytes(buf.getvalue())
    else:
        raise UnsupportedFormatError(f"cannot write {suffix!r} files (use .pgm or .png)")
