"""Shared test utilities: string-art masks, independent oracles, generators.

Everything here that plays the role of an oracle (the flood-fill labeler, the
exhaustive threshold search, the split-variance formula) is written with plain
loops and exact arithmetic, sharing no code path with the library under test.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import numpy as np

from jordanmask.grid import BinaryImage, GrayImage, write_image
from jordanmask.topology import PixelSet

FOUR_OFFSETS = ((0, -1), (-1, 0), (1, 0), (0, 1))
EIGHT_OFFSETS = FOUR_OFFSETS + ((-1, -1), (1, 1), (1, -1), (-1, 1))


# ---------------------------------------------------------------------------
# String-art builders
# ---------------------------------------------------------------------------


def bits_from_art(art: str) -> np.ndarray:
    """Parse string art into a {0,1} uint8 array; '#' foreground, '.' background."""
    rows = [line.strip() for line in art.strip().splitlines()]
    assert len({len(r) for r in rows}) == 1, "ragged string art"
    table = {"#": 1, ".": 0}
    return np.array([[table[ch] for ch in row] for row in rows], dtype=np.uint8)


def mask_from_art(art: str) -> BinaryImage:
    return BinaryImage(bits_from_art(art))


def pixelset_from_art(art: str) -> PixelSet:
    return PixelSet.from_mask(bits_from_art(art).astype(bool))


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------


def bfs_label_oracle(mask: np.ndarray, offsets) -> tuple[np.ndarray, int]:
    """Flood-fill labeling with first-encounter row-major ids; -1 off the set."""
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    labels = np.full((h, w), -1, dtype=np.int64)
    count = 0
    for r in range(h):
        for c in range(w):
            if mask[r, c] and labels[r, c] < 0:
                labels[r, c] = count
                stack = [(r, c)]
                while stack:
                    cr, cc = stack.pop()
                    for dx, dy in offsets:
                        nr, nc = cr + dy, cc + dx
                        if 0 <= nr < h and 0 <= nc < w:
                            if mask[nr, nc] and labels[nr, nc] < 0:
                                labels[nr, nc] = count
                                stack.append((nr, nc))
                count += 1
    return labels, count


def otsu_bruteforce(counts) -> int:
    """Argmax over all 256 thresholds of the textbook between-class variance.

    Evaluated in exact rational arithmetic so ties and near-ties cannot be
    decided by float rounding; ties go to the smallest threshold.
    """
    counts = [int(v) for v in counts]
    total = sum(counts)
    mass = sum(i * v for i, v in enumerate(counts))
    best_t, best_v = 0, Fraction(-1)
    w0 = s0 = 0
    for t in range(256):
        w0 += counts[t]
        s0 += t * counts[t]
        w1, s1 = total - w0, mass - s0
        if w0 == 0 or w1 == 0:
            v = Fraction(0)
        else:
            v = Fraction(w0) * Fraction(w1) * (Fraction(s0, w0) - Fraction(s1, w1)) ** 2
        if v > best_v:
            best_t, best_v = t, v
    return best_t


def split_variance(counts: np.ndarray, midpoint: float) -> float:
    """Within-cluster squared error of cutting the histogram at ``midpoint``.

    Only occupied bins enter the sums, so two midpoints that induce the same
    assignment of occupied values produce bitwise-identical results.
    """
    occupied = np.nonzero(np.asarray(counts))[0]
    idx = occupied.astype(np.float64)
    c = np.asarray(counts, dtype=np.float64)[occupied]
    low = idx <= midpoint
    var = 0.0
    for sel in (low, ~low):
        n = c[sel].sum()
        if n > 0:
            mu = (idx[sel] * c[sel]).sum() / n
            var += float((c[sel] * (idx[sel] - mu) ** 2).sum())
    return var


# ---------------------------------------------------------------------------
# Random generators
# ---------------------------------------------------------------------------


def random_mask_bits(
    rng: np.random.Generator, max_side: int = 64, density: float | None = None
) -> np.ndarray:
    w = int(rng.integers(1, max_side + 1))
    h = int(rng.integers(1, max_side + 1))
    p = float(rng.uniform(0.15, 0.85)) if density is None else density
    return (rng.random((h, w)) < p).astype(np.uint8)


def _blank(rng: np.random.Generator, lo: int = 18, hi: int = 40) -> np.ndarray:
    side = int(rng.integers(lo, hi + 1))
    return np.zeros((side, side), dtype=np.uint8)


def random_rect_bits(rng: np.random.Generator) -> np.ndarray:
    """One solid axis-aligned rectangle, at least 3x3."""
    out = _blank(rng)
    h, w = out.shape
    rh = int(rng.integers(3, h + 1))
    rw = int(rng.integers(3, w + 1))
    r0 = int(rng.integers(0, h - rh + 1))
    c0 = int(rng.integers(0, w - rw + 1))
    out[r0 : r0 + rh, c0 : c0 + rw] = 1
    return out


def random_disc_bits(rng: np.random.Generator) -> np.ndarray:
    """One solid digital disc of radius >= 2."""
    out = _blank(rng)
    h, w = out.shape
    rad = int(rng.integers(2, min(h, w) // 2))
    cr = int(rng.integers(rad, h - rad))
    cc = int(rng.integers(rad, w - rad))
    rows, cols = np.ogrid[:h, :w]
    out[(rows - cr) ** 2 + (cols - cc) ** 2 <= rad * rad] = 1
    return out


def random_multi_rect_bits(rng: np.random.Generator) -> np.ndarray:
    """Union of 2-3 rectangles; may overlap, touch, or stay disjoint."""
    out = _blank(rng)
    h, w = out.shape
    for _ in range(int(rng.integers(2, 4))):
        rh = int(rng.integers(2, max(3, h // 2) + 1))
        rw = int(rng.integers(2, max(3, w // 2) + 1))
        r0 = int(rng.integers(0, h - rh + 1))
        c0 = int(rng.integers(0, w - rw + 1))
        out[r0 : r0 + rh, c0 : c0 + rw] = 1
    return out


def random_walk_bits(rng: np.random.Generator, steps: int = 60) -> np.ndarray:
    """Organic blob: a 3x3 brush stamped along a random 4-direction walk."""
    out = _blank(rng, 24, 40)
    h, w = out.shape
    r, c = h // 2, w // 2
    for _ in range(steps):
        out[r - 1 : r + 2, c - 1 : c + 2] = 1
        dr, dc = ((0, 1), (0, -1), (1, 0), (-1, 0))[int(rng.integers(4))]
        r = min(max(r + dr, 1), h - 2)
        c = min(max(c + dc, 1), w - 2)
    return out


# ---------------------------------------------------------------------------
# The five-behavior fixture corpus
# ---------------------------------------------------------------------------

FIXTURE_VERDICTS = {
    "block": "single_jordan",
    "bridge": "fragmented_object",
    "eight": "not_jordan",
    "pair": "multi_object",
    "ring": "with_holes",
}


def fixture_mask_bits(name: str) -> np.ndarray:
    """64x64 mask for one of the five named behaviors."""
    out = np.zeros((64, 64), dtype=np.uint8)
    if name == "block":  # one solid square
        out[20:44, 20:44] = 1
    elif name == "pair":  # two separated squares
        out[10:26, 10:26] = 1
        out[38:54, 38:54] = 1
    elif name == "bridge":  # two squares joined by a 1-pixel-tall bar
        out[24:40, 8:24] = 1
        out[24:40, 40:56] = 1
        out[31:32, 24:40] = 1
    elif name == "ring":  # square with a centered square hole
        out[20:44, 20:44] = 1
        out[28:36, 28:36] = 0
    elif name == "eight":  # two squares sharing exactly one corner pixel
        out[14:31, 14:31] = 1
        out[30:47, 30:47] = 1
    else:
        raise ValueError(f"unknown fixture {name!r}")
    return out


def build_fixture_corpus(root: Path) -> dict[str, str]:
    """Write the fixtures as <root>/<class>/01.pgm + 01.png ground-truth pairs."""
    for name in FIXTURE_VERDICTS:
        bits = fixture_mask_bits(name)
        d = root / name
        d.mkdir(parents=True, exist_ok=True)
        write_image(GrayImage(bits * np.uint8(200) + np.uint8(20)), d / "01.pgm")
        write_image(BinaryImage(bits), d / "01.png")
    return dict(FIXTURE_VERDICTS)
