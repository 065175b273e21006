"""Classical grayscale segmenters producing binary masks.

Three histogram thresholders (Otsu, iterative mean-split, two-cluster k-means)
plus a marker-based watershed.  All are deterministic: initialization, tie
breaking, and iteration order are pinned, so repeated runs agree bit for bit.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from itertools import count as _counter

import numpy as np
from scipy import ndimage

from .errors import DegenerateInputError
from .grid import BinaryImage, GrayImage, Polarity, binarize
from .topology import Adjacency, count_adjacent, label_mask

__all__ = [
    "Method",
    "SegmenterConfig",
    "Histogram",
    "otsu_threshold",
    "ridler_calvard_threshold",
    "kmeans2_threshold",
    "watershed_binary",
    "compute_threshold",
    "segment",
]


class Method(Enum):
    OTSU = "otsu"
    RIDLER_CALVARD = "ridler-calvard"
    KMEANS = "kmeans"
    WATERSHED = "watershed"


@dataclass(frozen=True)
class SegmenterConfig:
    method: Method
    polarity: Polarity = Polarity.AUTO
    rc_epsilon: float = 0.5
    rc_max_iter: int = 100
    kmeans_max_iter: int = 100


@dataclass(frozen=True, eq=False)
class Histogram:
    """256-bin intensity histogram."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.counts, dtype=np.int64)
        if arr.shape != (256,):
            raise ValueError(f"histogram must have 256 bins, got shape {arr.shape}")
        if (arr < 0).any():
            raise ValueError("histogram counts must be non-negative")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)

    @classmethod
    def from_gray(cls, img: GrayImage) -> "Histogram":
        return cls(np.bincount(img.pixels.ravel(), minlength=256))

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def otsu_threshold(hist: Histogram) -> int:
    """Threshold maximizing between-class variance; ties go to the smallest t.

    Class 0 holds intensities <= t.  The variance w0*w1*(mu0-mu1)^2 equals
    (s0*w1 - s1*w0)^2 / (w0*w1), which is compared exactly with integer
    cross-multiplication, so the argmax never depends on float rounding.
    """
    counts = hist.counts.tolist()
    total = hist.total
    if total == 0:
        raise DegenerateInputError("cannot threshold an empty histogram")
    total_mass = sum(i * c for i, c in enumerate(counts))
    best_t, best_num, best_den = 0, -1, 1
    w0 = s0 = 0
    for t in range(256):
        w0 += counts[t]
        s0 += t * counts[t]
        w1 = total - w0
        s1 = total_mass - s0
        if w0 == 0 or w1 == 0:
            num, den = 0, 1
        else:
            diff = s0 * w1 - s1 * w0
            num, den = diff * diff, w0 * w1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def ridler_calvard_threshold(hist: Histogram, config: SegmenterConfig | None = None) -> float:
    """Iterative mean-split threshold.

    Starts from the global mean and repeatedly sets t to the average of the
    mean below (<= t) and the mean above, until the step drops under
    ``rc_epsilon`` or ``rc_max_iter`` is hit.  An empty class contributes the
    current t as its mean.
    """
    cfg = config or SegmenterConfig(Method.RIDLER_CALVARD)
    if hist.total == 0:
        raise DegenerateInputError("cannot threshold an empty histogram")
    idx = np.arange(256, dtype=np.float64)
    counts = hist.counts.astype(np.float64)
    mass = idx * counts
    t = float(mass.sum() / counts.sum())
    for _ in range(cfg.rc_max_iter):
        low = idx <= t
        w_low, w_high = counts[low].sum(), counts[~low].sum()
        mu_low = mass[low].sum() / w_low if w_low > 0 else t
        mu_high = mass[~low].sum() / w_high if w_high > 0 else t
        t_next = (mu_low + mu_high) / 2.0
        done = abs(t_next - t) < cfg.rc_epsilon
        t = t_next
        if done:
            break
    return t


def kmeans2_threshold(
    hist: Histogram,
    config: SegmenterConfig | None = None,
    history: list[tuple[float, float]] | None = None,
) -> float:
    """Two-cluster 1-d k-means on the histogram; returns the centroid midpoint.

    Centroids start at the lowest and highest occupied intensities.  A value
    equidistant from both centroids joins the lower one, so assignment is
    exactly "intensity <= midpoint", and the returned midpoint reproduces the
    final assignment when used as a threshold.  When ``history`` is given it
    receives the (low, high) centroid pair at initialization and after every
    update, letting callers audit the per-iteration descent.
    """
    cfg = config or SegmenterConfig(Method.KMEANS)
    occupied = np.nonzero(hist.counts)[0]
    if occupied.size == 0:
        raise DegenerateInputError("cannot threshold an empty histogram")
    if occupied.size == 1:
        raise DegenerateInputError(
            f"k-means needs two distinct intensities; image only contains {int(occupied[0])}"
        )
    idx = np.arange(256, dtype=np.float64)
    counts = hist.counts.astype(np.float64)
    mass = idx * counts
    c0, c1 = float(occupied[0]), float(occupied[-1])
    if history is not None:
        history.append((c0, c1))
    for _ in range(cfg.kmeans_max_iter):
        mid = (c0 + c1) / 2.0
        low = idx <= mid
        c0_next = mass[low].sum() / counts[low].sum()
        c1_next = mass[~low].sum() / counts[~low].sum()
        if (c0_next, c1_next) == (c0, c1):
            break
        c0, c1 = c0_next, c1_next
        if history is not None:
            history.append((c0, c1))
    return (c0 + c1) / 2.0


# ---------------------------------------------------------------------------
# Watershed
# ---------------------------------------------------------------------------

# 8-neighborhood as (dr, dc), row-major.
_NBRS8 = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))
_LINE = -1


def _gradient_magnitude(pixels: np.ndarray) -> np.ndarray:
    arr = pixels.astype(np.float64)
    gx = ndimage.sobel(arr, axis=1, mode="nearest")
    gy = ndimage.sobel(arr, axis=0, mode="nearest")
    return np.hypot(gx, gy)


def _regional_minima(g: np.ndarray) -> np.ndarray:
    """Plateau-aware regional minima: equal-valued regions with no lower neighbor."""
    h, w = g.shape
    cand = g <= ndimage.minimum_filter(g, size=3, mode="nearest")
    g_pad = np.pad(g, 1, constant_values=np.inf)
    while True:
        cand_pad = np.pad(cand, 1, constant_values=True)
        leak = np.zeros_like(cand)
        for dr, dc in _NBRS8:
            same = g_pad[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w] == g
            not_min = ~cand_pad[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]
            leak |= cand & same & not_min
        if not leak.any():
            return cand
        cand &= ~leak


def _flood(g: np.ndarray, marker_array: np.ndarray, marker_count: int) -> np.ndarray:
    """Meyer flooding from labeled minima.

    The queue is ordered by (gradient value, insertion sequence), so equal
    heights resolve by insertion order and the result is deterministic.  A
    pixel whose already-labeled neighbors disagree at pop time becomes a
    watershed-line pixel and does not propagate.
    """
    h, w = g.shape
    labels = np.where(marker_array >= 0, marker_array + 1, 0).astype(np.int32)
    seq = _counter()
    heap: list[tuple[float, int, int, int]] = []

    rows, cols = np.nonzero(labels > 0)
    for r, c in zip(rows.tolist(), cols.tolist()):
        for dr, dc in _NBRS8:
            nr, nc = r + dr, c + dc
            if 0 <= nr < h and 0 <= nc < w and labels[nr, nc] == 0:
                heapq.heappush(heap, (float(g[nr, nc]), next(seq), nr, nc))

    while heap:
        _, _, r, c = heapq.heappop(heap)
        if labels[r, c] != 0:
            continue
        seen: set[int] = set()
        for dr, dc in _NBRS8:
            nr, nc = r + dr, c + dc
            if 0 <= nr < h and 0 <= nc < w and labels[nr, nc] > 0:
                seen.add(int(labels[nr, nc]))
        if not seen:
            continue
        if len(seen) > 1:
            labels[r, c] = _LINE
            continue
        labels[r, c] = seen.pop()
        for dr, dc in _NBRS8:
            nr, nc = r + dr, c + dc
            if 0 <= nr < h and 0 <= nc < w and labels[nr, nc] == 0:
                heapq.heappush(heap, (float(g[nr, nc]), next(seq), nr, nc))

    labels[labels == 0] = _LINE  # regions sealed off by lines, if any
    return labels


def watershed_binary(img: GrayImage, config: SegmenterConfig | None = None) -> BinaryImage:
    """Watershed on the Sobel gradient, collapsed to a binary mask.

    Basins flood out of the regional minima of the gradient magnitude; each
    basin then becomes foreground or background by comparing its mean original
    intensity with the global Otsu threshold (respecting polarity).  Watershed
    line pixels join the foreground when a strict majority of their in-domain
    8-neighbors is foreground, ties going to background.
    """
    cfg = config or SegmenterConfig(Method.WATERSHED)
    if img.width < 3 or img.height < 3:
        raise DegenerateInputError(
            f"watershed needs at least a 3x3 image, got {img.width}x{img.height}"
        )
    g = _gradient_magnitude(img.pixels)
    minima = label_mask(_regional_minima(g), Adjacency.EIGHT)
    labels = _flood(g, minima.array, minima.count)

    n = minima.count
    flat_labels = labels.ravel()
    flat_int = img.pixels.ravel().astype(np.float64)
    in_basin = flat_labels > 0
    basin_px = np.bincount(flat_labels[in_basin], minlength=n + 1)
    basin_sum = np.bincount(flat_labels[in_basin], weights=flat_int[in_basin], minlength=n + 1)
    means = np.divide(basin_sum, basin_px, out=np.zeros(n + 1), where=basin_px > 0)

    t = otsu_threshold(Histogram.from_gray(img))
    fg_basin = means > t
    fg_basin[0] = False
    if cfg.polarity is Polarity.BELOW:
        fg_basin[1:] = ~fg_basin[1:]
    elif cfg.polarity is Polarity.AUTO:
        fg_px = int(basin_px[1:][fg_basin[1:]].sum())
        bg_px = int(basin_px[1:][~fg_basin[1:]].sum())
        if fg_px > bg_px:
            fg_basin[1:] = ~fg_basin[1:]

    fg = np.zeros(labels.shape, dtype=bool)
    basin_sel = labels > 0
    fg[basin_sel] = fg_basin[labels[basin_sel]]

    line = labels == _LINE
    if line.any():
        fg_nbrs = count_adjacent(fg, Adjacency.EIGHT)
        all_nbrs = count_adjacent(np.ones_like(fg), Adjacency.EIGHT)
        fg = fg | (line & (2 * fg_nbrs > all_nbrs))
    return BinaryImage(fg.astype(np.uint8))


def compute_threshold(img: GrayImage, config: SegmenterConfig) -> float | None:
    """Threshold the configured method would apply, or None for watershed."""
    if config.method is Method.WATERSHED:
        return None
    hist = Histogram.from_gray(img)
    if config.method is Method.OTSU:
        return float(otsu_threshold(hist))
    if config.method is Method.RIDLER_CALVARD:
        return ridler_calvard_threshold(hist, config)
    return kmeans2_threshold(hist, config)


def segment(img: GrayImage, config: SegmenterConfig) -> BinaryImage:
    """Run the configured segmenter.

    For threshold methods, ``Polarity.AUTO`` picks the side with fewer pixels
    as foreground (a tie keeps intensity-above-threshold as foreground).
    """
    if config.method is Method.WATERSHED:
        return watershed_binary(img, config)
    t = compute_threshold(img, config)
    assert t is not None
    if config.polarity is Polarity.BELOW:
        return binarize(img, t, Polarity.BELOW)
    mask = binarize(img, t, Polarity.ABOVE)
    if config.polarity is Polarity.AUTO:
        fg = mask.foreground_count()
        if 2 * fg > mask.width * mask.height:
            return binarize(img, t, Polarity.BELOW)
    return mask
