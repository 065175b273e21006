"""Digital topology on the integer grid.

Four kinds of adjacency between pixels are supported: the 4-neighborhood
(edge-sharing), the 8-neighborhood (edge- or corner-sharing), and the two
6-neighborhoods that extend the 4-neighborhood with one diagonal pair each.
Connectivity notions (components, graphs, degrees) are all parameterized by
the adjacency relation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np
from scipy import ndimage

from .errors import DomainError

__all__ = [
    "Adjacency",
    "PixelSet",
    "AdjacencyGraph",
    "ComponentLabeling",
    "neighbors",
    "build_graph",
    "connected_components",
    "complement",
    "degree_profile",
]

Coord = tuple[int, int]

_FOUR = ((0, -1), (-1, 0), (1, 0), (0, 1))
_DIAG_NE = ((-1, -1), (1, 1))
_DIAG_NW = ((1, -1), (-1, 1))


class Adjacency(Enum):
    """Pixel adjacency relation; offsets are (dx, dy) displacements."""

    FOUR = "four"
    SIX_NE = "six-ne"
    SIX_NW = "six-nw"
    EIGHT = "eight"

    @property
    def offsets(self) -> tuple[Coord, ...]:
        if self is Adjacency.FOUR:
            return _FOUR
        if self is Adjacency.SIX_NE:
            return _FOUR + _DIAG_NE
        if self is Adjacency.SIX_NW:
            return _FOUR + _DIAG_NW
        return _FOUR + _DIAG_NE + _DIAG_NW

    @property
    def structure(self) -> np.ndarray:
        """3x3 footprint (row, col indexed) for component labeling."""
        s = np.zeros((3, 3), dtype=bool)
        s[1, 1] = True
        for dx, dy in self.offsets:
            s[1 + dy, 1 + dx] = True
        return s


@dataclass(frozen=True, eq=False)
class PixelSet:
    """A subset of the pixels of a width x height domain.

    Stored as a read-only boolean mask of shape (height, width); coordinates
    at the API boundary are 1-based (x, y).
    """

    width: int
    height: int
    mask: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.mask, dtype=bool)
        if arr.shape != (self.height, self.width):
            raise DomainError(
                f"mask shape {arr.shape} does not match domain {self.width}x{self.height}"
            )
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "mask", arr)

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "PixelSet":
        mask = np.asarray(mask, dtype=bool)
        return cls(mask.shape[1], mask.shape[0], mask)

    @classmethod
    def from_points(cls, width: int, height: int, points) -> "PixelSet":
        mask = np.zeros((height, width), dtype=bool)
        for x, y in points:
            if not (1 <= x <= width and 1 <= y <= height):
                raise DomainError(f"pixel ({x}, {y}) outside domain {width}x{height}")
            mask[y - 1, x - 1] = True
        return cls(width, height, mask)

    @cached_property
    def points(self) -> tuple[Coord, ...]:
        """Members in row-major order as 1-based (x, y) pairs."""
        rows, cols = np.nonzero(self.mask)
        return tuple(zip((cols + 1).tolist(), (rows + 1).tolist()))

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __contains__(self, p: Coord) -> bool:
        x, y = p
        if not (1 <= x <= self.width and 1 <= y <= self.height):
            return False
        return bool(self.mask[y - 1, x - 1])

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PixelSet):
            return NotImplemented
        return (self.width, self.height) == (other.width, other.height) and np.array_equal(
            self.mask, other.mask
        )


@dataclass(frozen=True)
class AdjacencyGraph:
    """Graph whose vertices are pixels and whose edges join adjacent members.

    ``vertices`` is row-major sorted; ``edges`` holds index pairs (i, j) with
    i < j in lexicographic order, so construction is canonical.
    """

    vertices: tuple[Coord, ...]
    edges: tuple[tuple[int, int], ...]
    adjacency: Adjacency


class ComponentLabeling:
    """Result of connected-component labeling over a pixel set.

    Component ids are assigned 0..count-1 in order of each component's first
    row-major member, so labeling is deterministic.
    """

    def __init__(self, array: np.ndarray, count: int):
        array = np.ascontiguousarray(array, dtype=np.int32)
        array.setflags(write=False)
        self.array = array  # (h, w); -1 outside the set
        self.count = count

    @cached_property
    def labels(self) -> dict[Coord, int]:
        rows, cols = np.nonzero(self.array >= 0)
        ids = self.array[rows, cols]
        return {
            (int(c) + 1, int(r) + 1): int(i)
            for r, c, i in zip(rows.tolist(), cols.tolist(), ids.tolist())
        }

    @cached_property
    def sizes(self) -> tuple[int, ...]:
        flat = self.array[self.array >= 0]
        return tuple(np.bincount(flat, minlength=self.count).tolist())


def neighbors(p: Coord, adj: Adjacency, domain: tuple[int, int]) -> list[Coord]:
    """In-domain neighbors of ``p`` under ``adj``, in row-major order."""
    width, height = domain
    x, y = p
    if not (1 <= x <= width and 1 <= y <= height):
        raise DomainError(f"pixel ({x}, {y}) outside domain {width}x{height}")
    out = [
        (x + dx, y + dy)
        for dx, dy in adj.offsets
        if 1 <= x + dx <= width and 1 <= y + dy <= height
    ]
    out.sort(key=lambda q: (q[1], q[0]))
    return out


def build_graph(s: PixelSet, adj: Adjacency) -> AdjacencyGraph:
    """Materialize the adjacency graph of a pixel set."""
    verts = s.points
    index = {p: i for i, p in enumerate(verts)}
    edges = []
    for i, (x, y) in enumerate(verts):
        for dx, dy in adj.offsets:
            j = index.get((x + dx, y + dy))
            if j is not None and j > i:
                edges.append((i, j))
    edges.sort()
    return AdjacencyGraph(verts, tuple(edges), adj)


def label_mask(mask: np.ndarray, adj: Adjacency) -> ComponentLabeling:
    """Label connected components of a boolean (h, w) mask under ``adj``."""
    mask = np.asarray(mask, dtype=bool)
    raw, n = ndimage.label(mask, structure=adj.structure)
    if n == 0:
        return ComponentLabeling(np.where(mask, 0, -1).astype(np.int32), 0)
    flat = raw.ravel()
    vals, first = np.unique(flat, return_index=True)
    keep = vals != 0
    vals, first = vals[keep], first[keep]
    remap = np.zeros(n + 1, dtype=np.int32)
    remap[vals[np.argsort(first, kind="stable")]] = np.arange(n, dtype=np.int32)
    labeled = np.where(mask, remap[raw], np.int32(-1))
    return ComponentLabeling(labeled, n)


def connected_components(s: PixelSet, adj: Adjacency) -> ComponentLabeling:
    """Connected components of ``s`` under ``adj`` with deterministic ids."""
    return label_mask(s.mask, adj)


def complement(s: PixelSet) -> PixelSet:
    """Pixels of the domain not in ``s``."""
    return PixelSet(s.width, s.height, ~s.mask)


def count_adjacent(mask: np.ndarray, adj: Adjacency) -> np.ndarray:
    """Per-pixel count of True neighbors of a boolean (h, w) mask under ``adj``."""
    mask = np.asarray(mask)
    h, w = mask.shape
    padded = np.pad(mask.astype(np.int32), 1)
    out = np.zeros((h, w), dtype=np.int32)
    for dx, dy in adj.offsets:
        out += padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]
    return out


def degree_profile(s: PixelSet, adj: Adjacency) -> dict[Coord, int]:
    """Degree (number of adjacent members) of every member of ``s``."""
    counts = count_adjacent(s.mask, adj)
    return {(x, y): int(counts[y - 1, x - 1]) for x, y in s.points}
