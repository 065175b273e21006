"""Deciding whether a binary mask contains a separating digital closed curve.

The test applied here: a set of pixels S that is 4-connected, has exactly two
4-neighbors at every point, and contains at least eight points splits the rest
of the picture into exactly two 8-connected regions (an inside and an outside),
each touching S.  Conversely, a set whose complement behaves that way must be
such a curve.  The mixed pair of adjacencies (4 for the curve, 8 for the
complement) is what makes both directions true on the square grid; using the
same relation on both sides famously breaks them.

``evaluate`` extracts a curve candidate from a mask and classifies the result:

* ``single_jordan``   - one valid separating curve;
* ``multi_object``    - several valid curves from several mask components;
* ``fragmented_object`` - several valid curves out of one mask component;
* ``with_holes``      - some curve lies nested inside another's interior;
* ``not_jordan``      - the candidate fails the curve conditions;
* ``empty_candidate`` - the mask has no interior, so no candidate exists.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .grid import BinaryImage, zero_pad
from .homology import BettiProfile, betti, betti_graph_fast, complex_from_graph
from .topology import (
    Adjacency,
    ComponentLabeling,
    PixelSet,
    build_graph,
    count_adjacent,
    label_mask,
)

__all__ = [
    "MIN_FOUR_CURVE_POINTS",
    "MIN_EIGHT_CURVE_POINTS",
    "VerdictCategory",
    "CurveCandidate",
    "JordanEvidence",
    "JordanVerdict",
    "TheoremReport",
    "despeckle",
    "extract_candidate",
    "classify_nesting",
    "evaluate",
    "theorem_check",
]

# A closed curve under 4-adjacency needs at least eight pixels; under
# 8-adjacency four suffice (the diamond).
MIN_FOUR_CURVE_POINTS = 8
MIN_EIGHT_CURVE_POINTS = 4

Coord = tuple[int, int]


class VerdictCategory(Enum):
    SINGLE_JORDAN = "single_jordan"
    MULTI_OBJECT = "multi_object"
    FRAGMENTED_OBJECT = "fragmented_object"
    WITH_HOLES = "with_holes"
    NOT_JORDAN = "not_jordan"
    EMPTY_CANDIDATE = "empty_candidate"


@dataclass(frozen=True)
class CurveCandidate:
    """Curve candidate extracted from a mask.

    ``boundary``: mask pixels with at least one background 8-neighbor.
    ``interior``: the remaining mask pixels (no background 8-neighbor).
    ``curve``:    boundary pixels 8-adjacent to the interior - the candidate S.
    """

    curve: PixelSet
    boundary: PixelSet
    interior: PixelSet


@dataclass(frozen=True)
class JordanEvidence:
    """Numeric facts the verdict is based on."""

    betti_s: BettiProfile
    complement_b0: int
    component_sizes: tuple[int, ...]
    degree_violations: tuple[Coord, ...]
    min_points_ok: bool
    padded: BinaryImage
    preprocessed: BinaryImage


@dataclass(frozen=True)
class JordanVerdict:
    category: VerdictCategory
    evidence: JordanEvidence
    nesting: tuple[tuple[int, int | None], ...]
    candidate: CurveCandidate


def despeckle(m: BinaryImage) -> BinaryImage:
    """Remove single-pixel noise in one simultaneous pass.

    A foreground pixel flips to background when more than seven of its
    8-neighbors are background; a background pixel flips to foreground when
    more than six of its 8-neighbors are foreground.  Out-of-domain positions
    are not counted, so a pixel whose in-domain neighborhood is homogeneous
    with it never changes.
    """
    fg = m.bits.astype(bool)
    fg_count = count_adjacent(fg, Adjacency.EIGHT)
    nbr_count = count_adjacent(np.ones_like(fg), Adjacency.EIGHT)
    bg_count = nbr_count - fg_count
    out = m.bits.copy()
    out[fg & (bg_count > 7)] = 0
    out[~fg & (fg_count > 6)] = 1
    return BinaryImage(out)


def extract_candidate(m: BinaryImage) -> CurveCandidate:
    """Extract the curve candidate S from a (padded, cleaned) mask.

    Mask pixels that see background are the boundary; of those, the ones that
    also see a mask pixel seeing no background form S.  A mask with empty
    interior therefore yields an empty candidate.
    """
    fg = m.bits.astype(bool)
    boundary = fg & (count_adjacent(~fg, Adjacency.EIGHT) > 0)
    interior = fg & ~boundary
    curve = boundary & (count_adjacent(interior, Adjacency.EIGHT) > 0)
    return CurveCandidate(
        curve=PixelSet.from_mask(curve),
        boundary=PixelSet.from_mask(boundary),
        interior=PixelSet.from_mask(interior),
    )


def classify_nesting(
    curve_comps: ComponentLabeling, complement_comps: ComponentLabeling
) -> tuple[tuple[int, int | None], ...]:
    """Pair each curve component with its surrounding complement component.

    A curve component none of whose adjacent complement components touches the
    domain border is nested; for those, the id of the enclosing complement
    component is reported, otherwise None.
    """
    curve_arr = curve_comps.array
    comp_arr = complement_comps.array
    h, w = curve_arr.shape

    border_labels: set[int] = set()
    for edge in (comp_arr[0, :], comp_arr[-1, :], comp_arr[:, 0], comp_arr[:, -1]):
        border_labels.update(int(v) for v in np.unique(edge) if v >= 0)

    padded = np.full((h + 2, w + 2), -1, dtype=np.int32)
    padded[1:-1, 1:-1] = comp_arr
    adjacent: dict[int, set[int]] = {c: set() for c in range(curve_comps.count)}
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dx == 0 and dy == 0:
                continue
            shifted = padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]
            sel = (curve_arr >= 0) & (shifted >= 0)
            for cid, comp in zip(curve_arr[sel].tolist(), shifted[sel].tolist()):
                adjacent[cid].add(comp)

    first_pixel: dict[int, tuple[int, int]] = {}
    rows, cols = np.nonzero(curve_arr >= 0)
    for r, c in zip(rows.tolist(), cols.tolist()):  # row-major scan
        cid = int(curve_arr[r, c])
        if cid not in first_pixel:
            first_pixel[cid] = (r, c)

    out: list[tuple[int, int | None]] = []
    for cid in range(curve_comps.count):
        nested = adjacent[cid].isdisjoint(border_labels)
        container: int | None = None
        if nested:
            r, c = first_pixel[cid]
            if c > 0 and comp_arr[r, c - 1] >= 0:
                container = int(comp_arr[r, c - 1])
        out.append((cid, container if nested else None))
    return tuple(out)


def evaluate(
    m: BinaryImage,
    *,
    pad_margin: int = 1,
    run_despeckle: bool = True,
    self_check: bool = False,
) -> JordanVerdict:
    """Full mask-to-verdict pipeline.

    The mask is zero-padded (so no object touches the border), optionally
    despeckled, and its curve candidate extracted.  Both intermediate masks
    are recorded on the evidence.  ``self_check`` additionally recomputes the
    Betti pair through boundary-matrix ranks and insists the two paths agree.
    """
    padded = zero_pad(m, pad_margin)
    pre = despeckle(padded) if run_despeckle else padded
    cand = extract_candidate(pre)
    s = cand.curve

    curve_comps = label_mask(s.mask, Adjacency.FOUR)
    graph = build_graph(s, Adjacency.FOUR)
    betti_s = betti_graph_fast(graph)
    if self_check:
        by_rank = betti(complex_from_graph(graph))
        if by_rank != betti_s:
            raise RuntimeError(
                f"betti self-check failed: rank path {by_rank}, graph path {betti_s}"
            )
        if curve_comps.count != betti_s.b0:
            raise RuntimeError(
                f"component count {curve_comps.count} disagrees with b0 {betti_s.b0}"
            )

    complement_comps = label_mask(~s.mask, Adjacency.EIGHT)
    four_degree = count_adjacent(s.mask, Adjacency.FOUR)
    bad = s.mask & (four_degree != 2)
    rows, cols = np.nonzero(bad)
    violations = tuple(zip((cols + 1).tolist(), (rows + 1).tolist()))
    min_points_ok = all(size >= MIN_FOUR_CURVE_POINTS for size in curve_comps.sizes)

    evidence = JordanEvidence(
        betti_s=betti_s,
        complement_b0=complement_comps.count,
        component_sizes=curve_comps.sizes,
        degree_violations=violations,
        min_points_ok=min_points_ok,
        padded=padded,
        preprocessed=pre,
    )

    nesting: tuple[tuple[int, int | None], ...] = ()
    if len(s) == 0:
        category = VerdictCategory.EMPTY_CANDIDATE
    elif (
        betti_s.b0 == betti_s.b1
        and complement_comps.count == betti_s.b0 + 1
        and min_points_ok
        and not violations
    ):
        nesting = classify_nesting(curve_comps, complement_comps)
        if betti_s.b0 == 1:
            category = VerdictCategory.SINGLE_JORDAN
        elif any(container is not None for _, container in nesting):
            category = VerdictCategory.WITH_HOLES
        else:
            mask_comps = label_mask(pre.bits.astype(bool), Adjacency.EIGHT)
            if mask_comps.count == 1:
                category = VerdictCategory.FRAGMENTED_OBJECT
            else:
                category = VerdictCategory.MULTI_OBJECT
    else:
        category = VerdictCategory.NOT_JORDAN

    return JordanVerdict(category=category, evidence=evidence, nesting=nesting, candidate=cand)


# ---------------------------------------------------------------------------
# Independent verifier.  Everything below is deliberately implemented with
# plain breadth-first search over coordinate sets, sharing no machinery with
# the pipeline above, so the two can be used to check each other.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TheoremReport:
    """Direct check of the curve definition and of the separation property."""

    point_count: int
    connected: bool
    all_degrees_two: bool
    complement_component_count: int
    two_sided_adjacency: bool

    @property
    def is_simple_curve(self) -> bool:
        """Connected, every point with exactly two 4-neighbors, at least 8 points."""
        return self.connected and self.all_degrees_two and self.point_count >= MIN_FOUR_CURVE_POINTS

    @property
    def separates_two_sided(self) -> bool:
        """Complement has exactly two 8-components, and every curve point touches both."""
        return self.complement_component_count == 2 and self.two_sided_adjacency


def _bfs_components(nodes: set[Coord], offsets) -> list[set[Coord]]:
    remaining = set(nodes)
    comps: list[set[Coord]] = []
    while remaining:
        seed = min(remaining, key=lambda p: (p[1], p[0]))
        comp = {seed}
        queue = deque([seed])
        remaining.remove(seed)
        while queue:
            x, y = queue.popleft()
            for dx, dy in offsets:
                q = (x + dx, y + dy)
                if q in remaining:
                    remaining.remove(q)
                    comp.add(q)
                    queue.append(q)
        comps.append(comp)
    return comps


def theorem_check(s: PixelSet) -> TheoremReport:
    """Verify both sides of the separation equivalence by brute force."""
    pts = set(s.points)
    four = Adjacency.FOUR.offsets
    eight = Adjacency.EIGHT.offsets

    degrees_ok = all(
        sum((x + dx, y + dy) in pts for dx, dy in four) == 2 for x, y in pts
    )
    connected = len(_bfs_components(pts, four)) == 1 if pts else False

    domain_rest = {
        (x, y)
        for y in range(1, s.height + 1)
        for x in range(1, s.width + 1)
        if (x, y) not in pts
    }
    comps = _bfs_components(domain_rest, eight)
    two_sided = False
    if len(comps) == 2 and pts:
        side_a, side_b = comps
        two_sided = all(
            any((x + dx, y + dy) in side_a for dx, dy in eight)
            and any((x + dx, y + dy) in side_b for dx, dy in eight)
            for x, y in pts
        )
    return TheoremReport(
        point_count=len(pts),
        connected=connected,
        all_degrees_two=degrees_ok,
        complement_component_count=len(comps),
        two_sided_adjacency=two_sided,
    )
