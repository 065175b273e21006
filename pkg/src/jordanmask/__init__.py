"""Topological validation of binary segmentation masks.

A mask passes when the closed-curve candidate extracted from it is a digital
closed curve under 4-adjacency that splits the rest of the image into exactly
two 8-connected regions; Betti numbers of the candidate and its complement
carry the evidence.  Classical segmenters (Otsu, iterative mean-split,
2-means, watershed) and pixel agreement metrics round out the toolkit.
"""

from .errors import (
    DecodeError,
    DegenerateInputError,
    DomainError,
    JordanMaskError,
    UnsupportedFormatError,
)
from .grid import (
    BinaryImage,
    GrayImage,
    Polarity,
    binarize,
    read_image,
    read_mask,
    resize_nearest,
    to_grayscale,
    write_image,
    zero_pad,
)
from .homology import (
    BettiProfile,
    BoundaryMatrix,
    SimplicialComplex,
    betti,
    betti_graph_fast,
    boundary_matrix,
    complex_from_graph,
    gf2_multiply,
    gf2_rank,
)
from .jordan import (
    MIN_EIGHT_CURVE_POINTS,
    MIN_FOUR_CURVE_POINTS,
    CurveCandidate,
    JordanEvidence,
    JordanVerdict,
    TheoremReport,
    VerdictCategory,
    despeckle,
    evaluate,
    extract_candidate,
    theorem_check,
)
from .metrics import ConfusionCounts, MetricsReport, compute_metrics, confusion
from .segment import (
    Histogram,
    Method,
    SegmenterConfig,
    kmeans2_threshold,
    otsu_threshold,
    ridler_calvard_threshold,
    segment,
    watershed_binary,
)
from .topology import (
    Adjacency,
    AdjacencyGraph,
    ComponentLabeling,
    PixelSet,
    build_graph,
    complement,
    connected_components,
    degree_profile,
    neighbors,
)

__version__ = "0.1.0"
