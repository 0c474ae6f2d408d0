"""Finite median spaces: medians, convexity, walls, poc-set duality and structure checks."""

from .analysis import (
    CompactnessProfile, IsometryGroup, RigidityVerdict, Verdict, automorphism_group,
    branch_approx_check, compactness_profile, cover_bound_check, interval_cover_check,
    rigidity_detect, stabilizer_orbit, stabilizer_wall_check,
)
from .duality import (
    MeasuredPocSet, Ultrafilter, contravariance_check, disjoint_union, make_pocset, pocset_of,
    principal_ultrafilter, realize, roundtrip_check, ultrafilters,
)
from .errors import (
    BadParams, Disconnected, EmptyIntersection, InconsistentWeights, IntersectionNotSingleton,
    MedianSpaceError, NoFamilyFound, NonMedian, NonPositiveWeight, NotDisjoint, NotInHull,
    NotStronglySeparated, ParseError, PrecondViolated, TooLargeForBruteForce,
)
from .fileio import (
    parse_pocset, parse_report, parse_space, read_space, serialize_pocset, serialize_report,
    serialize_space, write_space,
)
from .fixtures import build_fixture, parse_fixture
# halfspaces() is not re-exported: it would shadow the submodule of the same name
from .halfspaces import (
    Halfspace, Relation, Wall, WallSet, boundary, branched_at, classify_pair, depth, halfspace_of,
    enumerate_walls, extract_disjoint_family, facing_triple, rank, separating,
    strongly_separated, wall_interval,
)
from .report import Check, Report
from .space import (
    ConvexSet, MedianSpace, convex_hull, ensure_valid, gate_project, hausdorff_distance,
    helly_intersection, interval, is_convex, join, median, subspace, validate_space,
)
from .structure import (
    bridge, deep_transverse_family, embed_check, hull_neighborhood_check,
    interval_product_check, near_halfspace, wall_decomposition_check,
)

__version__ = "0.1.0"
