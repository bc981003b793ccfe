"""Audit package-registry dependency networks for license incompatibilities."""

from .analysis import (
    FrequencyTable,
    ImpactResult,
    PageRankResult,
    ViolationRecord,
    ViolationReport,
    agpl_impact,
    agpl_incompatibilities,
    direct_incompatibilities,
    license_frequencies,
    pagerank,
    top_impact_violators,
)
from .graph import (
    DependencyEdge,
    DependencyGraph,
    PackageNode,
    VersionEdge,
    ancestors,
    build_graph,
    connectivity_counts,
    filter_edges_by_kind,
    reduce_multigraph,
)
from .licenses import (
    NO_LICENSE,
    CompatibilityMatrix,
    LicenseCategory,
    LicenseExpr,
    classify,
    is_agpl_family,
    is_expr_incompatible,
    is_pair_incompatible,
    load_matrix,
    parse_license_field,
)

__version__ = "0.1.0"
