"""License frequency, direct/AGPL incompatibility, impact and centrality engines."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .graph import DependencyGraph, ancestor_indices
from .licenses import (
    CompatibilityMatrix,
    LicenseExpr,
    is_agpl_caused,
    is_expr_incompatible,
)


@dataclass(frozen=True)
class FrequencyTable:
    ecosystem: str
    total: int
    counts: dict[str, int]

    def share(self, label: str) -> Fraction:
        return Fraction(self.counts.get(label, 0), self.total) if self.total else Fraction(0)

    def ranked(self) -> list[tuple[str, int]]:
        return sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))


@dataclass(frozen=True)
class ViolationRecord:
    dependent: str
    dependency: str
    dependent_license: LicenseExpr
    dependency_license: LicenseExpr
    agpl_caused: bool

    @property
    def edge(self) -> tuple[str, str]:
        return self.dependent, self.dependency


@dataclass(frozen=True)
class ViolationReport:
    violations: list[ViolationRecord]
    links: int

    @property
    def count(self) -> int:
        return len(self.violations)

    @property
    def ratio(self) -> Fraction:
        return Fraction(len(self.violations), self.links) if self.links else Fraction(0)


@dataclass(frozen=True)
class ImpactResult:
    violating_dependents: tuple[str, ...] = ()
    affected: frozenset[str] = frozenset()
    per_violator: dict[str, int] = field(default_factory=dict)
    violations: tuple[ViolationRecord, ...] = ()
    packages: int = 0

    @property
    def share(self) -> Fraction:
        return Fraction(len(self.affected), self.packages) if self.packages else Fraction(0)


@dataclass(frozen=True)
class PageRankResult:
    scores: dict[str, float]
    iterations: int
    converged: bool

    def ranks(self) -> dict[str, int]:
        """1-based rank per package, highest score first, ties by key."""
        order = sorted(self.scores, key=lambda k: (-self.scores[k], k))
        return {k: i for i, k in enumerate(order, 1)}


def ecosystem_of(graph: DependencyGraph) -> str:
    return graph.nodes[0].ecosystem if graph.nodes else ""


def license_frequencies(graph: DependencyGraph) -> FrequencyTable:
    """One count per package under its full license label ("None" if unlicensed)."""
    counts = Counter(node.license.label for node in graph.nodes)
    return FrequencyTable(ecosystem_of(graph), len(graph), dict(counts))


def _edge_verdicts(graph: DependencyGraph, matrix: CompatibilityMatrix):
    # evaluate each distinct (dependency expr, dependent expr) pair only once
    codes: dict[LicenseExpr, int] = {}
    node_codes = np.fromiter(
        (codes.setdefault(n.license, len(codes)) for n in graph.nodes),
        dtype=np.int64,
        count=len(graph),
    )
    exprs = list(codes)
    m = max(len(exprs), 1)
    pair = node_codes[graph.dst] * m + node_codes[graph.src]
    uniq, inverse = np.unique(pair, return_inverse=True)
    incompatible = np.zeros(len(uniq), dtype=bool)
    agpl = np.zeros(len(uniq), dtype=bool)
    for k, p in enumerate(uniq.tolist()):
        dependency, dependent = exprs[p // m], exprs[p % m]
        incompatible[k] = is_expr_incompatible(matrix, dependency, dependent)
        agpl[k] = incompatible[k] and is_agpl_caused(matrix, dependency, dependent)
    return incompatible[inverse], agpl[inverse]


def direct_incompatibilities(graph: DependencyGraph, matrix: CompatibilityMatrix) -> ViolationReport:
    """Every logical edge whose dependent may not use its dependency."""
    if graph.num_edges == 0:
        return ViolationReport([], 0)
    hit, agpl = _edge_verdicts(graph, matrix)
    nodes = graph.nodes
    records = []
    for k in np.flatnonzero(hit).tolist():
        u, v = nodes[graph.src[k]], nodes[graph.dst[k]]
        records.append(ViolationRecord(u.id, v.id, u.license, v.license, bool(agpl[k])))
    return ViolationReport(records, graph.num_edges)


def agpl_incompatibilities(
    graph: DependencyGraph, matrix: CompatibilityMatrix, direct: ViolationReport | None = None
) -> ViolationReport:
    """Direct incompatibilities whose dependency carries an AGPL license.

    The ratio keeps all dependency links as denominator.
    """
    if direct is None:
        direct = direct_incompatibilities(graph, matrix)
    return ViolationReport([r for r in direct.violations if r.agpl_caused], direct.links)


def agpl_impact(
    graph: DependencyGraph, matrix: CompatibilityMatrix, agpl: ViolationReport | None = None
) -> ImpactResult:
    """Packages that transitively depend on a dependent of an AGPL violation.

    A violating dependent is not counted as affected by its own violation;
    it is counted when it reaches a *different* violating dependent.
    """
    if agpl is None:
        agpl = agpl_incompatibilities(graph, matrix)
    if not agpl.violations:
        return ImpactResult(packages=len(graph))
    idx = sorted({graph.index[r.dependent] for r in agpl.violations})
    counts, mask = ancestor_indices(graph, idx)
    nodes = graph.nodes
    violators = tuple(nodes[i].id for i in idx)
    return ImpactResult(
        violating_dependents=violators,
        affected=frozenset(nodes[i].id for i in np.flatnonzero(mask).tolist()),
        per_violator=dict(zip(violators, counts.tolist())),
        violations=tuple(agpl.violations),
        packages=len(graph),
    )


def pagerank(
    graph: DependencyGraph,
    damping: float = 0.85,
    max_iterations: int = 100,
    tolerance: float = 1e-9,
) -> PageRankResult:
    """PageRank along dependent -> dependency edges.

    Heavily depended-upon packages score high. Iteration stops once the L1
    change drops below ``tolerance``; ``converged`` is False if
    ``max_iterations`` ran out first.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError(f"damping must lie in (0, 1), got {damping}")
    if max_iterations < 1:
        raise ValueError("max_iterations must be positive")
    indptr, indices = graph.forward
    x, iterations, converged = kernels.pagerank(
        indptr, indices, float(damping), int(max_iterations), float(tolerance)
    )
    scores = {node.id: float(s) for node, s in zip(graph.nodes, x.tolist())}
    return PageRankResult(scores, int(iterations), bool(converged))


def top_impact_violators(impact: ImpactResult, threshold: int = 1000) -> list[tuple[str, int]]:
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    rows = [(k, c) for k, c in impact.per_violator.items() if c > threshold]
    return sorted(rows, key=lambda kc: (-kc[1], kc[0]))
