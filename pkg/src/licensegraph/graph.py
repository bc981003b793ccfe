"""Package-level dependency networks.

Edges always point from the dependent to its dependency.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from . import kernels
from .licenses import NO_LICENSE, LicenseExpr

DEFAULT_KINDS = frozenset({"runtime", "compile"})


@dataclass(frozen=True)
class PackageNode:
    id: str
    name: str
    ecosystem: str = ""
    license: LicenseExpr = NO_LICENSE


class VersionEdge(NamedTuple):
    dependent: str
    dependency: str
    kind: str = "runtime"


class DependencyEdge(NamedTuple):
    dependent: str
    dependency: str


class DuplicateNodeError(ValueError):
    pass


def normalize_kind(kind: str | None) -> str:
    # the dump has rows without a kind; those are plain runtime requirements
    kind = (kind or "").strip().lower()
    return kind or "runtime"


def filter_edges_by_kind(
    edges: Iterable[VersionEdge], kept: Iterable[str] = DEFAULT_KINDS
) -> Iterator[VersionEdge]:
    kept = frozenset(normalize_kind(k) for k in kept)
    if not kept:
        raise ValueError("at least one dependency kind must be kept")
    return (e for e in edges if normalize_kind(e.kind) in kept)


def reduce_multigraph(edges: Iterable[VersionEdge | DependencyEdge | tuple]) -> set[DependencyEdge]:
    """Collapse version-level edges into one logical edge per ordered pair."""
    return {DependencyEdge(e[0], e[1]) for e in edges}


def _csr(n: int, rows: np.ndarray, cols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((cols, rows))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return indptr, np.ascontiguousarray(cols[order], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class DependencyGraph:
    nodes: tuple[PackageNode, ...]
    index: dict[str, int]
    src: np.ndarray
    dst: np.ndarray
    dangling: int = 0
    forward: tuple[np.ndarray, np.ndarray] = field(repr=False, default=None)
    reverse: tuple[np.ndarray, np.ndarray] = field(repr=False, default=None)

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return len(self.src)

    @property
    def keys(self) -> list[str]:
        return [n.id for n in self.nodes]

    def node(self, key: str) -> PackageNode:
        return self.nodes[self.index[key]]

    def edges(self) -> Iterator[DependencyEdge]:
        nodes = self.nodes
        for u, v in zip(self.src.tolist(), self.dst.tolist()):
            yield DependencyEdge(nodes[u].id, nodes[v].id)

    def dependencies(self, key: str) -> list[str]:
        indptr, indices = self.forward
        i = self.index[key]
        return [self.nodes[j].id for j in indices[indptr[i]:indptr[i + 1]]]

    def dependents(self, key: str) -> list[str]:
        indptr, indices = self.reverse
        i = self.index[key]
        return [self.nodes[j].id for j in indices[indptr[i]:indptr[i + 1]]]


def build_graph(
    nodes: Iterable[PackageNode], edges: Iterable[DependencyEdge | tuple]
) -> DependencyGraph:
    """Index nodes and logical edges.

    Edges with an endpoint missing from ``nodes`` are left out and counted in
    ``dangling``. Duplicate edges collapse.
    """
    node_list: list[PackageNode] = []
    index: dict[str, int] = {}
    for node in nodes:
        if node.id in index:
            raise DuplicateNodeError(f"duplicate package key {node.id!r}")
        index[node.id] = len(node_list)
        node_list.append(node)

    pairs = set()
    dangling = 0
    for a, b in {(e[0], e[1]) for e in edges}:
        u = index.get(a)
        v = index.get(b)
        if u is None or v is None:
            dangling += 1
        else:
            pairs.add((u, v))

    n = len(node_list)
    if pairs:
        arr = np.array(sorted(pairs), dtype=np.int64)
        src, dst = arr[:, 0].copy(), arr[:, 1].copy()
    else:
        src = np.zeros(0, dtype=np.int64)
        dst = np.zeros(0, dtype=np.int64)
    return DependencyGraph(
        nodes=tuple(node_list),
        index=index,
        src=src,
        dst=dst,
        dangling=dangling,
        forward=_csr(n, src, dst),
        reverse=_csr(n, dst, src),
    )


def connectivity_counts(graph: DependencyGraph) -> tuple[int, int]:
    """Return ``(disconnected, connected)`` package counts."""
    touched = np.zeros(len(graph), dtype=bool)
    touched[graph.src] = True
    touched[graph.dst] = True
    connected = int(touched.sum())
    return len(graph) - connected, connected


def ancestor_indices(graph: DependencyGraph, sources: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    """Run the reverse-reachability kernel; see ``kernels.reverse_reach``."""
    indptr, indices = graph.reverse
    return kernels.reverse_reach(indptr, indices, np.asarray(list(sources), dtype=np.int64))


def ancestors(graph: DependencyGraph, start: str) -> set[str]:
    """All packages with a dependency path to ``start``, excluding ``start``."""
    try:
        i = graph.index[start]
    except KeyError:
        raise KeyError(f"unknown package key {start!r}") from None
    _, mask = ancestor_indices(graph, [i])
    return {graph.nodes[j].id for j in np.flatnonzero(mask)}
