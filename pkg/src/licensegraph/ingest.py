"""Stream Libraries.io dumps into compact per-ecosystem CSV files.

Reads the projects and dependencies tables row by row and writes
``packages-<eco>.csv`` (``id,name,license``) and
``dependencies-<eco>.csv`` (``dependent_id,dependency_id,kind``).
"""

from __future__ import annotations

import csv
import logging
import sys
from contextlib import ExitStack
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .graph import (
    DEFAULT_KINDS,
    DependencyGraph,
    PackageNode,
    VersionEdge,
    build_graph,
    filter_edges_by_kind,
    normalize_kind,
    reduce_multigraph,
)
from .licenses import parse_license_field

log = logging.getLogger(__name__)

csv.field_size_limit(min(sys.maxsize, 2**31 - 1))

ECOSYSTEMS = {
    "cargo": "Cargo",
    "maven": "Maven",
    "npm": "NPM",
    "nuget": "NuGet",
    "packagist": "Packagist",
    "pypi": "Pypi",
    "rubygems": "Rubygems",
}

PROJECT_COLUMNS = {
    "platform": ("platform",),
    "id": ("id", "project_id"),
    "name": ("name", "project_name"),
    "license": ("licenses", "license"),
}
DEPENDENCY_COLUMNS = {
    "platform": ("platform", "project_platform"),
    "dependent_id": ("project_id", "dependent_id"),
    "dependency_id": ("dependency_project_id", "dependency_id"),
    "kind": ("dependency_kind", "kind"),
}

PACKAGES_HEADER = ("id", "name", "license")
DEPENDENCIES_HEADER = ("dependent_id", "dependency_id", "kind")


class InputFormatError(ValueError):
    """Input table unusable: missing columns, bad encoding, unreadable file."""


def ecosystem_tag(name: str) -> str:
    """Lower-case file tag for an ecosystem name; raises on unknown names."""
    tag = name.strip().lower()
    if tag not in ECOSYSTEMS:
        raise ValueError(
            f"unknown ecosystem {name!r}; valid: {', '.join(sorted(ECOSYSTEMS))}"
        )
    return tag


@dataclass
class IngestConfig:
    ecosystems: frozenset[str] = frozenset(ECOSYSTEMS)
    kept_kinds: frozenset[str] = DEFAULT_KINDS
    projects: Path | None = None
    dependencies: Path | None = None
    out_dir: Path = Path(".")

    def __post_init__(self) -> None:
        self.ecosystems = frozenset(ecosystem_tag(e) for e in self.ecosystems)
        self.kept_kinds = frozenset(normalize_kind(k) for k in self.kept_kinds)
        if not self.ecosystems:
            raise ValueError("no ecosystem selected")
        if not self.kept_kinds:
            raise ValueError("no dependency kind kept")
        self.out_dir = Path(self.out_dir)


@dataclass
class FilterCounts:
    rows_in: int = 0
    dropped: int = 0
    malformed: int = 0
    emitted: dict[str, int] = field(default_factory=dict)

    @property
    def rows_emitted(self) -> int:
        return sum(self.emitted.values())

    def as_dict(self) -> dict:
        return {
            "rows_in": self.rows_in,
            "rows_emitted": self.rows_emitted,
            "rows_dropped": self.dropped,
            "rows_malformed": self.malformed,
            "emitted": dict(sorted(self.emitted.items())),
        }


def _column_positions(header: list[str], wanted: dict[str, tuple[str, ...]], source: str) -> dict[str, int]:
    normalized = [h.strip().lower().replace(" ", "_").replace("-", "_") for h in header]
    positions = {}
    for key, aliases in wanted.items():
        for alias in aliases:
            if alias in normalized:
                positions[key] = normalized.index(alias)
                break
        else:
            raise InputFormatError(f"{source}: missing required column {key!r} (tried {', '.join(aliases)})")
    return positions


def _rows(path: Path, wanted: dict[str, tuple[str, ...]]) -> Iterator[tuple[int, dict[str, int], list[str]]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise InputFormatError(f"{path}: empty file, header row required") from None
            pos = _column_positions(header, wanted, str(path))
            width = len(header)
            for row in reader:
                yield width, pos, row
    except (UnicodeDecodeError, csv.Error) as exc:
        raise InputFormatError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise InputFormatError(f"{path}: {exc.strerror or exc}") from exc


def _filter(
    path: Path,
    wanted: dict[str, tuple[str, ...]],
    config: IngestConfig,
    prefix: str,
    header: tuple[str, ...],
    extract,
) -> FilterCounts:
    counts = FilterCounts(emitted={eco: 0 for eco in sorted(config.ecosystems)})
    config.out_dir.mkdir(parents=True, exist_ok=True)
    with ExitStack() as stack:
        writers = {}
        for eco in sorted(config.ecosystems):
            fh = stack.enter_context(
                open(config.out_dir / f"{prefix}-{eco}.csv", "w", newline="", encoding="utf-8")
            )
            writers[eco] = csv.writer(fh)
            writers[eco].writerow(header)
        for width, pos, row in _rows(path, wanted):
            counts.rows_in += 1
            if len(row) != width:
                counts.malformed += 1
                continue
            eco = row[pos["platform"]].strip().lower()
            if eco not in writers:
                counts.dropped += 1
                continue
            out = extract(row, pos)
            if out is None:
                counts.malformed += 1
            elif out is False:
                counts.dropped += 1
            else:
                writers[eco].writerow(out)
                counts.emitted[eco] += 1
    log.info("%s: %d rows in, %d emitted, %d dropped, %d malformed",
             path, counts.rows_in, counts.rows_emitted, counts.dropped, counts.malformed)
    return counts


def filter_packages(projects: Path | str, config: IngestConfig) -> FilterCounts:
    def extract(row, pos):
        pid = row[pos["id"]].strip()
        if not pid:
            return None
        return pid, row[pos["name"]], row[pos["license"]].strip()

    return _filter(Path(projects), PROJECT_COLUMNS, config, "packages", PACKAGES_HEADER, extract)


def filter_dependencies(dependencies: Path | str, config: IngestConfig) -> FilterCounts:
    kept = config.kept_kinds

    def extract(row, pos):
        kind = normalize_kind(row[pos["kind"]])
        if kind not in kept:
            return False
        dependent = row[pos["dependent_id"]].strip()
        dependency = row[pos["dependency_id"]].strip()
        if not dependent or not dependency:
            return None
        return dependent, dependency, kind

    return _filter(
        Path(dependencies), DEPENDENCY_COLUMNS, config, "dependencies", DEPENDENCIES_HEADER, extract
    )


def packages_path(data_dir: Path | str, ecosystem: str) -> Path:
    return Path(data_dir) / f"packages-{ecosystem_tag(ecosystem)}.csv"


def dependencies_path(data_dir: Path | str, ecosystem: str) -> Path:
    return Path(data_dir) / f"dependencies-{ecosystem_tag(ecosystem)}.csv"


def read_packages(path: Path | str, ecosystem: str = "") -> Iterator[PackageNode]:
    wanted = {k: (k,) for k in PACKAGES_HEADER}
    for width, pos, row in _rows(Path(path), wanted):
        if len(row) != width:
            raise InputFormatError(f"{path}: row with {len(row)} fields, expected {width}")
        yield PackageNode(row[pos["id"]], row[pos["name"]], ecosystem,
                          parse_license_field(row[pos["license"]]))


def read_version_edges(path: Path | str) -> Iterator[VersionEdge]:
    wanted = {k: (k,) for k in DEPENDENCIES_HEADER}
    for width, pos, row in _rows(Path(path), wanted):
        if len(row) != width:
            raise InputFormatError(f"{path}: row with {len(row)} fields, expected {width}")
        yield VersionEdge(row[pos["dependent_id"]], row[pos["dependency_id"]], row[pos["kind"]])


def load_graph(
    data_dir: Path | str, ecosystem: str, kinds: Iterable[str] = DEFAULT_KINDS
) -> DependencyGraph:
    """Build the logical dependency network of one ecosystem from filtered files."""
    tag = ecosystem_tag(ecosystem)
    nodes = read_packages(packages_path(data_dir, tag), ECOSYSTEMS[tag])
    edges = reduce_multigraph(filter_edges_by_kind(read_version_edges(dependencies_path(data_dir, tag)), kinds))
    graph = build_graph(nodes, edges)
    if graph.dangling:
        log.warning("%s: %d dependency links reference unknown packages and were skipped",
                    ECOSYSTEMS[tag], graph.dangling)
    return graph
