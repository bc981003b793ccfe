"""Text, CSV, JSON and DOT renderings of analysis results."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .analysis import FrequencyTable, ImpactResult, top_impact_violators
from .graph import DependencyGraph

FORMATS = ("text", "csv", "json")
OTHER_LABEL = "other"


def _ratio(num: int | None, den: int | None) -> Fraction | None:
    if num is None or den is None:
        return None
    return Fraction(num, den) if den else Fraction(0)


@dataclass(frozen=True)
class EcosystemStats:
    """One row of the per-ecosystem summary; ``None`` marks a figure not computed."""

    ecosystem: str
    packages: int
    dependencies: int
    disconnected: int | None = None
    connected: int | None = None
    incompatibilities: int | None = None
    agpl_incompatibilities: int | None = None
    affected: int | None = None

    @property
    def incompatibility_share(self) -> Fraction | None:
        return _ratio(self.incompatibilities, self.dependencies)

    @property
    def agpl_share(self) -> Fraction | None:
        return _ratio(self.agpl_incompatibilities, self.dependencies)

    @property
    def affected_share(self) -> Fraction | None:
        return _ratio(self.affected, self.packages)


# (field, header, share digits) in output order; digits None = absolute count
COLUMNS = (
    ("ecosystem", "Ecosystem", None),
    ("packages", "Packages", None),
    ("dependencies", "Dependencies", None),
    ("disconnected", "Disconnected", None),
    ("connected", "Connected", None),
    ("incompatibilities", "Incompatibilities", None),
    ("incompatibility_share", "Incompatibilities%", 1),
    ("agpl_incompatibilities", "Incompatibilities_AGPL", None),
    ("agpl_share", "Incompatibilities_AGPL%", 2),
    ("affected", "Affected", None),
    ("affected_share", "Affected%", 2),
)
_COUNT_FIELDS = tuple(f.name for f in fields(EcosystemStats))


def format_percent(share: Fraction | float, digits: int) -> str:
    """Percentage rounded half-up at ``digits`` decimals, computed exactly."""
    scaled = Fraction(share) * 100 * 10**digits
    q = (scaled.numerator * 2 + scaled.denominator) // (scaled.denominator * 2)
    sign = "-" if q < 0 else ""
    q = abs(q)
    whole, frac = divmod(q, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}%" if digits else f"{sign}{whole}%"


def _cell(stats: EcosystemStats, name: str, digits: int | None) -> str:
    value = getattr(stats, name)
    if value is None:
        return "-"
    if digits is not None:
        return format_percent(value, digits)
    return str(value)


def _active_columns(rows: Sequence[EcosystemStats]):
    return [c for c in COLUMNS if any(getattr(r, c[0]) is not None for r in rows)] or list(COLUMNS[:3])


def text_table(header: Sequence[str], body: Sequence[Sequence[str]], align_left: int = 1) -> str:
    widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h) for i, h in enumerate(header)]

    def line(cells):
        out = [c.ljust(w) if i < align_left else c.rjust(w) for i, (c, w) in enumerate(zip(cells, widths))]
        return "  ".join(out).rstrip()

    rule = "  ".join("-" * w for w in widths)
    return "\n".join([line(header), rule, *(line(r) for r in body)]) + "\n"


def _json_value(stats: EcosystemStats, name: str):
    value = getattr(stats, name)
    return float(value) if isinstance(value, Fraction) else value


def render_stats_table(rows: Sequence[EcosystemStats], format: str = "text") -> str:
    """Per-ecosystem summary. Direct shares print at 1 decimal, AGPL and affected shares at 2."""
    if format == "text":
        cols = _active_columns(rows)
        body = [[_cell(r, name, digits) for name, _, digits in cols] for r in rows]
        return text_table([h for _, h, _ in cols], body)
    if format == "json":
        doc = [{name: _json_value(r, name) for name, _, _ in COLUMNS} for r in rows]
        return json.dumps(doc, indent=2) + "\n"
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow([name for name, _, _ in COLUMNS])
        for r in rows:
            writer.writerow(["" if (v := _json_value(r, name)) is None else v for name, _, _ in COLUMNS])
        return buf.getvalue()
    raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")


def _stats_from_mapping(obj: Mapping) -> EcosystemStats:
    kwargs = {}
    for name in _COUNT_FIELDS:
        value = obj.get(name)
        if name == "ecosystem":
            kwargs[name] = str(value)
        else:
            kwargs[name] = None if value in (None, "") else int(value)
    return EcosystemStats(**kwargs)


def parse_stats_json(document: str) -> list[EcosystemStats]:
    return [_stats_from_mapping(obj) for obj in json.loads(document)]


def parse_stats_csv(document: str) -> list[EcosystemStats]:
    return [_stats_from_mapping(row) for row in csv.DictReader(io.StringIO(document))]


def frequency_chart_data(table: FrequencyTable, top_n: int = 7) -> list[tuple[str, int, Fraction]]:
    """Top ``top_n`` labels by count (ties by label) plus an aggregated other bucket."""
    if top_n < 1:
        raise ValueError("top_n must be at least 1")
    if not table.counts:
        return []
    ranked = table.ranked()
    rows = [(label, count, table.share(label)) for label, count in ranked[:top_n]]
    rest = sum(count for _, count in ranked[top_n:])
    rows.append((OTHER_LABEL, rest, Fraction(rest, table.total) if table.total else Fraction(0)))
    return rows


def render_frequency_chart_data(table: FrequencyTable, top_n: int = 7, format: str = "text") -> str:
    rows = frequency_chart_data(table, top_n)
    if format == "text":
        if not rows:
            return ""
        return text_table(["License", "Packages", "Share"],
                          [[label, str(count), format_percent(share, 1)] for label, count, share in rows])
    if format == "json":
        doc = [{"license": label, "count": count, "share": float(share)} for label, count, share in rows]
        return json.dumps(doc, indent=2) + "\n"
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["license", "count", "share"])
        writer.writerows([label, count, float(share)] for label, count, share in rows)
        return buf.getvalue()
    raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")


def _dot_id(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_impact_dot(
    graph: DependencyGraph,
    impact: ImpactResult,
    threshold: int = 1000,
    pagerank: Mapping[str, float] | None = None,
) -> str:
    """Node-link view of violators above ``threshold`` and their AGPL dependencies.

    With ``pagerank`` given, node widths scale linearly with the score
    (largest score = width 3).
    """
    major = {key for key, _ in top_impact_violators(impact, threshold)}
    edges = sorted({(r.dependent, r.dependency) for r in impact.violations if r.dependent in major})
    keys = sorted({k for e in edges for k in e} | major)
    top = max((pagerank.get(k, 0.0) for k in keys), default=0.0) if pagerank else 0.0

    lines = ["digraph impact {"]
    for key in keys:
        node = graph.node(key)
        attrs = [f"label={_dot_id(node.name)}", f"license={_dot_id(node.license.label)}"]
        if key in major:
            attrs += ['role="violator"', f"affected={impact.per_violator[key]}"]
        else:
            attrs.append('role="agpl"')
        if pagerank:
            score = pagerank.get(key, 0.0)
            width = 3.0 * score / top if top > 0 else 0.0
            attrs.append(f'width="{width:.4f}"')
            attrs.append(f'pagerank="{score:.6g}"')
        lines.append(f"  {_dot_id(key)} [{', '.join(attrs)}];")
    for u, v in edges:
        lines.append(f"  {_dot_id(u)} -> {_dot_id(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_violations(records: Iterable, limit: int | None = None, format: str = "text") -> str:
    records = list(records)
    shown = records if limit is None else records[:limit]
    rows = [[r.dependent, r.dependency, r.dependent_license.label, r.dependency_license.label,
             "yes" if r.agpl_caused else "no"] for r in shown]
    header = ["dependent", "dependency", "dependent_license", "dependency_license", "agpl_caused"]
    if format == "text":
        if not rows:
            return ""
        out = text_table(header, rows, align_left=len(header))
        if len(shown) < len(records):
            out += f"... {len(records) - len(shown)} more\n"
        return out
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    if format == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
