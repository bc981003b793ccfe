"""Command line front-end.

Exit codes: 0 success, 2 usage error, 3 input error, 4 rules-file error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from pathlib import Path

from . import __version__, kernels
from .analysis import (
    agpl_impact,
    agpl_incompatibilities,
    direct_incompatibilities,
    license_frequencies,
    pagerank,
    top_impact_violators,
)
from .graph import DEFAULT_KINDS, DuplicateNodeError, connectivity_counts
from .ingest import (
    ECOSYSTEMS,
    IngestConfig,
    InputFormatError,
    dependencies_path,
    ecosystem_tag,
    filter_dependencies,
    filter_packages,
    load_graph,
    packages_path,
)
from .licenses import RulesError, default_rules_path, load_matrix
from .report import (
    EcosystemStats,
    export_impact_dot,
    format_percent,
    frequency_chart_data,
    render_frequency_chart_data,
    render_stats_table,
    render_violations,
    text_table,
)

log = logging.getLogger("licensegraph")

EXIT_USAGE, EXIT_INPUT, EXIT_RULES = 2, 3, 4
WORKERS_ENV = "LICENSEGRAPH_WORKERS"


class CommandError(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise CommandError(EXIT_USAGE, f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Manifest:
    def __init__(self, command: str, config: dict) -> None:
        self.doc = {
            "tool": "licensegraph",
            "version": __version__,
            "kernels": kernels.BACKEND,
            "command": command,
            "config": config,
            "inputs": {},
            "counts": {},
            "seconds": {},
        }

    def digest(self, path: Path) -> None:
        self.doc["inputs"][str(path)] = sha256_file(path)

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        yield
        self.doc["seconds"][name] = round(time.perf_counter() - start, 6)

    def write(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def parse_ecosystems(value: str) -> list[str]:
    tags = []
    for name in value.split(","):
        if not name.strip():
            continue
        try:
            tag = ecosystem_tag(name)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
        if tag not in tags:
            tags.append(tag)
    if not tags:
        raise argparse.ArgumentTypeError(f"no ecosystem given; valid: {', '.join(sorted(ECOSYSTEMS))}")
    return tags


def parse_kinds(value: str) -> frozenset[str]:
    kinds = frozenset(k.strip().lower() for k in value.split(",") if k.strip())
    if not kinds:
        raise argparse.ArgumentTypeError("at least one dependency kind required")
    return kinds


# -- per-ecosystem jobs (module level so they pickle into worker processes) --

def _job(command: str, data_dir: str, eco: str, rules: str | None, opts: dict) -> dict:
    seconds: dict[str, float] = {}
    t = time.perf_counter()
    graph = load_graph(data_dir, eco, opts["kinds"])
    seconds["load"] = time.perf_counter() - t
    disconnected, connected = connectivity_counts(graph)
    result = {
        "ecosystem": ECOSYSTEMS[eco],
        "counts": {"packages": len(graph), "dependencies": graph.num_edges,
                   "dangling_links": graph.dangling},
        "seconds": seconds,
    }
    stats = dict(ecosystem=ECOSYSTEMS[eco], packages=len(graph), dependencies=graph.num_edges,
                 disconnected=disconnected, connected=connected)

    if command == "licenses":
        t = time.perf_counter()
        result["frequencies"] = license_frequencies(graph)
        seconds["analysis"] = time.perf_counter() - t
        return result

    matrix = load_matrix(rules)
    t = time.perf_counter()
    direct = direct_incompatibilities(graph, matrix)
    stats["incompatibilities"] = direct.count
    shown = direct
    if command in ("agpl", "impact", "stats"):
        shown = agpl_incompatibilities(graph, matrix, direct)
        stats["agpl_incompatibilities"] = shown.count
    if command in ("impact", "stats"):
        impact = agpl_impact(graph, matrix, shown)
        stats["affected"] = len(impact.affected)
        if command == "impact":
            ranks = {}
            scores = None
            if opts.get("pagerank", True):
                pr = pagerank(graph)
                scores, ranks = pr.scores, pr.ranks()
                result["counts"]["pagerank_iterations"] = pr.iterations
            result["top"] = [(k, graph.node(k).name, c, ranks.get(k))
                             for k, c in top_impact_violators(impact, opts["threshold"])]
            if opts.get("dot"):
                result["dot"] = export_impact_dot(graph, impact, opts["threshold"], scores)
    seconds["analysis"] = time.perf_counter() - t
    result["violations"] = shown.violations
    result["stats"] = EcosystemStats(**stats)
    result["counts"]["violations"] = shown.count
    return result


def _run_jobs(command: str, args, opts: dict) -> list[dict]:
    ecos = args.ecosystems
    for eco in ecos:
        for path in (packages_path(args.data, eco), dependencies_path(args.data, eco)):
            if not path.is_file():
                raise CommandError(EXIT_INPUT, f"missing intermediate file {path}; run 'filter' first")
    rules = str(args.rules) if getattr(args, "rules", None) else None
    if command != "licenses":
        try:
            load_matrix(rules)
        except RulesError as exc:
            raise CommandError(EXIT_RULES, f"rules file {rules or default_rules_path()}: {exc}") from None
        except OSError as exc:
            raise CommandError(EXIT_RULES, f"rules file {rules}: {exc.strerror or exc}") from None
    workers = min(worker_count(), len(ecos))
    calls = [(command, str(args.data), eco, rules, opts) for eco in ecos]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_job, *c) for c in calls]
            return [f.result() for f in futures]
    return [_job(*c) for c in calls]


# -- output --------------------------------------------------------------------

def _plural(n: int, one: str, many: str) -> str:
    return f"{n} {one if n == 1 else many}"


def _summary_line(command: str, res: dict) -> str:
    s: EcosystemStats = res["stats"]
    if command == "direct":
        return (f"{_plural(s.incompatibilities, 'incompatibility', 'incompatibilities')}, "
                f"{format_percent(s.incompatibility_share, 1)} of {s.dependencies} dependency links")
    if command == "agpl":
        return f"AGPL incompatibilities: {s.agpl_incompatibilities} ({format_percent(s.agpl_share, 2)})"
    return (f"affected: {s.affected} ({format_percent(s.affected_share, 1)}) of {s.packages} packages; "
            f"{_plural(len(res['top']), 'violator', 'violators')} above threshold")


def _record_dict(r) -> dict:
    return {"dependent": r.dependent, "dependency": r.dependency,
            "dependent_license": r.dependent_license.label,
            "dependency_license": r.dependency_license.label, "agpl_caused": r.agpl_caused}


def _stats_dict(s: EcosystemStats) -> dict:
    return json.loads(render_stats_table([s], "json"))[0]


def render_command(command: str, results: list[dict], args) -> str:
    fmt = args.format
    if command == "licenses":
        if fmt == "json":
            doc = {r["ecosystem"]: json.loads(render_frequency_chart_data(r["frequencies"], args.top, "json"))
                   for r in results}
            return json.dumps(doc, indent=2) + "\n"
        if fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf)
            writer.writerow(["ecosystem", "license", "count", "share"])
            for r in results:
                for label, count, share in frequency_chart_data(r["frequencies"], args.top):
                    writer.writerow([r["ecosystem"], label, count, float(share)])
            return buf.getvalue()
        parts = []
        for r in results:
            parts.append(f"== {r['ecosystem']} ({r['frequencies'].total} packages) ==\n")
            parts.append(render_frequency_chart_data(r["frequencies"], args.top, "text"))
        return "".join(parts)

    if command == "stats":
        return render_stats_table([r["stats"] for r in results], fmt)

    limit = args.limit
    if fmt == "json":
        doc = []
        for r in results:
            entry = {"ecosystem": r["ecosystem"], "summary": _stats_dict(r["stats"]),
                     "violations": [_record_dict(v) for v in r["violations"][:limit]]}
            if command == "impact":
                entry["top_violators"] = [{"package": k, "name": n, "affected": c, "pagerank_rank": rk}
                                          for k, n, c, rk in r["top"]]
            doc.append(entry)
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        if command == "impact":
            writer.writerow(["ecosystem", "package", "name", "affected", "pagerank_rank"])
            for r in results:
                writer.writerows([r["ecosystem"], k, n, c, "" if rk is None else rk] for k, n, c, rk in r["top"])
        else:
            writer.writerow(["ecosystem", "dependent", "dependency", "dependent_license",
                             "dependency_license", "agpl_caused"])
            for r in results:
                for v in r["violations"][:limit]:
                    d = _record_dict(v)
                    writer.writerow([r["ecosystem"], *d.values()])
        return buf.getvalue()

    parts = []
    for r in results:
        parts.append(f"== {r['ecosystem']} ==\n{_summary_line(command, r)}\n")
        if command == "impact":
            if r["top"]:
                parts.append("\n" + text_table(
                    ["package", "name", "affected", "pagerank_rank"],
                    [[k, n, str(c), "-" if rk is None else str(rk)] for k, n, c, rk in r["top"]],
                    align_left=2))
        else:
            table = render_violations(r["violations"], limit, "text")
            if table:
                parts.append("\n" + table)
        parts.append("\n" + render_stats_table([r["stats"]], "text") + "\n")
    return "".join(parts)


# -- commands ----------------------------------------------------------------------

def cmd_filter(args) -> int:
    config = IngestConfig(ecosystems=frozenset(args.ecosystems), kept_kinds=args.kinds,
                          projects=args.projects, dependencies=args.deps, out_dir=args.out)
    manifest = Manifest("filter", {"ecosystems": sorted(config.ecosystems), "kinds": sorted(config.kept_kinds),
                                   "projects": str(args.projects), "deps": str(args.deps), "out": str(args.out)})
    for path in (args.projects, args.deps):
        if not path.is_file():
            raise CommandError(EXIT_INPUT, f"input file not found: {path}")
    with manifest.stage("digest"):
        manifest.digest(args.projects)
        manifest.digest(args.deps)
    with manifest.stage("packages"):
        pkg = filter_packages(args.projects, config)
    with manifest.stage("dependencies"):
        dep = filter_dependencies(args.deps, config)
    manifest.doc["counts"] = {"packages": pkg.as_dict(), "dependencies": dep.as_dict()}
    rows = [[ECOSYSTEMS[e], str(pkg.emitted[e]), str(dep.emitted[e])] for e in sorted(config.ecosystems)]
    sys.stdout.write(text_table(["ecosystem", "packages", "dependency_rows"], rows))
    sys.stdout.write(f"projects: {pkg.rows_in} rows, {pkg.dropped} dropped, {pkg.malformed} malformed\n")
    sys.stdout.write(f"dependencies: {dep.rows_in} rows, {dep.dropped} dropped, {dep.malformed} malformed\n")
    manifest.write(args.manifest or Path(args.out) / "manifest-filter.json")
    return 0


def cmd_analysis(args) -> int:
    command = args.command
    opts = {"kinds": sorted(args.kinds), "threshold": getattr(args, "threshold", 1000),
            "dot": bool(getattr(args, "dot", None)), "pagerank": not getattr(args, "no_pagerank", False)}
    config = {"data": str(args.data), "ecosystems": args.ecosystems, "format": args.format, **opts}
    if command != "licenses":
        config["rules"] = str(args.rules or default_rules_path())
    manifest = Manifest(command, config)
    with manifest.stage("digest"):
        for eco in args.ecosystems:
            for path in (packages_path(args.data, eco), dependencies_path(args.data, eco)):
                if path.is_file():
                    manifest.digest(path)
        if command != "licenses" and Path(config["rules"]).is_file():
            manifest.digest(Path(config["rules"]))
    with manifest.stage("analysis"):
        results = _run_jobs(command, args, opts)
    for r in results:
        manifest.doc["counts"][r["ecosystem"]] = r["counts"]
        manifest.doc["seconds"][r["ecosystem"]] = {k: round(v, 6) for k, v in r["seconds"].items()}
    sys.stdout.write(render_command(command, results, args))
    if command == "impact" and args.dot:
        args.dot.write_text("".join(r["dot"] for r in results), encoding="utf-8")
    manifest.write(args.manifest or Path(args.data) / f"manifest-{command}.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="licensegraph",
        description="License incompatibility audits over package-registry dependency networks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    all_ecos = ",".join(sorted(ECOSYSTEMS))
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ecosystems", type=parse_ecosystems, default=parse_ecosystems(all_ecos),
                        help=f"comma separated subset of {all_ecos} (default: all)")
    common.add_argument("--kinds", type=parse_kinds, default=DEFAULT_KINDS,
                        help="dependency kinds to keep (default: runtime,compile)")
    common.add_argument("--manifest", type=Path, help="where to write the run manifest")

    p = sub.add_parser("filter", parents=[common], help="extract per-ecosystem packages and dependencies")
    p.add_argument("--projects", type=Path, required=True, help="Libraries.io projects CSV")
    p.add_argument("--deps", type=Path, required=True, help="Libraries.io dependencies CSV")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.set_defaults(func=cmd_filter)

    reporting = argparse.ArgumentParser(add_help=False, parents=[common])
    reporting.add_argument("--data", type=Path, required=True, help="directory written by 'filter'")
    reporting.add_argument("--format", choices=("text", "csv", "json"), default="text")

    p = sub.add_parser("licenses", parents=[reporting], help="license frequencies per ecosystem")
    p.add_argument("--top", type=int, default=7, help="number of licenses listed before 'other'")
    p.set_defaults(func=cmd_analysis)

    rules = argparse.ArgumentParser(add_help=False, parents=[reporting])
    rules.add_argument("--rules", type=Path, help="incompatibility rules file (default: bundled)")
    rules.add_argument("--limit", type=int, default=None, help="show at most this many violations")

    p = sub.add_parser("direct", parents=[rules], help="direct license incompatibilities")
    p.set_defaults(func=cmd_analysis)
    p = sub.add_parser("agpl", parents=[rules], help="direct incompatibilities caused by AGPL dependencies")
    p.set_defaults(func=cmd_analysis)
    p = sub.add_parser("impact", parents=[rules], help="packages transitively affected by AGPL violations")
    p.add_argument("--threshold", type=int, default=1000,
                   help="list violators affecting more than this many packages (default: 1000)")
    p.add_argument("--dot", type=Path, help="write a DOT graph of the listed violators")
    p.add_argument("--no-pagerank", action="store_true", help="skip the PageRank ranking")
    p.set_defaults(func=cmd_analysis)
    p = sub.add_parser("stats", parents=[rules], help="summary table of all counts per ecosystem")
    p.set_defaults(func=cmd_analysis)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "top", 1) < 1:
        parser.error("--top must be at least 1")
    if getattr(args, "threshold", 0) < 0:
        parser.error("--threshold must be non-negative")
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"licensegraph: error: {exc}", file=sys.stderr)
        return exc.code
    except (InputFormatError, DuplicateNodeError) as exc:
        print(f"licensegraph: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
