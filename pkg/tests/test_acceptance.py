"""Exit criteria. Each test is one criterion; the run summary prints PASS/FAIL per test."""

import random
import subprocess
import sys
import textwrap
import time
from fractions import Fraction
from itertools import product

import pytest

from licensegraph.analysis import (
    agpl_impact,
    agpl_incompatibilities,
    direct_incompatibilities,
    license_frequencies,
    pagerank,
)
from licensegraph.cli import main
from licensegraph.graph import PackageNode, VersionEdge, build_graph, filter_edges_by_kind, reduce_multigraph
from licensegraph.licenses import CompatibilityMatrix, LicenseExpr, is_expr_incompatible
from licensegraph.report import EcosystemStats, render_stats_table

from conftest import fig4_graph
from oracles import expr_incompatible, scan_violations, strict_ancestors, transitive_closure
from strategies import KINDS, LICENSE_POOL

SEED = 20211018


def test_c1_fig4_golden(matrix, fig4_data, capsys):
    start = time.perf_counter()
    g = fig4_graph()
    freq = license_frequencies(g)
    assert (freq.share("MIT"), freq.share("AGPL-3.0")) == (Fraction(7, 8), Fraction(1, 8))
    direct = direct_incompatibilities(g, matrix)
    assert (direct.count, direct.ratio) == (1, Fraction(1, 8))
    agpl = agpl_incompatibilities(g, matrix)
    assert (agpl.count, agpl.ratio) == (1, Fraction(1, 8))
    impact = agpl_impact(g, matrix)
    assert impact.affected == {"a", "b", "c", "d"} and impact.share == Fraction(1, 2)

    base = ["--data", str(fig4_data), "--ecosystems", "cargo"]
    expected = {
        "licenses": ["87.5%", "12.5%"],
        "direct": ["1 incompatibility, 12.5%"],
        "agpl": ["AGPL incompatibilities: 1 (12.50%)"],
        "impact": ["affected: 4 (50.0%)"],
    }
    for command, needles in expected.items():
        assert main([command, *base]) == 0
        out = capsys.readouterr().out
        for needle in needles:
            assert needle in out, (command, needle)
    assert time.perf_counter() - start < 1.0


def test_c2_table_ratio_arithmetic():
    # absolute counts from the published Table 1 and Table 2
    rows = [
        EcosystemStats("Cargo", 35635, 19968, 5918, 29717, 453, 0, 0),
        EcosystemStats("Maven", 184871, 426804, 101788, 83083, 39002, 148, 12236),
        EcosystemStats("NPM", 1275011, 4927446, 912541, 362470, 257593, 777, 30377),
        EcosystemStats("PyPI", 231690, 152779, 49197, 182493, 31816, 67, 109),
    ]
    text = render_stats_table(rows, "text")
    lines = {line.split()[0]: line.split() for line in text.splitlines()[2:]}
    assert lines["Cargo"][6] == "2.3%"
    assert lines["Maven"][6] == "9.1%"
    assert lines["PyPI"][6] == "20.8%"
    assert lines["Maven"][8] == "0.03%"
    assert lines["Maven"][10] == "6.62%"
    assert lines["NPM"][10] == "2.38%"


def _random_instance(rng):
    n = rng.randint(1, 50)
    edges = [(rng.randrange(n), rng.randrange(n), rng.choice(KINDS)) for _ in range(rng.randint(0, 200))]
    licenses = [rng.sample(LICENSE_POOL, rng.choice([0, 1, 1, 1, 2, 3])) for _ in range(n)]
    facts = frozenset(rng.sample(list(product(LICENSE_POOL, LICENSE_POOL)), 20))
    return n, edges, licenses, facts


def test_c3_oracle_equivalence():
    rng = random.Random(SEED)
    mismatches = 0
    for _ in range(200):
        n, edges, licenses, facts = _random_instance(rng)
        matrix = CompatibilityMatrix(facts)
        g = build_graph(
            [PackageNode(str(i), str(i), "T", LicenseExpr(tuple(l))) for i, l in enumerate(licenses)],
            reduce_multigraph(filter_edges_by_kind(VersionEdge(str(u), str(v), k) for u, v, k in edges)),
        )
        kept = [(u, v) for u, v, k in edges if k in ("runtime", "compile")]
        expected = scan_violations(dict(enumerate(licenses)), kept, facts)
        got = {(int(r.dependent), int(r.dependency)) for r in direct_incompatibilities(g, matrix).violations}
        reach = transitive_closure(n, kept)
        violators = {u for u, v in expected if any(x.startswith("AGPL-") for x in licenses[v])}
        want_affected = set().union(*(strict_ancestors(reach, v) for v in violators)) if violators else set()
        got_affected = {int(k) for k in agpl_impact(g, matrix).affected}
        mismatches += (got != expected) + (got_affected != want_affected)
    assert mismatches == 0


def test_c4_disjunction_semantics():
    rng = random.Random(SEED + 4)
    violations = 0
    pairs = list(product(LICENSE_POOL, LICENSE_POOL))
    for _ in range(1000):
        facts = frozenset(rng.sample(pairs, rng.randint(0, len(pairs))))
        m = CompatibilityMatrix(facts)
        dep = rng.sample(LICENSE_POOL, rng.randint(0, 4))
        dent = rng.sample(LICENSE_POOL, rng.randint(0, 4))
        got = is_expr_incompatible(m, LicenseExpr(tuple(dep)), LicenseExpr(tuple(dent)))
        violations += got != expr_incompatible(facts, dep, dent)
        extra = rng.choice(LICENSE_POOL)
        if not got and dep and extra not in dep:
            violations += is_expr_incompatible(m, LicenseExpr((*dep, extra)), LicenseExpr(tuple(dent)))
        if not got and dent and extra not in dent:
            violations += is_expr_incompatible(m, LicenseExpr(tuple(dep)), LicenseExpr((*dent, extra)))
    assert violations == 0


def test_c5_multigraph_reduction():
    rng = random.Random(SEED + 5)
    for _ in range(1000):
        stream = [VersionEdge(str(rng.randrange(12)), str(rng.randrange(12)), rng.choice(KINDS))
                  for _ in range(rng.randint(0, 80))]
        once = reduce_multigraph(stream)
        assert reduce_multigraph(VersionEdge(*e) for e in once) == once
        assert len(once) <= len(stream)
        assert once == {(e.dependent, e.dependency) for e in stream}
    kinds = [VersionEdge("a", "b", "runtime"), VersionEdge("a", "b", "compile"), VersionEdge("a", "b", "runtime")]
    assert reduce_multigraph(filter_edges_by_kind(kinds)) == {("a", "b")}


def test_c6_pagerank():
    rng = random.Random(SEED + 6)
    for _ in range(100):
        n = rng.randint(1, 60)
        edges = [(str(rng.randrange(n)), str(rng.randrange(n))) for _ in range(rng.randint(0, 3 * n))]
        g = build_graph([PackageNode(str(i), str(i)) for i in range(n)], edges)
        assert abs(sum(pagerank(g).scores.values()) - 1.0) <= 1e-9
    d = 0.85
    two = pagerank(build_graph([PackageNode("a", "a"), PackageNode("b", "b")], [("a", "b")]), damping=d)
    assert abs(two.scores["a"] - 1 / (2 + d)) <= 1e-9
    assert abs(two.scores["b"] - (1 + d) / (2 + d)) <= 1e-9
    cyc = pagerank(build_graph([PackageNode("a", "a"), PackageNode("b", "b")], [("a", "b"), ("b", "a")]))
    assert abs(cyc.scores["a"] - 0.5) <= 1e-9 and abs(cyc.scores["b"] - 0.5) <= 1e-9


SCALE_SCRIPT = textwrap.dedent(
    """
    import json, resource, sys, time
    from licensegraph.ingest import IngestConfig, filter_dependencies
    start = time.perf_counter()
    counts = filter_dependencies(sys.argv[1], IngestConfig(out_dir=sys.argv[2]))
    elapsed = time.perf_counter() - start
    peak_kb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    print(json.dumps({"seconds": elapsed, "peak_mb": peak_kb / 1024, "rows": counts.rows_in,
                      "emitted": counts.rows_emitted}))
    """
)


def test_c7_ingest_scale(tmp_path):
    src = tmp_path / "dependencies.csv"
    platforms = ["Cargo", "Maven", "NPM", "NuGet", "Packagist", "Pypi", "Rubygems", "CRAN"]
    kinds = ["runtime", "compile", "test", "Development", ""]
    rng = random.Random(SEED + 7)
    with open(src, "w", encoding="utf-8", newline="") as fh:
        fh.write("ID,Platform,Project Name,Project ID,Version Number,Dependency Name,"
                 "Dependency Kind,Dependency Project ID\n")
        for i in range(1_000_000):
            fh.write(f"{i},{platforms[i % 8]},pkg{i % 5000},{rng.randrange(10**6)},1.0.{i % 7},"
                     f"dep{i % 777},{kinds[i % 5]},{rng.randrange(10**6)}\n")
    out = subprocess.run([sys.executable, "-c", SCALE_SCRIPT, str(src), str(tmp_path / "out")],
                         capture_output=True, text=True, check=True)
    import json

    result = json.loads(out.stdout)
    print(f"ingest scale: {result}")
    assert result["rows"] == 1_000_000
    assert result["seconds"] <= 60
    assert result["peak_mb"] <= 512


def test_c8_determinism(tmp_path, fig4_data, capsys):
    (tmp_path / "p.csv").write_text(
        "ID,Platform,Name,Licenses\n" + "".join(f"{i},Cargo,p{i},{lic}\n" for i, lic in
                                                 enumerate(["MIT", "AGPL-3.0", "GPL-2.0", "MIT,Apache-2.0", ""])),
        encoding="utf-8")
    (tmp_path / "d.csv").write_text(
        "ID,Platform,Project ID,Dependency Kind,Dependency Project ID\n"
        "1,Cargo,0,runtime,1\n2,Cargo,3,runtime,2\n3,Cargo,4,runtime,0\n4,Cargo,2,compile,1\n",
        encoding="utf-8")
    runs = []
    for attempt in range(2):
        outputs = []
        out_dir = tmp_path / f"run{attempt}"
        main(["filter", "--ecosystems", "cargo", "--projects", str(tmp_path / "p.csv"),
              "--deps", str(tmp_path / "d.csv"), "--out", str(out_dir)])
        outputs.append(capsys.readouterr().out)
        outputs += [(out_dir / name).read_bytes() for name in ("packages-cargo.csv", "dependencies-cargo.csv")]
        for data in (fig4_data, out_dir):
            for command in ("licenses", "direct", "agpl", "impact", "stats"):
                for fmt in ("text", "csv", "json"):
                    argv = [command, "--data", str(data), "--ecosystems", "cargo", "--format", fmt]
                    if command == "impact":
                        argv += ["--threshold", "0", "--dot", str(tmp_path / f"{attempt}.dot")]
                    assert main(argv) == 0
                    outputs.append(capsys.readouterr().out)
                    if command == "impact":
                        outputs.append((tmp_path / f"{attempt}.dot").read_bytes())
        runs.append(outputs)
    assert runs[0] == runs[1]
