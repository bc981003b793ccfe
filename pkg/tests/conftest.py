import csv
from pathlib import Path

import pytest

from licensegraph import PackageNode, build_graph, load_matrix, parse_license_field

# Example network: every package MIT except i (AGPL-3.0); a, b, c, d reach e,
# e depends on i, f and g hang off a and d without reaching e.
FIG4_LICENSES = {**{k: "MIT" for k in "abcdefg"}, "i": "AGPL-3.0"}
FIG4_EDGES = [
    ("a", "b"), ("b", "e"), ("c", "e"), ("d", "c"),
    ("e", "i"), ("a", "f"), ("f", "g"), ("d", "g"),
]


def fig4_graph(ecosystem="Cargo"):
    nodes = [PackageNode(k, k, ecosystem, parse_license_field(v)) for k, v in FIG4_LICENSES.items()]
    return build_graph(nodes, FIG4_EDGES)


def write_intermediates(directory: Path, eco: str, licenses: dict, edges: list, kind="runtime"):
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / f"packages-{eco}.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "name", "license"])
        w.writerows([k, k, v] for k, v in licenses.items())
    with open(directory / f"dependencies-{eco}.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["dependent_id", "dependency_id", "kind"])
        w.writerows([u, v, kind] for u, v in edges)
    return directory


@pytest.fixture
def fig4():
    return fig4_graph()


@pytest.fixture(scope="session")
def matrix():
    return load_matrix()


@pytest.fixture
def fig4_data(tmp_path):
    return write_intermediates(tmp_path / "data", "cargo", FIG4_LICENSES, FIG4_EDGES)


@pytest.fixture(autouse=True)
def _single_worker(monkeypatch):
    monkeypatch.setenv("LICENSEGRAPH_WORKERS", "1")


ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        doc = report.nodeid.rsplit("::", 1)[-1]
        ACCEPTANCE_RESULTS.append((doc, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for name, outcome in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(f"{outcome}  {name}")
