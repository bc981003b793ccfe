import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from licensegraph.analysis import FrequencyTable, agpl_impact, license_frequencies, pagerank
from licensegraph.report import (
    EcosystemStats,
    export_impact_dot,
    format_percent,
    frequency_chart_data,
    parse_stats_csv,
    parse_stats_json,
    render_frequency_chart_data,
    render_stats_table,
)

GOLDEN = Path(__file__).parent / "golden"


@pytest.mark.parametrize(
    "num, den, digits, text",
    [
        (39002, 426804, 1, "9.1%"),
        (31816, 152779, 1, "20.8%"),
        (453, 19968, 1, "2.3%"),
        (148, 426804, 2, "0.03%"),
        (12236, 184871, 2, "6.62%"),
        (1, 8, 1, "12.5%"),
        (1, 2, 2, "50.00%"),
        (0, 1, 1, "0.0%"),
        (1, 400, 1, "0.3%"),  # 0.25 rounds half up
        (1, 3, 0, "33%"),
    ],
)
def test_format_percent(num, den, digits, text):
    assert format_percent(Fraction(num, den), digits) == text


def test_stats_table_precision():
    rows = [
        EcosystemStats("Maven", 184871, 426804, 101788, 83083, 39002, 148, 12236),
        EcosystemStats("PyPI", 231690, 152779, 49197, 182493, 31816, 67, 109),
    ]
    text = render_stats_table(rows, "text")
    for expected in ("9.1%", "20.8%", "0.03%", "6.62%", "0.04%", "0.05%"):
        assert expected in text
    assert "426804" in text and "184871" in text


def test_zero_dependencies():
    row = EcosystemStats("Empty", 3, 0, 3, 0, 0, 0, 0)
    assert row.incompatibility_share == 0
    assert "0.0%" in render_stats_table([row], "text")


def test_partial_rows_hide_uncomputed_columns():
    text = render_stats_table([EcosystemStats("X", 8, 8, 0, 8, 1)], "text")
    assert "12.5%" in text and "Affected" not in text


stats_rows = st.builds(
    EcosystemStats,
    ecosystem=st.sampled_from(["Cargo", "Maven", "NPM", "a,b \"q\""]),
    packages=st.integers(0, 10**7),
    dependencies=st.integers(0, 10**7),
    disconnected=st.none() | st.integers(0, 10**6),
    connected=st.none() | st.integers(0, 10**6),
    incompatibilities=st.none() | st.integers(0, 10**6),
    agpl_incompatibilities=st.none() | st.integers(0, 10**6),
    affected=st.none() | st.integers(0, 10**6),
)


@given(st.lists(stats_rows, max_size=8))
def test_json_and_csv_round_trip(rows):
    for fmt, parse in (("json", parse_stats_json), ("csv", parse_stats_csv)):
        back = parse(render_stats_table(rows, fmt))
        assert back == rows
        for a, b in zip(rows, back):
            assert a.incompatibility_share == b.incompatibility_share
            assert a.affected_share == b.affected_share


def test_json_field_names():
    doc = json.loads(render_stats_table([EcosystemStats("Cargo", 1, 1)], "json"))
    assert list(doc[0]) == [
        "ecosystem", "packages", "dependencies", "disconnected", "connected",
        "incompatibilities", "incompatibility_share", "agpl_incompatibilities",
        "agpl_share", "affected", "affected_share",
    ]


def test_frequency_chart_fig4(fig4):
    rows = frequency_chart_data(license_frequencies(fig4), 7)
    assert [(label, share) for label, _, share in rows] == [
        ("MIT", Fraction(7, 8)), ("AGPL-3.0", Fraction(1, 8)), ("other", 0)
    ]
    assert "87.5%" in render_frequency_chart_data(license_frequencies(fig4))


def test_frequency_chart_tie_break_and_empty():
    table = FrequencyTable("X", 2, {"ZLib": 1, "BSD-3-Clause": 1})
    assert frequency_chart_data(table, 1) == [("BSD-3-Clause", 1, Fraction(1, 2)), ("other", 1, Fraction(1, 2))]
    empty = FrequencyTable("X", 0, {})
    assert frequency_chart_data(empty) == []
    assert render_frequency_chart_data(empty) == ""
    assert json.loads(render_frequency_chart_data(empty, format="json")) == []
    with pytest.raises(ValueError):
        frequency_chart_data(table, 0)


def test_impact_dot_matches_golden(fig4, matrix):
    impact = agpl_impact(fig4, matrix)
    dot = export_impact_dot(fig4, impact, threshold=0)
    assert dot == (GOLDEN / "fig4_impact.dot").read_text()
    assert export_impact_dot(fig4, impact, threshold=0) == dot


def test_impact_dot_above_threshold_is_empty(fig4, matrix):
    impact = agpl_impact(fig4, matrix)
    assert export_impact_dot(fig4, impact, threshold=1000) == "digraph impact {\n}\n"


def test_impact_dot_sizes_follow_pagerank(fig4, matrix):
    impact = agpl_impact(fig4, matrix)
    scores = pagerank(fig4).scores
    dot = export_impact_dot(fig4, impact, 0, scores)
    width_i = 3.0
    width_e = 3.0 * scores["e"] / scores["i"]
    assert f'width="{width_i:.4f}"' in dot and f'width="{width_e:.4f}"' in dot
