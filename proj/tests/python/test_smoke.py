import json
import os
from pathlib import Path

import jsonschema
import pytest

import questd

FIXTURES = Path(os.environ.get("QUESTD_FIXTURES_DIR", Path(__file__).resolve().parents[1] / "fixtures"))
DOCS = Path(os.environ.get("QUESTD_DOCS_DIR", Path(__file__).resolve().parents[2] / "docs"))


@pytest.fixture(scope="module")
def schema():
    return json.loads((DOCS / "state.schema.json").read_text())


def test_catalog_has_27_unique_ids():
    ids = [a["id"] for a in questd.catalog()["achievements"]]
    assert len(ids) == 27
    assert len(set(ids)) == 27


def test_session_replay_matches_golden_and_schema(schema):
    result = questd.replay_file(FIXTURES / "session" / "session.ndjson")
    jsonschema.validate(result["state"], schema)

    golden = json.loads((FIXTURES / "session" / "golden_state.json").read_text())
    rows = [{k: a[k] for k in ("id", "level", "progress", "raw_progress")} for a in result["state"]["achievements"]]
    assert rows == golden["achievements"]
    assert result["state"]["log_position"] == golden["log_position"]
    assert result["notifications"] == json.loads((FIXTURES / "session" / "golden_notifications.json").read_text())


def test_empty_log_state_is_schema_valid(schema):
    state = questd.replay("")["state"]
    jsonschema.validate(state, schema)
    assert all(a["level"] == "none" for a in state["achievements"])


def test_digest_is_stable():
    text = (FIXTURES / "session" / "session.ndjson").read_text()
    assert questd.state_digest(text) == questd.state_digest(text)
    assert questd.state_digest(text) == questd.replay(text)["state"]["digest"]


@pytest.mark.parametrize("kind", ["junit", "jacoco", "lcov"])
def test_parsers_match_golden(kind):
    parse = {"junit": questd.parse_junit, "jacoco": questd.parse_jacoco, "lcov": questd.parse_lcov}[kind]
    goldens = sorted((FIXTURES / kind).glob("*.golden.json"))
    assert goldens
    for golden in goldens:
        source = golden.with_name(golden.name[: -len(".golden.json")])
        assert parse(source.read_text(encoding="utf-8")) == json.loads(golden.read_text()), source.name


def test_malformed_report_raises_typed_error():
    with pytest.raises(questd.MalformedReport):
        questd.parse_junit("<testsuite")
    assert issubclass(questd.MalformedReport, questd.Error)


def test_classify_new_test_file():
    src = "class CalcTest {\n  @Test void adds() { assertEquals(2, 1 + 1); }\n}\n"
    out = questd.classify_change(None, src, "src/test/java/CalcTest.java")
    assert out["file_class"] == "test"
    assert any(f["kind"] == "test_method_added" for f in out["facts"])


def test_fisher_small_table():
    p, degenerate = questd.fisher_exact(4, 2, 0, 6)
    assert not degenerate
    assert p == pytest.approx(0.06060606, abs=5e-5)


def test_fisher_matches_scipy():
    stats = pytest.importorskip("scipy.stats")
    for table in [(1, 9, 11, 3), (3, 1, 1, 3), (0, 5, 5, 0), (7, 2, 3, 8)]:
        p, _ = questd.fisher_exact(*table)
        ref = stats.fisher_exact([[table[0], table[1]], [table[2], table[3]]]).pvalue
        assert p == pytest.approx(ref, rel=1e-9)


def test_wilcoxon_exact_matches_scipy():
    stats = pytest.importorskip("scipy.stats")
    x, y = [1.1, 2.3, 3.5, 8.0, 9.2], [4.4, 5.0, 6.1, 7.7]
    r = questd.wilcoxon_exact(x, y)
    assert r["mode"] == "exact"
    ref = stats.mannwhitneyu(x, y, alternative="two-sided", method="exact").pvalue
    assert r["p"] == pytest.approx(ref, rel=1e-9)


def test_wilcoxon_above_cap():
    x = list(range(30))
    y = [v + 0.5 for v in range(30)]
    with pytest.raises(questd.SampleTooLarge):
        questd.wilcoxon_exact(x, y)
    assert questd.wilcoxon_exact(x, y, large="normal")["mode"] == "normal"
    with pytest.raises(questd.ConfigError):
        questd.wilcoxon_exact(x, y, large="bogus")


def test_stats_helpers():
    r, r2 = questd.pearson([1, 2, 3], [2, 4, 6])
    assert r == pytest.approx(1.0)
    assert r2 == pytest.approx(1.0)
    lo, hi = questd.ci_mean([1.0, 2.0, 3.0])
    assert lo < 2.0 < hi
    with pytest.raises(questd.TooFewValues):
        questd.ci_mean([1.0])


def test_group_report(tmp_path):
    session = (FIXTURES / "session" / "session.ndjson").read_text()
    for name in ("a1", "a2", "b1", "b2"):
        (tmp_path / f"{name}.ndjson").write_text(session if name.startswith("a") else "")
    report = questd.group_report({"A": ["a1.ndjson", "a2.ndjson"], "B": ["b1.ndjson", "b2.ndjson"]}, tmp_path)
    assert [g["name"] for g in report["groups"]] == ["A", "B"]
    assert len(report["participants"]) == 4
    fisher = report["pairwise"][0]["fisher_no_tests"]
    assert fisher["table"] == [[0, 2], [2, 0]]
