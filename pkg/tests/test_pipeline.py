import json
from importlib import resources

import pytest

from affgfm.catalog import CATALOG_IDS, CaseManifest
from affgfm.errors import ValidationError
from affgfm.pipeline import build_case, canonical_json, failed_checks, first_difference, parse_report


def _golden_text(case_id):
    return resources.files("affgfm").joinpath(f"golden/v1/{case_id}.json").read_text(encoding="utf-8")


@pytest.mark.parametrize("case_id", CATALOG_IDS)
def test_golden_is_canonical(case_id):
    text = _golden_text(case_id)
    parse_report(text)
    assert canonical_json(json.loads(text)) == text
    assert failed_checks(json.loads(text)) == []


@pytest.mark.parametrize("case_id", ["a1-w1", "a2-w2", "g2-w2", "a3-w1w3"])
def test_build_matches_golden(built, case_id):
    assert canonical_json(built(case_id).report) == _golden_text(case_id)


def test_non_canonical_expression_rejected():
    data = json.loads(_golden_text("a2-w2"))
    data["frobenius"]["F"] = "1/18*t2^3 - 1/4*t1^2*t2^2 + 1/8*t1^4*t2 - 3/80*t1^6"
    with pytest.raises(ValidationError):
        parse_report(json.dumps(data))


def test_missing_section_rejected():
    data = json.loads(_golden_text("a2-w2"))
    del data["chart"]
    with pytest.raises(ValidationError):
        parse_report(json.dumps(data))


def test_first_difference():
    a = {"x": [1, {"y": "a"}], "z": 1}
    assert first_difference(a, a) is None
    assert first_difference(a, {"x": [1, {"y": "b"}], "z": 1}) == "/x[1]/y: 'a' != 'b'"
    assert first_difference(a, {"x": [1], "z": 1}) == "/x: length 2 != 1"
    assert first_difference(a, {"x": a["x"]}) == "/z: present in only one report"


def test_unpinned_search_splits_into_cases():
    case = CaseManifest(id="b3-w1", family="B", rank=3, marks=(1, 0, 0), chart_policy="auto").validate()
    results = build_case(case, with_checks=False)
    assert [r.case.id for r in results] == ["b3-w1-k1", "b3-w1-k2", "b3-w1-k3"]
