import json
from importlib import resources

import pytest

from affgfm.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_catalog_listing(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 0
    assert out.split() == ["a1-w1", "a2-w2", "c3-w3", "b3-w1-k1", "b3-w1-k2", "b3-w1-k3", "g2-w2", "a3-w1w3"]
    assert run(capsys, "catalog", "g2")[1] == "g2-w2\n"


def test_build_to_stdout(capsys):
    code, out, err = run(capsys, "build", "a2-w2")
    assert code == 0
    assert out == resources.files("affgfm").joinpath("golden/v1/a2-w2.json").read_text(encoding="utf-8")
    assert err.startswith("built a2-w2 (")


def test_build_from_flags_matches_catalog(capsys):
    code, out, _ = run(capsys, "build", "--family", "a", "--rank", "2", "--marks", "0,1", "--no-checks")
    assert code == 0
    assert json.loads(out)["id"] == "a2-w2"


def test_build_splits_unpinned_search(capsys, tmp_path):
    code, _, err = run(capsys, "build", "--family", "B", "--rank", "3", "--marks", "1,0,0", "--no-checks", "--out", str(tmp_path))
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["b3-w1-k1.json", "b3-w1-k2.json", "b3-w1-k3.json"]
    assert err.count("built ") == 3


def test_threads_do_not_change_output(capsys, tmp_path):
    one, many = tmp_path / "one", tmp_path / "many"
    assert run(capsys, "build", "a1-w1", "a2-w2", "g2-w2", "--out", str(one), "--threads", "1")[0] == 0
    assert run(capsys, "build", "a1-w1", "a2-w2", "g2-w2", "--out", str(many), "--threads", "3")[0] == 0
    for path in one.iterdir():
        assert (many / path.name).read_bytes() == path.read_bytes()


def test_verify_ok(capsys):
    code, out, _ = run(capsys, "verify", "a2-w2", "a3-w1w3")
    assert code == 0
    assert out == "a2-w2: ok\na3-w1w3: ok\n"


def test_verify_reports_drift(capsys, tmp_path):
    golden = json.loads(resources.files("affgfm").joinpath("golden/v1/a1-w1.json").read_text(encoding="utf-8"))
    golden["frobenius"]["F"] = "t1^3"
    path = tmp_path / "a1.json"
    path.write_text(json.dumps(golden, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    code, out, _ = run(capsys, "verify", "a1-w1", "--golden", str(path))
    assert code == 1
    assert "a1-w1: FAIL" in out
    assert "golden mismatch at /frobenius/F" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["build", "--family", "A", "--rank", "2", "--marks", "0,0"],
        ["build", "--family", "A", "--rank", "2"],
        ["build", "no-such-case"],
        ["build", "--family", "E", "--rank", "6", "--marks", "1,0,0,0,0,0"],
        ["periods", "a1-w1", "--order", "-1"],
        ["periods", "a1-w1", "--point", "x"],
    ],
)
def test_invalid_input(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error: ")


def test_no_pencil_solution(capsys):
    code, _, err = run(capsys, "build", "--family", "B", "--rank", "3", "--marks", "1,0,0", "--pencil-coeffs", "7,-3")
    assert code == 3
    assert "error:" in err


def test_periods(capsys):
    code, out, _ = run(capsys, "periods", "a1-w1", "--order", "4", "--digits", "30", "--rho", "1/100")
    assert code == 0
    doc = json.loads(out)
    assert doc["base_point"] == ["3/2"]
    assert doc["series"][0]["xi"][0][0].startswith("0.70710678118654752440")
    assert float(doc["residuals"][0]["flatness"]) < 1e-8


def test_periods_bad_point(capsys):
    code, _, err = run(capsys, "periods", "b3-w1-k2", "--point", "1,1,0", "--order", "1")
    assert code == 4
    assert "BadBasePoint" in err and "--point" in err
