import json
from fractions import Fraction

import pytest

kanqft = pytest.importorskip("kanqft")


def test_fixtures_are_bundled():
    names = kanqft.fixture_names()
    assert {"bz2-matrix", "nonflabby", "cauchy-z2", "chain", "disjoint-wedge"} <= set(names)
    assert kanqft.fixture("chain")["format"] == 1


def test_verify_bz2_matrix():
    report, code = kanqft.run("verify", "bz2-matrix")
    assert code == 0
    assert report["summary"]["assertions failed"] == 0
    assert kanqft.cohomology("bz2-matrix", "*") == [2, 0, 0, 0]
    assert kanqft.cochain_dims("bz2-matrix", "*") == [4, 4, 4, 4, 4]


def test_expected_findings():
    assert kanqft.run("axioms", "nonflabby", expect=["flabby", "u-isotony"])[1] == 0
    assert kanqft.run("axioms", "nonflabby", expect=["flabby"])[1] == 3
    report, _ = kanqft.run("axioms", "nonflabby")
    isotony = next(c for c in report["checks"] if c["name"] == "u-isotony")
    assert isotony["status"] == "fail"
    assert "(0, 1)" in isotony["detail"]


def test_reports_are_deterministic():
    a = kanqft.run("verify", "chain")[0]
    b = kanqft.run("verify", "chain")[0]
    assert json.dumps(a) == json.dumps(b)
    assert kanqft.markdown("classify", "cauchy-z2").startswith("# ")


def test_model_from_dict_and_path(tmp_path):
    spec = kanqft.fixture("cauchy-z2")
    assert kanqft.run("classify", spec)[1] == 0
    p = tmp_path / "m.json"
    p.write_text(json.dumps(spec))
    assert kanqft.run("classify", str(p))[0] == kanqft.run("classify", spec)[0]


def test_errors_raise():
    spec = kanqft.fixture("bz2-matrix")
    spec["loc"]["morphisms"].append({"name": "x", "source": "*", "target": "nowhere"})
    with pytest.raises(kanqft.KanqftError, match="nowhere"):
        kanqft.run("validate", spec)
    with pytest.raises(ValueError):
        kanqft.run("nonsense", "chain")
    with pytest.raises(ValueError):
        kanqft.run("verify", "chain", max_degree=1)


def test_exact_linear_algebra():
    m = [[1, 2], [2, 4]]
    assert kanqft.rank(m) == 1
    assert kanqft.kernel(m) == [[Fraction(1), Fraction(-1, 2)]]  # echelon form
    assert kanqft.solve([[Fraction(1, 3), 0], [0, 2]], [1, Fraction(1, 2)]) == [3, Fraction(1, 4)]
    assert kanqft.solve([[0]], [1]) is None
    with pytest.raises(kanqft.KanqftError, match="ragged"):
        kanqft.rank([[1, 2], [3]])
