import json

import pytest

from ptentropy import checks, cli


@pytest.fixture(scope="module")
def clean_results():
    return checks.run_selftest()


def test_clean_build_passes(clean_results):
    failed = [r.name for r in clean_results if not r.passed]
    assert not failed
    assert len(clean_results) >= 15


def test_cli_selftest_json(tmp_path, capsys):
    out = tmp_path / "selftest.json"
    assert cli.main(["selftest", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] and doc["n_failed"] == 0
    assert all({"name", "passed", "seconds", "detail"} <= set(c) for c in doc["checks"])


def test_wrong_fourier_sign_is_caught(capsys):
    code = cli.main(["selftest", "--inject-fault", "ft-sign"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 1 and not doc["passed"]
    by_name = {c["name"]: c["passed"] for c in doc["checks"]}
    # Norms are blind to the sign; pointwise amplitudes are not.
    assert by_name["A5 position and momentum densities are normalised"]
    assert not by_name["I1 numerical transform matches closed-form momentum amplitudes"]


def test_tight_tolerance_gives_structured_failures():
    results = checks.run_selftest(tol=1e-15)
    failures = [r for r in results if not r.passed]
    assert failures
    assert any(r.detail.get("exception") == "ConvergenceError" for r in failures)
    assert all(r.as_dict()["name"] for r in results)


def test_unknown_fault_rejected():
    with pytest.raises(Exception):
        checks.run_selftest(inject_fault="nonsense")


def test_reference_table_loads():
    rows = checks.reference_table1()
    assert [int(r["n"]) for r in rows] == list(range(2, 14))
