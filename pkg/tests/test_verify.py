import pytest

from hermwhit.serialize import dumps
from hermwhit.verify import SUITE_NAMES, run_verify


def test_unknown_suite_rejected():
    with pytest.raises(ValueError):
        run_verify("nosuch")


def test_roots_suite_passes_and_serializes():
    report = run_verify("roots", seed=3)
    assert report.ok
    payload = report.jsonable()
    assert payload["schema"] == 1
    assert payload["status"] == "pass"
    assert payload["counts"]["fail"] == 0
    names = [s["suite"] for s in payload["suites"]]
    assert names == ["roots"]
    for case in payload["suites"][0]["cases"]:
        assert set(case) >= {"name", "status", "measured", "tolerance"}
    # serialized twice identically, and without wall-clock timings
    assert dumps(payload) == dumps(run_verify("roots", seed=3).jsonable())
    assert "seconds" not in dumps(payload)
    assert "roots" in report.human_table()


def test_single_group_restriction():
    report = run_verify("pkn", seed=1, group="su11")
    assert report.ok
    joined = " ".join(c.name for c in report.cases)
    assert "su21" not in joined


def test_suite_names_cover_layers():
    assert SUITE_NAMES == ("roots", "pkn", "cocycle", "kernel", "fock",
                           "whittaker")
