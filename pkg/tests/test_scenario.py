import copy
import time

import pytest

from admlab.errors import ParseError, ProbeFailed
from admlab.scenario import (
    builtin_document,
    builtin_names,
    emit_mass_curve,
    parse_scenario,
    run_builtin,
    run_scenario,
)
from admlab.families import schwarzschild
from admlab.serialization import dumps

BUILTINS = ["ex1-flatten-out", "ex2-flatten-in", "ex3-rescale", "ex4-hidden-region", "ex6-cylinder", "sec5-region"]

SMALL = {
    "schema": 1,
    "name": "small",
    "sequence": {
        "template": {"kind": "flatten_in", "params": {"m": 1, "height": 5}},
        "vary": {"height": [5, 10, 20]},
        "window": [3, 10],
    },
    "limit": {"kind": "flat"},
    "probes": [{"id": "masses", "op": "adm_mass", "params": {"method": "limit"}}],
}


def test_all_builtins_are_listed():
    assert builtin_names() == sorted(BUILTINS)


@pytest.mark.parametrize("name", BUILTINS)
def test_builtin_runs_clean_within_a_minute(name):
    start = time.perf_counter()
    res = run_builtin(name)
    assert time.perf_counter() - start < 60
    assert res.ok, res.failures


def test_rerun_is_byte_identical():
    first, second = run_builtin("ex6-cylinder"), run_builtin("ex6-cylinder", parallel=True)
    assert dumps(first) == dumps(second)
    assert first.csv_text == second.csv_text


def test_unknown_fields_are_rejected():
    doc = copy.deepcopy(SMALL)
    doc["colour"] = "blue"
    with pytest.raises(ParseError):
        parse_scenario(doc)
    doc = copy.deepcopy(SMALL)
    doc["probes"][0]["retries"] = 2
    with pytest.raises(ParseError):
        parse_scenario(doc)


def test_schema_version_is_checked():
    doc = dict(SMALL, schema=2)
    with pytest.raises(ParseError):
        parse_scenario(doc)


def test_empty_probe_list_is_a_valid_no_op():
    res = run_scenario(dict(SMALL, probes=[]), write=False)
    assert res.ok and res.outputs == []


def test_failed_expectation_raises_with_result(tmp_path):
    doc = copy.deepcopy(SMALL)
    doc["probes"] = [{"id": "lsc", "op": "lsc_check", "expect": {"inequality_holds": False}}]
    doc["output"] = {"json": str(tmp_path / "run.json")}
    with pytest.raises(ProbeFailed) as info:
        run_scenario(doc)
    assert not info.value.result.ok
    assert (tmp_path / "run.json").exists()


def test_outputs_are_written(tmp_path):
    doc = copy.deepcopy(builtin_document("ex2-flatten-in"))
    doc["output"] = {"json": str(tmp_path / "r.json"), "csv": str(tmp_path / "c.csv")}
    run_scenario(doc)
    assert (tmp_path / "c.csv").read_text().startswith("index,abscissa,hawking_mass\n")


def test_emitted_curve_settles_on_the_mass():
    rows = emit_mass_curve(schwarzschild(1.0), (3.0, 1e4), 12)
    assert [len(r) for r in rows] == [3] * 12
    assert all(abs(h - 1.0) < 1e-12 for _, h, _ in rows)
    assert abs(rows[-1][2] - 1.0) < 1e-9
