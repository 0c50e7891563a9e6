import io
import json

import numpy as np

from analytics.bounds import BoundKind
from config.experiment import ExperimentConfig
from ui.writers import (format_cell, report_object, results_frame, strip_timestamp, to_jsonable,
                        write_csv, write_json, write_results)


def test_format_cell():
    assert format_cell(None) == ""
    assert format_cell("full:1,2") == "full:1,2"
    assert format_cell(0.1) == "0.10000000000000001"
    assert format_cell(np.int64(7)) == "7"
    assert format_cell({"b": (1, 2)}) == '{"b": [1, 2]}'


def test_to_jsonable():
    value = {"kind": BoundKind.NCR2, "u": np.array([1.0, 2.0]), "ok": np.bool_(True),
             "n": np.int32(3)}
    assert to_jsonable(value) == {"kind": "ncr2", "u": [1.0, 2.0], "ok": True, "n": 3}


def test_report_object_ratio():
    obj = report_object("delta2", {"n": 10}, 0.02, 0.01)
    assert obj == {"kind": "delta2", "inputs": {"n": 10}, "value": 0.02, "oracle": 0.01,
                   "ratio": 2.0}
    assert report_object("x", {}, 1.0)["ratio"] is None
    assert report_object("x", {}, 1.0, 0.0)["ratio"] is None


def test_results_frame_keeps_column_order():
    df = results_frame([{"b": 2, "a": 1}], ["a", "b", "c"])
    assert list(df.columns) == ["a", "b", "c"]
    assert df.iloc[0].tolist() == ["1", "2", ""]


def test_csv_layout():
    config = ExperimentConfig(subcommand="cov", q=4, residues=[1, 3])
    out = io.StringIO()
    write_csv(out, [{"a": 1, "b": 3}], ["a", "b"], config, notes=["zeros: real"])
    lines = out.getvalue().splitlines()
    assert "# q = 4" in lines
    assert "# note: zeros: real" in lines
    assert lines[-2:] == ["a,b", "1,3"]
    assert any(line.startswith("# generated_at = ") for line in lines)
    assert not any(line.startswith("# generated_at") for line in strip_timestamp(out.getvalue()).splitlines())


def test_json_layout():
    config = ExperimentConfig(subcommand="predict", kind="ncr2")
    out = io.StringIO()
    write_json(out, [report_object("ncr2", {}, 0.5)], config, notes=["n"])
    doc = json.loads(out.getvalue())
    assert doc["config"]["kind"] == "ncr2"
    assert doc["notes"] == ["n"]
    assert doc["results"][0]["value"] == 0.5


def test_write_results_dispatches_on_format():
    out = io.StringIO()
    write_results(out, [{"a": 1}], ["a"], ExperimentConfig(subcommand="sieve", format="json"))
    assert json.loads(out.getvalue())["results"] == [{"a": 1}]
