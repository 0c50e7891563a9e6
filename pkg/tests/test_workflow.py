import math

import numpy as np
import pytest

from config.experiment import ExperimentConfig
from graph.state import initial_state
from graph.workflow import race_workflow
from model.covariance import CorrelationMatrix, correlation_matrix
from stages.covariance_stage import cov_rows
from stages.sampler_stage import event_bound, resolve_events
from stages.zero_stage import resolve_residues
from utils.errors import DomainError, NonUnitResidueError


def run(**kwargs):
    return race_workflow.invoke(initial_state(ExperimentConfig(**kwargs)))


def test_cov_mod_4():
    state = run(subcommand="cov", q=4, residues=[1, 3])
    assert state["step"] == "complete"
    assert state["error"] is None
    rows = state["rows"]
    assert [(r["a"], r["b"]) for r in rows] == [(1, 1), (1, 3), (3, 3)]
    assert rows[0]["annotation"] == "variance" and rows[0]["r"] == 1.0
    assert rows[1]["r"] == -1.0
    assert rows[1]["annotation"].startswith("large_cov ratio=")
    assert "zeros: real" in state["notes"]
    assert "truncation_count: 10" in state["notes"]


def test_cov_partial_coverage_is_noted(tmp_path):
    path = tmp_path / "q5.txt"
    path.write_text("modulus 5\nchi 2\n14.1\n20.0\n")
    state = run(subcommand="cov", q=5, residues=[1, 4], zero_file=str(path))
    assert any(note.startswith("partial:") for note in state["notes"])
    assert all("partial" in row["annotation"] for row in state["rows"])


def test_mc_with_rho_skips_zero_data():
    state = run(subcommand="mc", rho=0.0, n=3, samples=3000, events=["leader:1"])
    assert state["step"] == "complete"
    assert state["zero_set"] is None
    [row] = state["rows"]
    assert row["event"] == "leader:1" and row["model"] == "z"
    assert row["prediction"] == pytest.approx(1 / 3)
    assert abs(row["value"] - 1 / 3) < 5 * row["stderr"]
    assert row["bound"] == pytest.approx(3.0 ** -100)


def test_mc_x_model_defaults_to_identity_ordering():
    state = run(subcommand="mc", model="x", q=4, residues=[3, 1], samples=5000)
    [row] = state["rows"]
    assert row["event"] == "full:1,2"
    assert row["value"] > 0.95


def test_bad_residue_ends_the_run():
    state = run(subcommand="cov", q=4, residues=[2])
    assert state["step"] == "error"
    assert "non-unit residue" in state["error"]
    assert state["rows"] == []


def test_rho_needs_the_z_model():
    state = run(subcommand="mc", rho=0.1, n=3, model="x")
    assert state["step"] == "error"
    assert "--model z" in state["error"]


def test_bad_event_ends_the_run():
    state = run(subcommand="mc", q=4, residues=[1, 3], events=["leader:3"])
    assert state["step"] == "error"
    assert state["estimates"] == []


@pytest.mark.parametrize("q,spec,expected", [
    (5, "all", [1, 2, 3, 4]),
    (5, "first:2", [1, 2]),
    (35, "biased:3,3", [1, 34, 6]),
])
def test_resolve_residues_from_tuple_spec(q, spec, expected):
    assert resolve_residues(ExperimentConfig(subcommand="cov", q=q, tuple_spec=spec)) == expected


@pytest.mark.parametrize("kwargs", [
    {"residues": [1, 3]},
    {"q": 5},
    {"q": 5, "tuple_spec": "first:9"},
    {"q": 5, "tuple_spec": "every"},
])
def test_resolve_residues_errors(kwargs):
    with pytest.raises(DomainError):
        resolve_residues(ExperimentConfig(subcommand="cov", **kwargs))


def test_resolution_errors_name_their_flag():
    with pytest.raises(NonUnitResidueError, match=r"^--residues: non-unit residue"):
        resolve_residues(ExperimentConfig(subcommand="cov", q=4, residues=[1, 2]))
    with pytest.raises(DomainError, match=r"^--tuple: "):
        resolve_residues(ExperimentConfig(subcommand="cov", q=35, tuple_spec="biased:3"))
    with pytest.raises(DomainError, match=r"^--event: "):
        resolve_events(["leader:9"], 3)


def test_event_bounds(zeros5, table5):
    cm = correlation_matrix(zeros5, table5, [1, 2, 3, 4])
    full, leader = resolve_events(["full:1,2,3,4", "leader:2"], 4)
    assert event_bound(full, cm) == pytest.approx(4 * math.log(4) ** 4 / (24 * math.log(5)))
    assert event_bound(leader, cm) > 4.0 ** -100
    assert [e.label for e in resolve_events([], 3)] == ["full:1,2,3"]


def test_cov_rows_without_raw_covariances():
    cm = CorrelationMatrix(0, (1, 2), 2.0, np.array([[1.0, 0.5], [0.5, 1.0]]))
    rows = cov_rows(cm)
    assert rows[1]["B_q"] == 1.0
    assert rows[1]["annotation"] == ""
