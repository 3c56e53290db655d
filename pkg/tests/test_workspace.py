import json

import numpy as np
import pytest

from ecp import (
    UnknownIdError,
    Workspace,
    WorkspaceError,
    WorkspaceParams,
    WorkspaceRebuildingError,
)
from ecp.workspace import MANIFEST_NAME, IndicatorsUnavailableError

ECI_EXPECTED = (1.32821167, -0.24352253, -1.08468914)
PCI_EXPECTED = (-1.59222604, -0.11204099, 0.85213352, 0.85213352)


# -- building -----------------------------------------------------------------

def test_build_specialization_pattern(nested_workspace):
    ws = nested_workspace
    assert ws.matrix.period == "2019"
    assert ws.m.locations == ("c1", "c2", "c3")
    assert ws.m.activities == ("p1", "p2", "p3", "p4")
    assert ws.m.values.tolist() == [[0, 1, 1, 1], [1, 1, 0, 0], [1, 0, 0, 0]]


def test_build_scores(nested_workspace):
    assert nested_workspace.scores.eci == pytest.approx(ECI_EXPECTED, abs=1e-6)
    assert nested_workspace.scores.pci == pytest.approx(PCI_EXPECTED, abs=1e-6)


def test_build_proximity_edges(nested_workspace):
    phi = nested_workspace.phi
    a = phi.activities.index
    assert phi.values[a("p1"), a("p2")] == pytest.approx(0.5)
    assert phi.values[a("p3"), a("p4")] == pytest.approx(1.0)
    assert phi.values[a("p1"), a("p3")] == 0.0


def test_build_graph_connected(nested_workspace):
    g = nested_workspace.graph
    assert g is not None and g.pruned == ()
    assert g.adjacency["p2"] == frozenset({"p1", "p3", "p4"})


def test_build_warns_on_nonconvergent_fitness(nested_workspace):
    assert not nested_workspace.fitness.converged
    assert any("did not converge" in w for w in nested_workspace.warnings)


def test_build_rejects_degenerate_threshold(nested_trade_text):
    with pytest.raises(WorkspaceError, match="degenerate"):
        Workspace.build(nested_trade_text, params=WorkspaceParams(rca_threshold=50.0))


def test_params_validation():
    with pytest.raises(ValueError):
        WorkspaceParams(rca_threshold=0.0)
    with pytest.raises(ValueError):
        WorkspaceParams(edge_threshold=0.0)
    with pytest.raises(ValueError):
        WorkspaceParams(edge_threshold=1.5)


def test_content_hash_tracks_parameters(nested_trade_text, nested_workspace):
    other = Workspace.build(nested_trade_text,
                            params=WorkspaceParams(edge_threshold=0.6))
    assert other.content_hash != nested_workspace.content_hash


# -- value vectors and diagrams -----------------------------------------------

def test_value_vector_kinds(nested_workspace):
    ws = nested_workspace
    assert ws.value_vector("pci").higher_is_better
    pgi = ws.value_vector("pgi")
    assert pgi.kind == "pgi" and not pgi.higher_is_better
    with pytest.raises(IndicatorsUnavailableError):
        ws.value_vector("pei")  # no emission-intensity table was loaded
    with pytest.raises(ValueError):
        ws.value_vector("happiness")


def test_frontier_c3_quadrants(nested_workspace):
    d = nested_workspace.frontier("c3")
    assert d.counts == {"let_it_be": 2, "wish_you_were_here": 0,
                        "long_road_ahead": 1, "stuck_in_the_mud": 0}
    assert d.corr == pytest.approx(-1.0)
    assert d.thresholds.omega == 0.0 and d.thresholds.value == 0.0
    by = {p.id: p for p in d.points}
    assert by["p1"].specialized
    assert by["p2"].quadrant == "long_road_ahead"


def test_location_view(nested_workspace):
    d = nested_workspace.location_view("p2")
    assert d.activity == "p2" and d.value_kind == "eci"
    assert {p.id for p in d.points} == {"c1", "c2", "c3"}


# -- what-if ------------------------------------------------------------------

def test_whatif_frozen_deltas(nested_workspace):
    out = nested_workspace.whatif("c3", ("p2",))
    deltas = {d["activity"]: d["delta"] for d in out["deltas"]}
    assert deltas["p1"] == pytest.approx(1.0)
    assert deltas["p2"] == 0.0
    assert deltas["p3"] == pytest.approx(1 / 3)
    assert deltas["p4"] == pytest.approx(1 / 3)
    assert out["added"] == ["p2"] and out["recompute"] == "frozen"
    assert sum(out["diagram"]["summary"]["counts"].values()) == 2  # p3, p4 left


def test_whatif_empty_addition_is_exact_identity(nested_workspace):
    out = nested_workspace.whatif("c3", ())
    assert all(d["delta"] == 0.0 for d in out["deltas"])
    assert all(d["after"] == d["before"] for d in out["deltas"])


def test_whatif_frozen_deltas_never_negative(nested_workspace):
    for add in (("p2",), ("p3",), ("p2", "p4")):
        out = nested_workspace.whatif("c3", add)
        assert all(d["delta"] >= 0.0 for d in out["deltas"])


def test_whatif_full_recompute(nested_workspace):
    out = nested_workspace.whatif("c3", ("p2",), recompute="full")
    assert out["recompute"] == "full"
    assert {d["activity"] for d in out["deltas"]} == {"p1", "p2", "p3", "p4"}
    marks = {p["activity"]: p["specialized"] for p in out["diagram"]["points"]}
    assert marks["p2"]  # the hypothetical entry is specialized in the new diagram


def test_whatif_validation(nested_workspace):
    ws = nested_workspace
    with pytest.raises(UnknownIdError):
        ws.whatif("atlantis", ("p2",))
    with pytest.raises(UnknownIdError):
        ws.whatif("c3", ("p9",))
    with pytest.raises(ValueError, match="disjoint"):
        ws.whatif("c3", ("p1",))  # already specialized
    with pytest.raises(ValueError, match="recompute"):
        ws.whatif("c3", ("p2",), recompute="later")


# -- persistence --------------------------------------------------------------

def test_write_and_load_roundtrip(nested_workspace, tmp_path):
    target = tmp_path / "ws"
    nested_workspace.write(target)
    names = {p.name for p in target.iterdir()}
    assert {"trade.csv", "specialization.csv", "proximity.csv", "density.csv",
            "eci.csv", "pci.csv", "fitness.csv", "q_complexity.csv",
            "indicators_gini.csv", "adjacency.csv", MANIFEST_NAME} <= names
    ws2 = Workspace.load(target)
    assert ws2.content_hash == nested_workspace.content_hash
    assert ws2.built_at == nested_workspace.built_at
    assert ws2.scores.eci.tobytes() == nested_workspace.scores.eci.tobytes()
    assert sorted(ws2.indicators) == ["gini"]
    assert ws2.geo is not None


def test_manifest_contents(nested_workspace):
    man = nested_workspace.manifest()
    assert set(man) == {"schema", "period", "parameters", "indicator_kinds",
                        "has_adjacency", "content_hash", "built_at", "warnings",
                        "load_report"}
    assert man["schema"] == 1
    assert man["period"] == "2019"
    assert man["indicator_kinds"] == ["gini"]
    assert man["has_adjacency"] is True
    assert man["parameters"] == {"rca_threshold": 1.0, "edge_threshold": 0.4}


def test_load_missing_directory(tmp_path):
    with pytest.raises(WorkspaceError):
        Workspace.load(tmp_path / "nothing-here")


def test_load_without_manifest_means_rebuilding(tmp_path):
    half_built = tmp_path / "ws"
    half_built.mkdir()
    (half_built / "trade.csv").write_text("location,activity,period,value\n")
    with pytest.raises(WorkspaceRebuildingError):
        Workspace.load(half_built)


@pytest.mark.parametrize("edit", [
    ("c1,p2,2019,5", "c1,p2,2019,6"),      # subtle: rebuilds fine, hash differs
    ("c1,p2,2019,5", "c1,p2,2019,500"),    # drastic: rebuild itself fails
])
def test_load_detects_tampered_inputs(nested_workspace, tmp_path, edit):
    target = tmp_path / "ws"
    nested_workspace.write(target)
    trade = target / "trade.csv"
    trade.write_text(trade.read_text().replace(*edit))
    with pytest.raises(WorkspaceError, match="corrupt"):
        Workspace.load(target)


def test_rewrite_swaps_atomically(nested_workspace, nested_trade_text, tmp_path):
    target = tmp_path / "ws"
    nested_workspace.write(target)
    other = Workspace.build(nested_trade_text,
                            params=WorkspaceParams(edge_threshold=0.6))
    other.write(target)
    man = json.loads((target / MANIFEST_NAME).read_text())
    assert man["parameters"]["edge_threshold"] == 0.6
    assert not (tmp_path / "ws.old").exists()
    leftovers = [p for p in tmp_path.iterdir() if p.name != "ws"]
    assert leftovers == []  # no stray temp directories
