import json
from fractions import Fraction

import networkx as nx
import pytest

from painleve_atlas.atlas import ChartId
from painleve_atlas.blowup_ledger import (
    STATED_POINTS,
    ChartNode,
    ConstructionLog,
    ContractionError,
    CurveOrigin,
    affine_e8,
    blowdown,
    blowup,
    check_blowup,
    check_e8,
    curve_graph,
    discover_on_line,
    is_accessible_singular,
    log_to_json,
    pushforward,
    require_contractible,
    run_construction,
    to_dot,
    verify_singular_points,
)
from painleve_atlas.hamiltonian import hamiltonian_field, vector_field
from painleve_atlas.symcore import as_rf, parse, var


def _root():
    x, y = ChartId.XY.coords
    return ChartNode("xy", (x, y), None, None, vector_field(ChartId.XY))


def test_full_replay_passes(construction):
    rep = check_blowup(construction)
    assert rep.passed, rep.first_failure()


def test_event_sequence(construction):
    kinds = [e.kind for e in construction.events]
    assert kinds == ["gluing", "blowup", "blowup", "double_cover", "blowdown"] + ["blowup"] * 6 + ["quotient_and_resolve"]
    assert construction.events[-1].details["rescale"]["z_8"] == "-z/2"


@pytest.mark.parametrize("center", ["0", "1", "t", "t/2 - 3"])
def test_blowdown_undoes_blowup(center):
    root = _root()
    small, capital = blowup(root, (parse(center), 0), ("q_1", "p_1"), ("Q_1", "P_1"))
    node = blowdown(small, capital, ("q1", "p1"), (parse(center), 0))
    m = node.map_to(root)
    assert [str(c) for c in m.components] == ["q1", "p1"]
    assert node.field_here.components == tuple(
        c.subs({var("x"): var("q1"), var("y"): var("p1")}) for c in root.field_here.components
    )


def test_blowup_center_must_be_on_axis():
    with pytest.raises(ValueError):
        blowup(_root(), (0, 1), ("q_1", "p_1"), ("Q_1", "P_1"))
    with pytest.raises(ValueError):
        blowup(_root(), (parse("y"), 0), ("q_1", "p_1"), ("Q_1", "P_1"))


def test_blowdown_rejects_mismatched_halves():
    root = _root()
    small, _ = blowup(root, (0, 0), ("q_1", "p_1"), ("Q_1", "P_1"))
    _, other = blowup(root, (1, 0), ("q_2", "p_2"), ("Q_2", "P_2"))
    with pytest.raises(ValueError):
        blowdown(small, other, ("q1", "p1"))


def test_blowup_charts_cover_the_exceptional_line():
    small, capital = blowup(_root(), (0, 0), ("q_1", "p_1"), ("Q_1", "P_1"))
    assert [str(c) for c in small.to_parent.components] == ["q_1*p_1", "p_1"]
    assert [str(c) for c in capital.to_parent.components] == ["Q_1", "Q_1*P_1"]
    assert [str(c) for c in small.from_parent.components] == ["x/y", "y"]


def test_pushforward_is_functorial():
    root = _root()
    s1, _ = blowup(root, (0, 0), ("q_1", "p_1"), ("Q_1", "P_1"))
    s2, _ = blowup(s1, (parse("t"), 0), ("q_2", "p_2"), ("Q_2", "P_2"))
    direct = pushforward(root.field_here, s2.map_to(root), s2.coords)
    assert direct.components == s2.field_here.components


def test_harmonic_field_has_no_singular_point_off_origin():
    field = hamiltonian_field(parse("x^2/2 + y^2/2"), ChartId.XY.coords)
    root = ChartNode("h", ChartId.XY.coords, None, None, field)
    small, _ = blowup(root, (0, 0), ("q_1", "p_1"), ("Q_1", "P_1"))
    # the field rotates, so the exceptional line carries no indeterminacy
    assert discover_on_line(small.field_here, 1) == []
    ok, _ = is_accessible_singular(small.field_here, (as_rf(0), as_rf(0)))
    assert not ok


def test_contraction_requires_minus_one():
    log = ConstructionLog()
    rec = log.add_curve("C", -2, CurveOrigin.EXCEPTIONAL, True)
    with pytest.raises(ContractionError):
        require_contractible(rec)
    require_contractible(log.add_curve("D", -1, CurveOrigin.EXCEPTIONAL, True))


def test_self_intersection_labels(construction):
    rep = construction.report
    for cid in ("E2", "Y_0"):
        assert rep[f"step5.self_intersection[{cid}]={'0' if cid == 'E2' else '2'}"].passed
    assert rep["step6.self_intersection[E2]=-1"].passed
    assert rep["step4.self_intersection[D]=-1"].passed


def test_final_curves(construction):
    si = {c.id: c.self_intersection for c in construction.curves.values()}
    leaves = {"A1", "E2", "E3", "E4", "E5", "E6", "E7", "F_inf", "Y_inf"}
    assert {c.id for c in construction.leaves()} == leaves
    assert all(si[c] == -2 for c in leaves)
    assert si["E8"] == -1 and si["Y_0"] == 1
    for rec in construction.curves.values():
        assert rec.cover_self_intersection == rec.self_intersection


def test_curve_graph_is_affine_e8(construction):
    g = curve_graph(construction)
    assert nx.is_isomorphic(g, affine_e8())
    assert check_e8(g).passed
    resolution = [n for n, d in g.nodes(data=True) if d["resolution"]]
    assert resolution == ["A1"]
    assert sorted(g.neighbors("A1")) == ["E2"]
    assert g.degree("E2") == 3


def test_check_e8_rejects_plain_chain():
    g = nx.path_graph(9)
    nx.set_node_attributes(g, -2, "self_intersection")
    nx.set_node_attributes(g, False, "resolution")
    assert not check_e8(g).passed


def test_check_e8_rejects_misplaced_resolution(construction):
    g = curve_graph(construction).copy()
    g.nodes["A1"]["resolution"] = False
    g.nodes["E7"]["resolution"] = True
    rep = check_e8(g)
    assert rep["graph is affine E8"].passed
    assert not rep["resolution curve is the short arm at the branch node"].passed


def test_stated_singular_points(construction):
    rep = verify_singular_points(construction)
    assert rep.passed, rep.first_failure()
    verified = [p for p in construction.singular_points if p.verified]
    assert len(verified) == len(STATED_POINTS)


@pytest.mark.parametrize("k, chart, loc, paired", STATED_POINTS)
def test_each_stated_point_is_indeterminate(construction, k, chart, loc, paired):
    ok, witness = is_accessible_singular(construction.nodes[chart].field_here, tuple(parse(c) for c in loc))
    assert ok, witness


def test_a_stated_point_moved_is_regular(construction):
    field = construction.nodes["z_7w_7"].field_here
    ok, _ = is_accessible_singular(field, (parse("1/3"), as_rf(0)))
    assert not ok


def test_sigma_levels(construction):
    for k in range(3, 9):
        assert construction.report[f"level{k}.sigma_z[0]"].passed
        assert construction.report[f"level{k}.sigma_u[1]"].passed


def test_final_charts_reproduce_the_atlas(construction):
    zw = construction.nodes["zw"]
    assert zw.field_here.components == vector_field(ChartId.ZW).components
    uv = construction.nodes["uv"]
    assert uv.field_here.components == vector_field(ChartId.UV).components


def test_outputs_are_deterministic(construction):
    again = run_construction()
    assert log_to_json(again) == log_to_json(construction)
    assert to_dot(curve_graph(again)) == to_dot(curve_graph(construction))
    data = json.loads(log_to_json(construction))
    assert len(data["events"]) == 12
    assert to_dot(curve_graph(construction)).count("[label=") == 9


def test_snapshot_self_intersections_are_json_numbers(construction):
    for ev in json.loads(log_to_json(construction))["events"]:
        for c in ev["curves"]:
            assert isinstance(c["self_intersection"], int) or Fraction(c["self_intersection"])
