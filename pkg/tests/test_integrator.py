import json
import math
from pathlib import Path

import numpy as np
import pytest

from painleve_atlas import atlas
from painleve_atlas.atlas import ChartId
from painleve_atlas.integrator import (
    BranchPolicy,
    IntegrationError,
    IntegratorConfig,
    Step,
    Trajectory,
    detect_poles,
    harmonic_field,
    integrate,
    laurent_check,
    PoleRecord,
    poles_json,
    reference_config,
    structure_monitor,
    trajectory_csv,
)
from painleve_atlas.symcore import parse

ORACLE = json.loads((Path(__file__).parent / "data" / "pole_oracle.json").read_text())
ORACLE_POLES = [float(p) for p in ORACLE["poles"]]


@pytest.fixture(scope="module")
def default_poles(default_run):
    return detect_poles(default_run)


def test_three_poles_on_the_window(default_poles):
    assert len(default_poles) == len(ORACLE_POLES) == 3


def test_pole_positions_against_oracle(default_poles, reference_run):
    for p, q in zip(default_poles, ORACLE_POLES):
        assert abs(p.t0 - q) <= 1e-8
    for p, q in zip(detect_poles(reference_run), ORACLE_POLES):
        assert abs(p.t0 - q) <= 1e-10


def test_laurent_residuals(default_poles):
    for p in default_poles:
        assert p.laurent_residual <= 1e-4


def test_crossing_speed(default_poles):
    for p in default_poles:
        assert abs(p.dwdt - 1.0) <= 1e-6
        assert p.crossing_direction == 1


def _synthetic(t0, eps):
    # w = h (1 + eps h) with h = t - t0, so x h^2 - 1 = -2 eps h + O(h^2)
    interp = lambda t: np.array([0.0, (t - t0) * (1 + eps * (t - t0))])
    step = Step(t0 - 1, t0 + 1, ChartId.ZW, -1, interp)
    return Trajectory(steps=[step])


def test_laurent_check_on_exact_series():
    pole = PoleRecord(3.0, 0.0, math.nan, 1.0)
    assert laurent_check(_synthetic(3.0, 0.0), pole) <= 1e-12
    dev = laurent_check(_synthetic(3.0, 0.1), pole, delta=0.05)
    assert dev == pytest.approx(2 * 0.1 * 0.05, rel=0.1)


def test_laurent_window_must_fit():
    pole = PoleRecord(3.0, 0.0, math.nan, 1.0)
    with pytest.raises(ValueError):
        laurent_check(_synthetic(3.0, 0.0), pole, delta=2.0)


def test_structure_monitor(default_run):
    mon = structure_monitor(default_run)
    assert mon.max_energy_defect <= 1e-8
    assert mon.max_switch_residual <= 1e-9
    assert len(mon.switch_t) == len(default_run.switches) == 6


def test_switch_round_trip(default_run):
    for old, new in default_run.switches:
        xy, pole = (old, new) if old.chart is ChartId.XY else (new, old)
        back = atlas.zw_to_xy(*pole.coords, pole.t) if pole.chart is ChartId.ZW else atlas.uv_to_xy(*pole.coords, pole.t)
        for a, b in zip(back, xy.coords):
            assert abs(a - b) <= 1e-9 * (1 + abs(b))


def test_chart_invariant(default_run):
    R = default_run.config.switch_radius
    for s in default_run.samples:
        if s.chart is ChartId.XY:
            assert abs(s.coords[0]) <= 2 * R
            assert s.branch == 0
        else:
            assert s.coords[1] ** 2 <= 2 / R * (1 + 1e-12)


def test_no_poles_without_switching():
    traj = integrate(0.0, 1.5, 0.0, 0.0, switching=False)
    assert detect_poles(traj) == []
    assert all(s.chart is ChartId.XY for s in traj.samples)


def test_xy_value_matches_reference(default_run, reference_run):
    for t in (0.5, 2.0, 4.0, 7.5, 9.9):
        assert default_run.x_at(t) == pytest.approx(reference_run.x_at(t), rel=1e-7)


def test_harmonic_energy_drift():
    cfg = IntegratorConfig(rtol=1e-12, atol=1e-14)
    traj = integrate(0.0, 100.0, 1.0, 0.0, cfg, xy_field=harmonic_field(), switching=False)
    energy = [0.5 * (s.coords[0] ** 2 + s.coords[1] ** 2) for s in traj.samples]
    assert max(abs(e - energy[0]) for e in energy) <= 1e-10
    mon = structure_monitor(traj, xy_hamiltonian=parse("1/2*x^2 + 1/2*y^2"))
    assert mon.max_energy_defect <= 1e-12


def test_determinism():
    a = integrate(0.0, 6.0, 0.0, 0.0)
    b = integrate(0.0, 6.0, 0.0, 0.0)
    assert trajectory_csv(a) == trajectory_csv(b)
    assert poles_json(detect_poles(a)) == poles_json(detect_poles(b))


def _sigma_image(s):
    return {ChartId.ZW: ChartId.UV, ChartId.UV: ChartId.ZW, ChartId.XY: ChartId.XY}[s.chart]


def test_sigma_branch_equivalence():
    plus = integrate(0.0, 10.0, 0.0, 0.0, IntegratorConfig(branch_policy="fixed-plus"))
    minus = integrate(0.0, 10.0, 0.0, 0.0, IntegratorConfig(branch_policy="fixed-minus"))
    assert len(plus.samples) == len(minus.samples)
    for p, m in zip(plus.samples, minus.samples):
        assert p.t == m.t and m.chart is _sigma_image(p)
        if p.chart is ChartId.XY:
            assert max(abs(a - b) for a, b in zip(p.coords, m.coords)) <= 1e-9
        else:
            assert max(abs(a + b) for a, b in zip(p.coords, m.coords)) <= 1e-9
            assert p.branch == -m.branch


def test_continuous_policy_stays_on_zw(default_run):
    assert {s.chart for s in default_run.samples} == {ChartId.XY, ChartId.ZW}


def test_start_inside_pole_chart():
    traj = integrate(2.5, 2.7, 40.0, -2 * 40.0**1.5, IntegratorConfig())
    assert traj.samples[0].chart is ChartId.ZW
    assert len(detect_poles(traj)) <= 1


def test_zero_length_run():
    traj = integrate(1.0, 1.0, 0.0, 0.0)
    assert len(traj) == 0 and traj.steps == []
    assert trajectory_csv(traj) == "t,chart,c1,c2,branch\n"


def test_real_scope():
    with pytest.raises(IntegrationError):
        integrate(0.0, 1.0, -25.0, 0.0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(rtol=0), dict(atol=-1), dict(switch_radius=1), dict(max_step=0), dict(method="Euler"),
     dict(branch_policy="sideways"), dict(first_step=1.0, max_step=0.1)],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        IntegratorConfig(**kwargs)


def test_argument_validation():
    with pytest.raises(ValueError):
        integrate(1.0, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        integrate(0.0, 1.0, math.nan, 0.0)


def test_reference_config():
    cfg = reference_config()
    assert (cfg.method, cfg.rtol, cfg.atol) == ("DOP853", 1e-13, 1e-15)
    assert BranchPolicy(cfg.branch_policy) is BranchPolicy.CONTINUOUS


def test_tighter_tolerance_reduces_pole_error(reference_run):
    ref = [p.t0 for p in detect_poles(reference_run)]
    errs = []
    for rtol in (1e-7, 1e-8, 1e-9, 1e-10, 1e-11):
        poles = detect_poles(integrate(0.0, 10.0, 0.0, 0.0, IntegratorConfig(rtol=rtol, atol=rtol * 1e-2)))
        errs.append(max(abs(p.t0 - q) for p, q in zip(poles, ref)))
    assert all(b <= a for a, b in zip(errs, errs[1:]))


def _fixed(h):
    # a tolerance this loose never rejects a step, so every step has length h
    return IntegratorConfig(rtol=1e3, atol=1e3, max_step=h, first_step=h)


def test_step_halving_never_increases_pole_error(reference_run):
    ref = [p.t0 for p in detect_poles(reference_run)]
    errs = []
    for h in (0.01, 0.005, 0.0025):
        poles = detect_poles(integrate(0.0, 10.0, 0.0, 0.0, _fixed(h)))
        errs.append(max(abs(p.t0 - q) for p, q in zip(poles, ref)))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(orders) >= 4, orders


def test_step_doubling_order_on_harmonic_oscillator():
    errs = []
    for h in (0.1, 0.05, 0.025):
        traj = integrate(0.0, 2.0, 1.0, 0.0, _fixed(h), xy_field=harmonic_field(), switching=False)
        x, y = traj.samples[-1].coords
        errs.append(math.hypot(x - math.cos(2.0), y + math.sin(2.0)))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(orders) >= 4, orders


def test_output_formats(default_run, default_poles):
    lines = trajectory_csv(default_run).splitlines()
    assert lines[0] == "t,chart,c1,c2,branch"
    assert len(lines) == len(default_run.samples) + 1
    data = json.loads(poles_json(default_poles))
    assert [round(d["t0"], 6) for d in data] == [round(q, 6) for q in ORACLE_POLES]
