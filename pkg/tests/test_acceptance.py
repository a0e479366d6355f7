"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import random
import time

import pytest

from painleve_atlas.atlas import ChartId, check_atlas
from painleve_atlas.hamiltonian import K_TEXT, builtin_triple, gluing_residuals, sigma_shift_residuals
from painleve_atlas.integrator import IntegratorConfig, detect_poles, integrate, reference_config, structure_monitor
from painleve_atlas.invariant_solver import (
    PARTICULAR,
    InvariantDecomposition,
    assemble,
    constancy_certificate,
    decompose,
    push_to_xy,
    random_coefficient,
    random_decomposition,
    uniqueness_scan,
    verify_ED_identities,
)
from painleve_atlas.blowup_ledger import check_e8, curve_graph, run_construction, verify_singular_points
from painleve_atlas.report import VerificationReport
from painleve_atlas.symcore import as_rf, parse, substitute, var


@pytest.fixture
def verdict(capsys):
    def emit(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")

    return emit


def test_criterion_1_exact_identities(verdict):
    start = time.perf_counter()
    rep = VerificationReport()
    rep.extend(check_atlas())
    triple = builtin_triple()
    rep.extend(gluing_residuals(triple))
    rep.extend(sigma_shift_residuals(triple))
    rep.extend(verify_ED_identities())
    rep.extend(PARTICULAR.check())
    elapsed = time.perf_counter() - start
    ok = rep.passed and elapsed < 10
    verdict(1, ok, f"{len(rep)} exact identities, {elapsed:.2f} s, first failure: {rep.first_failure()}")
    assert ok


def test_criterion_2_construction_replay(verdict):
    start = time.perf_counter()
    log = run_construction()
    points = verify_singular_points(log)
    graph = curve_graph(log)
    e8 = check_e8(graph)
    elapsed = time.perf_counter() - start
    stated = {(p.chart, p.location) for p in log.singular_points if p.verified}
    wanted = {("Q_2P_2", ("0", "4")), ("RS", ("2", "0")), ("RS", ("-2", "0")), ("z_6w_6", ("t/2", "0")),
              ("u_6v_6", ("-t/2", "0")), ("z_7w_7", ("1/2", "0"))}
    wanted |= {(f"{c}_{k}{d}_{k}", ("0", "0")) for k in (3, 4, 5) for c, d in (("z", "w"), ("u", "v"))}
    ok = log.report.passed and points.passed and e8.passed and wanted <= stated and elapsed < 30
    verdict(2, ok, f"{len(log.report)} replay checks, {graph.number_of_nodes()} leaves, {elapsed:.2f} s")
    assert ok


def test_criterion_3_round_trip(verdict):
    rng = random.Random(2024)
    bad = []
    for k in range(100):
        dec = random_decomposition(rng, max_M=3, max_N=3, max_deg=4)
        back = decompose(assemble(dec))
        y_deg = push_to_xy(dec).num.degree(var("y"))
        if (back.even_coeffs, back.odd_coeffs) != (dec.even_coeffs, dec.odd_coeffs) or y_deg != max(2 * dec.M, 2 * dec.N + 1):
            bad.append(k)
    verdict(3, not bad, f"100 seeded cases, failures: {bad}")
    assert not bad


def test_criterion_4_constancy_and_uniqueness(verdict):
    rng = random.Random(7)
    mismatches = []
    for k in range(60):
        if k % 3 == 0:
            dec = InvariantDecomposition([substitute(random_coefficient(rng), {var("xi"): 0})], [])
        else:
            dec = random_decomposition(rng, max_M=2, max_N=2, max_deg=3)
        K = assemble(dec)
        phase_free = {v.name for v in K.variables()} <= {"t"}
        if constancy_certificate(K).constant != phase_free:
            mismatches.append(k)
    scan = uniqueness_scan(2, 8, 1)
    t_only = [str(h) for h in scan.homogeneous]
    ok = not mismatches and scan.feasible and scan.particular == parse(K_TEXT) and not scan.phase_homogeneous
    verdict(4, ok, f"constancy mismatches {mismatches}; scan particular = K: {scan.particular == parse(K_TEXT)}, "
                   f"phase dimension {len(scan.phase_homogeneous)}, t-only directions {t_only}")
    assert ok


def test_criterion_5_lyapunov(verdict):
    dec = InvariantDecomposition([parse("xi*(t^2 - xi)/4"), parse("1/4")], [])
    residual = push_to_xy(dec) - parse("y^2 - 4*x^3 - 2*t*x + y/x")
    verdict(5, residual.is_zero(), f"residual {residual}")
    assert residual.is_zero()


def test_criterion_6_pole_vaulting(verdict):
    start = time.perf_counter()
    traj = integrate(0.0, 10.0, 0.0, 0.0, IntegratorConfig(rtol=1e-10))
    poles = detect_poles(traj)
    ref = detect_poles(integrate(0.0, 10.0, 0.0, 0.0, reference_config()))
    mon = structure_monitor(traj)
    elapsed = time.perf_counter() - start
    laurent = max(p.laurent_residual for p in poles)
    offset = max(abs(p.t0 - q.t0) for p, q in zip(poles, ref)) if len(ref) == len(poles) else float("inf")
    speed = max(abs(p.dwdt - 1) for p in poles)
    ok = (len(poles) >= 3 and laurent <= 1e-4 and offset <= 1e-8 and mon.max_switch_residual <= 1e-9
          and mon.max_energy_defect <= 1e-8 and speed <= 1e-6 and elapsed < 60)
    verdict(6, ok, f"{len(poles)} poles, laurent {laurent:.2e}, vs reference {offset:.2e}, "
                   f"switch {mon.max_switch_residual:.2e}, energy {mon.max_energy_defect:.2e}, "
                   f"|dw/dt - 1| {speed:.2e}, {elapsed:.2f} s")
    assert ok


def test_criterion_7_sigma_branch_equivalence(verdict):
    plus = integrate(0.0, 10.0, 0.0, 0.0, IntegratorConfig(branch_policy="fixed-plus"))
    minus = integrate(0.0, 10.0, 0.0, 0.0, IntegratorConfig(branch_policy="fixed-minus"))
    swap = {ChartId.ZW: ChartId.UV, ChartId.UV: ChartId.ZW, ChartId.XY: ChartId.XY}
    gap = 0.0 if len(plus.samples) == len(minus.samples) else float("inf")
    for p, m in zip(plus.samples, minus.samples):
        if p.t != m.t or m.chart is not swap[p.chart]:
            gap = float("inf")
            break
        sign = 1 if p.chart is ChartId.XY else -1
        gap = max(gap, *(abs(a - sign * b) for a, b in zip(p.coords, m.coords)))
    ok = gap <= 1e-9
    verdict(7, ok, f"{len(plus.samples)} samples, max pointwise gap {gap:.2e}")
    assert ok
