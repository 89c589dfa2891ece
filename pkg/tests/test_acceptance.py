"""
Acceptance suite.  Every criterion prints one line

    criterion N: PASS|FAIL  <measured values>

and then asserts.  The lines are repeated in the pytest terminal summary.
"""

import time
from functools import lru_cache

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES, ALL, complex_named

from cohres import cli
from cohres.catalog import reference_forms, shipped_complex
from cohres.freecomplex import ext_generators, taylor_complex
from cohres.membership import (INCONCLUSIVE, MEMBER, NON_MEMBER, Thresholds, default_battery, evidence_csv,
                               membership_test, oracle_membership)
from cohres.mininv import build_u, make_metric, verify_identities
from cohres.pairing import PairingEngine, QuadratureSpec, TestForm, contour_oracle_1d, default_quadrature
from cohres.polyring import parse_poly
from cohres.residues import is_dbar_closed, residue_forms
from cohres.supercalc import check_super_identities

QMC_THRESHOLDS = Thresholds(1e-2, 1e-1)
TENSOR24 = QuadratureSpec("tensor-grid", 24)


def report(num, ok, detail):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
    print("\n" + line)
    ACCEPTANCE_LINES.append(line)
    return ok


@lru_cache(maxsize=None)
def computed_forms(name, metric="identity", resolution=None, D=None):
    spec, c = shipped_complex(name, resolution)
    au = build_u(c, make_metric(metric, c))
    return spec, [r.omega for r in residue_forms(c, au, ext_generators(c, D=D))]


@lru_cache(maxsize=None)
def engine(name, q=None, extra=None, metric="identity", resolution=None, D=None, max_phi_degree=4):
    spec, forms = computed_forms(name, metric, resolution, D)
    forms = list(forms)
    if extra:
        for ex, reading in extra:
            forms += reference_forms(ex, reading)
    q = q or default_quadrature(spec.nvars)
    out = spec, PairingEngine(spec.generators, forms, q, max_phi_degree=max_phi_degree, max_h_degree=4)
    _ENGINES[len(_ENGINES)] = out
    return out


@pytest.fixture(autouse=True)
def _free_grids():
    yield
    for _, eng in _ENGINES.values():
        eng.release_grids()


_ENGINES = {}


@lru_cache(maxsize=None)
def battery(name, **kw):
    spec = shipped_complex(name)[0]
    return tuple(default_battery(spec.nvars, spec.codim(), spec.generators, **kw))


def joint_verdict(eng, phi, bat, ells, thr=Thresholds(), p=None):
    return membership_test(eng, phi, list(bat), thr, p=p, ells=ells)


# ---------------------------------------------------------------------------


def test_criterion_1_symbolic_identities():
    t0 = time.time()
    failures = []
    for name in ALL:
        c = complex_named(name)
        for metric in ("identity", "weighted"):
            m = make_metric(metric, c)
            rep = verify_identities(c, m)
            items = list(rep.items)
            items += check_super_identities(c, count=2, seed=0)
            au = rep.applied_u
            items += [(f"dbar omega_{r.ell} = 0", is_dbar_closed(r.omega))
                      for r in residue_forms(c, au, ext_generators(c))]
            failures += [f"{name}/{metric}: {nm}" for nm, ok in items if not ok]
    dt = time.time() - t0
    ok = not failures and dt < 60
    report(1, ok, f"{len(ALL)} complexes x 2 metrics, failures={failures or 0}, {dt:.1f}s (< 60s)")
    assert ok


def test_criterion_2_calibration():
    t0 = time.time()
    one1 = parse_poly("1", 1)
    tf = TestForm()
    _, e1 = engine("z", TENSOR24)
    p1 = e1.pairing(0, one1, tf)
    oracle = contour_oracle_1d(one1, one1, lambda z: 1 / z)
    rel1 = abs(p1.value - oracle) / abs(oracle)
    zm = max(abs(e1.pairing(0, parse_poly(f"z^{m}", 1), tf).value) / p1.scale for m in (1, 2, 3))
    _, e3 = engine("z3", TENSOR24)
    bat3 = battery("z3")
    v_non = joint_verdict(e3, parse_poly("z^2", 1), bat3, [0], p=1).verdict
    v_mem = joint_verdict(e3, parse_poly("z^3", 1), bat3, [0], p=1).verdict
    _, e2 = engine("z1z2", TENSOR24)
    p2 = e2.pairing(0, parse_poly("1", 2), tf)
    pred = oracle ** 2                       # product of the calibrated 1-D contours
    rel2 = abs(p2.value - pred) / abs(pred)
    dt = time.time() - t0
    ok = rel1 < 1e-3 and zm < 1e-6 and v_non == NON_MEMBER and v_mem == MEMBER and rel2 < 1e-2 and dt < 120
    report(2, ok, f"1-D rel err {rel1:.1e} (< 1e-3); max |z^m|/scale {zm:.1e} (< 1e-6); "
                  f"(z^3): z^2 {v_non}, z^3 {v_mem}; 2-D rel err {rel2:.1e} (< 1e-2); {dt:.1f}s")
    assert ok


PHI_42 = ["1", "x", "y", "x^2", "x*y", "y^2", "x^3", "x^2*y"]


def _fit(Pm, k, cols):
    A, *_ = np.linalg.lstsq(Pm[:, :k], Pm[:, cols], rcond=None)
    resid = np.linalg.norm(Pm[:, :k] @ A - Pm[:, cols]) / np.linalg.norm(Pm[:, cols])
    return A, resid, np.linalg.cond(A)


def _two_variable_reference(reading):
    t0 = time.time()
    spec, eng = engine("x2_xy_y2", TENSOR24, extra=(("x2_xy_y2", "chain"), ("x2_xy_y2", "square")), max_phi_degree=3)
    bat = battery("x2_xy_y2")
    fit_bat = [tf for tf in bat if tf.delta_scale == 1.0]
    Pm = np.array([[eng.pairing(e, parse_poly("1", 2), tf).value for e in range(6)] for tf in fit_bat])
    cols = (2, 3) if reading == "chain" else (4, 5)
    A, resid, cond = _fit(Pm, 2, cols)
    mismatches = []
    for s in PHI_42:
        phi = parse_poly(s, 2)
        ours = joint_verdict(eng, phi, bat, [0, 1], p=2).verdict
        theirs = joint_verdict(eng, phi, bat, list(cols), p=2).verdict
        if ours != theirs or ours == INCONCLUSIVE:
            mismatches.append(f"{s}: {ours}/{theirs}")
    dt = time.time() - t0
    ok = len(fit_bat) >= 10 and resid < 5e-2 and np.isfinite(cond) and cond < 1e8 and not mismatches and dt < 300
    return ok, (f"[{reading} reading] battery {len(fit_bat)}, lsq residual {resid:.1e} (< 5e-2), "
                f"cond(A) {cond:.3g}, A = {np.round(A.real, 4).tolist()}, verdict mismatches {mismatches or 0}, "
                f"{dt:.0f}s")


def test_criterion_3_reference_two_variables_chain_reading():
    ok, detail = _two_variable_reference("chain")
    report(3, ok, detail)
    assert ok


@pytest.mark.xfail(reason="under the dxb^dxb = 0 reading the reference forms are not dbar-closed; "
                          "see the decisions ledger", strict=True)
def test_criterion_3_reference_two_variables_square_reading():
    ok, detail = _two_variable_reference("square")
    report(3, ok, detail)
    assert ok


PHI_43 = ["1", "x", "y", "z", "y*z", "x^2", "y^2", "x*z"]


@lru_cache(maxsize=None)
def _n3_verdicts():
    spec, eng = engine("x2_y2_z2_yz", extra=(("x2_y2_z2_yz", "chain"),), max_phi_degree=2)
    bat = battery("x2_y2_z2_yz")
    rows = {}
    for s in PHI_43:
        phi = parse_poly(s, 3)
        ours = joint_verdict(eng, phi, bat, [0, 1], QMC_THRESHOLDS, p=3)
        theirs = joint_verdict(eng, phi, bat, [2, 3], QMC_THRESHOLDS, p=3)
        rows[s] = (ours, theirs, oracle_membership(spec, phi))
    return rows


def _separation(rows):
    mem = [v.max_rho() for v, o in rows if o == MEMBER]
    non = [v.max_rho() for v, o in rows if o == NON_MEMBER]
    return max(mem), min(non), min(non) / max(max(mem), 1e-300)


def test_criterion_4_reference_three_variables():
    t0 = time.time()
    rows = _n3_verdicts()
    mism = [f"{s}: {a.verdict}/{b.verdict}" for s, (a, b, o) in rows.items()
            if a.verdict != b.verdict or a.verdict == INCONCLUSIVE]
    pops = [(a, o) for a, b, o in rows.values()] + [(b, o) for a, b, o in rows.values()]
    mx, mn, sep = _separation(pops)
    dt = time.time() - t0
    ok = not mism and sep >= 10 and dt < 600
    report(4, ok, f"qmc 2^20, thresholds {QMC_THRESHOLDS.low:g}/{QMC_THRESHOLDS.high:g}; "
                  f"verdict mismatches {mism or 0}; member max rho {mx:.1e}, non-member min rho {mn:.1e}, "
                  f"separation {sep:.0f} (>= 10); {dt:.0f}s")
    assert ok


DUALITY = {
    "z": ["1", "z", "z^2", "1 + z", "z + z^2", "2", "z^3", "3*z - z^2"],
    "z3": ["1", "z", "z^2", "z^3", "z^4", "z^2 + z^3", "1 + z^3", "z^5"],
    "z1z2": ["1", "x", "y", "x + y", "1 + x", "x*y", "x^2 - y", "2 + y^2"],
    "x2y3": ["1", "x", "y^2", "x*y^2", "x^2", "y^3", "x^2 + y^3", "x*y^3 + x^3", "x*y"],
    "x2_xy_y2": PHI_42 + ["x + y^2"],
}


def test_criterion_5_duality_battery():
    t0 = time.time()
    bad, undecided, decided = [], [], 0
    small_pops = []
    for name, phis in DUALITY.items():
        spec, eng = engine(name, TENSOR24, max_phi_degree=4)
        bat = battery(name)
        for s in phis:
            phi = parse_poly(s, spec.nvars)
            o = oracle_membership(spec, phi)
            v = membership_test(eng, phi, list(bat), oracle=o, p=spec.codim())
            small_pops.append((v, o))
            if v.verdict == INCONCLUSIVE:
                undecided.append(f"{name}:{s}")
                if any(d.startswith("!!!") for d in v.diagnostics):
                    bad.append(f"{name}:{s} contradicts oracle")
            else:
                decided += 1
                if v.verdict != o:
                    bad.append(f"{name}:{s}")
    n3 = _n3_verdicts()
    for s, (a, _b, o) in n3.items():
        if a.verdict == INCONCLUSIVE:
            undecided.append(f"x2_y2_z2_yz:{s}")
        else:
            decided += 1
            if a.verdict != o:
                bad.append(f"x2_y2_z2_yz:{s}")
    mx, mn, sep = _separation(small_pops)
    dt = time.time() - t0
    ok = not bad and sep >= 1e2 and decided > 0 and dt < 600
    report(5, ok, f"6 ideals, {decided} decided, undecided {undecided or 0}, disagreements {bad or 0}; "
                  f"n <= 2 member max rho {mx:.1e}, non-member min rho {mn:.1e}, separation {sep:.1e} "
                  f"(>= 1e2); {dt:.0f}s")
    assert ok


def test_criterion_6_metric_independence():
    worst, count = 0.0, 0
    for name in ("z1z2", "x2_xy_y2"):
        spec, ei = engine(name, TENSOR24, metric="identity")
        _, ew = engine(name, TENSOR24, metric="weighted")
        for s in ("1", "x", "y"):
            phi = parse_poly(s, 2)
            for ell in range(len(ei.forms)):
                for tf in battery(name):
                    a, b = ei.pairing(ell, phi, tf), ew.pairing(ell, phi, tf)
                    tol = 2 * max(a.err_est, b.err_est)
                    worst = max(worst, abs(a.value - b.value) / tol)
                    count += 1
    ok = worst <= 1.0
    report(6, ok, f"{count} pairings, max |P_id - P_w| / (2 err_est) = {worst:.2e} (<= 1)")
    assert ok


def test_criterion_7_resolution_independence():
    spec, em = engine("x2_xy_y2", TENSOR24, max_phi_degree=3)
    _, et = engine("x2_xy_y2", TENSOR24, resolution="taylor", D=1, max_phi_degree=3)
    bat = battery("x2_xy_y2")
    mism = []
    for s in PHI_42:
        phi = parse_poly(s, 2)
        a = membership_test(em, phi, list(bat), p=2).verdict
        b = membership_test(et, phi, list(bat), p=2).verdict
        if a != b or a == INCONCLUSIVE:
            mism.append(f"{s}: {a}/{b}")
    fit_bat = [tf for tf in bat if tf.delta_scale == 1.0]
    Pm = np.array([[em.pairing(e, parse_poly("1", 2), tf).value for e in range(2)]
                   + [et.pairing(e, parse_poly("1", 2), tf).value for e in range(len(et.forms))]
                   for tf in fit_bat])
    A, resid, cond = _fit(Pm, 2, tuple(range(2, Pm.shape[1])))
    ok = not mism and len(et.forms) == 2 and resid < 5e-2
    report(7, ok, f"taylor (D = 1) vs minimal: verdict mismatches {mism or 0}; "
                  f"pairing fit residual {resid:.1e}, cond(A) {cond:.3g}")
    assert ok


def test_criterion_8_quadrature_stability():
    t0 = time.time()
    worst = 0.0
    for name, phis in (("z1z2", ["1", "x", "y"]), ("x2_xy_y2", ["1", "x", "y", "x^2"])):
        _, e24 = engine(name, TENSOR24, max_phi_degree=3)
        _, e48 = engine(name, QuadratureSpec("tensor-grid", 48), max_phi_degree=3)
        groups = {}
        for tf in battery(name):
            groups.setdefault(tf.shape_key(), []).append(tf)
        for ell in range(len(e24.forms)):
            for tfs in groups.values():
                for tf in tfs:
                    for s in phis:
                        phi = parse_poly(s, 2)
                        a, b = e24.pairing(ell, phi, tf), e48.pairing(ell, phi, tf)
                        worst = max(worst, abs(a.value - b.value) / max(abs(a.value), a.scale))
                e48.release_grids()   # the fine grids are large; keep one shape at a time
    # halving delta: per-case classification and per-phi verdicts
    changed = []
    thr = Thresholds()

    def cls(r):
        return "low" if r.rho < thr.low else ("high" if r.rho > thr.high and r.rho_half > thr.high else "mid")

    for name, phis in (("x2_xy_y2", PHI_42), ("z1z2", DUALITY["z1z2"])):
        spec, eng = engine(name, TENSOR24, max_phi_degree=3)
        full = battery(name, delta_scales=(1.0,))
        half = battery(name, delta_scales=(0.5,))
        for s in phis:
            phi = parse_poly(s, 2)
            for ell in range(len(eng.forms)):
                for a, b in zip(full, half):
                    if cls(eng.pairing(ell, phi, a)) != cls(eng.pairing(ell, phi, b)):
                        changed.append(f"{name}:{s}:{a.tid}")
            va = membership_test(eng, phi, list(full)).raw_verdict
            vb = membership_test(eng, phi, list(half)).raw_verdict
            if va != vb:
                changed.append(f"{name}:{s} verdict {va}/{vb}")
    dt = time.time() - t0
    ok = worst < 1e-2 and not changed
    report(8, ok, f"max relative change 24 -> 48 {worst:.1e} (< 1e-2); cases changed by halving delta "
                  f"{changed or 0}; {dt:.0f}s")
    assert ok


def test_criterion_9_determinism(tmp_path):
    outs = []
    for d in ("run1", "run2"):
        args = ["member", "--ideal", "x2_xy_y2", "x^2 + y", "--quadrature", "tensor-grid:16", "--seed", "3",
                "--out", str(tmp_path / d)]
        cli.main(args)
        outs.append((tmp_path / d / "evidence.csv").read_bytes())
    csvs = []
    for _ in range(2):
        spec, c = shipped_complex("x2_y2_z2_yz")
        forms = computed_forms("x2_y2_z2_yz")[1]
        eng = PairingEngine(spec.generators, list(forms), QuadratureSpec("quasi-monte-carlo", 2 ** 12, seed=3))
        bat = default_battery(3, 3, spec.generators, h_degree=1)
        csvs.append(evidence_csv(membership_test(eng, parse_poly("y", 3), bat)).encode())
    ok = outs[0] == outs[1] and csvs[0] == csvs[1]
    report(9, ok, f"tensor CLI evidence.csv identical: {outs[0] == outs[1]} ({len(outs[0])} bytes); "
                  f"seeded qmc CSV identical: {csvs[0] == csvs[1]}")
    assert ok
