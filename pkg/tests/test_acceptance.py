"""Acceptance suite: fifteen property-based criteria at their stated tolerances.

Each test records one PASS/FAIL line; the lines are printed as they are
produced and repeated in the pytest terminal summary.  Run standalone with
``python3 tests/test_acceptance.py`` to print only the lines.
"""

import hashlib
import math
import os
import sys
import tempfile
import time

import numpy as np
import sympy as sp

sys.path.insert(0, os.path.dirname(__file__))

from oracles import eos_mp, scan_downstream_density  # noqa: E402
from samples import gradient_residuals, gradient_sample, shock_point_sample  # noqa: E402

from shockreg.cli import main as cli_main  # noqa: E402
from shockreg.config import (build_lighthill, build_prandtl, build_regular_reflection,  # noqa: E402
                             build_regular_reflection_nonsym, lighthill_gate, sonic_angle,
                             validate_admissible_structure)
from shockreg.config.states import solve_state2  # noqa: E402
from shockreg.diagnostic import (XI1, XI2, AnalyticField, QuadPatch,  # noqa: E402
                                 contradiction_functional, identity_refinement, quadratic_pair,
                                 renorm_pair_truncated, truncation_limit_study,
                                 weak_identity_residual)
from shockreg.errors import DetachedError, PreconditionError  # noqa: E402
from shockreg.fields import (GridField2D, ReflectionSpec, commutator,  # noqa: E402
                             commutator_decomposition, commutator_study, exclusion_factor,
                             lp_norm, make_mollifier, mollify_at, random_pair,
                             reflect_extend_vector)
from shockreg.gas import GasParams, PointState, eos  # noqa: E402
from shockreg.jump import (OrientedInterface, downstream_state, entropy_admissible,  # noqa: E402
                           rh_residual)
from shockreg.vortcalc import (printed_system_determinant, shock_vorticity_closed_form,  # noqa: E402
                               shock_vorticity_system, solve_shock_vorticity,
                               velocity_gradient_from_state)

RESULTS = []
SUB = (0.2, 0.8, 0.2, 0.8)
G14 = GasParams(1.4)


def report(n, ok, detail, t0):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  ({time.perf_counter() - t0:.2f} s)  {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_01_eos_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst_c, worst_p, worst_mp = 0.0, 0.0, 0.0
    for i in range(1000):
        rho, g = float(rng.uniform(0.1, 10)), float(rng.uniform(1.05, 3.0))
        params = GasParams(g)
        rec = eos(rho, params)
        worst_c = max(worst_c, abs(rec.c ** 2 - ((g - 1) * rec.h + 1)) / rec.c ** 2)
        # p = rho^2 e'(rho), e' by a 4th-order central difference
        d = 1e-3 * rho
        e = params.internal_energy
        de = (-e(rho + 2 * d) + 8 * e(rho + d) - 8 * e(rho - d) + e(rho - 2 * d)) / (12 * d)
        worst_p = max(worst_p, abs(rho ** 2 * de - rec.p) / rec.p)
        if i % 100 == 0:
            ref = eos_mp(rho, g)
            worst_mp = max(worst_mp, max(abs(a - b) / abs(b) for a, b in zip(rec, ref) if b != 0))
    ok = worst_c <= 1e-8 and worst_p <= 1e-8 and worst_mp <= 1e-8
    report(1, ok, f"max rel c^2 defect {worst_c:.2e}, p = rho^2 e' defect {worst_p:.2e}, "
                  f"high-precision EOS {worst_mp:.2e} (tol 1e-8)", t0)


def test_criterion_02_jump_round_trip():
    t0 = time.perf_counter()
    rng = np.random.default_rng(102)
    worst_rh, worst_tau, worst_scan, fails = 0.0, 0.0, 0.0, 0
    for i in range(1000):
        params = GasParams(float(rng.uniform(1.1, 3.0)))
        rho = float(np.exp(rng.uniform(-1.5, 1.5)))
        c = params.sound_speed(rho)
        ang = rng.uniform(0, 2 * np.pi)
        it = OrientedInterface(rng.normal(size=2), (np.cos(ang), np.sin(ang)))
        vn, vt = c * rng.uniform(1.0001, 6.0), rng.normal() * 2
        up = PointState(rho, vn * it.normal + vt * it.tangent)
        down = downstream_state(up, it, params)
        scale = np.array([rho * vn, 1.0, rho * vn * vn + params.pressure(rho)])
        worst_rh = max(worst_rh, float(np.max(np.abs(rh_residual(up, down, it, params)) / scale)))
        # "exactly" up to rounding of the global-frame reconstruction
        worst_tau = max(worst_tau, abs(down.v @ it.tangent - up.v @ it.tangent)
                        / (1.0 + float(np.hypot(*up.v))))
        m = entropy_admissible(up, down, it, params)
        fails += (not m.ok) or min(m.margins.values()) <= 0
        ref = scan_downstream_density(rho, vn, params.gamma, rho_max=30 * rho * max(1.0, vn / c),
                                      step=1e-3 * rho)
        worst_scan = max(worst_scan, abs(down.rho - ref))
    ok = worst_rh <= 1e-10 and worst_tau <= 1e-14 and fails == 0 and worst_scan <= 1e-8
    report(2, ok, f"R-H {worst_rh:.1e}, rel |dv.tau| {worst_tau:.1e}, entropy failures {fails}, "
                  f"scan oracle {worst_scan:.1e}", t0)


def test_criterion_03_sonic_degeneracy():
    t0 = time.perf_counter()
    worst = 0.0
    for g in (1.1, 1.4, 5.0 / 3.0, 3.0):
        params = GasParams(g)
        for rho in (0.3, 1.0, 4.0):
            c = params.sound_speed(rho)
            it = OrientedInterface((0, 0), (0.6, 0.8))
            for f in (1.0, 1.0 + 1e-12):
                up = PointState(rho, f * c * it.normal + 0.7 * it.tangent)
                down = downstream_state(up, it, params)
                worst = max(worst, (down.rho - rho) / rho)
    report(3, worst <= 1e-6, f"max relative shock strength at v.nu = c: {worst:.1e} (tol 1e-6)", t0)


def test_criterion_04_determinant_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(104)
    worst = 0.0
    for _ in range(10_000):
        _, d = shock_point_sample(rng)
        det = np.linalg.det(shock_vorticity_system(d)[0])
        ref = printed_system_determinant(d)
        worst = max(worst, abs(det - ref) / abs(ref))
    report(4, worst <= 1e-10,
           f"det vs rho v2 (c^2 - v2^2)^2 |v|^4: max rel diff {worst:.2e} (tol 1e-10)", t0)


def test_criterion_05_closed_form_vorticity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(105)
    worst, zero_ok = 0.0, True
    for _ in range(10_000):
        _, d = shock_point_sample(rng)
        om = shock_vorticity_closed_form(d)
        ref = solve_shock_vorticity(d)[2]
        worst = max(worst, abs(om - ref) / max(abs(ref), 1e-300))
    for _ in range(100):
        _, d = shock_point_sample(rng)
        d0 = type(d)(d.rho, d.v, d.rho1, d.v_minus, d.p, d.p1, d.c, 0.0)
        zero_ok &= shock_vorticity_closed_form(d0) == 0.0
    params = G14
    it = OrientedInterface((0, 0), (0, 1))
    up = PointState(1.0, (0.0, 2.0))
    down = downstream_state(up, it, params)
    zero_ok &= shock_vorticity_closed_form(
        type(d).from_states(down.rho, down.v, 1.0, up.v, 0.9, params)) == 0.0
    report(5, worst <= 1e-10 and zero_ok,
           f"closed form vs 3x3 solve max rel {worst:.1e}; exact zeros {'ok' if zero_ok else 'broken'}", t0)


def test_criterion_06_gradient_back_substitution():
    t0 = time.perf_counter()
    rng = np.random.default_rng(106)
    worst = 0.0
    for _ in range(10_000):
        params, rho, v, gr, om = gradient_sample(rng)
        J = velocity_gradient_from_state(rho, v, gr, om, params)
        res, _ = gradient_residuals(J, rho, v, gr, om, params)
        worst = max(worst, float(np.max(np.abs(res))))
    report(6, worst <= 1e-12, f"max scaled residual {worst:.1e} (tol 1e-12)", t0)


def test_criterion_07_critical_angles():
    t0 = time.perf_counter()
    crit = sonic_angle(1.0, 2.0, G14)
    td, ts = crit.detachment, crit.sonic
    above = solve_state2(1.0, 2.0, G14, td + 1e-3)
    ok = above.weak.state.rho < above.strong.state.rho and above.weak.state.rho > 2.0
    try:
        solve_state2(1.0, 2.0, G14, td - 1e-3)
        ok = False
    except DetachedError:
        pass
    m_lo = solve_state2(1.0, 2.0, G14, ts - 1e-3).weak.mach(G14) - 1.0
    m_hi = solve_state2(1.0, 2.0, G14, ts + 1e-3).weak.mach(G14) - 1.0
    ok &= m_lo * m_hi < 0
    report(7, bool(ok), f"theta_d = {math.degrees(td):.6f} deg, theta_s = {math.degrees(ts):.6f} deg; "
                        f"|v2|/c2 - 1 across theta_s: {m_lo:+.2e} / {m_hi:+.2e}", t0)


def _flux_checks_ok(rep):
    keys = [k for k in rep.checks if k.startswith("flux_sign") or k.startswith("sonic_flux")]
    return bool(keys) and all(rep.checks[k].ok for k in keys), len(keys)


def test_criterion_08_inventories():
    t0 = time.perf_counter()
    rad = math.radians
    rr = build_regular_reflection_nonsym(G14, 1.0, 2.0, rad(60), rad(65))
    pr = build_prandtl(G14, 1.0, 2.0, rad(10))
    inv_rr, inv_pr = rr.inventory(), pr.inventory()
    ok = inv_rr["N1"] == 2 and inv_rr["N2"] == 3 and inv_pr == {"M": 3, "N1": 1, "N2": 3}
    details = []
    for name, cfg in (("rr-nonsym", rr), ("prandtl", pr)):
        rep = validate_admissible_structure(cfg)
        fl, n = _flux_checks_ok(rep)
        ok &= rep.ok and fl
        details.append(f"{name} valid={rep.ok} flux checks={n}")
    report(8, bool(ok), f"rr-nonsym {inv_rr}, prandtl {inv_pr}; " + ", ".join(details), t0)


def test_criterion_09_lighthill_gate():
    t0 = time.perf_counter()
    G5 = GasParams(5.0)
    ok = True
    lighthill_gate(1.0, 1.5, G5)
    build_lighthill(G5, 1.0, 1.5, math.radians(30))
    msg = ""
    try:
        lighthill_gate(1.0, 2.0, G14)
        ok = False
    except PreconditionError as exc:
        msg = str(exc)
        ok &= "0 < xi1_0 < c1" in msg
    report(9, ok, f"accepted gamma=5 data; rejection message: {msg!r}", t0)


def test_criterion_10_commutator():
    t0 = time.perf_counter()
    n = 256
    h = 1.0 / n
    eps = [1 / 8, 1 / 16, 1 / 32, 1 / 64]
    b = GridField2D.unit_square(n, lambda x, y: np.hypot(x - 0.43, y - 0.57))
    u = GridField2D.unit_square(n, lambda x, y: np.sin(2 * np.pi * x) * np.cos(3 * y) + x * y)
    c = GridField2D.unit_square(n, lambda x, y: 2.5 + 0 * x)
    const_max, dec_max = 0.0, 0.0
    for e in eps:
        k = make_mollifier(e, h)
        for axis in (0, 1):
            const_max = max(const_max, lp_norm(commutator(c, u, axis, k), np.inf, SUB))
            A = commutator(b, u, axis, k)
            I1, I2, I3, I4 = commutator_decomposition(b, u, axis, k)
            dec_max = max(dec_max, lp_norm(I1 + I2 + I3 + I4 - A, np.inf, SUB))
    table = commutator_study(b, u, eps)
    norms = [r[1] for r in table]
    decreasing = all(a > bb for a, bb in zip(norms, norms[1:])) and norms[-1] <= 0.1 * norms[0]
    rng = np.random.default_rng(110)
    emp, bound = 0.0, math.inf
    for _ in range(50):
        bb, uu = random_pair(rng, n)
        for row in commutator_study(bb, uu, eps):
            emp = max(emp, row[3])
            bound = min(bound, row[4])
    ok = const_max <= 1e-12 and dec_max <= 1e-10 and decreasing and emp <= bound
    report(10, ok, f"const-b {const_max:.1e}, decomposition {dec_max:.1e}, L1 table "
                   f"{', '.join(f'{v:.2e}' for v in norms)}; empirical constant {emp:.3f} <= {bound:.3f}", t0)


def test_criterion_11_reflection():
    t0 = time.perf_counter()
    theta = 1.75 * math.pi
    N = 160
    h = 2.0 / N

    def inside(x, y):
        return np.mod(np.arctan2(y, x), 2 * np.pi) < theta
    vx = GridField2D.from_function(lambda x, y: np.sin(3 * x) + y, (-1, -1), h, N, N, mask=inside)
    vy = GridField2D.from_function(lambda x, y: np.cos(2 * x) * (1 + y), (-1, -1), h, N, N, mask=inside)
    spec = ReflectionSpec((0, 0), (1, 0), (0, 1), corner=(0, 0), corner_angle=theta)
    r, eps = 0.25, 0.1
    L = exclusion_factor(theta)
    ex, ey = reflect_extend_vector(vx, vy, spec, r)
    k = make_mollifier(eps, h)
    xs = np.linspace(L * r + eps + 2 * h, 1 - eps - 2 * h, 41)
    normal = mollify_at(ey, k, np.stack([xs, np.zeros_like(xs)], axis=1))
    worst = float(np.max(np.abs(normal)))
    ok = worst <= 1e-12 and abs(L - 1 / abs(math.sin(theta))) < 1e-14
    report(11, ok, f"L = {L:.6f}, max |normal component| on segment {worst:.1e} (tol 1e-12)", t0)


def _manufactured():
    x, y = XI1, XI2
    return AnalyticField.from_sympy(1 + 0.1 * sp.sin(x) * sp.cos(y), 0.3 - x + 0.2 * y ** 2,
                                    -0.1 - y + 0.1 * sp.sin(2 * x))


def test_criterion_12_weak_identity():
    t0 = time.perf_counter()
    cfg = build_regular_reflection(G14, 1.0, 2.0, math.radians(60))
    patch = QuadPatch.from_configuration(cfg)
    fld = _manufactured()
    ok, finals = True, []
    for pair in (quadratic_pair(), renorm_pair_truncated(1.1)):
        for zeta in (sp.Integer(1), sp.exp(-XI1 ** 2) * (1 + XI2)):
            res = [abs(r[2]) for r in identity_refinement(patch, fld, pair, zeta, G14, (2, 4, 8, 16))]
            ok &= all(b < a or b <= 1e-13 for a, b in zip(res, res[1:])) and res[-1] <= 1e-10
            finals.append(res[-1])
    const = AnalyticField.from_constant_state(cfg.states["2"])
    zero = weak_identity_residual(patch, const, quadratic_pair(), 1 + XI1 * XI2)
    ok &= zero == 0.0
    report(12, bool(ok), f"final defects {max(finals):.1e} (tol 1e-10); constant state {zero!r}", t0)


def test_criterion_13_truncation():
    t0 = time.perf_counter()
    x, y = XI1, XI2
    bump = 12 * sp.exp(-((x - 0.5) ** 2 + (y - 0.5) ** 2) / 0.05)
    fld = AnalyticField.from_sympy(sp.Integer(1), -x + bump * (y - 0.5), -y - bump * (x - 0.5))
    from shockreg.config.curves import CurveKind, LineSegment
    p = [(0, 0), (1, 0), (1, 1), (0, 1)]
    patch = QuadPatch([LineSegment(p[i], p[(i + 1) % 4], CurveKind.STRAIGHT_WALL) for i in range(4)], 32)
    probe = truncation_limit_study(fld, patch, [2.0], sides="all")
    s_in, s_bd = probe["sup_volume"], probe["sup_boundary"]
    Ms = [1.5, 2.0, 0.5 * (s_in + max(s_bd, 1.0)), s_in, 1.5 * s_in, 10 * s_in]
    out = truncation_limit_study(fld, patch, Ms, sides="all")
    ok = True
    for M, vol, bnd in out["rows"]:
        if M >= s_in:
            ok &= vol == 0.0
        if M >= s_bd:
            ok &= bnd == out["quadratic_boundary"]
    t = np.random.default_rng(113).uniform(-50, 50, 10_000)
    for M in (1.01, 2.0, 7.5):
        ok &= bool(np.all(np.abs(renorm_pair_truncated(M).g(t)) <= 2 * t * t))
    report(13, bool(ok), f"sup|X| volume {s_in:.3f}, boundary {s_bd:.3f}; rows {len(out['rows'])}", t0)


def test_criterion_14_contradiction():
    t0 = time.perf_counter()
    cfg = build_regular_reflection(G14, 1.0, 2.0, math.radians(60))
    rep = contradiction_functional(cfg)
    straight = build_regular_reflection(G14, 1.0, 2.0, math.radians(60), straight_shock=True)
    z = contradiction_functional(straight, check=False).value
    hom = max(abs(contradiction_functional(cfg, curvature_scale=lam).value - lam ** 2 * rep.value)
              / abs(lam ** 2 * rep.value) for lam in (0.5, 2.0, 3.0))
    ok = z == 0.0 and rep.value < 0 and hom <= 1e-10
    report(14, ok, f"straight {z!r}, curved {rep.value:.4e} (margin {rep.margin:.4e}), "
                   f"homogeneity defect {hom:.1e}", t0)


def test_criterion_15_cli_determinism():
    t0 = time.perf_counter()
    runs = [["vorticity", "--n-samples", "200", "--seed", "11"],
            ["commutator", "--grid-n", "64", "--n-pairs", "2", "--eps-schedule", "0.125,0.0625",
             "--seed", "11"],
            ["reflect", "--kind", "rr-nonsym"], ["contradict"], ["angles", "--n-angles", "12"]]
    ok = True
    with tempfile.TemporaryDirectory() as tmp:
        for i, argv in enumerate(runs):
            digests = []
            for rep in range(2):
                out = os.path.join(tmp, f"{i}_{rep}")
                ok &= cli_main(argv + ["--out", out]) == 0
                digests.append({f: hashlib.sha256(open(os.path.join(out, f), "rb").read()).hexdigest()
                                for f in sorted(os.listdir(out))})
            ok &= digests[0] == digests[1] and bool(digests[0])
    report(15, ok, f"{len(runs)} subcommands run twice with identical outputs", t0)


if __name__ == "__main__":
    import contextlib
    import io
    failed = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_criterion")):
        buf = io.StringIO()
        try:
            with contextlib.redirect_stdout(buf):
                fn()
        except AssertionError:
            failed += 1
        except Exception as exc:  # an unexpected error still yields a FAIL line
            failed += 1
            RESULTS.append(f"{name}: FAIL  error {exc!r}")
        print(RESULTS[-1])
    sys.exit(1 if failed else 0)
