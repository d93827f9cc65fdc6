"""Acceptance gate: one test per criterion, at its stated tolerance.

Each test prints a single `[criterion NN] PASS/FAIL` line (run with -s or
read the e.g. `pytest -v` test names).  Expected values come from hand
Koszul computations, constant-curvature closed forms, Richardson finite
differences, or analytic constructions; nothing here re-derives a value
through the code path it checks.
"""

import math

import numpy as np

from conftest import fd_gradient, fd_second, random_expression
from torseform import (MetricField, builtin_scene, builtin_names,
                       christoffel, classify, eval_float, eval_jet,
                       fit_tanh_integral, frames, gauss_equation_residual,
                       geodesic_unit_check, parse, rectifying_scene, riemann,
                       run, sample_ambient_points, sample_parameter_points,
                       shape_operator, trace_integral_curve,
                       verify_ambient_decomposition, verify_normal_vanishes,
                       verify_tangential_vanishes, warping_ode_residual,
                       build_warped_ambient, lambda_log_derivative)
from torseform.runner import exit_code


def criterion(number, description, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"[criterion {number:02d}] {status} {description} {detail}".rstrip())
    assert ok, f"criterion {number}: {description} {detail}"


def test_criterion_01_radial_axis_classification():
    scene = builtin_scene("radial-r4")
    pts = sample_ambient_points(scene, 200, np.random.default_rng(scene.seed))
    c = classify(scene.metric, scene.field, pts, scene.tolerances)
    worst = 0.0
    for rep in c.reports:
        expected = 1.0 / np.linalg.norm(rep.point)
        worst = max(worst, abs(rep.f - expected) / abs(expected))
    criterion(1, "radial-r4 anti-torqued with f = 1/|x| (rel 1e-8)",
              c.verdict == "anti-torqued" and worst <= 1e-8,
              f"verdict={c.verdict}, worst rel dev={worst:.3e}")


def test_criterion_02_geodesic_unit_property():
    scene = builtin_scene("radial-r4")
    pts = sample_ambient_points(scene, 200, np.random.default_rng(scene.seed))
    c = classify(scene.metric, scene.field, pts, scene.tolerances)
    value = geodesic_unit_check(scene.metric, scene.field, pts, c,
                                scene.tolerances)
    criterion(2, "radial-r4 max |grad_V V| <= 1e-9", value <= 1e-9,
              f"max={value:.3e}")


def test_criterion_03_clifford_torus():
    scene = builtin_scene("clifford-torus")
    us = sample_parameter_points(scene, 50, np.random.default_rng(scene.seed))
    rep = verify_tangential_vanishes(scene.immersion, scene.metric,
                                     scene.field, us, scene.tolerances)
    ok = (rep.max_v_tan <= 1e-10 and rep.max_umbilic_defect <= 1e-8
          and rep.max_normal_derivative <= 1e-8)
    criterion(3, "Clifford torus: V tangential residual, A+Id, D_X V_perp", ok,
              f"v_tan={rep.max_v_tan:.3e}, umbilic={rep.max_umbilic_defect:.3e}, "
              f"D={rep.max_normal_derivative:.3e}")


def test_criterion_04_tangent_developable():
    scene = builtin_scene("tangent-developable")
    us = sample_parameter_points(scene, 50, np.random.default_rng(scene.seed))
    rep = verify_normal_vanishes(scene.immersion, scene.metric, scene.field,
                                 us, scene.tolerances)
    ok = (rep.max_v_nor <= 1e-8 and rep.max_det <= 1e-8
          and rep.max_sectional_mismatch <= 1e-7
          and rep.max_ambient_sectional <= 1e-7
          and rep.max_intrinsic_sectional <= 1e-7)
    criterion(4, "tangent developable: V_perp=0, det A=0, K~ = K = 0", ok,
              f"v_nor={rep.max_v_nor:.3e}, det={rep.max_det:.3e}, "
              f"dK={rep.max_sectional_mismatch:.3e}")


def test_criterion_05_cone():
    scene = builtin_scene("cone")
    us = sample_parameter_points(scene, 100, np.random.default_rng(scene.seed))
    rep = verify_normal_vanishes(scene.immersion, scene.metric, scene.field,
                                 us, scene.tolerances)
    ok = rep.max_v_nor <= 1e-8 and rep.max_det <= 1e-8
    criterion(5, "cone: V tangent and det A <= 1e-8 at 100 points", ok,
              f"v_nor={rep.max_v_nor:.3e}, det={rep.max_det:.3e}")


def test_criterion_06_rectifying_example():
    scene = builtin_scene("rectifying-psi")
    us = sample_parameter_points(scene, 50, np.random.default_rng(scene.seed))
    rect = rectifying_scene(scene.immersion, scene.metric, scene.field, us,
                            scene.tolerances)
    curve = trace_integral_curve(scene.immersion, scene.metric, scene.field,
                                 [1.0, 3.0], length=1.6, step=0.005,
                                 tols=scene.tolerances)
    ode = warping_ode_residual(curve, scene.tolerances)
    fit = fit_tanh_integral(curve, scene.tolerances)
    s_param = np.array([c.u[0] for c in curve.samples])
    closed_form = s_param / np.sqrt(1.0 + s_param ** 2)
    model_dev = float(np.max(np.abs(fit.model - closed_form)))
    ok = (rect.mode == "proper-rectifying" and rect.max_residual <= 1e-7
          and rect.all_proper and rect.max_a_vperp <= 1e-8
          and ode <= 1e-6 and fit.deviation <= 1e-6 and model_dev <= 1e-6)
    criterion(6, "rectifying-psi: residual, properness, A_Vperp, ODE, tanh fit",
              ok, f"res={rect.max_residual:.3e}, A={rect.max_a_vperp:.3e}, "
                  f"ode={ode:.3e}, model dev={model_dev:.3e}")


def test_criterion_07_warped_round_trip():
    flat2 = [["1"], ["0", "1"]]
    worst_f = 0.0
    all_ok = True
    for lam in ("exp(x1)", "cosh(x1)", "2+sin(x1)"):
        scene = build_warped_ambient(lam, flat2, (0.0, 1.0),
                                     [(-1.0, 1.0), (-1.0, 1.0)])
        pts = sample_ambient_points(scene, 50, np.random.default_rng(scene.seed))
        c = classify(scene.metric, scene.field, pts, scene.tolerances)
        if c.verdict != "anti-torqued":
            all_ok = False
            break
        for rep, p in zip(c.reports, pts):
            worst_f = max(worst_f, abs(rep.f - lambda_log_derivative(lam, p[0])))
        decomp = verify_ambient_decomposition(scene.metric, scene.field, pts,
                                              c, scene.tolerances)
        all_ok = all_ok and decomp.passed and worst_f <= 1e-8
    criterion(7, "warped round trip for exp, cosh, 2+sin: f = dlog(lambda)/ds "
                 "and decomposition items (a)-(d)", all_ok,
              f"worst |f - dloglam|={worst_f:.3e}")


def test_criterion_08_gauss_equation_on_immersed_builtins():
    worst = 0.0
    worst_scene = ""
    for name in builtin_names():
        scene = builtin_scene(name)
        if scene.immersion is None:
            continue
        rng = np.random.default_rng(scene.seed)
        us = sample_parameter_points(scene, 50, rng)
        for u in us:
            vecs = rng.standard_normal((4, scene.immersion.n))
            r = gauss_equation_residual(scene.immersion, scene.metric, u,
                                        *vecs, scene.tolerances)
            if r > worst:
                worst, worst_scene = r, name
    criterion(8, "Gauss equation residual <= 1e-7 at 50 points per immersed "
                 "built-in", worst <= 1e-7, f"worst={worst:.3e} ({worst_scene})")


def test_criterion_09_unit_sphere_negative_control():
    scene = builtin_scene("unit-sphere")
    report = run(scene, points=50)
    rect = next(c for c in report.checks if c.name == "rectifying")
    us = sample_parameter_points(scene, 20, np.random.default_rng(scene.seed))
    worst_aid = 0.0
    for u in us:
        pk = frames(scene.immersion, scene.metric, u, field=scene.field,
                    tols=scene.tolerances)
        a = shape_operator(pk, pk.v_nor, scene.tolerances)
        worst_aid = max(worst_aid, float(np.max(np.abs(a + np.eye(2)))))
    ok = (rect.status == "fail" and rect.residual >= 0.99
          and exit_code(report) == 1 and worst_aid <= 1e-8)
    criterion(9, "unit sphere fails rectifying with residual >= 0.99 and "
                 "A_Vperp = -Id", ok,
              f"residual={rect.residual:.3f}, |A+Id|={worst_aid:.3e}")


def test_criterion_10_oracle_equivalence():
    failures = []

    # Christoffel closed forms (hand Koszul computations)
    warped = MetricField([["1"], ["0", "exp(2*x1)"]])
    g = christoffel(warped.at([0.7, 0.1], order=1))
    if abs(g[1, 0, 1] - 1.0) > 1e-9 or abs(g[0, 1, 1] + math.exp(1.4)) > 1e-9:
        failures.append("warped christoffel")

    sphere = MetricField([["1"], ["0", "sin(x1)^2"]])
    th = np.pi / 4
    gs = christoffel(sphere.at([th, 0.3], order=1))
    if abs(gs[0, 1, 1] + 0.5) > 1e-9 or abs(gs[1, 0, 1] - 1.0 / math.tan(th)) > 1e-9:
        failures.append("sphere christoffel")

    polar = MetricField([["1"], ["0", "x1^2"]])
    gp = christoffel(polar.at([1.7, 0.4], order=1))
    if abs(gp[0, 1, 1] + 1.7) > 1e-9 or abs(gp[1, 0, 1] - 1.0 / 1.7) > 1e-9:
        failures.append("polar christoffel")

    # curvature via the constant-curvature formula on the round sphere
    rng = np.random.default_rng(100)
    for _ in range(10):
        mp = sphere.at([rng.uniform(0.4, 2.7), rng.uniform(0, 6)], order=2)
        X, Y, Z = rng.standard_normal((3, 2))
        expected = mp.inner(Y, Z) * X - mp.inner(X, Z) * Y
        if np.max(np.abs(riemann(mp, X, Y, Z) - expected)) > 1e-9:
            failures.append("sphere curvature")
            break

    # second fundamental form on spheres: h(e_i, e_j) = -delta_ij N / r
    euclid3 = MetricField.euclidean(3)
    for r in (1.0, 2.0):
        imm_src = [f"{r}*sin(u1)*cos(u2)", f"{r}*sin(u1)*sin(u2)", f"{r}*cos(u1)"]
        from torseform import Immersion
        pk = frames(Immersion(imm_src, n=2), euclid3, [1.1, 0.4])
        outward = pk.x / np.linalg.norm(pk.x)
        sign = np.sign(pk.normals[0] @ outward)
        expected = -np.eye(2) / r
        if np.max(np.abs(sign * pk.h_frame[0] - expected)) > 1e-9:
            failures.append(f"sphere h (r={r})")

    # jet derivatives vs Richardson finite differences, 100 random pairs
    rng = np.random.default_rng(4242)
    checked = 0
    worst_fd = 0.0
    while checked < 100:
        nvars = int(rng.integers(1, 4))
        src = random_expression(rng, nvars)
        ast = parse(src)
        point = rng.uniform(-2.0, 2.0, size=nvars)
        names = [f"x{i + 1}" for i in range(nvars)]
        fn = lambda x: eval_float(ast, dict(zip(names, map(float, x))))
        jet = eval_jet(ast, point, 2)
        for i in range(nvars):
            ref = fd_gradient(fn, point, i)
            dev = abs(jet.gradient()[i] - ref) / max(1.0, abs(ref))
            worst_fd = max(worst_fd, dev)
            for j in range(i, nvars):
                ref2 = fd_second(fn, point, i, j)
                dev2 = abs(jet.hessian()[i, j] - ref2) / max(1.0, abs(ref2))
                worst_fd = max(worst_fd, dev2)
        checked += 1
    if worst_fd > 1e-6:
        failures.append(f"jet-vs-FD ({worst_fd:.2e})")

    criterion(10, "oracle equivalence: Koszul forms, curvature, h, jets vs FD",
              not failures, f"failures={failures}, worst fd dev={worst_fd:.3e}")
