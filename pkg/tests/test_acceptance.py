"""Acceptance criteria, one test per criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
Tolerances are pinned here, not configurable.
"""

import math
import time

import numpy as np

from qzap import (
    ApGenerator,
    DynamicSystem,
    GridFunction,
    LogSignal,
    LyapunovSpec,
    QLattice,
    ZLattice,
    ap_classify,
    certificate,
    feasible_r0_interval,
    gronwall_verify,
    lift,
    lower,
    lyapunov_verify,
    picard_solve,
    q_derivative_function,
    q_integral,
    qpow,
    residual,
    solve_forward,
    stability_probe,
    transform_rhs,
    translation_set,
    ts_exponential,
)
from qzap.apgen import (
    check_composition_closure,
    check_product_closure,
    check_quotient_closure,
    check_sum_closure,
    check_uniform_limit_closure,
    sup_translation_diff,
)
from qzap.lattice import mu_array
from qzap import serialize
from qzap.cli import main as cli_main

from _builders import (
    PERIOD,
    scalar_fixed_point_oracle,
    scalar_tanh_spec,
    three_neuron_periodic_spec,
    three_neuron_spec,
)


def report(number, ok, detail):
    print(f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


QS = (1.5, 2.0, 3.0)


def test_criterion_1_calculus_kernel():
    """Product rule + fundamental theorem, 1000 random grids, <= 1e-9 rel."""
    rng = np.random.default_rng(101)
    lats = {q: QLattice(q, -20, 20) for q in QS}
    mus = {q: mu_array(lats[q]) for q in QS}
    worst = 0.0
    t0 = time.perf_counter()
    for i in range(1000):
        q = QS[i % 3]
        lat = lats[q]
        f = GridFunction(lat, rng.uniform(1.0, 2.0, lat.size))
        g = GridFunction(lat, rng.uniform(1.0, 2.0, lat.size))
        df = q_derivative_function(f).values[:, 0]
        dg = q_derivative_function(g).values[:, 0]
        fg = GridFunction(lat, f.values * g.values)
        dfg = q_derivative_function(fg).values[:, 0]
        term1 = f.values[1:, 0] * dg
        term2 = g.values[:-1, 0] * df
        scale = np.abs(term1) + np.abs(term2) + np.abs(dfg)
        worst = max(worst, float(np.max(np.abs(dfg - term1 - term2) / scale)))

        dfun = q_derivative_function(f)
        got = q_integral(dfun, -20, 19)[0]
        # telescopes over n in [-20, 18]: f(q**19) - f(q**-20)
        expect = f.values[-2, 0] - f.values[0, 0]
        ftc_scale = max(abs(f.values[-2, 0]), abs(f.values[0, 0]))
        worst = max(worst, abs(got - expect) / ftc_scale)
    elapsed = time.perf_counter() - t0
    report(1, worst <= 1e-9 and elapsed < 5.0,
           f"max relative error {worst:.3e} (<= 1e-9), runtime {elapsed:.2f}s (< 5s)")


def test_criterion_2_exponential_and_gronwall():
    """Exponential recurrence/semigroup <= 8 ulp; 200 Gronwall instances."""
    rng = np.random.default_rng(102)
    worst_ulps = 0.0

    zl = ZLattice(-12, 12)
    p_z = GridFunction(zl, rng.uniform(-0.5, 0.5, zl.size))
    ql = QLattice(2.0, -10, 10)
    p_q = GridFunction(ql, rng.uniform(-0.5, 0.5, ql.size) / mu_array(ql))
    for lat, p in ((zl, p_z), (ql, p_q)):
        mus = mu_array(lat)
        for _ in range(150):
            s = int(rng.integers(lat.n_min, lat.n_max))
            n = int(rng.integers(lat.n_min, lat.n_max))
            lhs = ts_exponential(lat, p, n + 1, s)
            step = 1.0 + mus[n - lat.n_min] * p.values[n - lat.n_min, 0]
            rhs = step * ts_exponential(lat, p, n, s)
            worst_ulps = max(worst_ulps,
                             abs(lhs - rhs) / np.spacing(abs(rhs) + 1e-300))
        for _ in range(100):
            n, s, r = (int(v) for v in
                       rng.integers(lat.n_min, lat.n_max + 1, size=3))
            lhs = ts_exponential(lat, p, n, s) * ts_exponential(lat, p, s, r)
            ref = ts_exponential(lat, p, n, r)
            worst_ulps = max(worst_ulps,
                             abs(lhs - ref) / np.spacing(abs(ref) + 1e-300))

    passes = 0
    for case in range(200):
        q = QS[case % 3]
        lat = QLattice(q, -6, 6) if case % 2 == 0 else ZLattice(-8, 8)
        mus = mu_array(lat)
        p_vals = rng.uniform(0.0, 0.4, lat.size) / mus
        f_vals = rng.uniform(0.0, 0.5, lat.size)
        slack = rng.uniform(0.0, 0.1, lat.size)
        y_vals = np.empty(lat.size)
        y_vals[0] = rng.uniform(0.5, 1.5)
        for k in range(lat.size - 1):
            y_vals[k + 1] = ((1.0 + mus[k] * p_vals[k]) * y_vals[k]
                             + mus[k] * f_vals[k] - slack[k])
        verdict = gronwall_verify(
            GridFunction(lat, y_vals), GridFunction(lat, p_vals),
            GridFunction(lat, f_vals)).verdict
        passes += verdict == "PASS"
    report(2, worst_ulps <= 8.0 and passes == 200,
           f"worst exponential identity error {worst_ulps:.2f} ulp (<= 8), "
           f"Gronwall passes {passes}/200")


def test_criterion_3_transform_equivalence():
    """Solve-then-lift vs lift-then-solve to 1e-9 over 50 steps x 100 systems."""
    rng = np.random.default_rng(103)
    worst = 0.0
    for case in range(100):
        q = QS[case % 3]
        dim = int(rng.integers(1, 4))
        alpha = rng.uniform(-0.9, -0.1, dim)
        beta = rng.uniform(-0.5, 0.5, dim)
        lam = rng.uniform(0.5, 3.0)
        x0 = rng.uniform(-1.0, 1.0, dim)
        log_q = math.log(q)

        def f(t, x, d, alpha=alpha, beta=beta, lam=lam, q=q, log_q=log_q):
            n = math.log(t) / log_q
            return (alpha * x + beta * np.cos(lam * n)) / ((q - 1.0) * t)

        # oracle: step the quantum-scale recurrence x(qt) = x + mu(t) f(t, x)
        x_q = x0.copy()
        quantum = [x_q.copy()]
        for n in range(0, 50):
            t = qpow(q, n)
            x_q = x_q + (q - 1.0) * t * f(t, x_q, ())
            quantum.append(x_q.copy())

        sys = DynamicSystem(dim=dim, rhs=transform_rhs(f, q))
        traj = solve_forward(sys, LogSignal(0, 0, x0[None, :]), 50)
        for n in range(0, 51):
            gap = np.max(np.abs(traj.value(n) - quantum[n]))
            scale = 1.0 + np.max(np.abs(quantum[n]))
            worst = max(worst, float(gap / scale))

    rng2 = np.random.default_rng(104)
    exact = True
    for q in QS:
        lat = QLattice(q, -15, 15)
        f_grid = GridFunction(lat, rng2.standard_normal((lat.size, 2)))
        back = lower(lift(f_grid), q)
        exact = exact and np.array_equal(back.values, f_grid.values)
    report(3, worst <= 1e-9 and exact,
           f"max pipeline disagreement {worst:.3e} (<= 1e-9), "
           f"lift/lower round trip exact: {exact}")


def test_criterion_4_translation_set_oracle():
    """Pinned shift-set facts for the three reference signals."""
    ok = True
    details = []
    f5 = ApGenerator.scalar(0.0, [(1.0, 2 * math.pi / 5, 0.0)])
    for eps in (0.5, 0.1, 1e-6):
        rep = translation_set(f5, eps, tau_range=(-100, 100), window=(-500, 500))
        ok = ok and rep.inclusion_length == 5
    details.append("period-5 inclusion length 5 at eps 0.5/0.1/1e-6")

    ns = np.arange(-500, 501)
    brute = float(np.max(np.abs(np.cos(ns + 44) - np.cos(ns))))
    fc = ApGenerator.scalar(0.0, [(1.0, 1.0, 0.0)])
    rep = translation_set(fc, 0.02, tau_range=(-100, 100), window=(-500, 500))
    ok = ok and brute < 0.02 and 44 in rep.members
    ok = ok and rep.sup_diffs[44 - rep.tau_min] == brute
    details.append(f"tau=44 member at eps 0.02 (brute sup {brute:.5f})")

    lin = LogSignal.from_callable(-600, 600, lambda n: float(n))
    rep = translation_set(lin, 0.5, tau_range=(-100, 100), window=(-500, 500))
    ok = ok and rep.members == (0,) and math.isinf(rep.inclusion_length)
    details.append("linear signal: members {0}, inclusion length inf")
    report(4, ok, "; ".join(details))


def test_criterion_5_closure_inequalities():
    """Sum/product/composition/uniform-limit (+quotient) on 500 random pairs."""
    rng = np.random.default_rng(105)
    window = (-80, 80)
    violations = 0
    for _ in range(500):
        def rand_gen():
            terms = [
                (rng.uniform(0.1, 1.0), rng.uniform(0.3, 3.0),
                 rng.uniform(0.0, 6.28))
                for _ in range(int(rng.integers(1, 4)))
            ]
            return ApGenerator.scalar(rng.uniform(-0.5, 0.5), terms)

        f, g = rand_gen(), rand_gen()
        tau = int(rng.integers(-60, 61))
        eps = max(sup_translation_diff(f, tau, window),
                  sup_translation_diff(g, tau, window)) * (1 + 1e-9) + 1e-12

        checks = [
            check_sum_closure(f, g, tau, eps, window),
            check_product_closure(f, g, tau, eps, window),
            check_composition_closure(f, np.tanh, 1.0, tau, eps, window),
        ]
        bump = (eps / 4.0, rng.uniform(0.3, 3.0), rng.uniform(0.0, 6.28))
        limit = ApGenerator.scalar(f.components[0][0],
                                   f.components[0][1] + (bump,))
        checks.append(check_uniform_limit_closure(limit, f, tau, 3 * eps, window))

        g_pos = ApGenerator.scalar(
            rng.uniform(2.0, 3.0),
            [(rng.uniform(0.05, 0.3), rng.uniform(0.3, 3.0),
              rng.uniform(0.0, 6.28))],
        )
        m_lower = 1.5
        eps_q = (sup_translation_diff(g_pos, tau, window) * (1 + 1e-9)
                 / m_lower**2 + 1e-12)
        checks.append(check_quotient_closure(g_pos, tau, eps_q, m_lower, window))

        for chk in checks:
            if not (chk.premise_ok and chk.holds):
                violations += 1
    report(5, violations == 0,
           f"{violations} violations across 500 randomized pairs and shifts")


def test_criterion_6_hopfield_certificate():
    """Hand-algebra constants of the scalar network to 1e-12."""
    spec = scalar_tanh_spec()
    cert = certificate(spec, 1.0, (-50, 50))
    lo, hi = feasible_r0_interval(spec, (-50, 50))
    golden_lo = (3.0 - math.sqrt(5.0)) / 2.0
    golden_hi = (3.0 + math.sqrt(5.0)) / 2.0
    ok = (
        abs(cert.eta_bar[0] - 0.4) <= 1e-12
        and abs(cert.L - 0.2) <= 1e-12
        and abs(cert.rho - 0.8) <= 1e-12
        and abs(cert.eta[0] - 0.3) <= 1e-12
        and cert.feasible
        and abs(lo - golden_lo) <= 1e-12
        and abs(hi - golden_hi) <= 1e-12
    )
    report(6, ok,
           f"eta_bar={cert.eta_bar[0]}, L={cert.L}, rho={cert.rho}, "
           f"r0 interval [{lo:.15f}, {hi:.15f}] vs (3 +- sqrt 5)/2 to 1e-12")


def test_criterion_7_picard_solver():
    """Geometric deltas, bisection-oracle fixed point, uniqueness, < 1 s."""
    spec = scalar_tanh_spec()
    tol = 1e-10
    t0 = time.perf_counter()
    sol, log = picard_solve(spec, 1.0, tol, 200, (-20, 20), tail_tol=1e-12)
    sol2, _ = picard_solve(spec, 1.0, tol, 200, (-20, 20), tail_tol=1e-12,
                           start=1.0)
    res = residual(sol, spec, (-15, 15))
    elapsed = time.perf_counter() - t0

    d0 = log.deltas[0]
    deltas_ok = all(d <= (0.8**k) * d0 + 1e-10
                    for k, d in enumerate(log.deltas))
    xstar = scalar_fixed_point_oracle()
    match = float(np.max(np.abs(sol.values - xstar)))
    gap = float(np.max(np.abs(sol.slice(-20, 20).values
                              - sol2.slice(-20, 20).values)))
    ok = (deltas_ok and match <= 1e-8 and res <= 1e-8 and gap <= 2 * tol
          and elapsed < 1.0)
    report(7, ok,
           f"deltas geometric: {deltas_ok}, |sol - x*| = {match:.2e} (<= 1e-8), "
           f"residual {res:.2e} (<= 1e-8), two-start gap {gap:.2e} (<= 2e-10), "
           f"runtime {elapsed:.2f}s (< 1s)")


def test_criterion_8_ap_solution_evidence():
    """3-neuron two-frequency network: convergence, residual, AP evidence."""
    spec = three_neuron_spec()
    cert = certificate(spec, 1.0, (-700, 700))
    sol, log = picard_solve(spec, 1.0, 1e-9, 200, (-700, 700), tail_tol=1e-12)
    res = residual(sol, spec, (-500, 500))
    result = ap_classify(sol, (0.5, 0.2, 0.1))
    nontrivial = len(result.reports[2].members) < 401

    spec_p = three_neuron_periodic_spec()
    sol_p, log_p = picard_solve(spec_p, 1.0, 1e-9, 200, (-100, 100),
                                tail_tol=1e-12)
    defect = float(np.max(np.abs(
        sol_p.slice(-80, 80).values
        - sol_p.slice(-80 + PERIOD, 80 + PERIOD).values)))
    ok = (cert.rho < 1.0 and log.converged and res <= 1e-8
          and result.verdict == "AP_EVIDENCE" and nontrivial
          and defect <= 1e-8)
    report(8, ok,
           f"rho={cert.rho:.3f} (< 1), residual {res:.2e} (<= 1e-8), "
           f"verdict {result.verdict} at eps 0.5/0.2/0.1, period-{PERIOD} "
           f"defect {defect:.2e} (<= 1e-8)")


def test_criterion_9_lyapunov_machinery():
    """Wedge/Lipschitz/decay verdicts and measured geometric rate."""
    c = 0.4
    sys = DynamicSystem(dim=1, rhs=lambda n, x, d: -c * x)

    def abs_spec(claimed):
        return LyapunovSpec(
            V=lambda n, x, y: float(np.max(np.abs(x - y))),
            wedge_a=lambda r: r, wedge_b=lambda r: r, lip_V=1.0,
            decay_c=claimed,
        )

    rng = np.random.default_rng(109)
    samples = [
        (int(rng.integers(-20, 20)), rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1))
        for _ in range(50)
    ]
    pass_true = lyapunov_verify(abs_spec(c), sys, samples).verdict == "PASS"
    fail_over = lyapunov_verify(abs_spec(1.1 * c), sys, samples).verdict == "FAIL"

    ref = solve_forward(sys, LogSignal(0, 0, np.array([[1.0]])), 40)
    probe = stability_probe(sys, ref, [np.array([0.3])], burn_in=5)
    rate_ok = (probe.verdict == "CONTRACTING"
               and abs(probe.rates[0] - (1.0 - c)) <= 0.05 * (1.0 - c))
    ok = pass_true and fail_over and rate_ok
    report(9, ok,
           f"true decay PASS: {pass_true}, 10% overstated FAIL: {fail_over}, "
           f"measured rate {probe.rates[0]:.6f} within 5% of {1 - c}")


def test_criterion_10_cli_determinism(tmp_path, capsys):
    """Every subcommand byte-identical across runs and equal to the library."""
    def write_doc(name, doc):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(serialize.dumps(doc))
        return str(path)

    def read(outdir, name):
        with open(outdir / name, "rb") as fh:
            return fh.read()

    def run_twice(argv_of):
        dirs = []
        for tag in ("a", "b"):
            outdir = tmp_path / f"{argv_of.__name__}_{tag}"
            assert cli_main(argv_of(str(outdir))) == 0
            dirs.append(outdir)
        names = sorted(p.name for p in dirs[0].iterdir())
        same = all(read(dirs[0], n) == read(dirs[1], n) for n in names)
        return dirs[0], names, same

    gen = ApGenerator.scalar(0.0, [(1.0, 2 * math.pi / 5, 0.0)])
    gen_path = write_doc("gen.json", serialize.generator_doc(gen))
    analyze_cfg = write_doc("analyze_cfg.json", {
        "input": "gen.json", "epsilons": [0.5, 0.1],
        "tau_range": [-30, 30], "window": [-60, 60], "seed": 0,
    })

    def analyze(out):
        return ["analyze", "--config", analyze_cfg, "--out", out, "--seed", "0"]

    out_a, _, same_a = run_twice(analyze)
    lib = ap_classify(gen, (0.5, 0.1), tau_range=(-30, 30), window=(-60, 60))
    match_a = (read(out_a, "analysis.json")
               == serialize.dumps(serialize.classification_doc(lib)).encode())

    lat = QLattice(2.0, -4, 4)
    f_grid = GridFunction.from_callable(lat, lambda t: t + 0.5)
    grid_path = write_doc("grid.json", serialize.grid_function_doc(f_grid))
    transform_cfg = write_doc("transform_cfg.json",
                              {"direction": "lift", "input": "grid.json"})

    def transform(out):
        return ["transform", "--config", transform_cfg, "--out", out,
                "--seed", "0"]

    out_t, _, same_t = run_twice(transform)
    match_t = (read(out_t, "lifted.json")
               == serialize.dumps(serialize.log_signal_doc(lift(f_grid))).encode())

    solve_cfg = write_doc("solve_cfg.json", {
        "system": {"kind": "linear", "A": [[-0.5]]},
        "history": {"n_min": 0, "n_max": 0, "dim": 1,
                    "rows": [{"n": 0, "value": [1.0]}], "zero_value": None},
        "n_end": 20, "seed": 0,
    })

    def solve(out):
        return ["solve", "--config", solve_cfg, "--out", out, "--seed", "0"]

    out_s, _, same_s = run_twice(solve)
    lib_sys = DynamicSystem(dim=1, rhs=lambda n, x, d: np.array([[-0.5]]) @ x)
    lib_traj = solve_forward(lib_sys, LogSignal(0, 0, np.array([[1.0]])), 20)
    match_s = (read(out_s, "trajectory.csv")
               == serialize.trajectory_csv(lib_traj).encode())

    spec = scalar_tanh_spec()
    spec_path = write_doc("spec.json", serialize.hopfield_spec_doc(spec))
    hop_cfg = write_doc("hop_cfg.json", {
        "spec": "spec.json", "r0": 1.0, "window": [-25, 25],
        "tol": 1e-9, "epsilons": [0.5, 0.2], "tau_range": [-10, 10],
        "seed": 0,
    })

    def hopfield_check(out):
        return ["hopfield", "check", "--config", hop_cfg, "--out", out,
                "--seed", "0"]

    def hopfield_solve(out):
        return ["hopfield", "solve", "--config", hop_cfg, "--out", out,
                "--seed", "0"]

    out_hc, _, same_hc = run_twice(hopfield_check)
    cert = certificate(spec, 1.0, (-25, 25))
    cert_doc = serialize.certificate_doc(cert)
    iv = feasible_r0_interval(spec, (-25, 25))
    cert_doc["feasible_r0_interval"] = [iv[0], iv[1]]
    match_hc = (read(out_hc, "certificate.json")
                == serialize.dumps(cert_doc).encode())

    out_hs, _, same_hs = run_twice(hopfield_solve)
    sol, _ = picard_solve(spec, 1.0, 1e-9, 200, (-25, 25))
    match_hs = (read(out_hs, "solution_log.csv")
                == serialize.trajectory_csv(sol).encode())

    reruns = dict(analyze=same_a, transform=same_t, solve=same_s,
                  check=same_hc, hsolve=same_hs)
    lib_match = dict(analyze=match_a, transform=match_t, solve=match_s,
                     check=match_hc, hsolve=match_hs)
    ok = all(reruns.values()) and all(lib_match.values())
    report(10, ok,
           f"rerun byte-identical: {reruns}; library byte match: {lib_match}")
