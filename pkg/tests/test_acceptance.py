"""Acceptance gate: the thirteen headline criteria, one test per criterion.

Each test prints a single PASS line (visible with -s) naming the criterion
and its runtime; stated runtime budgets are asserted, not just reported.
Frozen literals were confirmed against independent brute-force quadrature
before being pinned here.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np

from needlelab import functionals as F
from needlelab import needles as ND
from needlelab import space
from needlelab import variational as V
from needlelab.cli import run
from needlelab.functionals import CknParams, GridFunction
from needlelab.space import DistortionInput


class stopwatch:
    def __enter__(self):
        self.t0 = time.monotonic()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.monotonic() - self.t0
        return False


def report(num: int, ok: bool, detail: str, elapsed: float) -> None:
    print(f"criterion {num:02d} {'PASS' if ok else 'FAIL'}: {detail} ({elapsed:.2f}s)")
    assert ok


def test_criterion_01_distortion_exactness():
    with stopwatch() as sw:
        worst = 0.0
        for n in np.linspace(1.0, 12.0, 10):
            for t in np.linspace(0.0, 1.0, 10):
                for theta in np.linspace(0.0, 40.0, 10):
                    inp = DistortionInput(K=0.0, N=n, t=t, theta=theta)
                    worst = max(worst, abs(space.sigma(inp) - t), abs(space.tau(inp) - t))
        branch_ok = True
        for k in (0.5, 1.0, 4.0):
            for n in (1.0, 2.0, 3.0):
                crit = math.pi * math.sqrt(n / k)
                above = DistortionInput(K=k, N=n, t=0.5, theta=crit * (1.0 + 1e-9))
                below = DistortionInput(K=k, N=n, t=0.5, theta=crit * (1.0 - 1e-9))
                branch_ok &= space.sigma(above) == math.inf
                branch_ok &= math.isfinite(space.sigma(below))
                if n > 1.0:  # at N = 1 the sigma factor enters tau with power 0
                    branch_ok &= space.tau(above) == math.inf
    ok = worst == 0.0 and branch_ok and sw.elapsed < 1.0
    report(1, ok, f"flat coefficients exact over 10^3 sweep, worst={worst:g}", sw.elapsed)


SWEEP = [(n, k, lam) for n in (2.0, 3.0, 4.5) for k in (1.0, 2.0) for lam in (0.1, 1.0, 10.0)]


def test_criterion_02_moment_closed_form():
    with stopwatch() as sw:
        worst = 0.0
        for n, k, lam in SWEEP:
            m = F.moment_T_hpw(n, k, lam)
            worst = max(worst, abs(m.value - m.closed_form) / m.closed_form)
    ok = worst <= 1e-6 and sw.elapsed < 2.0
    report(2, ok, f"gaussian moment matches closed form, worst rel={worst:.3g}", sw.elapsed)


def test_criterion_03_derivative_identity():
    with stopwatch() as sw:
        worst_analytic = 0.0
        worst_fd = 0.0
        for n, k, lam in SWEEP:
            m = F.moment_T_hpw(n, k, lam)
            worst_analytic = max(
                worst_analytic, abs(-lam * m.derivative - (n / 2.0) * m.value) / m.value
            )
            h = 1e-4 * lam
            fd = (
                F.moment_T_hpw(n, k, lam + h).value - F.moment_T_hpw(n, k, lam - h).value
            ) / (2.0 * h)
            worst_fd = max(worst_fd, abs(-lam * fd - (n / 2.0) * m.value) / m.value)
    ok = worst_analytic <= 1e-6 and worst_fd <= 1e-6
    report(
        3,
        ok,
        f"derivative identity: analytic {worst_analytic:.3g}, central fd {worst_fd:.3g}",
        sw.elapsed,
    )


def test_criterion_04_hpw_equality_on_cones():
    with stopwatch() as sw:
        worst = 0.0
        for n in (2.5, 3.0, 4.0):
            sharp = n * n / 4.0
            for lam in np.geomspace(0.1, 10.0, 7):
                rep = F.hpw_report(space.PowerLaw(1.0, n), n, F.hpw_extremal(lam))
                worst = max(worst, abs(rep.quotient - sharp) / sharp)
    ok = worst <= 1e-6 and sw.elapsed < 5.0
    report(4, ok, f"extremal quadratic quotients on cones, worst rel={worst:.3g}", sw.elapsed)


def test_criterion_05_ckn_equality_on_cones():
    with stopwatch() as sw:
        worst = 0.0
        for params in (CknParams(4.0, 1.0, 2.5), CknParams(3.0, 0.5, 3.5)):
            sharp = params.sharp_constant
            for lam in np.geomspace(0.25, 4.0, 5):
                rep = F.ckn_report(
                    space.PowerLaw(1.0, params.N), params, F.ckn_extremal(params, lam)
                )
                worst = max(worst, abs(rep.quotient - sharp) / sharp)
    ok = worst <= 1e-5
    report(5, ok, f"extremal weighted quotients on cones, worst rel={worst:.3g}", sw.elapsed)


def test_criterion_06_ckn_scaling_law():
    with stopwatch() as sw:
        worst = 0.0
        for params in (CknParams(4.0, 1.0, 2.5), CknParams(3.0, 0.5, 3.5)):
            for lam in (0.5, 1.0, 2.0):
                m = F.moment_T_ckn(params, 1.0, lam)
                worst = max(worst, abs(2.0 ** (m.fitted_exponent - m.exponent) - 1.0))
        rng = np.random.default_rng(20240801)
        alphas_negative = True
        for _ in range(1000):
            p = rng.uniform(2.05, 8.0)
            q = rng.uniform(0.05, 1.95)
            upper = 2.0 * (p - q) / (p - 2.0)
            n = 2.0 + rng.uniform(0.01, 0.99) * (upper - 2.0)
            alphas_negative &= CknParams(p, q, n).alpha < 0.0
    ok = worst <= 1e-6 and alphas_negative
    report(6, ok, f"power scaling of the weighted moment, worst rel={worst:.3g}", sw.elapsed)


def test_criterion_07_rigidity_witnesses():
    with stopwatch() as sw:
        hpw = V.family_scan(space.TruncatedPowerLaw(1.0, 3.0, 1.0), 3.0, "hpw")
        ckn = V.family_scan(
            space.TruncatedPowerLaw(1.0, 2.5, 1.0), CknParams(4.0, 1.0, 2.5), "ckn"
        )
        witness_ok = (
            hpw.min_value < -1e-3
            and ckn.min_value < -1e-3
            and abs(hpw.min_value - (-1.4988002743100832)) <= 1e-6 * 1.4988
            and abs(ckn.min_value - (-0.24950074900076658)) <= 1e-6 * 0.2495
        )
        cone_hpw = V.family_scan(space.PowerLaw(1.0, 3.0), 3.0, "hpw")
        cone_ckn = V.family_scan(space.PowerLaw(1.0, 2.5), CknParams(4.0, 1.0, 2.5), "ckn")
        cone_ok = (
            max(abs(v) for v in cone_hpw.values) <= 1e-6
            and max(abs(v) for v in cone_ckn.values) <= 1e-6
        )
    ok = witness_ok and cone_ok
    report(
        7,
        ok,
        f"truncation witnesses {hpw.min_value:.4f} / {ckn.min_value:.4f}, cones within 1e-6",
        sw.elapsed,
    )


def test_criterion_08_verdict_dichotomy(corpus):
    with stopwatch() as sw:
        agreed = True
        for entry in corpus:
            if not entry.mcp_passes:
                try:
                    V.rigidity_verdict(entry.density, entry.dimension, entry.ckn)
                    agreed = False
                except V.McpPreconditionError:
                    pass
                continue
            # DiagnosticMismatchError here would mean the two diagnostics
            # disagree; any escape fails the criterion.
            verdict = V.rigidity_verdict(entry.density, entry.dimension, entry.ckn)
            agreed &= (verdict.variant == "cone") == entry.is_cone
    report(8, agreed, "cone fit and slack scans agree on all ten densities", sw.elapsed)


def test_criterion_09_random_function_suites():
    with stopwatch() as sw:
        rng = np.random.default_rng(20240809)
        hpw_ok = True
        for _ in range(200):
            n = rng.uniform(2.2, 5.0)
            rep = F.hpw_report(
                space.PowerLaw(rng.uniform(0.5, 2.0), n), n, F.random_grid_function(rng)
            )
            hpw_ok &= rep.quotient >= n * n / 4.0 - 1e-9
        ckn_ok = True
        for _ in range(200):
            p = rng.uniform(2.5, 5.0)
            q = rng.uniform(0.25, 1.75)
            upper = 2.0 * (p - q) / (p - 2.0)
            n = 2.0 + rng.uniform(0.05, 0.95) * (upper - 2.0)
            params = CknParams(p, q, n)
            rep = F.ckn_report(
                space.PowerLaw(rng.uniform(0.5, 2.0), n), params, F.random_grid_function(rng)
            )
            lhs = (n - q) / p * rep.ckn_mass
            rhs = math.sqrt(rep.dirichlet * rep.singular_moment)
            ckn_ok &= lhs <= rhs + 1e-9 * max(lhs, rhs, 1.0)
    ok = hpw_ok and ckn_ok
    report(9, ok, "200 + 200 random test functions satisfy both estimates", sw.elapsed)


def test_criterion_10_needle_machinery():
    with stopwatch() as sw:
        two = ND.NeedleEnsemble(N=3.0, rays=(ND.Ray(1.0, 0.5), ND.Ray(2.0, 0.5)))
        four = ND.NeedleEnsemble(N=4.0, rays=(ND.Ray(1.0, 0.5), ND.Ray(2.0, 0.5)))
        disint_ok = ND.verify_disintegration(two, (0.5, 1.0, 2.0, 4.0)) <= 1e-12

        rw = ND.reweight(two, F.hpw_extremal(1.0))
        reweight_ok = (
            rw.moment_deviation <= 1e-8
            and rw.total_moment_deviation <= 1e-8
            and rw.reassembly_deviation <= 1e-8
        )

        tight = ND.aggregate_hpw(four, F.hpw_extremal(1.0))
        tight_ok = abs(tight.final_slack) <= 1e-8

        rng = np.random.default_rng(20240810)
        chain_ok = True
        for _ in range(100):
            rep = ND.aggregate_hpw(two, F.random_grid_function(rng))
            scale = max((two.N / 2.0) * rep.total_mass, 1.0)
            chain_ok &= rep.final_slack >= -1e-9 * scale
            chain_ok &= rep.cs_slack >= -1e-12 * scale
            chain_ok &= all(t.rel_slack >= -1e-9 for t in rep.per_ray)
    ok = disint_ok and reweight_ok and tight_ok and chain_ok
    report(10, ok, "disintegration, reweighting, and aggregation chain hold", sw.elapsed)


def test_criterion_11_gradient_check():
    with stopwatch() as sw:
        rng = np.random.default_rng(20240811)
        worst = 0.0
        for i in range(50):
            if i % 2 == 0:
                n = rng.uniform(2.2, 5.0)
                d = space.PowerLaw(rng.uniform(0.5, 2.0), n)
                params, kind = n, "hpw"
            else:
                p = rng.uniform(2.5, 5.0)
                q = rng.uniform(0.25, 1.75)
                upper = 2.0 * (p - q) / (p - 2.0)
                n = 2.0 + rng.uniform(0.1, 0.9) * (upper - 2.0)
                d = space.PowerLaw(rng.uniform(0.5, 2.0), n)
                params, kind = CknParams(p, q, n), "ckn"
            u = F.random_grid_function(rng)
            g = V.quotient_gradient(d, params, u, kind)
            vals = np.asarray(u.values)
            h = 1e-5
            fd = np.zeros_like(g)
            for j in range(len(vals) - 1):
                vp, vm = vals.copy(), vals.copy()
                vp[j] += h
                vm[j] -= h
                qp = V.discrete_quotient(d, params, GridFunction(u.nodes, tuple(vp)), kind)
                qm = V.discrete_quotient(d, params, GridFunction(u.nodes, tuple(vm)), kind)
                fd[j] = (math.log(qp) - math.log(qm)) / (2.0 * h)
            worst = max(worst, np.max(np.abs(fd - g)) / max(np.max(np.abs(g)), 1e-3))
    ok = worst <= 1e-5
    report(11, ok, f"analytic gradients vs finite differences, worst rel={worst:.3g}", sw.elapsed)


def test_criterion_12_minimization():
    with stopwatch() as sw:
        tent = GridFunction((0.0, 1.0, 2.0), (0.0, 1.0, 0.0))
        res_h = V.minimize_quotient(space.PowerLaw(1.0, 3.0), 3.0, "hpw", tent)
        t_tent = time.monotonic() - sw.t0
        hpw_ok = 2.25 - 1e-6 <= res_h.quotient <= 2.25 * 1.01 and t_tent < 10.0

        params = CknParams(4.0, 1.0, 2.5)
        init = F.random_grid_function(np.random.default_rng(11))
        res_c = V.minimize_quotient(space.PowerLaw(1.0, 2.5), params, "ckn", init)
        ckn_ok = 0.140625 - 1e-6 <= res_c.quotient <= 0.140625 * 1.01
    ok = hpw_ok and ckn_ok
    report(
        12,
        ok,
        f"minimized quotients {res_h.quotient:.6f} / {res_c.quotient:.8f}",
        sw.elapsed,
    )


def test_criterion_13_cli_determinism(tmp_path, capsys):
    with stopwatch() as sw:
        cone = '{"kind":"powerlaw","c":1,"N":3}'
        trunc = '{"kind":"truncated","c":1,"N":3,"R":1}'
        tilt = '{"kind":"powerlawexp","c":1,"N":3,"a":1}'
        ensemble = '{"N":3,"rays":[{"c":1,"q":0.5},{"c":2,"q":0.5}]}'

        # byte-identical repeated runs, across processes, seed-sensitive paths
        deterministic = True
        for argv in (
            ["verdict", "--density", cone, "--N", "3", "--seed", "5"],
            ["minimize", "--kind", "hpw", "--density", cone, "--N", "3",
             "--init", "random", "--seed", "3", "--max-iters", "40"],
        ):
            cmd = [sys.executable, "-m", "needlelab.cli", *argv]
            a = subprocess.run(cmd, capture_output=True, timeout=300)
            b = subprocess.run(cmd, capture_output=True, timeout=300)
            deterministic &= a.returncode == b.returncode and a.stdout == b.stdout

        def run_captured(*argv):
            code = run(list(argv))
            return code, capsys.readouterr().out

        c1, csv1 = run_captured("scan", "--kind", "hpw", "--density", trunc,
                                "--N", "3", "--format", "csv")
        c2, csv2 = run_captured("scan", "--kind", "hpw", "--density", trunc,
                                "--N", "3", "--format", "csv")
        deterministic &= c1 == c2 == 1 and csv1 == csv2

        plots = []
        for name in ("p1.svg", "p2.svg"):
            path = tmp_path / name
            run_captured("scan", "--kind", "hpw", "--density", trunc, "--N", "3",
                         "--lambda-count", "9", "--plot", str(path))
            plots.append(path.read_bytes())
        deterministic &= plots[0] == plots[1]

        # exhaustive exit-code contract: every subcommand at success, plus one
        # instance each of violation, usage error, and refusal
        codes_ok = True
        for argv in (
            ("check-mcp", "--density", cone, "--N", "3"),
            ("check-cone", "--density", cone, "--N", "3"),
            ("bg-profile", "--density", cone, "--N", "3"),
            ("hpw", "--density", cone, "--N", "3", "--lam", "1"),
            ("ckn", "--density", '{"kind":"powerlaw","c":1,"N":2.5}',
             "--p", "4", "--q", "1", "--N", "2.5", "--lam", "1"),
            ("scan", "--kind", "hpw", "--density", cone, "--N", "3"),
            ("minimize", "--kind", "hpw", "--density", cone, "--N", "3",
             "--init", "extremal", "--grad-tol", "0.05"),
            ("verdict", "--density", cone, "--N", "3"),
            ("needle-verify", "--ensemble", ensemble),
            ("needle-aggregate", "--ensemble", ensemble),
            ("distortion", "--K", "0", "--N", "3", "--t", "0.3", "--theta", "2"),
        ):
            code, out = run_captured(*argv)
            codes_ok &= code == 0 and json.loads(out)["command"] == argv[0]

        codes_ok &= run_captured("verdict", "--density", trunc, "--N", "3")[0] == 1
        codes_ok &= run_captured("hpw", "--density", cone, "--N", "3")[0] == 2
        codes_ok &= run_captured("verdict", "--density", tilt, "--N", "3")[0] == 3
    ok = deterministic and codes_ok
    report(13, ok, "byte-identical reruns and full exit-code contract", sw.elapsed)
