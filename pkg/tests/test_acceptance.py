"""End-to-end acceptance checks; each test reports one PASS/FAIL line."""

import itertools
import math
import subprocess
import sys
import time

import mpmath
import numpy as np

from rank1 import ball_geometry as bg
from rank1 import division_algebras as da
from rank1 import funk_hecke as fh
from rank1 import inequalities as iq
from rank1 import kernels as kn
from rank1 import op_algebra as oa
from rank1 import rearrangement as ra
from rank1.specfun import riesz_constant

H1 = bg.space_descriptor("q", 1)
H2 = bg.space_descriptor("q", 2)
CA = bg.space_descriptor("ca", 2)


def _loglog_fit(x, y):
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    return slope, math.exp(intercept)


def test_hypertrig_closed_form(report):
    t0 = time.perf_counter()
    worst = max(abs(q - c) / abs(c) for c, q in (kn.hypertrig_integral(b, r) for b in (1, 2.5, 7) for r in (0.1, 1, 2)))
    elapsed = time.perf_counter() - t0
    report(1, worst <= 1e-8 and elapsed < 1.0, f"hypertrig max rel err {worst:.2e}, {elapsed:.2f} s")


def test_quaternionic_funk_hecke(report):
    worst_q, worst_sigma = 0.0, 0.0
    for alpha, r in itertools.product((0.75, 1.5, 2.5), (0.3, 0.6, 0.9)):
        ref = float(2 * mpmath.pi**4 / 6 * mpmath.hyp2f1(alpha, alpha - 1, 4, r * r))
        assert abs(fh.poisson_eigen_q(alpha, r, 1) - ref) <= 1e-12 * ref
        quad = fh.eigenvalue_quaternionic(fh.BisphericalIndex(0, 0), 1, fh.ZonalKernel.poisson(alpha, r))
        worst_q = max(worst_q, abs(quad - ref) / ref)

        def integrand(x, alpha=alpha, r=r):
            return (1 - 2 * r * x[:, 0] + r * r * np.sum(x[:, :4] ** 2, axis=1)) ** (-alpha)

        val, se = fh.mc_zonal_integral(7, integrand, samples=1_000_000, seed=20240)
        worst_sigma = max(worst_sigma, abs(val - ref) / se)
    report(2, worst_q <= 1e-6 and worst_sigma <= 3, f"S^7 quad max rel err {worst_q:.2e}, MC max deviation {worst_sigma:.2f} sigma")


def test_octonionic_funk_hecke(report):
    worst_q, worst_sigma = 0.0, 0.0
    for alpha, r in ((1.5, 0.5), (3.5, 0.5)):
        ref = float(2 * mpmath.pi**8 / mpmath.factorial(7) * mpmath.hyp2f1(alpha, alpha - 3, 8, r * r))
        assert abs(fh.poisson_eigen_ca(alpha, r) - ref) <= 1e-12 * ref
        quad = fh.eigenvalue_octonionic(fh.BisphericalIndex(0, 0), fh.ZonalKernel.poisson(alpha, r))
        worst_q = max(worst_q, abs(quad - ref) / ref)
        z = np.zeros(16)
        z[0] = r
        val, se = fh.mc_zonal_integral(15, lambda x, z=z, alpha=alpha: da.psi_ca(z, x) ** (-alpha), samples=1_000_000, seed=20241)
        worst_sigma = max(worst_sigma, abs(val - ref) / se)
    report(3, worst_q <= 1e-4 and worst_sigma <= 3, f"S^15 quad max rel err {worst_q:.2e}, MC max deviation {worst_sigma:.2f} sigma")


def test_three_dimensional_heat_kernel(report):
    from fractions import Fraction

    form_ok = kn.real_odd_form(1).terms == {(1, -1, 0, 1): Fraction(1, 2)}
    err = abs(kn.b_const(1) / 2 - (4 * math.pi) ** -1.5) / (4 * math.pi) ** -1.5
    t, rho = np.meshgrid([0.1, 0.7, 2.0], [0.01, 1.0, 5.0])
    ref = (4 * math.pi * t) ** -1.5 * rho / np.sinh(rho) * np.exp(-t - rho**2 / (4 * t))
    vals = np.array([[kn.heat_kernel_real_odd(1, tt, rr) for tt, rr in zip(a, b)] for a, b in zip(t, rho)])
    num_err = float(np.max(np.abs(vals - ref) / ref))
    report(4, form_ok and err <= 1e-14 and num_err <= 1e-12, f"m~=1 form exact {form_ok}, b1/2 rel err {err:.1e}, values rel err {num_err:.1e}")


def test_heat_mass_and_semigroup(report):
    t0 = time.perf_counter()
    mass_err = max(abs(kn.heat_kernel_mass(sp, t) - 1) for sp in (H1, H2) for t in (0.1, 0.5, 1.0))
    semi_err = 0.0
    for sp in (H1, H2):
        half = kn.heat_kernel_profile(sp, 0.5)
        for rho0 in (0.0, 0.5):
            conv = kn.radial_convolve(sp, half, half, rho0, samples=1_000_000, seed=7)
            ref = float(kn.heat_kernel(sp, 1.0, rho0))
            semi_err = max(semi_err, abs(conv.value - ref) / ref)
    elapsed = time.perf_counter() - t0
    ok = mass_err <= 1e-3 and semi_err <= 1e-2 and elapsed < 120
    report(5, ok, f"mass max err {mass_err:.1e}, semigroup max rel err {semi_err:.1e}, {elapsed:.1f} s")


def test_bgr_small_distance(report):
    rho = np.geomspace(1e-3, 1e-2, 8)
    coef_ref = 1 / riesz_constant(8, 1.5).value
    parts, ok = [], True
    for zeta, tol in ((0.0, 0.02), (1.0, 0.05)):
        vals = kn.bgr_kernel(kn.BGRParams(H2, zeta, 1.5), rho)
        slope, coef = _loglog_fit(rho, vals)
        rel = abs(coef - coef_ref) / coef_ref
        ok &= abs(slope + 6.5) <= 0.05 and rel <= tol
        parts.append(f"zeta={zeta:g}: exponent {slope:.4f}, coefficient rel err {rel:.2e}")
    report(6, ok, "; ".join(parts))


def test_anker_ji_decay(report):
    rho = np.linspace(3, 8, 11)
    parts, ok = [], True
    # leading powers rho^{gamma-2} and rho^{(gamma-2)/2} are divided out before fitting
    for zeta, power, ref in ((0.0, 1.5 - 2, -5.0), (1.0, (1.5 - 2) / 2, -6.0)):
        params = kn.BGRParams(H2, zeta, 1.5)
        logk = np.array([kn.log_bgr_kernel(params, r) for r in rho])
        slope = float(np.polyfit(rho, logk - power * np.log(rho), 1)[0])
        ok &= abs(slope - ref) <= 0.02 * abs(ref)
        parts.append(f"zeta={zeta:g}: slope {slope:.4f} (target {ref:g})")
    report(7, ok, "; ".join(parts))


def test_small_distance_constant_identity(report):
    worst = 0.0
    for m, g in itertools.product((1, 2, 3), (0.5, 1.5, 2.5)):
        assembled, expected = kn.small_distance_constant(m, g)
        worst = max(worst, abs(assembled - expected) / abs(expected))
    report(8, worst <= 1e-12, f"max rel err {worst:.1e} over 9 cases")


def test_factorization_suite(report):
    t0 = time.perf_counter()
    checks = [
        (lambda: oa.verify_lemma_3_1(), lambda: oa.verify_lemma_3_1(mutation="q2_shift")),
        (lambda: oa.verify_beta_identity(), lambda: oa.verify_beta_identity(mutation="constant")),
        (lambda: oa.verify_lemma_3_2(), lambda: oa.verify_lemma_3_2(mutation="flip_sign")),
    ]
    for k in (1, 2, 3, 4):
        for ident in (1, 2):
            checks.append((lambda k=k, i=ident: oa.verify_lemma_3_3(k, identity=i), lambda k=k, i=ident: oa.verify_lemma_3_3(k, identity=i, mutation="flip_sign")))
        checks.append((lambda k=k: oa.verify_damek_ricci_factorization(k), lambda k=k: oa.verify_damek_ricci_factorization(k, mutation="shift")))
    for m in (1, 2):
        checks.append((lambda m=m: oa.verify_geller_intertwining(m), lambda m=m: oa.verify_geller_intertwining(m, mutation="constant")))
        checks.append((lambda m=m: oa.verify_lemma_6_1(m), lambda m=m: oa.verify_lemma_6_1(m, mutation="gamma_shift")))
        for k in (1, 2, 3):
            checks.append((lambda m=m, k=k: oa.verify_ball_factorization(m, k), lambda m=m, k=k: oa.verify_ball_factorization(m, k, mutation="imaginary_pairing" if k > 1 else "constant")))
    zero = sum(good().is_zero for good, _ in checks)
    caught = sum(not bad().is_zero for _, bad in checks)
    comm = [oa.verify_commutators(m) for m in (1, 2)]
    comm_ok = all(c.all_zero for c in comm)
    comm_caught = all(not oa.verify_commutators(m, mutation=mut).all_zero for m in (1, 2) for mut in ("unit_factor", "weight_sign"))
    elapsed = time.perf_counter() - t0
    ok = zero == len(checks) and caught == len(checks) and comm_ok and comm_caught and elapsed < 300
    report(9, ok, f"{zero}/{len(checks)} zero residuals, {caught}/{len(checks)} mutations caught, commutators {comm_ok}/{comm_caught}, {elapsed:.1f} s")


def test_minorant(report):
    d0 = iq.minorant_delta(2, 0.0).delta
    d1 = iq.minorant_delta(2, 1.0).delta
    closed_ok = abs(d0 - 4) <= 1e-9 and abs(d1 - 2) <= 1e-9
    grid = [iq.minorant_delta(k, a) for k in (3, 4) for a in (0.0, 0.5, 1.0)]
    grid_ok = all(r.delta is not None and r.delta > 0 and r.certify() for r in grid)
    deltas = ", ".join(f"{r.delta:.4f}" for r in grid)
    report(10, closed_ok and grid_ok, f"k=2 deltas {d0:.12f}, {d1:.12f}; k=3,4 certified deltas {deltas}")


def test_volume_asymptotics(report):
    rho = np.geomspace(1e-3, 1e-1, 9)
    excess = np.array([bg.small_ball_excess(H2, r) for r in rho])
    slope, _ = _loglog_fit(rho, excess)
    big = np.linspace(10, 20, 11)
    slopes = {sp.Q: float(np.polyfit(big, [bg.log_ball_volume(sp, r) for r in big], 1)[0]) for sp in (H2, CA)}
    ok = abs(slope - 2) <= 0.05 and all(abs(s - q) <= 0.01 * q for q, s in slopes.items())
    report(11, ok, f"excess exponent {slope:.4f}; log-volume slopes {slopes[10]:.4f} (Q=10), {slopes[22]:.4f} (Q=22)")


def test_eigenfunction(report):
    rng = np.random.default_rng(12)
    sigma = bg.sample_sphere(H2.N, rng).reshape(2, 4)
    f = bg.eigenfunction_complex_coords(H2, sigma)
    worst = 0.0
    for _ in range(20):
        z = bg.sample_sphere(H2.N, rng) * rng.uniform(0.0, 0.9)
        zc = da.q_to_complex(z.reshape(2, 4))
        e = float(np.real(f(zc)))
        worst = max(worst, abs(bg.laplace_beltrami_q(f, zc) + 25 * e) / abs(25 * e))
    report(12, worst <= 1e-4, f"max rel err {worst:.2e} at 20 points")


def test_oneil(report):
    rng = np.random.default_rng(13)
    t_grid = ra.volume_table(H2).volume(np.array([0.1, 0.3, 0.6, 1.0, 1.5]))
    violations = 0
    for _ in range(200):
        a1, a2 = rng.uniform(0.5, 2.0, 2)
        w1, w2 = rng.uniform(0.2, 0.8, 2)
        f = bg.RadialProfile(lambda r, a=a1, w=w1: a * np.exp(-r * r / w), decay_rate=math.inf)
        g = bg.RadialProfile(lambda r, a=a2, w=w2: a * np.exp(-r * r / w), decay_rate=math.inf)
        rep = ra.oneil_check(H2, f, g, t_grid, samples=50_000, seed=int(rng.integers(2**63)))
        violations += rep.violations
    report(13, violations == 0, f"{violations} violations over 200 pairs")


def test_rearrangement(report):
    bad = [name for sp in (H1, H2) for name, f in ra.shipped_profiles().items() if not ra.equimeasurability_check(sp, f).ok]
    fit = ra.rearranged_kernel_large_t(H2, 1.5, 0.0)
    exp_ok = abs(fit.exponent + 0.5) <= 0.05 * 0.5
    report(14, not bad and exp_ok, f"profiles failing {bad or 'none'}; [k_gamma]* large-t exponent {fit.exponent:.4f}")


def test_cli_determinism(report, tmp_path):
    argv = [sys.executable, "-m", "rank1.cli", "verify", "funk-hecke", "--case", "octonionic", "--alpha", "1.5",
            "--r", "0.5", "--samples", "200000", "--seed", "99", "--format", "csv"]
    outs = []
    for name in ("first.csv", "second.csv"):
        path = tmp_path / name
        subprocess.run(argv + ["--output", str(path)], check=False)
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    report(15, ok, f"two runs byte-identical ({len(outs[0])} bytes)")
