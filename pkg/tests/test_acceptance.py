"""Acceptance criteria, one test each.  Every test prints a single
``[PASS]``/``[FAIL]`` line with the measured quantity, visible without -s."""

import csv
import io
import itertools
import json
import math
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from intlat import chiral_potts as cp
from intlat import painleve as pv
from intlat import quasiparticle as qp
from intlat.cli import main
from intlat.special_functions import bessel_k0


def report(capsys, label, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, f"{label}: {detail}"


def eps(x):
    return 2 / math.pi * bessel_k0(2 * x)


def two_species():
    return qp.QuasiparticleSpec(8, ((2, 1), (1, 2)), (1, 1), (20, 18))


def subset_polynomial(sizes, m):
    """Brute-force subset enumeration, independent of the q-Pascal recurrence."""
    hist = Counter()
    per = [list(itertools.combinations(range(d), k)) for d, k in zip(sizes, m)]
    for choice in itertools.product(*per):
        hist[sum(sum(c) for c in choice)] += 1
    if not hist:
        return {}
    base = min(hist)
    return {s - base: c for s, c in sorted(hist.items())}


def cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_1_painleve_residual(capsys):
    t0 = time.perf_counter()
    traj = pv.solve_eta(x_min=1.0, x_max=12.0)
    elapsed = time.perf_counter() - t0
    worst = traj.max_residual
    report(capsys, "1 residual", worst < 1e-8 and elapsed < 1.0, f"max|res| = {worst:.2e}, runtime {elapsed:.3f} s")


def test_2_asymptote(capsys, traj_1_12):
    ratios = []
    for s in traj_1_12.samples:
        if s.x >= 5.0:
            e = eps(s.x)
            ratios.append(abs(s.deviation - e) / e**2)
    worst = max(ratios)
    report(capsys, "2 asymptote", worst < 3.0, f"max |eta - (1-eps)|/eps^2 = {worst:.4f} over {len(ratios)} grid points (bound 3)")


def test_3_scaling_limits(capsys, traj):
    v = pv.scaling_function(traj, 8.0)
    tight = pv.scaling_function(pv.solve_eta(tol=pv.DEFAULT_TOL.tightened(10.0)), 8.0)
    ratio = v.g_plus / eps(8.0)
    drift = max(abs(v.g_plus - tight.g_plus), abs(v.g_minus - tight.g_minus))
    ok = 0.999 <= ratio <= 1.001 and 1.998 <= v.g_minus <= 2.002 and drift < 1e-6
    report(capsys, "3 scaling", ok, f"g+/eps = {ratio:.12f}, g- = {v.g_minus:.12f}, drift under 10x tightening {drift:.1e}")


def test_4_curve_and_weights(capsys):
    rng = np.random.default_rng(4)
    worst_res = worst_per = 0.0
    weakest_break = math.inf
    for i in range(100):
        n = (2, 3, 4)[i % 3]
        m = cp.Modulus.from_k(float(rng.uniform(0.05, 0.95)))
        p, q = cp.random_curve_point(n, m, rng), cp.random_curve_point(n, m, rng)
        worst_res = max(worst_res, *cp.curve_residuals(p), *cp.curve_residuals(q))
        worst_per = max(worst_per, *cp.periodicity_defect(p, q))
        weakest_break = min(weakest_break, max(cp.periodicity_defect(p.perturbed(1e-3), q)))
    ok = worst_res < 1e-12 and worst_per < 1e-10 and weakest_break > 1e-5
    report(
        capsys, "4 curve", ok,
        f"max residual {worst_res:.1e}, max periodicity defect {worst_per:.1e}, min off-curve defect {weakest_break:.1e}",
    )


def test_5_commuting_family(capsys):
    rng = np.random.default_rng(5)
    m = cp.Modulus.from_k(0.6)
    worst = 0.0
    t0 = time.perf_counter()
    for n in (2, 3):
        for width in (2, 3):
            p = cp.random_curve_point(n, m, rng)
            qs = [cp.random_curve_point(n, m, rng) for _ in range(4)]
            for q1, q2 in itertools.combinations(qs, 2):
                worst = max(worst, cp.commutator_norm(p, q1, q2, width))
    elapsed = time.perf_counter() - t0
    report(capsys, "5 commuting", worst < 1e-10 and elapsed < 10.0, f"max relative norm {worst:.1e}, runtime {elapsed:.3f} s")


def test_6_order_parameter(capsys):
    exact = cp.order_parameter_exponent(2, 1) == Fraction(1, 8)
    sym = all(
        cp.order_parameter(n_states, n, k) == cp.order_parameter(n_states, n_states - n, k)
        for n_states in range(2, 8)
        for n in range(1, n_states)
        for k in np.linspace(0.05, 0.95, 19)
    )
    grid = np.linspace(0.01, 0.99, 99)
    mono = all(
        all(b < a for a, b in zip(vals, vals[1:]))
        for vals in ([cp.order_parameter(n_states, n, k) for k in grid] for n_states in range(2, 8) for n in range(1, n_states))
    )
    report(capsys, "6 order parameter", exact and sym and mono, f"exponent(2,1) = {cp.order_parameter_exponent(2, 1)}, symmetric {sym}, monotone {mono}")


def test_7_exclusion_counting(capsys):
    spec = two_species()
    t0 = time.perf_counter()
    n_contents = 0
    ok = True
    for m0 in range(7):
        for m1 in range(7 - m0):
            d = [w.size for w in qp.windows(spec, [m0, m1])]
            count = len(qp.enumerate_states(spec, [m0, m1]))
            poly = qp.counting_polynomial(spec, [m0, m1])
            ok &= count == math.comb(d[0], m0) * math.comb(d[1], m1)
            ok &= poly.coefficients == subset_polynomial(d, (m0, m1))
            ok &= poly == qp.gaussian_binomial(d[0], m0) * qp.gaussian_binomial(d[1], m1)
            n_contents += 1
    elapsed = time.perf_counter() - t0
    report(capsys, "7 counting", ok and elapsed < 5.0, f"{n_contents} contents checked, runtime {elapsed:.3f} s")


def test_8_free_fermion(capsys):
    spec = qp.ising_spec(16)
    values = {qp.p_min(spec, [m], 0) for m in range(0, 40)}
    report(capsys, "8 free fermion", values == {0.0}, f"P_min over m = 0..39: {sorted(values)}")


def test_9_cli_round_trip(capsys):
    failures = []

    def check(name, cond):
        if not cond:
            failures.append(name)

    # 1-2: eta table on [1, 12]
    code, out = cli(capsys, "painleve", "--x-min", "1", "--x-max", "12", "--grid", "0.05")
    rows = list(csv.reader(io.StringIO(out)))[1:]
    traj = pv.solve_eta(x_min=1.0, grid=pv.uniform_grid(1.0, 12.0, 0.05))
    lib = [[s.x, s.eta, s.eta_prime, s.residual] for s in traj.samples]
    check("painleve table", code == 0 and [[float(v) for v in r] for r in rows] == lib)
    check("residual via cli", max(abs(float(r[3])) for r in rows) < 1e-8)

    # 3: scaling at r = 8
    code, out = cli(capsys, "painleve", "--scaling", "--r", "8")
    row = [float(v) for v in list(csv.reader(io.StringIO(out)))[1]]
    v = pv.scaling_table(pv.solve_eta(grid=[pv.DEFAULT_X_MIN, pv.DEFAULT_X_MAX]), [8.0])[0]
    check("scaling", code == 0 and row == [v.r, v.g_plus, v.g_minus, v.est_error])

    # 4: weights and periodicity for seeded points, and the off-curve exit
    m06 = cp.Modulus.from_k(0.6)
    for n in (2, 3, 4):
        code, out = cli(capsys, "chiral-potts", "weights", "--n", str(n), "--seed", str(n))
        data = json.loads(out)
        rng = np.random.default_rng(n)
        p, q = cp.random_curve_point(n, m06, rng), cp.random_curve_point(n, m06, rng)
        t = cp.weight_table(p, q)
        check(f"weights N={n}", code == 0 and [complex(*z) for z in data["w_h"]] == list(t.w_h)
              and data["periodicity_defect"] == list(cp.periodicity_defect(p, q)))
    code, _ = cli(capsys, "chiral-potts", "weights", "--n", "3", "--p", "1:1:1:1")
    check("off-curve exit 3", code == 3)

    # 5: commutators
    for n in (2, 3):
        for width in (2, 3):
            code, out = cli(capsys, "chiral-potts", "commutator", "--n", str(n), "--width", str(width), "--seed", "11")
            rng = np.random.default_rng(11)
            p, q1, q2 = (cp.random_curve_point(n, m06, rng) for _ in range(3))
            check(f"commutator {n},{width}", code == 0 and json.loads(out)["norm"] == cp.commutator_norm(p, q1, q2, width))

    # 6: order parameter
    code, out = cli(capsys, "chiral-potts", "order-param", "--n-states", "2", "--n", "1", "--k", "0.5")
    data = json.loads(out)
    check("order-param", code == 0 and data["exponent"] == "1/8" and data["value"] == cp.order_parameter(2, 1, 0.5))

    # 7: counting
    spec = two_species()
    base = ["--m-sites", "8", "--b-matrix", "2,1;1,2", "--a-vector", "1,1", "--u-vector", "20,18"]
    for m in [(2, 1), (3, 3), (0, 6)]:
        content = ",".join(map(str, m))
        code, out = cli(capsys, "quasi", "enumerate", *base, "--content", content)
        check(f"enumerate {m}", code == 0 and json.loads(out)["count"] == qp.count_states(spec, m))
        code, out = cli(capsys, "quasi", "polynomial", *base, "--content", content)
        check(f"polynomial {m}", code == 0 and json.loads(out)["polynomial"] == qp.counting_polynomial(spec, m).to_dict())

    # 8: free fermion windows, and exit 5 when enumerating an infinite window
    ising = ["--m-sites", "16", "--b-matrix", "1", "--a-vector", "1"]
    code, out = cli(capsys, "quasi", "windows", *ising, "--content", "7")
    check("ising windows", code == 0 and json.loads(out)["windows"][0]["p_min"] == 0.0)
    code, _ = cli(capsys, "quasi", "enumerate", *ising, "--content", "1")
    check("infinite exit 5", code == 5)

    # usage error
    code, _ = cli(capsys, "painleve", "--x-min", "-1")
    check("usage exit 2", code == 2)

    report(capsys, "9 cli round-trip", not failures, "all values bit-identical" if not failures else f"mismatch in {failures}")
