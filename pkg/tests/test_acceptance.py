"""Acceptance checks, one PASS/FAIL line per criterion (run with -v or -s to see them).

Each check computes its measured quantity, reports it against the stated
tolerance, and then asserts. Nothing is relaxed to make a line turn green.
"""

import csv
import filecmp
import io
import math
import os
import time

import mpmath
import numpy as np
import pytest

from unifex import (
    RegionSpec,
    bessel_expansion,
    decompose_shift,
    elementary_bessel_expansion,
    fit_rate,
    gamma_ratio,
    hyp_series,
    kummer_expansion,
    moment_identity_residual,
    norlund_coeffs,
    norlund_explicit,
    pole_analysis,
)
from unifex.cli import run
from unifex.errormodel import sup_errors

A3, B3 = (3.0,), (3.5, 5.0)
AK, BK = (1.0, 1.5), (2.0, 3.0)


@pytest.fixture
def report(capsys):
    def _report(label, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {label}: {detail}")
        assert ok, f"{label}: {detail}"
    return _report


def test_c1_golden_value(report):
    t0 = time.perf_counter()
    res = elementary_bessel_expansion(A3, B3, 1e-3, 2)
    dt = time.perf_counter() - t0
    err = abs(res.value - 208 / 231)
    report("C1 golden 208/231 at z=1e-3", err <= 1e-6 and dt < 1.0,
           f"|err|={err:.3e} (tol 1e-6), {dt:.3f}s (limit 1s)")


def _closed_form(z):
    with mpmath.workdps(40):
        z = mpmath.mpf(z)
        num = (720 * z * (8 * z**4 + 105 * z**2 - 1890) * mpmath.cos(z)
               + 720 * (z**6 - 15 * z**4 - 735 * z**2 + 1890) * mpmath.sin(z))
        return float(num / z**11)


def test_c2_closed_form_equivalence(report):
    worst = 0.0
    for z in np.linspace(1.0, 30.0, 20):
        ref = _closed_form(z)
        got = elementary_bessel_expansion(A3, B3, z, 2).value
        worst = max(worst, abs(got - ref) / abs(ref))
    report("C2 N=2 elementary vs trig closed form", worst <= 1e-10,
           f"max rel err={worst:.3e} over 20 points (tol 1e-10)")


@pytest.fixture(scope="module")
def strip_sups():
    region = RegionSpec.strip(2.0, -40.0, 40.0, 41, 9)
    t0 = time.perf_counter()
    sups = sup_errors("bessel", A3, B3, region, [2, 4, 8, 16, 32])
    return sups, time.perf_counter() - t0


def test_c3_strip_sup_at_32(report, strip_sups):
    sups, _ = strip_sups
    report("C3a Bessel kernel strip sup at N=32", sups[32] <= 1e-6,
           f"sup={sups[32]:.3e} (tol 1e-6)")


def test_c3_strip_monotone_and_time(report, strip_sups):
    sups, dt = strip_sups
    ns = sorted(sups)
    mono = all(sups[n1] <= 1.1 * sups[n0] for n0, n1 in zip(ns, ns[1:]))
    seq = ", ".join(f"{n}:{sups[n]:.2e}" for n in ns)
    report("C3b Bessel strip errors non-increasing, runtime", mono and dt < 10.0,
           f"[{seq}], {dt:.2f}s (limit 10s)")


def test_c4_kummer_halfplane(report):
    region = RegionSpec.halfplane(0.0, 50.0, n_re=51, n_im=1)
    sups = sup_errors("kummer", AK, BK, region, [10, 20, 30, 50, 200])
    dec = sups[10] > sups[20] > sups[30]
    ratio = sups[50] / sups[200]
    report("C4 Kummer kernel H-weighted sup on [0,50]", dec and ratio >= 2.0,
           f"N=10,20,30: {sups[10]:.3e}, {sups[20]:.3e}, {sups[30]:.3e}; "
           f"N=50/N=200 ratio={ratio:.2f} (need >= 2)")


def test_c5_bessel_rate(report):
    fit = fit_rate("bessel", A3, B3, RegionSpec.strip(2.0, -40.0, 40.0, 41, 9),
                   [8, 16, 32, 64, 128])
    report("C5a Bessel kernel slope in [-4.5, -2.5]", -4.5 <= fit.slope <= -2.5,
           f"slope={fit.slope:.3f}")


def test_c5_kummer_rate(report):
    alpha = pole_analysis(AK[1:], BK).decay
    fit = fit_rate("kummer", AK, BK, RegionSpec.halfplane(0.0, 50.0, n_re=51, n_im=1),
                   [10, 20, 30, 50, 100, 200])
    report("C5b Kummer kernel slope <= -alpha + 1", fit.slope <= -alpha + 1.0,
           f"slope={fit.slope:.3f}, alpha={alpha:.3f}, limit={-alpha + 1.0:.3f}")


def _random_params(rng, p):
    a = [complex(rng.uniform(0.5, 4.0), rng.uniform(-1.0, 1.0)) for _ in range(p - 1)]
    b = [complex(rng.uniform(0.5, 6.0), rng.uniform(-1.0, 1.0)) for _ in range(p)]
    return a, b


def test_c6_closed_forms(report):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for p in (2, 3, 4):
        for _ in range(10):
            a, b = _random_params(rng, p)
            g = norlund_coeffs(a, b, 31).coeffs
            for n in range(31):
                ref = norlund_explicit(a, b, n)
                worst = max(worst, abs(g[n] - ref) / max(abs(ref), 1e-300))
    report("C6a coefficient recurrence vs closed forms p=2,3,4", worst <= 1e-10,
           f"max rel err={worst:.3e} (tol 1e-10)")


def test_c6_shift_invariance(report):
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(10):
        a, b = _random_params(rng, int(rng.integers(2, 5)))
        s = complex(rng.uniform(-0.4, 2.0), rng.uniform(-1.0, 1.0))
        g0 = norlund_coeffs(a, b, 31).coeffs
        g1 = norlund_coeffs([x + s for x in a], [y + s for y in b], 31).coeffs
        for x, y in zip(g1, g0):
            worst = max(worst, abs(x - y) / max(abs(y), 1e-300))
    report("C6b shift invariance", worst <= 1e-10, f"max rel err={worst:.3e} (tol 1e-10)")


def test_c6_moment_identity(report):
    target = gamma_ratio([4], [4.5, 6])
    resid = moment_identity_residual(A3, B3, 0, 40)
    ok = resid <= 1e-8 and abs(target - 4.2986e-3) < 5e-7
    report("C6c moment identity residual at N=40", ok,
           f"residual={resid:.3e} (tol 1e-8), target={target.real:.6e}")


def test_c7_decomposition(report):
    rng = np.random.default_rng(31)
    worst = 0.0
    for i in range(100):
        p = int(rng.integers(1, 4))
        q = p if i % 2 else p - 1
        a = [complex(rng.uniform(-2, 4), rng.uniform(-1, 1)) for _ in range(q)]
        b = [complex(rng.uniform(0.2, 5), rng.uniform(-1, 1)) for _ in range(p)]
        z = rng.uniform(0, 5) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        partial, call = decompose_shift(a, b, z, 3)
        lhs = hyp_series(a, b, z).value
        worst = max(worst, abs(lhs - (partial + call.evaluate(z))))
    report("C7 decomposition identity, 100 draws, n=3", worst <= 1e-11,
           f"max abs err={worst:.3e} (tol 1e-11)")


def test_c8_figures_deterministic(report, tmp_path):
    d1, d2 = tmp_path / "r1", tmp_path / "r2"
    assert run(["figures", "--out-dir", str(d1)], out=io.StringIO()) == 0
    assert run(["figures", "--out-dir", str(d2)], out=io.StringIO()) == 0
    names = sorted(os.listdir(d1))
    _, mismatch, errors = filecmp.cmpfiles(d1, d2, names, shallow=False)
    bad = 0
    rows = 0
    for name in names:
        with open(d1 / name, encoding="utf-8") as fh:
            for r in csv.DictReader(l for l in fh if not l.startswith("#")):
                rows += 1
                err = abs(complex(float(r["val_re"]), float(r["val_im"]))
                          - complex(float(r["ref_re"]), float(r["ref_im"])))
                bad += float(r["abs_err"]) != err
    ok = len(names) == 5 and not mismatch and not errors and bad == 0
    report("C8 figures byte-identical, abs_err consistent", ok,
           f"{len(names)} files, {len(mismatch)} differing, {bad}/{rows} inconsistent rows")
