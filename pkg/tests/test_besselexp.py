import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unifex.besselexp import (
    Method,
    bessel_bound,
    bessel_expansion,
    bessel_kernels,
    bessel_partial_sums,
    cos_moments,
    elementary_bessel_expansion,
    pq_coeffs,
)
from unifex.errormodel import RegionSpec, sup_errors
from unifex.errors import PreconditionError
from unifex.norlund import norlund_coeffs
from unifex.numkernel import gamma_ratio
from unifex.refseries import hyp_series

from conftest import close

A, B = (3.0,), (3.5, 5.0)
# a non-terminating case: (1/2 - nu)_k never vanishes
A2, B2 = (1.2,), (2.3, 1.9 + 0.5j)


def closed_form(z):
    with mpmath.workdps(40):
        z = mpmath.mpf(z)
        num = (720 * z * (8 * z**4 + 105 * z**2 - 1890) * mpmath.cos(z)
               + 720 * (z**6 - 15 * z**4 - 735 * z**2 + 1890) * mpmath.sin(z))
        return float(num / z**11)


def test_kernel_examples():
    r = bessel_expansion(A, B, 0, 1)
    assert close(r.value, 16 / 21, 1e-13)
    assert r.method is Method.BESSEL and r.n_terms == 1
    # the error at fixed z decays like N^-3 (about 7.4 / N^3 here), so 1e-8
    # takes roughly a thousand terms rather than twenty
    ref = hyp_series(A, B, -0.25).value
    assert abs(bessel_expansion(A, B, 1, 20).value - ref) <= 8 / 20 ** 3
    assert abs(bessel_expansion(A, B, 1, 1000).value - ref) <= 1e-8


def test_kernel_family_against_mpmath():
    for z in (0.5, 10.0, 40.0, 40 + 2j, 3j):
        ker = bessel_kernels(5.5, z, 40)
        for n in (0, 7, 39):
            with mpmath.workdps(30):
                ref = complex(mpmath.hyp0f1(5.5 + n, -mpmath.mpc(z) ** 2 / 4))
            assert close(ker[n], ref, 1e-13)


def test_partial_sums_nest():
    sums = bessel_partial_sums(A, B, 3.0 + 0.5j, 12)
    for n in (1, 5, 12):
        assert close(sums[n - 1], bessel_expansion(A, B, 3.0 + 0.5j, n).value, 1e-14)


def test_preconditions():
    with pytest.raises(PreconditionError, match="decompose_shift"):
        bessel_expansion([-1.0], [3.5, 5], 1.0, 4)
    with pytest.raises(PreconditionError, match="psi"):
        bessel_expansion([3.0], [1.0, 2.4], 1.0, 4)
    with pytest.raises(PreconditionError):
        bessel_expansion(A, B, 1.0, 0)
    with pytest.raises(PreconditionError):
        bessel_expansion([1, 2], [3, 4], 1.0, 2)


def test_pq_small_tables():
    t = pq_coeffs(0, 2.3)
    assert t.p_coeffs == (1,) and t.q_coeffs == ()
    nu = 1.7 + 0.2j
    t = pq_coeffs(1, nu)
    assert close(t.p_coeffs[1], 2 * (0.5 - nu), 1e-15)
    assert close(t.p_coeffs[0], 1 + (0.5 - nu), 1e-15)
    assert close(t.q_coeffs[0], 2 * (0.5 - nu), 1e-15)


def test_moments_against_quadrature():
    for z in (0.3, 3.0, 17.5, 40 + 2j):
        mu = cos_moments(z, 60)
        for k in (0, 5, 30, 60):
            with mpmath.workdps(30):
                ref = complex(mpmath.quad(lambda t: t ** (2 * k) * mpmath.cos(mpmath.mpc(z) * t),
                                          [0, 0.5, 1]))
            assert close(mu[k], ref, 1e-13)
    assert np.allclose(cos_moments(0, 5), [1 / (2 * k + 1) for k in range(6)], rtol=1e-15)


def test_rational_path_agrees_for_large_z():
    for z in (20.0, 35.0 + 1j):
        for N in (1, 5, 10):
            m = elementary_bessel_expansion(A2, B2, z, N)
            r = elementary_bessel_expansion(A2, B2, z, N, path="rational")
            assert r.path == "rational"
            assert close(r.value, m.value, 1e-9, 1e-14)
    with pytest.raises(PreconditionError):
        elementary_bessel_expansion(A2, B2, 0.0, 2, path="rational")


def test_golden_208_over_231():
    r = elementary_bessel_expansion(A, B, 1e-3, 2)
    assert r.m == 6
    assert abs(r.value - 208 / 231) <= 1e-6
    assert abs(elementary_bessel_expansion(A, B, 0.0, 2).value - 208 / 231) <= 1e-14


def test_closed_form_at_z5():
    v = elementary_bessel_expansion(A, B, 5, 2).value
    assert close(v, closed_form(5), 1e-12)
    assert abs(v - 0.26466) < 1e-5


def test_closed_form_twenty_points():
    zs = np.concatenate([np.linspace(1, 30, 17), -np.array([2.0, 9.5, 27.0])])
    for z in zs:
        ref = closed_form(z)
        assert abs(elementary_bessel_expansion(A, B, z, 2).value - ref) <= 1e-10 * abs(ref)


def test_elementary_large_order_stays_accurate():
    # at N = 64 the direct weights swing through ~2^60; the tail form keeps digits
    for z in (0.5, 10.0, 33 + 1.5j):
        e = elementary_bessel_expansion(A, B, z, 64)
        assert e.path == "moments+tail"
        # (1/2 - nu)_k terminates for these parameters, so both forms coincide
        assert close(e.value, bessel_expansion(A, B, z, 64).value, 1e-10, 1e-15)
        e2 = elementary_bessel_expansion(A2, B2, z, 64)
        ref = hyp_series(A2, B2, -(complex(z) ** 2) / 4).value
        assert abs(e2.value - ref) < 1e-2


def test_elementary_large_z_within_bound():
    ref = hyp_series(A, B, -100.0).value
    r = elementary_bessel_expansion(A, B, 20, 10)
    assert abs(r.value - ref) <= r.bound_estimate
    assert r.bound_estimate == pytest.approx(bessel_bound(A, B, 20, 10, "elementary"))


@pytest.mark.parametrize("N", [1, 3, 10])
def test_kernel_elementary_consistency(N):
    # difference is the sum of the inner truncation errors, of size m^-(Re nu + 1/2)
    t = norlund_coeffs(A2, B2, N)
    psi = t.psi
    for z in (2.0, 7.5, 15 + 1j, 30.0):
        e = elementary_bessel_expansion(A2, B2, z, N)
        k = bessel_expansion(A2, B2, z, N)
        m = e.m + 1
        shape = sum(abs(t.ratio[n] * gamma_ratio([psi + n], [psi + n - 0.5]))
                    / m ** ((psi + n - 1).real + 0.5) for n in range(N))
        shape *= math.exp(abs(complex(z).imag)) * abs(2 / math.sqrt(math.pi) * gamma_ratio(B2, A2))
        assert abs(e.value - k.value) <= 100 * shape


def test_sup_errors_monotone_small_n():
    zs = np.linspace(-20, 20, 41)
    prev = math.inf
    for N in (1, 3, 5):
        err = max(abs(bessel_expansion(A, B, z, N).value - hyp_series(A, B, -z * z / 4).value)
                  for z in zs)
        assert err < prev
        prev = err


def test_strip_uniformity():
    region = RegionSpec.strip(2.0, -40, 40, 41, 9)
    sup = sup_errors("bessel", A, B, region, [2, 4, 8, 16, 32])
    vals = [sup[n] for n in (2, 4, 8, 16, 32)]
    assert all(math.isfinite(v) for v in vals)
    assert all(vals[i + 1] <= 1.1 * vals[i] for i in range(4))


def test_bound_shapes():
    assert bessel_bound(A, B, 1.0, 4) == pytest.approx(4 ** -3.5)
    assert bessel_bound(A, B, 2 + 1j, 4) == pytest.approx(math.e * 4 ** -3.5)
    assert bessel_bound(A, B, 0, 16) / bessel_bound(A, B, 0, 8) == pytest.approx(2 ** -3.5)
    assert bessel_bound(A, B, 0, 8, "elementary") == pytest.approx(8 ** -3.5 + 8 ** -5.0)
    # double pole: log factor
    assert bessel_bound([1, 1], [2, 2, 2.5], 0, 8) == pytest.approx(math.log(8) / 8 ** 1.5)
    with pytest.raises(PreconditionError):
        bessel_bound(A, B, 0, 8, "other")


@settings(max_examples=40, deadline=None)
@given(st.floats(-40, 40), st.floats(-2, 2), st.integers(1, 20))
def test_even_symmetry(x, y, N):
    z = complex(x, y)
    assert bessel_expansion(A, B, z, N).value == bessel_expansion(A, B, -z, N).value
    assert elementary_bessel_expansion(A2, B2, z, N).value == \
        elementary_bessel_expansion(A2, B2, -z, N).value
