import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unifex.errors import EmptyPoleSetError, NorlundOverflowError, PreconditionError
from unifex.norlund import (
    moment_identity_residual,
    norlund_coeffs,
    norlund_explicit,
    pole_analysis,
)
from unifex.numkernel import gamma_ratio, rgamma

from conftest import close


def random_params(rng, p):
    a = [complex(rng.uniform(0.5, 4.0), rng.uniform(-1.0, 1.0)) for _ in range(p - 1)]
    b = [complex(rng.uniform(0.5, 6.0), rng.uniform(-1.0, 1.0)) for _ in range(p)]
    return a, b


def rel(x, y):
    return abs(x - y) / max(abs(y), 1e-300)


def test_first_coefficients():
    t = norlund_coeffs([3], [3.5, 5], 5)
    assert np.allclose(t.coeffs, [1, 1, 2.25, 7.5, 32.8125], rtol=1e-14)
    assert t.psi == 5.5
    assert (t.pole_a, t.pole_r) == (3.0, 1)


def test_p1_terminates():
    t = norlund_coeffs([], [2.5], 6)
    assert t.coeffs == (1, 0, 0, 0, 0, 0)
    assert math.isinf(t.pole_a)


def test_ratio_matches_coeffs():
    t = norlund_coeffs([1 + 0.5j, 2], [3, 2.5 - 1j, 4], 30)
    for n, g in enumerate(t.coeffs):
        assert close(t.ratio[n], g * rgamma(t.psi + n), 1e-12)


def test_shifted_stage_table():
    # b_1 = 1 with a pair that drives an intermediate stage psi below 1
    t = norlund_coeffs([5, 1], [1, 2, 3], 4)
    assert t.shift >= 1
    assert np.allclose(t.coeffs, [1, 6, 6, 0], atol=1e-12)


@pytest.mark.parametrize("p", [2, 3, 4])
def test_recurrence_matches_closed_forms(p):
    rng = np.random.default_rng(100 + p)
    worst = 0.0
    for _ in range(10):
        a, b = random_params(rng, p)
        t = norlund_coeffs(a, b, 31)
        for n in range(31):
            worst = max(worst, rel(t.coeffs[n], norlund_explicit(a, b, n)))
    assert worst <= 1e-10


def test_general_small_n():
    a, b = [1.2, 0.7, 2.0, 1.1], [2.0, 3.1, 1.4, 2.2, 5.0]
    t = norlund_coeffs(a, b, 3)
    for n in range(3):
        assert close(t.coeffs[n], norlund_explicit(a, b, n), 1e-12)


def test_shift_invariance():
    rng = np.random.default_rng(7)
    for _ in range(10):
        a, b = random_params(rng, 3)
        s = complex(rng.uniform(-0.4, 2.0), rng.uniform(-1, 1))
        g0 = norlund_coeffs(a, b, 25).coeffs
        g1 = norlund_coeffs([x + s for x in a], [y + s for y in b], 25).coeffs
        for x, y in zip(g1, g0):
            assert rel(x, y) <= 1e-10


def test_ratio_decay_rate():
    t = norlund_coeffs([3], [3.5, 5], 513)
    for n in (64, 128, 256, 512):
        assert 0.3 < abs(t.ratio[n]) * n ** 4 < 0.7


def test_overflow_reported():
    t = norlund_coeffs([1], [2, 3], 300)
    with pytest.raises(NorlundOverflowError):
        t.coeffs
    assert all(math.isfinite(abs(r)) for r in t.ratio)


def test_pole_analysis_cases():
    r = pole_analysis([3], [3.5, 5])
    assert (r.decay, r.multiplicity) == (3.0, 1)
    r = pole_analysis([1, 1], [2, 2, 2])
    assert (r.decay, r.multiplicity) == (1.0, 2)
    r = pole_analysis([1.5], [2, 3])
    assert r.decay == 1.5
    with pytest.raises(EmptyPoleSetError):
        pole_analysis([2], [1, 3])


def test_moment_target_value():
    target = gamma_ratio([4], [4.5, 6])
    assert abs(target - 4.2986e-3) < 5e-7


def test_moment_residual_decreases():
    r10 = moment_identity_residual([3], [3.5, 5], 0, 10)
    r40 = moment_identity_residual([3], [3.5, 5], 0, 40)
    assert r40 < r10 / 50
    with pytest.raises(PreconditionError):
        moment_identity_residual([3], [3.5, 5], 3, 10)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 5), st.floats(0.3, 5), st.floats(0.3, 5), st.integers(0, 12))
def test_p2_formula_property(a1, b1, b2, n):
    got = norlund_coeffs([a1], [b1, b2], n + 1).coeffs[n]
    assert rel(got, norlund_explicit([a1], [b1, b2], n)) <= 1e-11
