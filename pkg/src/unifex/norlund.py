"""Norlund coefficients g_n(a; b) and the pole data that sets their decay.

The coefficients come from the recurrence in p that appends one
(alpha from a, beta from b) pair at a time, starting from g_n(-; b_1) = [n = 0].
Internally each stage carries c_n = g_n / (psi)_n, which stays bounded
(|c_n| ~ n^{-a-1}), so no stage overflows even for n in the thousands.
Raw g_n grow like Gamma(psi + n) and are only materialised on request.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np

from .errors import EmptyPoleSetError, NorlundOverflowError, PreconditionError, UnsupportedError
from .numkernel import (
    ParameterPair,
    as_vector,
    gamma_ratio,
    pochhammer,
    psi_shift,
    rgamma,
)

POLE_COINCIDENCE_TOL = 1e-9
DEFAULT_POLE_SCAN = 8


@dataclass(frozen=True)
class PoleReport:
    """Poles of s -> Gamma(a + s) / Gamma(b + s) that survive cancellation.

    ``rightmost_real`` is the real part of the rightmost pole(s), i.e. the
    negated decay constant ``a``; ``multiplicity`` is the largest net
    multiplicity among poles on that vertical line.
    """

    rightmost_real: float
    multiplicity: int
    pole_list: tuple[tuple[complex, int], ...]

    @property
    def decay(self) -> float:
        return -self.rightmost_real


def pole_analysis(a: Sequence, b: Sequence, scan: int = DEFAULT_POLE_SCAN,
                  tol: float = POLE_COINCIDENCE_TOL) -> PoleReport:
    """Enumerate candidate poles s = -a_j - m, m = 0..scan, with net multiplicity.

    The net multiplicity at a candidate is the number of numerator gamma
    factors with a pole there minus the number of denominator factors with a
    pole there. Candidates with non-positive net multiplicity are dropped.
    Raises :class:`EmptyPoleSetError` when nothing survives.
    """
    a = as_vector(a)
    b = as_vector(b)

    def hits(c, vec):
        count = 0
        for v in vec:
            d = c - v
            if abs(d.imag) <= tol and d.real > -tol and abs(d.real - round(d.real)) <= tol:
                count += 1
        return count

    seen: list[complex] = []
    poles: list[tuple[complex, int]] = []
    for aj in a:
        for m in range(scan + 1):
            c = aj + m
            if any(abs(c - s) <= tol for s in seen):
                continue
            seen.append(c)
            net = hits(c, a) - hits(c, b)
            if net > 0:
                poles.append((-c, net))
    if not poles:
        raise EmptyPoleSetError(
            f"all poles of Gamma(a+s)/Gamma(b+s) cancel within the scanned window (scan={scan})")
    poles.sort(key=lambda pm: (-pm[0].real, pm[0].imag))
    right = max(p.real for p, _ in poles)
    r = max(k for p, k in poles if abs(p.real - right) <= tol)
    return PoleReport(rightmost_real=right, multiplicity=r, pole_list=tuple(poles))


@dataclass(frozen=True)
class NorlundTable:
    """g_0..g_{N-1} for a vector ``a`` of length p-1 and ``b`` of length p.

    ``scaled[n]`` is g_n / (psi + shift)_n and ``ratio[n]`` is
    g_n / Gamma(psi + n); both are always finite. ``pole_a`` is ``inf`` when
    every pole cancels (the coefficients then terminate).
    """

    params: ParameterPair
    psi: complex
    ratio: tuple[complex, ...]
    scaled: tuple[complex, ...]
    shift: int
    pole_a: float
    pole_r: int

    def __len__(self):
        return len(self.ratio)

    @property
    def coeffs(self) -> tuple[complex, ...]:
        """Raw g_n. Raises :class:`NorlundOverflowError` if any is out of range."""
        base = self.psi + self.shift
        out = []
        poch = 1.0 + 0j
        with np.errstate(over="ignore", invalid="ignore"):
            for n, c in enumerate(self.scaled):
                g = c * poch
                if not (math.isfinite(g.real) and math.isfinite(g.imag)):
                    raise NorlundOverflowError(
                        f"|g_{n}| exceeds the floating range; use the ratio form")
                out.append(g)
                poch *= base + n
        return tuple(out)


def _stage_psis(a, b):
    psis = [b[0]]
    for alpha, beta in zip(a, b[1:]):
        psis.append(psis[-1] + beta - alpha)
    return psis


def _append_pair(c: np.ndarray, psi_old: complex, alpha: complex, beta: complex) -> np.ndarray:
    # c'_n = sum_s E_{n-s} W(n, s) c_s with E_k = (beta-alpha)_k / k! and
    # W(n, s) = (psi_old - alpha + s)_{n-s} (psi_old)_s / (psi_new)_n
    n_max = len(c)
    psi_new = psi_old + beta - alpha
    k = np.arange(n_max)
    e = np.ones(n_max, dtype=complex)
    if n_max > 1:
        e[1:] = np.cumprod((beta - alpha + k[:-1]) / (k[:-1] + 1.0))
    rho = (psi_old - alpha + k) / (psi_old + k)
    q = np.ones(n_max, dtype=complex)
    if n_max > 1:
        q[1:] = np.cumprod((psi_old + k[:-1]) / (psi_new + k[:-1]))
    out = np.empty(n_max, dtype=complex)
    out[0] = c[0]
    for n in range(1, n_max):
        # W(n, s) for s = n, n-1, ..., 0
        w = np.empty(n + 1, dtype=complex)
        w[0] = q[n]
        w[1:] = q[n] * np.cumprod(rho[n - 1::-1])
        out[n] = np.sum(e[: n + 1] * w * c[n::-1])
    return out


@functools.lru_cache(maxsize=256)
def _build(a: tuple, b: tuple, n_max: int, scan: int):
    psis = _stage_psis(a, b)
    lowest = min(p.real for p in psis)
    shift = 0 if lowest >= 1.0 else int(math.ceil(1.0 - lowest))
    a_s = [x + shift for x in a]
    b_s = [x + shift for x in b]
    c = np.zeros(n_max, dtype=complex)
    c[0] = 1.0
    psi = b_s[0]
    for alpha, beta in zip(a_s, b_s[1:]):
        c = _append_pair(c, psi, alpha, beta)
        psi = psi + beta - alpha
    psi0 = psi - shift
    inv = rgamma(psi0 + shift)
    ratio = tuple(complex(c[n]) * pochhammer(psi0 + n, shift) * inv for n in range(n_max))
    try:
        report = pole_analysis(a, b, scan=scan)
        pole_a, pole_r = report.decay, report.multiplicity
    except EmptyPoleSetError:
        pole_a, pole_r = math.inf, 1
    return psi0, ratio, tuple(complex(x) for x in c), shift, pole_a, pole_r


def norlund_coeffs(a: Sequence, b: Sequence, n_max: int,
                   pole_scan: int = DEFAULT_POLE_SCAN) -> NorlundTable:
    """Build g_0..g_{n_max-1}(a; b) by the pair-appending recurrence.

    ``b[0]`` seeds the p = 1 stage; the pairs (a[j], b[j+1]) are appended in
    input order.
    """
    params = ParameterPair(a, b)
    if len(params.upper) != len(params.lower) - 1:
        raise PreconditionError("norlund_coeffs needs len(a) == len(b) - 1")
    if n_max < 1:
        raise PreconditionError("n_max must be >= 1")
    psi, ratio, scaled, shift, pole_a, pole_r = _build(
        params.upper, params.lower, int(n_max), int(pole_scan))
    return NorlundTable(params=params, psi=psi, ratio=ratio, scaled=scaled, shift=shift,
                        pole_a=pole_a, pole_r=pole_r)


EXPLICIT_DPS = 40


def _terminating_sum(n, num, den):
    # sum_k (-n)_k prod (num)_k / (prod (den)_k k!) at unit argument, in mp arithmetic
    total = mpmath.mpc(1)
    term = mpmath.mpc(1)
    for k in range(n):
        f = mpmath.mpf(-n + k)
        for x in num:
            f *= x + k
        d = mpmath.mpf(k + 1)
        for y in den:
            d *= y + k
        if f == 0:
            break
        if d == 0:
            raise UnsupportedError("closed form has a vanishing denominator for these parameters")
        term *= f / d
        total += term
    return total


def norlund_explicit(a: Sequence, b: Sequence, n: int) -> complex:
    """Closed-form g_n, used only to cross-check :func:`norlund_coeffs`.

    General formulas for n <= 2 at any p; Norlund's closed forms for p = 2, 3
    and the p = 4 double sum for any n. The alternating terminating sums
    cancel badly in double precision, so they run at 40 digits.
    """
    a = as_vector(a)
    b = as_vector(b)
    p = len(b)
    if len(a) != p - 1:
        raise PreconditionError("need len(a) == len(b) - 1")
    if n < 0:
        raise PreconditionError("n must be >= 0")
    if n == 0:
        return 1.0 + 0j
    with mpmath.workdps(EXPLICIT_DPS):
        return complex(_explicit_mp([mpmath.mpc(x) for x in a], [mpmath.mpc(y) for y in b], n))


def _explicit_mp(a, b, n):
    rf = mpmath.rf
    p = len(b)
    # partial excesses psi_m = sum_{i<=m} (b_i - a_i), m = 1..p-1
    psim = []
    acc = mpmath.mpc(0)
    for m in range(p - 1):
        acc += b[m] - a[m]
        psim.append(acc)
    if n == 1:
        return mpmath.fsum((b[m + 1] - a[m]) * psim[m] for m in range(p - 1))
    if n == 2:
        first = mpmath.fsum(rf(b[m + 1] - a[m], 2) * rf(psim[m], 2) for m in range(p - 1)) / 2
        second = mpmath.mpc(0)
        for k in range(1, p - 1):
            inner = mpmath.fsum((b[m + 1] - a[m]) * psim[m] for m in range(k))
            second += (b[k + 1] - a[k]) * (psim[k] + 1) * inner
        return first + second
    fact = mpmath.factorial(n)
    if p == 2:
        return rf(b[0] - a[0], n) * rf(b[1] - a[0], n) / fact
    if p == 3:
        nu3 = mpmath.fsum(b) - mpmath.fsum(a)
        lead = rf(nu3 - b[1], n) * rf(nu3 - b[2], n) / fact
        return lead * _terminating_sum(n, (b[0] - a[0], b[0] - a[1]), (nu3 - b[1], nu3 - b[2]))
    if p == 4:
        nu2 = b[0] + b[1] - a[0]
        nu4 = mpmath.fsum(b) - mpmath.fsum(a)
        lead = rf(nu4 - b[2], n) * rf(nu4 - b[3], n) / fact
        total = mpmath.mpc(0)
        term = mpmath.mpc(1)
        for k in range(n + 1):
            if k:
                f = (-n + k - 1) * (nu2 - a[1] + k - 1) * (nu2 - a[2] + k - 1)
                d = (nu4 - b[2] + k - 1) * (nu4 - b[3] + k - 1) * k
                if f == 0:
                    break
                if d == 0:
                    raise UnsupportedError("closed form has a vanishing denominator")
                term *= f / d
            total += term * _terminating_sum(k, (b[0] - a[0], b[1] - a[0]),
                                             (nu2 - a[1], nu2 - a[2]))
        return lead * total
    raise UnsupportedError(f"no closed form for p={p}, n={n}")


def moment_identity_residual(a: Sequence, b: Sequence, m: int, N: int) -> float:
    """|sum_{n<N} g_n / Gamma(psi+n+m+1) - Gamma(a+m+1) / Gamma(b+m+1)|.

    The sum is the termwise Beta integral of the Norlund expansion against
    t^m, so the residual tends to zero with N.
    """
    a = as_vector(a)
    b = as_vector(b)
    psi = psi_shift(a, b)
    if psi.real <= 0:
        raise PreconditionError("moment identity needs Re psi(a; b) > 0")
    table = norlund_coeffs(a, b, N)
    if not table.pole_a > m:
        raise PreconditionError(f"moment identity needs pole_a > m (pole_a={table.pole_a}, m={m})")
    terms = [table.ratio[n] / pochhammer(psi + n, m + 1) for n in range(N)]
    partial = complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
    target = gamma_ratio([x + m + 1 for x in a], [y + m + 1 for y in b])
    return abs(partial - target)
