"""Expansions of pFp(a; b; -z) that converge uniformly in right half-planes.

With a_p the entry of ``a`` of smallest real part and a' the rest,

    pFp(a; b; -z) = Gamma(b)/Gamma(a') sum_{n<N} g_n(a'; b) / Gamma(psi' + n)
                    * M(a_p, psi' + n, -z),        psi' = psi(a'; b),

and the elementary form replaces each M by sum_{k<m} A_k F_k(-z), where
F_k(w) = int_0^1 e^{w t} (t - 1/2)^k dt is a polynomial in 1/w times e^w
plus a polynomial in 1/w.
"""

from __future__ import annotations

import cmath
import functools
import math
import warnings
from typing import Sequence

import mpmath
import numpy as np

from .besselexp import ExpansionResult, Method
from .errors import DegenerateDenominatorError, PreconditionError
from .norlund import NorlundTable, norlund_coeffs
from .numkernel import ParameterPair, as_complex, as_vector, gamma_ratio, psi_shift
from .refseries import gauss2f1_neg1, kummer_m

DEGENERATE_NUDGE = 1e-8
# |w| below this uses the Taylor path in f_kernel(method="auto")
F_SERIES_RADIUS = 0.5
_F_PAD = 60


def select_min_param(a: Sequence) -> tuple[int, tuple[complex, ...]]:
    """Index of the entry with smallest real part (first on ties), and ``a``
    with that entry swapped into the last slot."""
    a = list(as_vector(a))
    if not a:
        raise PreconditionError("empty parameter vector")
    idx = min(range(len(a)), key=lambda i: (a[i].real, i))
    a[idx], a[-1] = a[-1], a[idx]
    return idx, tuple(a)


def h_weight(z) -> float:
    """H(z) = max(1, e^{-Re z})."""
    return max(1.0, math.exp(-as_complex(z).real))


def _split(a, b):
    params = ParameterPair(a, b)
    if len(params.upper) != len(params.lower):
        raise PreconditionError("Kummer-type expansions need len(a) == len(b)")
    # sort first so that any permutation of a gives the same split; a tie in
    # Re a between entries with different Im a changes the finite-N value
    canonical = sorted(params.upper, key=lambda x: (x.real, x.imag))
    _, reordered = select_min_param(canonical)
    return params, reordered[:-1], reordered[-1]


def _check(a, b, N, elementary=False):
    params, rest, a_p = _split(a, b)
    if any(x.real <= 0 for x in rest):
        raise PreconditionError(
            "need Re a > 0 for the non-selected entries; peel off terms with decompose_shift")
    if elementary and a_p.real <= 0:
        raise PreconditionError("the elementary form needs Re a > 0 for every entry")
    if params.psi.real <= 0:
        raise PreconditionError("need Re psi(a; b) > 0; raise b with decompose_shift")
    if int(N) != N or N < 1:
        raise PreconditionError("N must be a positive integer")
    return params, rest, a_p


def _table(rest, b, N) -> NorlundTable:
    return norlund_coeffs(rest, b, N)


def _rate(table: NorlundTable, N: int) -> float:
    if math.isinf(table.pole_a):
        return 0.0
    lg = math.log(N) ** (table.pole_r - 1) if table.pole_r > 1 else 1.0
    return lg / N ** table.pole_a


def kummer_bound(a, b, z, N: int, which: str = "kernel", k_const: float = 1.0) -> float:
    """Rate shape with constant K = k_const.

    kernel:     K H(z) log^{r-1}(N) / N^alpha
    elementary: K H(z) [log^{r-1}(N) / N^alpha + N^{-Re a_p}]
    """
    _, rest, a_p = _split(a, b)
    table = _table(rest, ParameterPair(a, b).lower, 1)
    out = _rate(table, N)
    if which == "elementary":
        out += 1.0 / N ** a_p.real
    elif which != "kernel":
        raise PreconditionError(f"unknown bound form {which!r}")
    return k_const * h_weight(z) * out


def kummer_kernels(a_p, psi, z, count: int) -> np.ndarray:
    """M(a_p, psi + n, -z) for n = 0..count-1, each summed directly."""
    z = as_complex(z)
    return np.array([kummer_m(a_p, psi + n, -z) for n in range(count)], dtype=complex)


def kummer_partial_sums(a, b, z, N: int) -> np.ndarray:
    """Kernel-form truncations for every N' = 1..N at one z."""
    params, rest, a_p = _check(a, b, N)
    table = _table(rest, params.lower, N)
    pref = gamma_ratio(params.lower, rest)
    ker = kummer_kernels(a_p, table.psi, z, N)
    return pref * np.cumsum(np.asarray(table.ratio) * ker)


def kummer_expansion(a: Sequence, b: Sequence, z, N: int) -> ExpansionResult:
    """N-term Kummer-kernel expansion of pFp(a; b; -z)."""
    z = as_complex(z)
    params, rest, _ = _check(a, b, N)
    sums = kummer_partial_sums(a, b, z, N)
    table = _table(rest, params.lower, N)
    return ExpansionResult(value=complex(sums[-1]), n_terms=int(N),
                           bound_estimate=h_weight(z) * _rate(table, int(N)),
                           method=Method.KUMMER, path="series")


class AFTable:
    """A_0..A_{m-1}(a_sel, b_eff) for the elementary Kummer form.

    ``b_eff`` is the value actually used; it differs from the requested one
    by ``DEGENERATE_NUDGE`` when the terminating 2F1 hit a vanishing
    denominator.
    """

    def __init__(self, m, a_sel, b_eff, A, nudged=False):
        self.m = m
        self.a_sel = a_sel
        self.b_eff = b_eff
        self.A = A
        self.nudged = nudged

    def __repr__(self):
        return f"AFTable(m={self.m}, a_sel={self.a_sel}, b_eff={self.b_eff}, nudged={self.nudged})"


def _a_values(a, b, m):
    base = 2.0 ** (2.0 - b) * gamma_ratio([b], [a, b - a])
    out = np.empty(m, dtype=complex)
    lead = base
    for n in range(m):
        if n:
            lead = lead * 2.0 * (a - b + n) / n
        out[n] = lead * gauss2f1_neg1(1.0 - a, n, b - a - n)
    return out


@functools.lru_cache(maxsize=4096)
def _af_cached(a_sel: complex, b_eff: complex, m: int):
    try:
        return _a_values(a_sel, b_eff, m), b_eff, False
    except DegenerateDenominatorError as exc:
        nudged = b_eff + DEGENERATE_NUDGE
        warnings.warn(f"A_n({a_sel}, {b_eff}): {exc}; using b = {nudged}", RuntimeWarning,
                      stacklevel=3)
        return _a_values(a_sel, nudged, m), nudged, True


def afn_coeffs(a_sel, b_eff, m: int) -> AFTable:
    """A_n(a, b) = 2^{n+2-b} (a+1-b)_n / n! * Gamma(b) / (Gamma(a) Gamma(b-a))
    * 2F1(1-a, -n; b-a-n; -1) for n = 0..m-1."""
    if m < 0:
        raise PreconditionError("m must be >= 0")
    a_sel = as_complex(a_sel)
    b_eff = as_complex(b_eff)
    A, used, nudged = _af_cached(a_sel, b_eff, int(m))
    return AFTable(int(m), a_sel, used, tuple(complex(x) for x in A), nudged)


def _f_series(n: int, w: complex) -> complex:
    # e^{w/2} int_{-1/2}^{1/2} e^{w s} s^n ds, termwise; only n + k even survive
    total = 0j
    term = 1.0 + 0j  # w^k / k!
    k = 0
    while True:
        if (n + k) % 2 == 0:
            piece = term * 2.0 * 0.5 ** (n + k + 1) / (n + k + 1)
            total += piece
            if k > 2 * n + 8 and abs(piece) <= 1e-18 * abs(total):
                break
        k += 1
        term = term * w / k
        if k > 400:
            break
    return cmath.exp(w / 2) * total


def _f_closed(n: int, w: complex) -> complex:
    if w == 0:
        return 0j if n % 2 else complex(0.5 ** n / (n + 1))
    # the bracket cancels down to about |F_n| |w|^{n+1} / n!, so carry the digits
    r = abs(w)
    lost = math.lgamma(n + 1) + n * math.log(2.0) + math.log(n + 1) - (n + 1) * math.log(r) + r
    bits = 53 + max(0, int(math.ceil(lost / math.log(2.0)))) + 24
    with mpmath.workprec(bits):
        x = mpmath.mpc(w)
        h = x / 2
        e_plus = mpmath.mpf(0)
        e_minus = mpmath.mpf(0)
        t = mpmath.mpf(1)
        for k in range(n + 1):
            if k:
                t = t / k
            e_plus += t * h ** k
            e_minus += t * (-h) ** k
        val = mpmath.factorial(n) / (-x) ** (n + 1) * (e_plus - mpmath.exp(x) * e_minus)
        return complex(val)


def _f_recurrence(count: int, w: complex) -> np.ndarray:
    # J_k = 2^k F_k = int_0^1 e^{wt} (2t-1)^k dt satisfies
    # w J_k = e^w - (-1)^k - 2k J_{k-1}; upward while 2k <= |w|, downward above.
    ew = cmath.exp(w)
    r = abs(w)
    J = np.empty(count, dtype=complex)
    k_up = min(count - 1, int(r // 2))
    J[0] = _expm1c(w) / w
    for k in range(1, k_up + 1):
        J[k] = (ew - (-1.0) ** k - 2 * k * J[k - 1]) / w
    if k_up < count - 1:
        top = max(count, int(2 * r)) + _F_PAD
        v = 0j
        for k in range(top, k_up + 1, -1):
            v = (ew - (-1.0) ** k - w * v) / (2 * k)
            if k - 1 < count:
                J[k - 1] = v
    return J * 0.5 ** np.arange(count)


def _expm1c(w: complex) -> complex:
    if w.imag == 0:
        return complex(math.expm1(w.real))
    # e^w - 1 = e^{x}(cos y - 1) + (e^x - 1) + i e^x sin y
    ex = math.exp(w.real)
    return complex(ex * (-2.0 * math.sin(w.imag / 2) ** 2) + math.expm1(w.real), ex * math.sin(w.imag))


def f_kernel(n: int, w, method: str = "auto") -> complex:
    """F_n(w) = n! / (-w)^{n+1} [e_n(w/2) - e^w e_n(-w/2)] = int_0^1 e^{wt} (t-1/2)^n dt.

    ``"closed"`` evaluates the defining formula with enough working precision
    to absorb its cancellation; ``"series"`` sums the Taylor expansion about
    the midpoint; ``"auto"`` uses the series for |w| < 1/2 and a stable
    recurrence in n otherwise.
    """
    if n < 0:
        raise PreconditionError("n must be >= 0")
    w = as_complex(w)
    if method == "closed":
        return _f_closed(n, w)
    if method == "series" or (method == "auto" and abs(w) < F_SERIES_RADIUS):
        return _f_series(n, w)
    if method != "auto":
        raise PreconditionError(f"unknown method {method!r}")
    return complex(_f_recurrence(n + 1, w)[n])


def f_kernels(count: int, w) -> np.ndarray:
    """F_0..F_{count-1}(w) by the "auto" rule."""
    w = as_complex(w)
    if count <= 0:
        return np.empty(0, dtype=complex)
    if abs(w) < F_SERIES_RADIUS:
        return np.array([_f_series(n, w) for n in range(count)], dtype=complex)
    return _f_recurrence(count, w)


def elementary_m(rest, b, N: int) -> int:
    return int(N) + math.floor(psi_shift(rest, b).real)


def elementary_kummer_expansion(a: Sequence, b: Sequence, z, N: int,
                                m_override: int | None = None) -> ExpansionResult:
    """N-term expansion of pFp(a; b; -z) in e^{-z} and powers of 1/z.

    The outer sum runs over n = 0..N-1; the inner order is
    m = N + floor(Re psi(a'; b)) unless overridden.
    """
    params, rest, a_p = _check(a, b, N, elementary=True)
    N = int(N)
    z = as_complex(z)
    table = _table(rest, params.lower, N)
    psi = table.psi
    m = elementary_m(rest, params.lower, N) if m_override is None else int(m_override)
    if m < 1:
        raise PreconditionError(f"inner order m = {m} must be >= 1")
    pref = gamma_ratio(params.lower, rest)
    F = f_kernels(m, -z)
    total = 0j
    for n in range(N):
        if table.ratio[n] == 0:
            continue
        af = afn_coeffs(a_p, psi + n, m)
        total += table.ratio[n] * complex(np.dot(af.A, F))
    bound = h_weight(z) * (_rate(table, N) + 1.0 / N ** a_p.real)
    return ExpansionResult(value=pref * total, n_terms=N, bound_estimate=bound,
                           method=Method.KUMMER_ELEM, path="recurrence", m=m)
