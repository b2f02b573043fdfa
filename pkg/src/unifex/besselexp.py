"""Expansions of p-1Fp(a; b; -z^2/4) that converge uniformly in horizontal strips.

Kernel form::

    F = Gamma(b)/Gamma(a) * sum_{n<N} g_n / Gamma(psi+n) * 0F1(-; psi+n; -z^2/4)

Elementary form: each 0F1 is replaced by the finite combination of sin z / z
and cos z with rational coefficients P_m, Q_m. Both truncations are even in
z, so the value at -z is bit-identical to the value at z.

The 0F1 family is produced by backward recurrence in the order (stable, since
it is the minimal solution) from two series values at an index high enough
that the series no longer cancels. The P_m / Q_m combination is evaluated as

    P_m sin z/z - Q_m cos z = sum_{k<=m} (1/2-nu)_k / k! * mu_k(z),
    mu_k(z) = int_0^1 t^{2k} cos(z t) dt,

with mu_k from its two-term recurrence run forward for 2k < |z| and backward
above that. This is the same finite sum, but free of the z^{-2j} cancellation
of the expanded rational functions, and it has a finite z -> 0 limit. For
large nu the weights (1/2-nu)_k / k! themselves cancel, and the sum is taken
as the 0F1 kernel minus the (non-cancelling) tail k > m instead.
"""

from __future__ import annotations

import cmath
import enum
import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PreconditionError
from .norlund import NorlundTable, norlund_coeffs
from .numkernel import ParameterPair, as_complex, gamma_ratio, pochhammer

_SQRT_PI = math.sqrt(math.pi)
# direct P/Q sums whose weights spread wider than this switch to the tail form
_DIRECT_LIMIT = 1e3
_TAIL_MAX = 200_000
# backward recurrences start this far past the turning point
_TAIL_PAD = 32


class Method(str, enum.Enum):
    BESSEL = "bessel"
    BESSEL_ELEM = "bessel-elem"
    KUMMER = "kummer"
    KUMMER_ELEM = "kummer-elem"


@dataclass(frozen=True)
class ExpansionResult:
    """Truncated expansion value with the a-priori rate shape at this N.

    ``path`` records how the kernels were evaluated; ``m`` is the inner
    truncation order of the elementary forms (0 for kernel forms).
    """

    value: complex
    n_terms: int
    bound_estimate: float
    method: Method
    path: str = ""
    m: int = 0

    def __post_init__(self):
        if self.n_terms < 1:
            raise PreconditionError("n_terms must be >= 1")
        if not self.bound_estimate >= 0.0:
            raise PreconditionError("bound_estimate must be >= 0")


@dataclass(frozen=True)
class PQTable:
    """Coefficients of P_m(z, nu) = sum_j a_j (-z^2)^-j and Q_m = sum_{j>=1} b_j (-z^2)^-j."""

    m: int
    nu: complex
    p_coeffs: tuple[complex, ...]
    q_coeffs: tuple[complex, ...]

    def evaluate(self, z) -> complex:
        """P_m sin z / z - Q_m cos z straight from the rational functions.

        Loses about log10(max_j |a_j| / |z|^{2j}) digits; fine for |z|
        well above m, poor below it.
        """
        z = as_complex(z)
        if z == 0:
            raise PreconditionError("the rational form is singular at z = 0")
        u = 1.0 / (-(z * z))
        p = 0j
        for c in reversed(self.p_coeffs):
            p = p * u + c
        q = 0j
        for c in reversed(self.q_coeffs):
            q = q * u + c
        q *= u
        return p * cmath.sin(z) / z - q * cmath.cos(z)


def _taylor_weights(nu: complex, m: int) -> np.ndarray:
    # (1/2 - nu)_k / k!, k = 0..m
    h = 0.5 - nu
    w = np.empty(m + 1, dtype=complex)
    w[0] = 1.0
    for k in range(1, m + 1):
        w[k] = w[k - 1] * (h + k - 1) / k
    return w


@functools.lru_cache(maxsize=1024)
def _inner_plan(nu: complex, m: int) -> tuple[np.ndarray, bool]:
    """Weights for sum_k (1/2-nu)_k / k! mu_k and whether to use the tail form.

    The weights alternate and grow like binomial coefficients up to k ~ Re nu,
    so the direct sum over k <= m loses about log10(sum |w_k| / (2k+1))
    digits. Past _DIRECT_LIMIT the sum is taken as the full integral minus
    the tail k > m, whose weights decay like k^-(nu+1/2) without cancelling;
    the returned weights then run past m until the tail is negligible.
    """
    w = _taylor_weights(nu, m)
    spread = float(np.sum(np.abs(w) / (2 * np.arange(m + 1) + 1)))
    if spread <= _DIRECT_LIMIT:
        return w, False
    h = 0.5 - nu
    tail = [w[-1]]
    k = m
    first = None
    while k < _TAIL_MAX:
        k += 1
        nxt = tail[-1] * (h + k - 1) / k
        tail.append(nxt)
        if first is None:
            first = abs(nxt) * k
            if first == 0:
                break
        elif abs(nxt) * k <= 1e-17 * first:
            break
    return np.concatenate([w, np.asarray(tail[1:], dtype=complex)]), True


def pq_coeffs(m: int, nu) -> PQTable:
    """a_{m,j}(nu) and b_{m,j}(nu) for j = 0..m and j = 1..m.

    Each inner sum over k is accumulated from k = m down to k = j with
    math.fsum on the real and imaginary parts separately.
    """
    if m < 0:
        raise PreconditionError("m must be >= 0")
    nu = as_complex(nu)
    poch = [pochhammer(0.5 - nu, k) for k in range(m + 1)]
    a_co = []
    b_co = []
    for j in range(m + 1):
        ta = []
        tb = []
        for k in range(m, j - 1, -1):
            # (2k)! / (k! (2(k-j))!) and (2k)! / (k! (2(k-j)+1)!)
            fa = math.exp(math.lgamma(2 * k + 1) - math.lgamma(k + 1) - math.lgamma(2 * (k - j) + 1))
            ta.append(poch[k] * fa)
            if j >= 1:
                fb = math.exp(math.lgamma(2 * k + 1) - math.lgamma(k + 1)
                              - math.lgamma(2 * (k - j) + 2))
                tb.append(poch[k] * fb)
        a_co.append(complex(math.fsum(t.real for t in ta), math.fsum(t.imag for t in ta)))
        if j >= 1:
            b_co.append(complex(math.fsum(t.real for t in tb), math.fsum(t.imag for t in tb)))
    return PQTable(m=m, nu=nu, p_coeffs=tuple(a_co), q_coeffs=tuple(b_co))


def cos_moments(z, m: int) -> np.ndarray:
    """mu_k(z) = int_0^1 t^{2k} cos(z t) dt for k = 0..m.

    mu_k = sin z / z + 2k cos z / z^2 - 2k(2k-1)/z^2 mu_{k-1} is run upward
    while 2k <= |z| and downward (from a zero start well past the turning
    point) for the rest.
    """
    z = as_complex(z)
    s = cmath.sin(z)
    c = cmath.cos(z)
    zz = z * z
    r = abs(z)
    mu = np.empty(m + 1, dtype=complex)
    k_up = min(m, int(r // 2))
    if k_up >= 1:
        mu[0] = s / z
        for k in range(1, k_up + 1):
            mu[k] = s / z + (2 * k * c - 2 * k * (2 * k - 1) * mu[k - 1]) / zz
    else:
        k_up = -1
    if k_up < m:
        top = max(m, int(r)) + _TAIL_PAD
        zs = z * s
        v = 0j
        for k in range(top, k_up + 1, -1):
            # v holds mu_k on entry; produce mu_{k-1}
            v = (zs + 2 * k * c - zz * v) / (2 * k * (2 * k - 1))
            if k - 1 <= m:
                mu[k - 1] = v
    return mu


def _series_0f1(c: complex, w: complex) -> complex:
    total = 1.0 + 0j
    term = 1.0 + 0j
    k = 0
    while True:
        term = term * w / ((k + 1) * (c + k))
        total += term
        k += 1
        if abs(term) <= 1e-17 * abs(total) or k > 2000:
            return total


def bessel_kernels(psi, z, count: int) -> np.ndarray:
    """0F1(-; psi + n; -z^2/4) for n = 0..count-1.

    Uses F_{n-1} = F_n + w F_{n+1} / ((psi+n-1)(psi+n)), w = -z^2/4, run
    down from series values at an index where c >= |w| keeps the series
    free of cancellation.
    """
    psi = as_complex(psi)
    z = as_complex(z)
    w = -(z * z) / 4.0
    top = max(count, int(math.ceil(abs(w) - psi.real))) + 2
    hi = _series_0f1(psi + top + 1, w)
    cur = _series_0f1(psi + top, w)
    out = np.empty(count, dtype=complex)
    if top < count:
        out[top] = cur
    for n in range(top, 0, -1):
        prev = cur + w * hi / ((psi + n - 1) * (psi + n))
        hi, cur = cur, prev
        if n - 1 < count:
            out[n - 1] = cur
    return out


def _check(a, b, N):
    params = ParameterPair(a, b)
    if len(params.upper) != len(params.lower) - 1:
        raise PreconditionError("Bessel-type expansions need len(a) == len(b) - 1")
    if any(x.real <= 0 for x in params.upper):
        raise PreconditionError(
            "need Re a > 0 elementwise; peel off leading terms with decompose_shift")
    if params.psi.real <= 0.5:
        raise PreconditionError(
            "need Re psi(a; b) > 1/2; raise the parameters with decompose_shift")
    if int(N) != N or N < 1:
        raise PreconditionError("N must be a positive integer")
    return params


def _table(params: ParameterPair, N: int) -> NorlundTable:
    return norlund_coeffs(params.upper, params.lower, N)


def _rate_kernel(table: NorlundTable, z: complex, N: int) -> float:
    if math.isinf(table.pole_a):
        return 0.0
    lg = math.log(N) ** (table.pole_r - 1) if table.pole_r > 1 else 1.0
    return math.exp(abs(z.imag)) * lg / N ** (table.pole_a + 0.5)


def bessel_bound(a, b, z, N: int, which: str = "kernel", k_const: float = 1.0) -> float:
    """Rate shape of the truncation error at (z, N), constant K = k_const.

    kernel:     K e^{|Im z|} log^{r-1}(N) / N^{a+1/2}
    elementary: K e^{|Im z|} [N^{-(Re psi - 1/2)} + log^{r-1}(N) / N^{a+1/2}]
    """
    params = ParameterPair(a, b)
    z = as_complex(z)
    table = _table(params, 1)
    out = _rate_kernel(table, z, N)
    if which == "elementary":
        out += math.exp(abs(z.imag)) / N ** (table.psi.real - 0.5)
    elif which != "kernel":
        raise PreconditionError(f"unknown bound form {which!r}")
    return k_const * out


def bessel_partial_sums(a, b, z, N: int) -> np.ndarray:
    """Kernel-form truncations for every N' = 1..N at one z."""
    params = _check(a, b, N)
    z = as_complex(z)
    table = _table(params, N)
    pref = gamma_ratio(params.lower, params.upper)
    ker = bessel_kernels(table.psi, z, N)
    return pref * np.cumsum(np.asarray(table.ratio) * ker)


def bessel_expansion(a: Sequence, b: Sequence, z, N: int) -> ExpansionResult:
    """N-term kernel expansion of p-1Fp(a; b; -z^2/4)."""
    z = as_complex(z)
    sums = bessel_partial_sums(a, b, z, N)
    table = _table(ParameterPair(a, b), N)
    return ExpansionResult(value=complex(sums[-1]), n_terms=int(N),
                           bound_estimate=_rate_kernel(table, z, int(N)),
                           method=Method.BESSEL, path="0f1-recurrence")


def elementary_m(psi, N: int) -> int:
    return int(N) + math.floor(complex(psi).real - 1.5)


def elementary_bessel_expansion(a: Sequence, b: Sequence, z, N: int,
                                m_override: int | None = None,
                                path: str = "moments") -> ExpansionResult:
    """N-term expansion of p-1Fp(a; b; -z^2/4) in sin z / z, cos z and powers of 1/z.

    ``m`` defaults to N + floor(Re psi - 3/2). ``path="rational"`` evaluates
    the expanded P_m, Q_m literally (undefined at z = 0, ill-conditioned for
    |z| below m); the default ``"moments"`` path gives the same sum stably.
    """
    params = _check(a, b, N)
    N = int(N)
    z = as_complex(z)
    table = _table(params, N)
    psi = table.psi
    m = elementary_m(psi, N) if m_override is None else int(m_override)
    if m < 0:
        raise PreconditionError(f"inner order m = {m} is negative")
    if path not in ("moments", "rational"):
        raise PreconditionError(f"unknown path {path!r}")
    pref = 2.0 / _SQRT_PI * gamma_ratio(params.lower, params.upper)
    coefs = [table.ratio[n] * gamma_ratio([psi + n], [psi + n - 0.5]) for n in range(N)]
    if path == "rational":
        total = sum((c * pq_coeffs(m, psi + n - 1.0).evaluate(z)
                     for n, c in enumerate(coefs) if c != 0), 0j)
        used = "rational"
    else:
        plans = [_inner_plan(psi + n - 1.0, m) for n in range(N)]
        top = max(len(w) for w, _ in plans) - 1
        mu = cos_moments(z, top)
        need_kernels = any(tail for _, tail in plans)
        ker = bessel_kernels(psi, z, N) if need_kernels else None
        total = 0j
        for n, (c, (w, tail)) in enumerate(zip(coefs, plans)):
            if c == 0:
                continue
            if tail:
                # sum_{k<=m} = int_0^1 (1-t^2)^{nu-1/2} cos(zt) dt - sum_{k>m}
                nu = psi + n - 1.0
                full = 0.5 * _SQRT_PI * gamma_ratio([nu + 0.5], [nu + 1.0]) * ker[n]
                inner = full - complex(np.dot(w[m + 1:], mu[m + 1:len(w)]))
            else:
                inner = complex(np.dot(w, mu[:len(w)]))
            total += c * inner
        used = "moments+tail" if need_kernels else "moments"
    bound = _rate_kernel(table, z, N) + math.exp(abs(z.imag)) / N ** (psi.real - 0.5)
    return ExpansionResult(value=pref * total, n_terms=N, bound_estimate=bound,
                           method=Method.BESSEL_ELEM, path=used, m=m)
