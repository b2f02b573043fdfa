"""Reference values from the defining power series.

``hyp_series`` sums qFp termwise. A first pass runs in double precision and
records the largest term; when the digits lost to cancellation (largest term
over the sum) would exceed the requested tolerance, the sum is redone in
mpmath at a working precision that covers the loss. This keeps the oracle
accurate for |z| up to a few dozen, where the alternating series cancels
through 15+ digits.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass
from typing import Sequence

import mpmath

from .errors import DegenerateDenominatorError, PoleError, PreconditionError
from .numkernel import as_complex, as_vector, nonpositive_integer

DEFAULT_TOL = 1e-13
DEFAULT_MAX_TERMS = 10_000
# Kummer transformation applied when Re z is below this
KUMMER_SWITCH = 0.0
_EPS = 2.0 ** -52
_GUARD_BITS = 24
_MAX_BITS = 4000


def default_tol() -> float:
    raw = os.environ.get("UNIFEX_TOL")
    if not raw:
        return DEFAULT_TOL
    return float(raw)


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    terms_used: int
    converged: bool
    last_term_magnitude: float
    precision_bits: int = 53


def _sum_double(a, b, z, tol, max_terms):
    total = 1.0 + 0j
    term = 1.0 + 0j
    biggest = 1.0
    quiet = 0
    k = 0
    while k < max_terms - 1:
        num = z
        for x in a:
            num *= x + k
        den = k + 1.0
        for y in b:
            den *= y + k
        term = term * num / den
        total += term
        k += 1
        mag = abs(term)
        if not math.isfinite(mag) or not math.isfinite(abs(total)):
            return None
        biggest = max(biggest, mag)
        if mag <= tol * abs(total):
            quiet += 1
            if quiet == 3:
                return total, k + 1, True, mag, biggest
        else:
            quiet = 0
    return total, k + 1, False, abs(term), biggest


def _sum_mp(a, b, z, tol, max_terms, bits):
    with mpmath.workprec(bits):
        a = [mpmath.mpc(x) for x in a]
        b = [mpmath.mpc(y) for y in b]
        z = mpmath.mpc(z)
        total = mpmath.mpc(1)
        term = mpmath.mpc(1)
        quiet = 0
        k = 0
        mag = 1.0
        while k < max_terms - 1:
            num = z
            for x in a:
                num *= x + k
            den = mpmath.mpf(k + 1)
            for y in b:
                den *= y + k
            term = term * num / den
            total += term
            k += 1
            mag = abs(term)
            if mag <= tol * abs(total):
                quiet += 1
                if quiet == 3:
                    return complex(total), k + 1, True, float(mag)
            else:
                quiet = 0
        return complex(total), k + 1, False, float(mag)


def hyp_series(a: Sequence, b: Sequence, z, tol: float | None = None,
               max_terms: int = DEFAULT_MAX_TERMS) -> SeriesResult:
    """Sum qFp(a; b; z) from its power series.

    Stops after three consecutive terms below ``tol * |partial sum|``. When
    ``max_terms`` is hit the result carries ``converged=False`` rather than
    raising.
    """
    a = as_vector(a)
    b = as_vector(b)
    z = as_complex(z)
    tol = default_tol() if tol is None else tol
    if len(a) > len(b):
        raise PreconditionError("hyp_series needs q <= p (entire functions only)")
    for y in b:
        if nonpositive_integer(y):
            raise PoleError(f"lower parameter {y} is a non-positive integer")
    if z == 0:
        return SeriesResult(1.0 + 0j, 1, True, 0.0)
    first = _sum_double(a, b, z, tol, max_terms)
    if first is not None:
        total, used, ok, last, biggest = first
        size = abs(total)
        if size > 0 and _EPS * biggest <= tol * size:
            return SeriesResult(total, used, ok, last)
        loss = biggest / size if size > 0 else biggest / 1e-300
    else:
        loss = 1e300
    bits = min(_MAX_BITS, 53 + int(math.ceil(math.log2(max(loss, 1.0)))) + _GUARD_BITS)
    total, used, ok, last = _sum_mp(a, b, z, tol, max_terms, bits)
    return SeriesResult(total, used, ok, last, bits)


def kummer_m(a, b, z, tol: float | None = None, transform: bool | None = None) -> complex:
    """Kummer's function M(a, b, z) = 1F1(a; b; z).

    With ``transform`` left at ``None`` the Kummer transformation
    M(a, b, z) = e^z M(b - a, b, -z) is used for Re z < 0, which turns a
    cancelling alternating series into a positive one for real parameters.
    """
    a = as_complex(a)
    b = as_complex(b)
    z = as_complex(z)
    if transform is None:
        transform = z.real < KUMMER_SWITCH
    if transform:
        res = hyp_series((b - a,), (b,), -z, tol=tol)
        return cmath.exp(z) * res.value
    return hyp_series((a,), (b,), z, tol=tol).value


def gauss2f1_neg1(one_minus_a, n: int, c) -> complex:
    """Terminating 2F1(1-a, -n; c; -1) = sum_k (1-a)_k (-n)_k / ((c)_k k!) (-1)^k.

    Raises :class:`DegenerateDenominatorError` if (c)_k vanishes before the
    numerator has terminated the sum.
    """
    if n < 0:
        raise PreconditionError("n must be >= 0")
    alpha = as_complex(one_minus_a)
    c = complex(c)
    total = 1.0 + 0j
    term = 1.0 + 0j
    for k in range(n):
        num = (alpha + k) * (-n + k)
        if num == 0:
            break
        den = (c + k) * (k + 1)
        if den == 0:
            raise DegenerateDenominatorError(
                f"(c)_{k + 1} vanishes for c={c} while the numerator does not", index=k + 1)
        term *= -num / den
        total += term
    return total


@dataclass(frozen=True)
class ShiftedCall:
    """The q+1Fp+1 left over after peeling off the first n series terms."""

    upper: tuple[complex, ...]
    lower: tuple[complex, ...]
    prefactor: complex

    def evaluate(self, z, tol: float | None = None) -> complex:
        return self.prefactor * hyp_series(self.upper, self.lower, z, tol=tol).value


def decompose_shift(a: Sequence, b: Sequence, z, n: int) -> tuple[complex, ShiftedCall]:
    """Split qFp(a; b; z) into its degree n-1 partial sum plus a shifted remainder.

    qFp(a; b; z) = sum_{k<n} (a)_k z^k / ((b)_k k!)
                   + (a)_n z^n / ((b)_n n!) * q+1Fp+1(a+n, 1; b+n, n+1; z)

    Pick n large enough that the shifted parameters meet the Re a > 0 and
    Re psi conditions of the expansions.
    """
    if n < 1:
        raise PreconditionError("decompose_shift needs n >= 1")
    a = as_vector(a)
    b = as_vector(b)
    z = as_complex(z)
    for y in b:
        if nonpositive_integer(y):
            raise PoleError(f"lower parameter {y} is a non-positive integer")
    partial = 0j
    term = 1.0 + 0j
    for k in range(n):
        partial += term
        num = z
        for x in a:
            num *= x + k
        den = k + 1.0
        for y in b:
            den *= y + k
        term = term * num / den
    # term is now (a)_n z^n / ((b)_n n!)
    upper = tuple(x + n for x in a) + (1.0 + 0j,)
    lower = tuple(y + n for y in b) + (n + 1.0 + 0j,)
    return partial, ShiftedCall(upper, lower, term)
