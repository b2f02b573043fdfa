"""Complex arithmetic shared by the expansion modules.

Gamma via a 9-term Lanczos approximation (g = 7) with the reflection formula
on the left half-plane, Pochhammer products, gamma ratios that stay finite for
large arguments, and the parameter excess psi(a; b) = sum(b) - sum(a).
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import PoleError, PreconditionError

POLE_TOL = 1e-14
POCH_DIRECT_MAX = 256
# arguments beyond this go through loggamma
GAMMA_DIRECT_MAX = 50.0

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def as_complex(x) -> complex:
    z = complex(x)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise PreconditionError(f"non-finite value {x!r}")
    return z


def as_vector(xs: Iterable) -> tuple[complex, ...]:
    return tuple(as_complex(x) for x in xs)


def nonpositive_integer(x: complex, tol: float = POLE_TOL) -> bool:
    """True when ``x`` is within ``tol`` of 0, -1, -2, ..."""
    if abs(x.imag) > tol or x.real > tol:
        return False
    return abs(x.real - round(x.real)) <= tol


class Kind(enum.Enum):
    BESSEL = "bessel-type"  # len(a) == len(b) - 1
    KUMMER = "kummer-type"  # len(a) == len(b)


@dataclass(frozen=True)
class ParameterPair:
    """Upper vector ``a`` and lower vector ``b`` of a hypergeometric function."""

    upper: tuple[complex, ...]
    lower: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "upper", as_vector(self.upper))
        object.__setattr__(self, "lower", as_vector(self.lower))
        for bj in self.lower:
            if nonpositive_integer(bj):
                raise PoleError(f"lower parameter {bj} is a non-positive integer")
        if len(self.upper) not in (len(self.lower), len(self.lower) - 1):
            raise PreconditionError(
                f"need len(a) in (len(b)-1, len(b)), got {len(self.upper)}, {len(self.lower)}"
            )

    @property
    def kind(self) -> Kind:
        return Kind.KUMMER if len(self.upper) == len(self.lower) else Kind.BESSEL

    @property
    def psi(self) -> complex:
        return psi_shift(self.upper, self.lower)


def psi_shift(a: Sequence[complex] | ParameterPair, b: Sequence[complex] | None = None) -> complex:
    """Parameter excess ``sum(b) - sum(a)``.

    Accepts either a :class:`ParameterPair` or the two vectors.
    """
    if isinstance(a, ParameterPair):
        a, b = a.upper, a.lower
    return complex(math.fsum(complex(x).real for x in b) - math.fsum(complex(x).real for x in a),
                   math.fsum(complex(x).imag for x in b) - math.fsum(complex(x).imag for x in a))


def pochhammer(x: complex, n: int) -> complex:
    """Rising factorial x (x+1) ... (x+n-1).

    Direct product up to ``n = 256`` so exact zeros survive when ``x`` is a
    non-positive integer; above that, exp of a loggamma difference, which
    raises OverflowError when the product is out of the floating range.
    """
    if n < 0:
        raise PreconditionError("pochhammer needs n >= 0")
    x = complex(x)
    if n <= POCH_DIRECT_MAX:
        out = 1.0 + 0j
        for k in range(n):
            out *= x + k
        return out
    if nonpositive_integer(x, 0.0) and -x.real < n:
        return 0j
    return cmath.exp(loggamma_complex(x + n) - loggamma_complex(x))


def _sinpi(x: complex) -> complex:
    # reduce by the nearest integer first; x - n is exact in floating point
    n = round(x.real)
    s = cmath.sin(math.pi * (x - n))
    return -s if n % 2 else s


def _lanczos_sum(z: complex) -> complex:
    # z is the shifted argument (x - 1)
    acc = _LANCZOS_COEF[0] + 0j
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (z + i)
    return acc


def _check_pole(x: complex) -> None:
    if nonpositive_integer(x):
        raise PoleError(f"gamma has a pole at {x}")


def gamma_complex(x) -> complex:
    """Gamma function of a complex argument.

    Accurate to roughly 13 significant digits for ``|x| <= 50``. Raises
    :class:`PoleError` within 1e-14 of a non-positive integer.
    """
    x = complex(x)
    _check_pole(x)
    if x.real < 0.5:
        return math.pi / (_sinpi(x) * gamma_complex(1.0 - x))
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * cmath.exp((z + 0.5) * cmath.log(t) - t) * _lanczos_sum(z)


def loggamma_complex(x) -> complex:
    """A logarithm of Gamma(x); the imaginary part is only defined modulo 2*pi.

    Meant for ratios of large gammas through ``exp(lg(x) - lg(y))``.
    """
    x = complex(x)
    _check_pole(x)
    if x.real < 0.5:
        return math.log(math.pi) - cmath.log(_sinpi(x)) - loggamma_complex(1.0 - x)
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(_lanczos_sum(z))


def rgamma(x) -> complex:
    """1/Gamma(x), zero at the poles."""
    x = complex(x)
    if nonpositive_integer(x):
        return 0j
    if abs(x) <= GAMMA_DIRECT_MAX:
        return 1.0 / gamma_complex(x)
    return cmath.exp(-loggamma_complex(x))


def gamma_ratio(num: Iterable, den: Iterable = ()) -> complex:
    """prod Gamma(num) / prod Gamma(den).

    A pole in ``den`` gives 0; a pole in ``num`` raises :class:`PoleError`.
    Large arguments are combined in log space so the quotient stays finite
    whenever it is representable.
    """
    num = [complex(x) for x in num]
    den = [complex(x) for x in den]
    for x in num:
        _check_pole(x)
    if any(nonpositive_integer(y) for y in den):
        return 0j
    if all(abs(x) <= GAMMA_DIRECT_MAX for x in num + den):
        out = 1.0 + 0j
        for x in num:
            out *= gamma_complex(x)
        for y in den:
            out /= gamma_complex(y)
        return out
    lg = sum((loggamma_complex(x) for x in num), 0j) - sum((loggamma_complex(y) for y in den), 0j)
    return cmath.exp(lg)
