"""Measured truncation errors over regions of the z-plane, and rate fits.

Errors are taken against the power-series oracle on a fixed grid. For the
Kummer-type methods each error is divided by H(z) = max(1, e^{-Re z}),
which is the quantity the half-plane bounds control. Kernel methods reuse
one set of partial sums for every requested N.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .besselexp import Method, bessel_bound, bessel_partial_sums, elementary_bessel_expansion
from .errors import ConvergenceError, NotFittableError, PreconditionError
from .kummerexp import (
    _split as _kummer_split,
    elementary_kummer_expansion,
    h_weight,
    kummer_bound,
    kummer_partial_sums,
)
from .norlund import norlund_coeffs
from .numkernel import ParameterPair, as_complex
from .refseries import hyp_series

DEFAULT_N_VALUES = (8, 16, 32, 64, 128)
SLOPE_TOL = 1.0
_EPS = 2.0 ** -52


@dataclass(frozen=True)
class RegionSpec:
    """A rectangular grid inside a strip |Im z| <= lam or a half-plane Re z >= lam.

    For a strip the imaginary extent is the full strip; for a half-plane it
    is ``im_range``. A count of 1 puts a single line at the low end of the
    range.
    """

    shape: str
    lam: float
    re_range: tuple[float, float]
    im_range: tuple[float, float] = (0.0, 0.0)
    grid: tuple[int, int] = (41, 9)

    def __post_init__(self):
        if self.shape not in ("strip", "halfplane"):
            raise PreconditionError(f"unknown region shape {self.shape!r}")
        if self.shape == "strip" and not self.lam > 0:
            raise PreconditionError("a strip needs lam > 0")
        if self.shape == "halfplane" and self.re_range[0] < self.lam:
            raise PreconditionError("half-plane grid starts left of Re z = lam")
        n_re, n_im = self.grid
        if n_re < 1 or n_im < 1:
            raise PreconditionError("grid counts must be >= 1")
        if self.re_range[1] < self.re_range[0]:
            raise PreconditionError("empty real range")

    @classmethod
    def strip(cls, lam, re_min, re_max, n_re=41, n_im=9):
        return cls("strip", float(lam), (float(re_min), float(re_max)), grid=(n_re, n_im))

    @classmethod
    def halfplane(cls, lam, re_max, im_min=0.0, im_max=0.0, n_re=51, n_im=1, re_min=None):
        lo = float(lam) if re_min is None else float(re_min)
        return cls("halfplane", float(lam), (lo, float(re_max)), (float(im_min), float(im_max)),
                   grid=(n_re, n_im))

    def points(self) -> np.ndarray:
        n_re, n_im = self.grid
        re = np.linspace(self.re_range[0], self.re_range[1], n_re)
        if self.shape == "strip":
            im = np.linspace(-self.lam, self.lam, n_im) if n_im > 1 else np.zeros(1)
        else:
            im = np.linspace(self.im_range[0], self.im_range[1], n_im)
        return (re[:, None] + 1j * im[None, :]).ravel()


def _method(method) -> Method:
    return method if isinstance(method, Method) else Method(method)


def reference(method, a, b, z) -> complex:
    """Series oracle in the argument convention of ``method``."""
    method = _method(method)
    z = as_complex(z)
    arg = -(z * z) / 4.0 if method in (Method.BESSEL, Method.BESSEL_ELEM) else -z
    res = hyp_series(a, b, arg)
    if not res.converged:
        raise ConvergenceError(f"series oracle did not converge at z = {z}", z=z)
    return res.value


def _weight(method, z) -> float:
    if method in (Method.KUMMER, Method.KUMMER_ELEM):
        return h_weight(z)
    return 1.0


def evaluate_many(method, a, b, z, n_values: Sequence[int]) -> dict[int, complex]:
    """Expansion values at one z for each N in ``n_values``."""
    method = _method(method)
    n_values = sorted(set(int(n) for n in n_values))
    if method is Method.BESSEL:
        sums = bessel_partial_sums(a, b, z, n_values[-1])
        return {n: complex(sums[n - 1]) for n in n_values}
    if method is Method.KUMMER:
        sums = kummer_partial_sums(a, b, z, n_values[-1])
        return {n: complex(sums[n - 1]) for n in n_values}
    if method is Method.BESSEL_ELEM:
        return {n: elementary_bessel_expansion(a, b, z, n).value for n in n_values}
    return {n: elementary_kummer_expansion(a, b, z, n).value for n in n_values}


@dataclass(frozen=True)
class ErrorTable:
    """Weighted absolute errors, one row per N, one column per grid point."""

    points: np.ndarray
    n_values: tuple[int, ...]
    values: np.ndarray
    refs: np.ndarray
    errors: np.ndarray

    def sup(self) -> dict[int, float]:
        return {n: float(self.errors[i].max()) for i, n in enumerate(self.n_values)}


def error_table(method, a, b, points: Iterable, n_values: Sequence[int]) -> ErrorTable:
    method = _method(method)
    pts = np.asarray(list(points), dtype=complex)
    ns = tuple(sorted(set(int(n) for n in n_values)))
    if not ns:
        raise PreconditionError("no N values given")
    vals = np.empty((len(ns), len(pts)), dtype=complex)
    refs = np.empty(len(pts), dtype=complex)
    errs = np.empty((len(ns), len(pts)))
    for j, z in enumerate(pts):
        refs[j] = reference(method, a, b, z)
        got = evaluate_many(method, a, b, z, ns)
        w = _weight(method, z)
        for i, n in enumerate(ns):
            vals[i, j] = got[n]
            errs[i, j] = abs(got[n] - refs[j]) / w
    return ErrorTable(pts, ns, vals, refs, errs)


def sup_errors(method, a, b, region: RegionSpec, n_values: Sequence[int]) -> dict[int, float]:
    return error_table(method, a, b, region.points(), n_values).sup()


def sup_error_region(method, a, b, region: RegionSpec, N: int) -> float:
    """max over the grid of |expansion - oracle| (divided by H(z) for Kummer-type)."""
    return sup_errors(method, a, b, region, [N])[int(N)]


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    expected_slope: float
    n_values: tuple[int, ...]
    sup_errors: tuple[float, ...] = field(default=())

    def within(self, tol: float = SLOPE_TOL) -> bool:
        return self.slope <= self.expected_slope + tol


def pole_data(method, a, b) -> tuple[float, int, float]:
    """(decay constant, multiplicity, second exponent) for the method's rate shape.

    The second exponent is the elementary-form term (Re psi - 1/2 or Re a_p);
    it is ``inf`` for the kernel forms.
    """
    method = _method(method)
    if method in (Method.BESSEL, Method.BESSEL_ELEM):
        params = ParameterPair(a, b)
        table = norlund_coeffs(params.upper, params.lower, 1)
        extra = table.psi.real - 0.5 if method is Method.BESSEL_ELEM else math.inf
    else:
        params, rest, a_p = _kummer_split(a, b)
        table = norlund_coeffs(rest, params.lower, 1)
        extra = a_p.real if method is Method.KUMMER_ELEM else math.inf
    return table.pole_a, table.pole_r, extra


def expected_slope(method, a, b) -> float:
    decay, _, extra = pole_data(method, a, b)
    if _method(method) in (Method.BESSEL, Method.BESSEL_ELEM):
        decay = decay + 0.5
    return -min(decay, extra)


def fit_log_log(n_values: Sequence[int], errors: Sequence[float], r: int = 1):
    """Least-squares line through (log N, log(err / log^{r-1} N))."""
    ns = np.asarray(n_values, dtype=float)
    es = np.asarray(errors, dtype=float)
    if len(ns) < 4:
        raise PreconditionError("need at least 4 N values")
    if np.any(np.diff(ns) <= 0):
        raise PreconditionError("N values must be strictly increasing")
    if np.any(~np.isfinite(es)) or np.any(es <= 0):
        raise NotFittableError("errors include zero or non-finite entries; nothing to fit")
    y = np.log(es)
    if r > 1:
        y = y - (r - 1) * np.log(np.log(ns))
    x = np.log(ns)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def fit_rate(method, a, b, region: RegionSpec,
             n_values: Sequence[int] = DEFAULT_N_VALUES) -> RateFit:
    """Fit the decay of the sup error against N."""
    ns = [int(n) for n in n_values]
    if len(set(ns)) < 4:
        raise PreconditionError("need at least 4 distinct N values")
    if ns != sorted(set(ns)):
        raise PreconditionError("N values must be strictly increasing")
    table = error_table(method, a, b, region.points(), ns)
    sups = table.sup()
    scale = float(np.max(np.abs(table.refs)))
    floor = 8 * _EPS * max(scale, 1.0)
    if any(sups[n] <= floor for n in ns):
        raise NotFittableError(
            "sup error is at rounding level for some N; the expansion is already exact")
    _, r, _ = pole_data(method, a, b)
    slope, intercept, r2 = fit_log_log(ns, [sups[n] for n in ns], r)
    return RateFit(slope, intercept, r2, expected_slope(method, a, b), tuple(ns),
                   tuple(sups[n] for n in ns))


def calibrate_k(method, a, b, region: RegionSpec, n_values: Sequence[int]) -> float:
    """Smallest K with measured sup error <= K * rate shape at every N given."""
    method = _method(method)
    table = error_table(method, a, b, region.points(), n_values)
    which = "elementary" if method in (Method.BESSEL_ELEM, Method.KUMMER_ELEM) else "kernel"
    k = 0.0
    for i, n in enumerate(table.n_values):
        for j, z in enumerate(table.points):
            if method in (Method.BESSEL, Method.BESSEL_ELEM):
                shape = bessel_bound(a, b, z, n, which)
            else:
                # errors are already divided by H(z)
                shape = kummer_bound(a, b, z, n, which) / h_weight(z)
            if shape > 0:
                k = max(k, table.errors[i, j] / shape)
    return k


@dataclass(frozen=True)
class SweepRecord:
    z_re: float
    z_im: float
    method: str
    n_terms: int
    val_re: float
    val_im: float
    ref_re: float
    ref_im: float

    @property
    def abs_err(self) -> float:
        return abs(complex(self.val_re, self.val_im) - complex(self.ref_re, self.ref_im))


SWEEP_HEADER = ("z_re", "z_im", "method", "n_terms", "val_re", "val_im", "ref_re", "ref_im",
                "abs_err")


def sweep(method, a, b, points: Iterable, n_values: Sequence[int]) -> list[SweepRecord]:
    """Records ordered by N, then by grid position."""
    method = _method(method)
    table = error_table(method, a, b, points, n_values)
    out = []
    for i, n in enumerate(table.n_values):
        for j, z in enumerate(table.points):
            v = table.values[i, j]
            r = table.refs[j]
            out.append(SweepRecord(float(z.real), float(z.imag), method.value, n,
                                   float(v.real), float(v.imag), float(r.real), float(r.imag)))
    return out


def fmt(x: float) -> str:
    return "%.17g" % x


def write_records(records: Iterable[SweepRecord], fh, header: bool = True) -> None:
    w = csv.writer(fh, lineterminator="\n")
    if header:
        w.writerow(SWEEP_HEADER)
    for rec in records:
        w.writerow([fmt(rec.z_re), fmt(rec.z_im), rec.method, rec.n_terms, fmt(rec.val_re),
                    fmt(rec.val_im), fmt(rec.ref_re), fmt(rec.ref_im), fmt(rec.abs_err)])
