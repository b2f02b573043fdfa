"""Uniformly convergent expansions of p-1Fp(a; b; -z^2/4) and pFp(a; b; -z).

Four expansions are provided, each a finite sum whose error bound does not
depend on z inside a strip (Bessel type) or a right half-plane (Kummer type):

* ``bessel_expansion``: 0F1 (Bessel) kernels
* ``elementary_bessel_expansion``: sin z / z and cos z with rational coefficients
* ``kummer_expansion``: Kummer M kernels
* ``elementary_kummer_expansion``: e^{-z} with rational coefficients
"""

from .besselexp import (
    ExpansionResult,
    Method,
    PQTable,
    bessel_bound,
    bessel_expansion,
    elementary_bessel_expansion,
    pq_coeffs,
)
from .errormodel import RateFit, RegionSpec, SweepRecord, fit_rate, sup_error_region, sweep
from .errors import (
    ConvergenceError,
    DegenerateDenominatorError,
    EmptyPoleSetError,
    NorlundOverflowError,
    NotFittableError,
    NumericalError,
    PoleError,
    PreconditionError,
    UnifexError,
    UnsupportedError,
)
from .kummerexp import (
    AFTable,
    afn_coeffs,
    elementary_kummer_expansion,
    f_kernel,
    h_weight,
    kummer_bound,
    kummer_expansion,
    select_min_param,
)
from .norlund import (
    NorlundTable,
    PoleReport,
    moment_identity_residual,
    norlund_coeffs,
    norlund_explicit,
    pole_analysis,
)
from .numkernel import ParameterPair, gamma_complex, gamma_ratio, pochhammer, psi_shift, rgamma
from .refseries import SeriesResult, decompose_shift, gauss2f1_neg1, hyp_series, kummer_m

__version__ = "0.1.0"
