"""
Certification of positive definiteness and nonnegativity.

The sampled Toeplitz test is only ever a necessary condition: a negative eigenvalue refutes positive
definiteness, a pass merely supports it. Proofs come from `analytic_pd_certificate`, which
recognises the families whose positive definiteness is known in closed form.
"""
from __future__ import annotations

import enum
import logging
import math
import typing as t
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import linalg

from .errors import DomainError, EvaluationError, NotEvenError
from .functions import Constant, Cosine, CosineSquare, CosPower, Gaussian, Product, describe
from .piecewise import PiecewiseLinearFn
from .records import Record

log = logging.getLogger(__name__)

EVENNESS_TOLERANCE = 1e-12
MAX_EXACT_COSPOW = 64
CONSTRUCTION_TAG = "convolution-square"


class PDMethod(enum.Enum):
    """How a positive definiteness verdict was reached."""

    TOEPLITZ = "toeplitz-spectral"
    ANALYTIC = "analytic-fourier"
    CONSTRUCTION = "construction"


@dataclass(frozen=True)
class CertifyConfig:
    """Shared sampling settings for `doubly_positive_check`."""

    step: float = 0.05
    lags: int = 128
    tolerance: float = 1e-9
    window: tuple[float, float] = (-4.0, 4.0)
    nonneg_step: float = 1e-3

    def __post_init__(self):
        if self.step <= 0 or self.nonneg_step <= 0:
            raise DomainError("sampling steps must be positive")
        if self.lags < 2:
            raise DomainError("the Toeplitz test needs at least two lags")
        if self.window[0] >= self.window[1]:
            raise DomainError(f"empty sampling window {self.window}")


DEFAULT_CERTIFY = CertifyConfig()


@dataclass(frozen=True)
class PDCertificate(Record):
    """
    Verdict on positive definiteness.

    For the Toeplitz method `min_eigenvalue_ratio` is the smallest eigenvalue divided by
    max(largest eigenvalue, 1), so `passed` holds exactly when the ratio is at least -tolerance.
    """

    kind = "pd-certificate"

    method: PDMethod
    passed: bool
    reason: str
    grid_step: float | None = None
    lag_count: int | None = None
    min_eigenvalue: float | None = None
    max_eigenvalue: float | None = None
    min_eigenvalue_ratio: float | None = None
    tolerance: float | None = None
    necessary_condition_only: bool = False


class NonnegResult(t.NamedTuple):
    """Outcome of `nonneg_check` with the lowest sample."""

    passed: bool
    worst_x: float
    worst_value: float

    def __bool__(self):
        return self.passed


@dataclass(frozen=True)
class DoublyPositiveResult(Record):
    """Both halves of double positivity, plus the analytic certificate when one exists."""

    kind = "doubly-positive"

    function: str
    pd: PDCertificate
    nonneg: bool
    worst_x: float
    worst_value: float
    analytic: PDCertificate | None = None

    @property
    def passed(self) -> bool:  # noqa: D102
        return self.pd.passed and self.nonneg


def _samples(f: t.Callable, x: np.ndarray) -> np.ndarray:
    values = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    if not np.all(np.isfinite(values)):
        raise EvaluationError(f"non-finite sample of {describe(f)}")
    return values


def toeplitz_pd_check(f: t.Callable, step: float = 0.05, lags: int = 128, tol: float = 1e-9) -> PDCertificate:
    """
    Finite-section test: the matrix f((i - j) * step), 0 <= i, j < lags, must be positive semidefinite.

    Passes when the smallest eigenvalue is at least -tol * max(largest eigenvalue, 1).
    """
    if step <= 0:
        raise DomainError(f"step must be positive, got {step}")
    if lags < 2:
        raise DomainError(f"lags must be at least 2, got {lags}")
    offsets = np.arange(lags) * step
    column = _samples(f, offsets)
    mirrored = _samples(f, -offsets)
    if np.any(np.abs(column - mirrored) > EVENNESS_TOLERANCE * abs(column[0])):
        worst = int(np.argmax(np.abs(column - mirrored)))
        raise NotEvenError(f"{describe(f)} is not even: f({offsets[worst]:g}) != f({-offsets[worst]:g})")

    eigenvalues = linalg.eigvalsh(linalg.toeplitz(column))
    smallest, largest = float(eigenvalues[0]), float(eigenvalues[-1])
    ratio = smallest / max(largest, 1.0)
    passed = ratio >= -tol
    log.debug("Toeplitz test of %s: eigenvalues in [%g, %g].", describe(f), smallest, largest)
    return PDCertificate(
        PDMethod.TOEPLITZ,
        passed,
        "necessary condition only: a finite Toeplitz section was "
        + ("positive semidefinite" if passed else "found with a negative eigenvalue"),
        grid_step=step,
        lag_count=lags,
        min_eigenvalue=smallest,
        max_eigenvalue=largest,
        min_eigenvalue_ratio=ratio,
        tolerance=tol,
        necessary_condition_only=True,
    )


def nonneg_check(f: t.Callable, lo: float, hi: float, step: float = 1e-3, tol: float = 1e-9) -> NonnegResult:
    """Sample `f` on [lo, hi] and require min f >= -tol * max(1, |f(0)|)."""
    if step <= 0:
        raise DomainError(f"step must be positive, got {step}")
    if lo > hi:
        raise DomainError(f"empty range [{lo}, {hi}]")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    xs = np.append(lo + step * np.arange(count), hi)
    values = _samples(f, xs)
    worst = int(np.argmin(values))
    scale = max(1.0, abs(float(f(0.0))))
    return NonnegResult(bool(values[worst] >= -tol * scale), float(xs[worst]), float(values[worst]))


def cosine_power_expansion(m: int) -> tuple[Fraction, ...]:
    """
    Coefficients c_h, h = 0..m, with cos(t) ** m = sum_h c_h cos(h t).

    From cos(t) ** m = 2**-m sum_i C(m, i) cos((m - 2i) t): every pair of opposite frequencies
    contributes twice, except the constant term.
    """
    if m < 0:
        raise DomainError(f"power must be nonnegative, got {m}")
    coefficients = [Fraction(0)] * (m + 1)
    for h in range(m % 2, m + 1, 2):
        weight = math.comb(m, (m - h) // 2)
        coefficients[h] = Fraction(weight if h == 0 else 2 * weight, 2**m)
    return tuple(coefficients)


def cospow_coefficients(n: int) -> tuple[Fraction, ...]:
    """Coefficients a_j of cos(t) ** (2n) = sum_j a_j cos(2 j t), j = 0..n."""
    if not 1 <= n <= MAX_EXACT_COSPOW:
        raise DomainError(f"exact cosine-power coefficients are available for 1 <= n <= {MAX_EXACT_COSPOW}")
    return cosine_power_expansion(2 * n)[0::2]


def analytic_pd_certificate(f: t.Callable) -> PDCertificate | None:
    """A proof of positive definiteness for the families known in closed form, otherwise None."""
    match f:
        case CosPower(n=n) if n <= MAX_EXACT_COSPOW:
            coefficients = cospow_coefficients(n)
            passed = all(c >= 0 for c in coefficients)
            return PDCertificate(
                PDMethod.ANALYTIC, passed, f"cosine expansion of {describe(f)} has nonnegative coefficients"
            )
        case CosPower():
            return PDCertificate(
                PDMethod.ANALYTIC, True, "cosine expansion coefficients 2 C(2n, n - j) / 4**n are positive"
            )
        case Cosine():
            return PDCertificate(PDMethod.ANALYTIC, True, "a single cosine is positive definite")
        case Gaussian():
            return PDCertificate(PDMethod.ANALYTIC, True, "the Fourier transform of a gaussian is a gaussian")
        case Constant(value=value):
            return PDCertificate(PDMethod.ANALYTIC, value >= 0, "a constant is a point mass at frequency zero")
        case CosineSquare():
            return PDCertificate(
                PDMethod.ANALYTIC,
                f.nonnegative_coefficients,
                "Schur square of a cosine sum with nonnegative coefficients",
            )
        case Product(first=first, second=second):
            parts = analytic_pd_certificate(first), analytic_pd_certificate(second)
            if None in parts:
                return None
            return PDCertificate(
                PDMethod.CONSTRUCTION, all(part.passed for part in parts), "Schur product of positive definite factors"
            )
        case PiecewiseLinearFn(provenance=str(provenance)) if provenance.startswith(CONSTRUCTION_TAG):
            return PDCertificate(PDMethod.CONSTRUCTION, True, f"{provenance}: positive definite by construction")
        case _:
            return None


def doubly_positive_check(f: t.Callable, cfg: CertifyConfig = DEFAULT_CERTIFY) -> DoublyPositiveResult:
    """
    Toeplitz test plus sampled nonnegativity with shared settings.

    Piecewise-linear inputs are sampled over their exact support, everything else over `cfg.window`.
    """
    lo, hi = cfg.window
    if isinstance(f, PiecewiseLinearFn) and f.support is not None:
        lo, hi = (float(end) for end in f.support)
    pd = toeplitz_pd_check(f, cfg.step, cfg.lags, cfg.tolerance)
    nonneg = nonneg_check(f, lo, hi, cfg.nonneg_step, cfg.tolerance)
    result = DoublyPositiveResult(
        describe(f), pd, nonneg.passed, nonneg.worst_x, nonneg.worst_value, analytic_pd_certificate(f)
    )
    log.info("Doubly positive check of %s: pd=%s, nonneg=%s.", result.function, pd.passed, nonneg.passed)
    return result
