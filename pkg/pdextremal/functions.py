"""Vectorised real function handles with the metadata certification needs."""
from __future__ import annotations

import abc
import csv
import logging
import math
import typing as t
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import DomainError

log = logging.getLogger(__name__)


class FunctionHandle(abc.ABC):
    """
    A real function of one variable evaluated on numpy arrays.

    Subclasses implement `evaluate` for arrays; calling the handle also accepts scalars.
    """

    @abc.abstractmethod
    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the function elementwise on the float array `x`."""

    @property
    @abc.abstractmethod
    def description(self) -> str:
        """Short human readable name used in reports."""

    def __call__(self, x):
        points = np.asarray(x, dtype=float)
        values = np.broadcast_to(np.asarray(self.evaluate(points), dtype=float), points.shape)
        return float(values) if values.ndim == 0 else values

    def __mul__(self, other: FunctionHandle) -> Product:
        return Product(self, other)


@dataclass(frozen=True)
class CosPower(FunctionHandle):
    """cos(pi x / p) ** (2n): doubly positive and p-periodic, concentrating at the multiples of p as n grows."""

    p: Fraction
    n: int

    def __post_init__(self):
        if self.p <= 0 or self.n < 1:
            raise DomainError(f"cos power needs p > 0 and n >= 1, got p={self.p}, n={self.n}")

    @property
    def period(self) -> Fraction:  # noqa: D102
        return self.p

    def evaluate(self, x: np.ndarray) -> np.ndarray:  # noqa: D102
        return np.cos(np.pi * x / float(self.p)) ** (2 * self.n)

    def period_integral(self) -> float:
        """Integral over one period, p * C(2n, n) / 4**n, computed through log-gamma so large n stay finite."""
        log_central = math.lgamma(2 * self.n + 1) - 2 * math.lgamma(self.n + 1) - 2 * self.n * math.log(2)
        return float(self.p) * math.exp(log_central)

    @property
    def description(self) -> str:  # noqa: D102
        return f"cos(pi x / {self.p})^{2 * self.n}"


@dataclass(frozen=True)
class Cosine(FunctionHandle):
    """cos(2 pi frequency x)."""

    frequency: float = 1.0

    def evaluate(self, x: np.ndarray) -> np.ndarray:  # noqa: D102
        return np.cos(2 * np.pi * self.frequency * x)

    @property
    def description(self) -> str:  # noqa: D102
        return f"cos(2 pi {self.frequency:g} x)"


@dataclass(frozen=True)
class Gaussian(FunctionHandle):
    """exp(-(x / scale) ** 2)."""

    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise DomainError("gaussian scale must be positive")

    def evaluate(self, x: np.ndarray) -> np.ndarray:  # noqa: D102
        return np.exp(-((x / self.scale) ** 2))

    @property
    def description(self) -> str:  # noqa: D102
        return f"exp(-(x / {self.scale:g})^2)"


@dataclass(frozen=True)
class Constant(FunctionHandle):
    """The constant function."""

    value: float = 1.0

    def evaluate(self, x: np.ndarray) -> np.ndarray:  # noqa: D102
        return np.full_like(x, self.value)

    @property
    def description(self) -> str:  # noqa: D102
        return f"{self.value:g}"


@dataclass(frozen=True)
class CosineSquare(FunctionHandle):
    """
    The square of a cosine polynomial, (sum_j b_j cos(2 pi j x / period)) ** 2.

    With every b_j >= 0 the inner sum is positive definite, so the square is doubly positive.
    """

    coefficients: tuple[float, ...]
    period: float

    def __post_init__(self):
        if not self.coefficients:
            raise DomainError("a cosine polynomial needs at least one coefficient")
        if self.period <= 0:
            raise DomainError("period must be positive")

    @property
    def nonnegative_coefficients(self) -> bool:  # noqa: D102
        return all(b >= 0 for b in self.coefficients)

    def evaluate(self, x: np.ndarray) -> np.ndarray:  # noqa: D102
        harmonics = np.arange(len(self.coefficients))
        phases = 2 * np.pi * np.multiply.outer(x, harmonics) / self.period
        return (np.cos(phases) @ np.asarray(self.coefficients, dtype=float)) ** 2

    @property
    def description(self) -> str:  # noqa: D102
        return f"cosine square, {len(self.coefficients) - 1} harmonics, period {self.period:g}"


@dataclass(frozen=True)
class Product(FunctionHandle):
    """Pointwise (Schur) product of two handles."""

    first: t.Callable
    second: t.Callable

    def evaluate(self, x: np.ndarray) -> np.ndarray:  # noqa: D102
        return np.asarray(self.first(x), dtype=float) * np.asarray(self.second(x), dtype=float)

    @property
    def description(self) -> str:  # noqa: D102
        return f"({describe(self.first)}) * ({describe(self.second)})"


@dataclass(frozen=True)
class SampledTable(FunctionHandle):
    """
    Linear interpolation of tabulated samples, zero outside the table.

    A table that only covers x >= 0 is read as an even function.
    """

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        if len(self.xs) != len(self.ys) or len(self.xs) < 2:
            raise DomainError("a sample table needs at least two (x, y) pairs")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise DomainError("sample abscissae must be strictly increasing")

    @property
    def is_half_table(self) -> bool:  # noqa: D102
        return self.xs[0] >= 0

    @classmethod
    def from_csv(cls, path: Path | str) -> SampledTable:
        """Read a two-column CSV of (x, f(x)) samples; a non-numeric first row is taken as a header."""
        rows = []
        with open(path, newline="") as file:
            for line_number, row in enumerate(csv.reader(file)):
                if not row:
                    continue
                try:
                    rows.append((float(row[0]), float(row[1])))
                except (ValueError, IndexError):
                    if line_number == 0:
                        continue
                    raise DomainError(f"{path}: malformed sample row {line_number + 1}: {row!r}") from None
        rows.sort()
        log.info("Read %d samples from %s.", len(rows), path)
        return cls(tuple(x for x, _ in rows), tuple(y for _, y in rows))

    def evaluate(self, x: np.ndarray) -> np.ndarray:  # noqa: D102
        points = np.abs(x) if self.is_half_table else x
        return np.interp(points, self.xs, self.ys, left=0.0, right=0.0)

    @property
    def description(self) -> str:  # noqa: D102
        return f"sampled table ({len(self.xs)} points on [{self.xs[0]:g}, {self.xs[-1]:g}])"


def describe(f: t.Callable) -> str:
    """Human readable description of any function handle."""
    description = getattr(f, "description", None)
    if isinstance(description, str):
        return description
    provenance = getattr(f, "provenance", None)
    if provenance:
        return f"piecewise linear ({provenance})"
    return getattr(f, "__name__", repr(f))
