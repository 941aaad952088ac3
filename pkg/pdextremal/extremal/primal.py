"""
Primal lower estimates from squared cosine polynomials.

f = (sum_j b_j cos(2 pi j x / P)) ** 2 with b >= 0 is doubly positive, so any ratio it reaches is
a lower estimate for the central ratio. Both integrals of f are quadratic forms in b with
closed-form Gram matrices, and a coordinate step maximises the ratio of two quadratics exactly.
"""
from __future__ import annotations

import logging
import math
import typing as t
from dataclasses import dataclass

import numpy as np

from ..certify import cosine_power_expansion
from ..errors import DomainError
from ..functions import CosineSquare
from ..piecewise import DEFAULT_QUADRATURE, QuadratureConfig, integrate_sampled
from ..records import Record
from ..utils import RationalLike, as_rational

log = logging.getLogger(__name__)

DEFAULT_STARTS = 20
IMPROVEMENT_TOLERANCE = 1e-12
DENOMINATOR_FLOOR = 1e-300


@dataclass(frozen=True)
class PrimalResult(Record):
    """Best ratio found, with the coefficients reaching it and a quadrature cross-check."""

    kind = "primal-result"

    ell: float
    lower_estimate: float
    coefficients: tuple[float, ...]
    harmonics: int
    period: float
    starts: int
    seed: int
    quadrature_ratio: float
    sweeps: int

    def function(self) -> CosineSquare:  # noqa: D102
        return CosineSquare(self.coefficients, self.period)


def gram_matrix(half_width: float, harmonics: int, period: float) -> np.ndarray:
    """
    M[i, j] = integral of cos(2 pi i x / P) cos(2 pi j x / P) over [-L, L].

    Equal to L (sinc(2 (i - j) L / P) + sinc(2 (i + j) L / P)) with numpy's normalised sinc.
    """
    index = np.arange(harmonics + 1)
    scale = 2 * half_width / period
    return half_width * (
        np.sinc(np.subtract.outer(index, index) * scale) + np.sinc(np.add.outer(index, index) * scale)
    )


class _RatioAscent:
    """Coordinate ascent of b.N.b / b.D.b over b >= 0, keeping N b, D b and both forms up to date."""

    def __init__(self, numerator: np.ndarray, denominator: np.ndarray, b: np.ndarray):
        self.N = numerator
        self.D = denominator
        self.b = b.astype(float)
        self.Nb = self.N @ self.b
        self.Db = self.D @ self.b
        self.n0 = float(self.b @ self.Nb)
        self.d0 = float(self.b @ self.Db)

    @property
    def ratio(self) -> float:  # noqa: D102
        return self.n0 / self.d0

    @staticmethod
    def _stationary(n: tuple[float, float, float], d: tuple[float, float, float]) -> list[float]:
        # Stationary points of (n2 t^2 + 2 n1 t + n0) / (d2 t^2 + 2 d1 t + d0).
        (n0, n1, n2), (d0, d1, d2) = n, d
        a2, a1, a0 = n2 * d1 - n1 * d2, n2 * d0 - n0 * d2, n1 * d0 - n0 * d1
        if abs(a2) > DENOMINATOR_FLOOR:
            discriminant = a1 * a1 - 4 * a2 * a0
            if discriminant < 0:
                return []
            root = math.sqrt(discriminant)
            return [(-a1 - root) / (2 * a2), (-a1 + root) / (2 * a2)]
        if abs(a1) > DENOMINATOR_FLOOR:
            return [-a0 / a1]
        return []

    def _step(self, i: int) -> None:
        n = self.n0, float(self.Nb[i]), float(self.N[i, i])
        d = self.d0, float(self.Db[i]), float(self.D[i, i])

        def value(step: float) -> float:
            denominator = d[0] + 2 * step * d[1] + step * step * d[2]
            if denominator <= DENOMINATOR_FLOOR:
                return -math.inf
            return (n[0] + 2 * step * n[1] + step * step * n[2]) / denominator

        lowest = -float(self.b[i])
        best_step, best_value = 0.0, value(0.0)
        for step in [lowest, *(s for s in self._stationary(n, d) if s > lowest)]:
            candidate = value(step)
            if candidate > best_value + IMPROVEMENT_TOLERANCE * abs(best_value):
                best_step, best_value = step, candidate
        if best_step:
            updated = max(0.0, self.b[i] + best_step)
            step = updated - self.b[i]
            self.b[i] = updated
            self.n0 += 2 * step * n[1] + step * step * n[2]
            self.d0 += 2 * step * d[1] + step * step * d[2]
            self.Nb += step * self.N[:, i]
            self.Db += step * self.D[:, i]

    def sweep(self) -> float:
        """One pass over every coordinate, then renormalise; returns the ratio afterwards."""
        for i in range(len(self.b)):
            self._step(i)
        scale = math.sqrt(self.d0)
        self.b /= scale
        self.Nb /= scale
        self.Db /= scale
        self.n0 = float(self.b @ self.Nb)
        self.d0 = float(self.b @ self.Db)
        return self.ratio


def comb_starts(harmonics: int, period: float) -> t.Iterator[np.ndarray]:
    """
    Coefficients of cos(2 pi r x / P) ** m for every admissible comb spacing P / (2r) > 1.

    The square is cos ** (2m), a comb of peaks at multiples of P / (2r); m is as large as the
    harmonic budget allows, and the expansion of cos ** m fills harmonics r h.
    """
    r = 1
    while period / (2 * r) > 1 and r <= harmonics:
        m = harmonics // r
        b = np.zeros(harmonics + 1)
        for h, coefficient in enumerate(cosine_power_expansion(m)):
            b[h * r] = float(coefficient)
        yield b
        r += 1


def primal_search(
    ell: RationalLike,
    harmonics: int,
    period: float,
    iters: int = 200,
    seed: int = 0,
    starts: int = DEFAULT_STARTS,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> PrimalResult:
    """
    Maximise the central ratio over squared cosine polynomials with nonnegative coefficients.

    Starts are every comb start from `comb_starts` plus `starts` uniformly random vectors drawn
    from `seed`; each runs at most `iters` sweeps, stopping once a sweep stops improving.
    """
    ell_value = float(as_rational(ell))
    if harmonics < 0:
        raise DomainError(f"harmonics must be nonnegative, got {harmonics}")
    if period <= 2 * max(ell_value, 1.0):
        raise DomainError(f"the period must exceed 2 max(ell, 1), got {period}")
    if iters < 1 or starts < 0:
        raise DomainError("iters must be positive and starts nonnegative")

    numerator = gram_matrix(ell_value, harmonics, period)
    denominator = gram_matrix(1.0, harmonics, period)
    rng = np.random.default_rng(seed)
    initial = [np.eye(harmonics + 1)[0], *comb_starts(harmonics, period)]
    initial += [rng.random(harmonics + 1) for _ in range(starts)]

    best: _RatioAscent | None = None
    total_sweeps = 0
    for b in initial:
        ascent = _RatioAscent(numerator, denominator, b)
        ratio = ascent.ratio
        for _ in range(iters):
            total_sweeps += 1
            previous, ratio = ratio, ascent.sweep()
            if ratio <= previous + IMPROVEMENT_TOLERANCE * abs(previous):
                break
        if best is None or ascent.ratio > best.ratio:
            best = ascent

    coefficients = tuple(float(value) for value in best.b)
    f = CosineSquare(coefficients, float(period))
    quadrature = integrate_sampled(f, -ell_value, ell_value, cfg).value / integrate_sampled(f, -1.0, 1.0, cfg).value
    log.info("Primal search at ell=%s: ratio %.6f (quadrature %.6f).", ell, best.ratio, quadrature)
    return PrimalResult(
        ell_value,
        best.ratio,
        coefficients,
        harmonics,
        float(period),
        len(initial),
        seed,
        quadrature,
        total_sweeps,
    )
