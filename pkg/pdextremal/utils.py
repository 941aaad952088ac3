from __future__ import annotations

import concurrent.futures
import contextlib
import decimal
import enum
import logging
import typing as t
from fractions import Fraction
from functools import partial

T = t.TypeVar("T")

RationalLike = t.Union[Fraction, int, str, float]


class _Sentinels(enum.Enum):
    """Enum used to store sentinels used by the package, members should be aliased to constants with the same name."""

    UNINITIALIZED = enum.auto()
    UNBOUNDED = enum.auto()

    def __str__(self):
        return self._name_

    __repr__ = __str__


UNINITIALIZED = _Sentinels.UNINITIALIZED
UNBOUNDED = _Sentinels.UNBOUNDED


def as_rational(value: RationalLike) -> Fraction:
    """
    Convert `value` to an exact Fraction.

    Strings are parsed exactly ("3/2", "1.25", "1e-3"); floats go through their shortest repr,
    so `0.1` becomes 1/10 rather than the binary expansion of the double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value.strip())


def format_rational(value: Fraction) -> str:
    """Render `value` as the "num/den" string used in JSON and CSV output."""
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value: Fraction, digits: int = 20) -> str:
    """Render `value` as an approximate decimal with `digits` significant digits."""
    context = decimal.Context(prec=digits)
    quotient = context.divide(decimal.Decimal(value.numerator), decimal.Decimal(value.denominator))
    return f"{quotient:.{digits}g}"


def submit(
    executor: concurrent.futures.Executor,
    fn: t.Callable[..., T],
    *args: t.Any,
    suppressed_exceptions: tuple[type[Exception], ...] = (),
    **kwargs: t.Any,
) -> concurrent.futures.Future[T]:
    """
    Wrapper for `executor.submit` which logs exceptions raised in the submitted call.

    Args:
        executor: The executor to run the call in.
        fn: The function to call.
        suppressed_exceptions: Exceptions that are expected and should not be logged.
        args, kwargs: Passed to `fn`.
    Returns:
        concurrent.futures.Future: The wrapped future.
    """
    future = executor.submit(fn, *args, **kwargs)
    future.add_done_callback(
        partial(
            _log_future_exception,
            suppressed_exceptions=suppressed_exceptions,
            name=getattr(fn, "__name__", repr(fn)),
        )
    )
    return future


def _log_future_exception(
    future: concurrent.futures.Future, *, suppressed_exceptions: tuple[type[Exception], ...], name: str
) -> None:
    """Retrieve and log the exception raised in `future` if one exists."""
    with contextlib.suppress(concurrent.futures.CancelledError):
        exception = future.exception()
        # Log the exception if one exists.
        if exception and not isinstance(exception, suppressed_exceptions):
            log = logging.getLogger(__name__)
            log.error(f"Error in worker call {name} {id(future)}!", exc_info=exception)
