import concurrent.futures
from fractions import Fraction

import pytest

from pdextremal.utils import as_rational, format_decimal, format_rational, submit


@pytest.mark.parametrize(
    "value, expected",
    [("3/2", Fraction(3, 2)), ("1.25", Fraction(5, 4)), (0.1, Fraction(1, 10)), (2, 2), (" 7/3 ", Fraction(7, 3))],
)
def test_as_rational(value, expected):
    assert as_rational(value) == expected


def test_booleans_are_rejected():
    with pytest.raises(TypeError):
        as_rational(True)


def test_formatting():
    assert format_rational(Fraction(2)) == "2/1"
    assert format_rational(Fraction(-24, 7)) == "-24/7"
    assert format_decimal(Fraction(1, 3), 5) == "0.33333"


def test_submit_logs_unexpected_errors(caplog):
    def fail():
        raise RuntimeError("boom")

    with concurrent.futures.ThreadPoolExecutor(max_workers=1) as executor:
        expected = submit(executor, fail, suppressed_exceptions=(RuntimeError,))
        unexpected = submit(executor, fail)
        concurrent.futures.wait([expected, unexpected])
    assert sum("Error in worker call fail" in record.getMessage() for record in caplog.records) == 1


def test_submit_passes_arguments():
    with concurrent.futures.ThreadPoolExecutor(max_workers=1) as executor:
        assert submit(executor, divmod, 7, 2).result() == (3, 1)
    with pytest.raises(ValueError), concurrent.futures.ThreadPoolExecutor(max_workers=1) as executor:
        submit(executor, as_rational, "x", suppressed_exceptions=(ValueError,)).result()
