"""
Result records and their JSON form.

Every result type is a frozen dataclass deriving from `Record`. Subclasses set the `kind` class
variable, which registers them so `record_from_dict` can rebuild any record from its JSON dict.
"""
from __future__ import annotations

import dataclasses
import enum
import json
import types
import typing as t
from fractions import Fraction

import numpy as np

from .piecewise import PiecewiseLinearFn
from .utils import UNINITIALIZED, format_rational

if t.TYPE_CHECKING:
    import typing_extensions as te

_kind_to_class: t.Final[dict[str, type[Record]]] = {}


class UnknownRecordKindError(ValueError):
    """Raised when a JSON dict names a record kind that was never registered."""


class _RecordMeta(type):
    """
    Record metaclass that enforces the `kind` class variable.

    Classes with the kind initialized are added to the `_kind_to_class` dict.
    """

    def __new__(cls, name: str, bases: tuple[type, ...], attrs: dict[str, object]) -> te.Self:
        match attrs:
            case {"kind": kind}:
                pass
            case _:
                raise ValueError("The record's `kind` has to be specified.")
        klass = super().__new__(cls, name, bases, attrs)

        if kind is not UNINITIALIZED:
            if kind in _kind_to_class:
                raise RuntimeError("Only one record class can be registered for a kind.")
            _kind_to_class[kind] = klass  # type: ignore

        return klass


class Record(metaclass=_RecordMeta):
    """
    Base class for all results.

    `to_dict` and `from_dict` convert to and from plain JSON values: rationals become "num/den"
    strings, piecewise-linear functions lists of breakpoint records and enums their values.
    """

    # Access from anywhere outside this class will be str.
    kind: t.ClassVar[str] = UNINITIALIZED  # type: ignore

    def to_dict(self) -> dict[str, t.Any]:
        """Dump the fields of the record, plus its kind, to a JSON-compatible dict."""
        data = {field.name: _encode(getattr(self, field.name)) for field in dataclasses.fields(self)}
        return {"kind": self.kind} | data

    @classmethod
    def from_dict(cls, data: dict[str, t.Any]) -> te.Self:
        """
        Create a record from a dict produced by `to_dict`.

        Field values are decoded according to the dataclass annotations.
        """
        data = dict(data)
        data.pop("kind", None)
        hints = t.get_type_hints(cls)
        kwargs = {}
        for field in dataclasses.fields(cls):
            if field.name in data:
                kwargs[field.name] = _decode(hints[field.name], data[field.name])
        return cls(**kwargs)

    def to_json(self, **kwargs: t.Any) -> str:  # noqa: D102
        return json.dumps(self.to_dict(), **kwargs)


def record_from_dict(data: dict[str, t.Any]) -> Record:
    """
    Get a record instance of the registered kind from the `data` dict.

    If no record is registered for the kind, raise UnknownRecordKindError.
    """
    record_class = _kind_to_class.get(data.get("kind"))
    if record_class is None:
        raise UnknownRecordKindError(f"unknown record kind {data.get('kind')!r}")
    return record_class.from_dict(data)


def _encode(value: t.Any) -> t.Any:
    match value:
        case Record():
            return value.to_dict()
        case Fraction():
            return format_rational(value)
        case PiecewiseLinearFn():
            return value.to_json()
        case enum.Enum():
            return value.value
        case bool() | None:
            return value
        case np.bool_():
            return bool(value)
        case np.integer():
            return int(value)
        case np.floating():
            return float(value)
        case np.ndarray():
            return value.tolist()
        case tuple() | list():
            return [_encode(item) for item in value]
        case dict():
            return {str(key): _encode(item) for key, item in value.items()}
        case _:
            return value


def _decode(hint: t.Any, value: t.Any) -> t.Any:
    if value is None:
        return None
    origin = t.get_origin(hint)
    args = t.get_args(hint)
    if origin in (t.Union, types.UnionType):
        options = [arg for arg in args if arg is not type(None)]
        for option in options:
            try:
                return _decode(option, value)
            except (TypeError, ValueError, KeyError, ZeroDivisionError):
                continue
        raise ValueError(f"cannot decode {value!r} as {hint}")
    if origin is tuple:
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_decode(args[0], item) for item in value)
        return tuple(_decode(arg, item) for arg, item in zip(args, value))
    if origin is list:
        return [_decode(args[0], item) for item in value]
    if origin is dict:
        return {key: _decode(args[1], item) for key, item in value.items()}
    if hint is Fraction:
        if isinstance(value, (bool, float)):
            raise TypeError(f"{value!r} is not an exact rational")
        return Fraction(value)
    if hint is PiecewiseLinearFn:
        if not isinstance(value, list):
            raise TypeError("piecewise-linear functions are encoded as lists")
        return PiecewiseLinearFn.from_json(value)
    if isinstance(hint, type) and issubclass(hint, Record):
        return hint.from_dict(value)
    if isinstance(hint, type) and issubclass(hint, tuple) and hasattr(hint, "_fields"):
        field_hints = t.get_type_hints(hint)
        return hint(*(_decode(field_hints[name], item) for name, item in zip(hint._fields, value)))
    if isinstance(hint, type) and issubclass(hint, enum.Enum):
        return hint(value)
    if hint is float:
        if isinstance(value, (str, bool)):
            raise TypeError(f"{value!r} is not a float")
        return float(value)
    if hint is int:
        if isinstance(value, (str, bool, float)):
            raise TypeError(f"{value!r} is not an int")
        return value
    if hint is str:
        if not isinstance(value, str):
            raise TypeError(f"{value!r} is not a str")
        return value
    if hint is bool:
        if not isinstance(value, bool):
            raise TypeError(f"{value!r} is not a bool")
        return value
    return value
