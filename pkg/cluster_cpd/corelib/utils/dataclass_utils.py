'''
cluster_cpd.corelib.utils.dataclass_utils
'''

from collections.abc import Iterable
from enum import Enum
from typing import Any

import json
import dataclasses

import numpy as np


def to_builtin(value: Any) -> Any:
    '''Convert numpy containers, enums and tuples into JSON-ready builtins.

    Parameters
    ----------
    value : Any
        The value to convert, possibly nested in lists, tuples or dicts.

    Returns
    -------
    Any
        The same data made of ``dict``, ``list``, ``str``, ``int``,
        ``float``, ``bool`` and ``None`` only.
    '''
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    return value


def dump_dataclass(
    data_cls: Any,
    *,
    exclude_none: bool = False,
    exclude: set[str] | None = None
) -> dict[str, Any]:
    '''Flatten a record (results, reports, trace rows) into builtins.

    Parameters
    ----------
    data_cls : Any
        Dataclass instance to flatten.
    exclude_none : bool, optional
        Drop fields whose value is None.
    exclude : set[str] | None, optional
        Field names left out of the output.
    '''
    return {
        name: to_builtin(value)
        for name, value in iter_dataclass_dict(
            data_cls, exclude_none=exclude_none, exclude=exclude
        )
    }


def iter_dataclass_dict(
    data_cls: Any,
    *,
    exclude_none: bool = False,
    exclude: set[str] | None = None
) -> Iterable[tuple[str, Any]]:
    '''Yield ``(field, value)`` in declaration order.

    Nested dataclasses come out as plain dictionaries; arrays are left
    untouched so callers can decide how to encode them.
    '''
    skipped = exclude or set()
    for field in dataclasses.fields(data_cls):
        if field.name in skipped:
            continue
        value = getattr(data_cls, field.name, None)
        if value is None and exclude_none:
            continue
        if dataclasses.is_dataclass(value) and not isinstance(value, type):
            value = dict(iter_dataclass_dict(value))
        yield field.name, value


def json_dumps_dataclass(
    data_cls: Any,
    *,
    exclude_none: bool = False,
    exclude: set[str] | None = None,
    indent: int | None = 2
) -> str:
    '''Serialize a record with :func:`dump_dataclass` and ``json.dumps``.

    Floats keep ``repr`` precision, so the document parses back to the
    exact values.

    Parameters
    ----------
    indent : int | None, optional
        Passed through to ``json.dumps``; None gives a single line.
    '''
    flat = dump_dataclass(data_cls, exclude_none=exclude_none, exclude=exclude)
    return json.dumps(flat, indent=indent)
