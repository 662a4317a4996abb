'''
**corelib.parsing**
String to value handlers used by the command line surface.
'''
from __future__ import annotations

from collections.abc import Callable
from typing import Any, Generic, TypeVar

T = TypeVar('T')


class _TypeHandler(Generic[T]):
    """Internal wrapper so we can also accept plain callables."""

    def __init__(self, parse: Callable[[str], T]) -> None:
        self.parse = parse


def _list_parser(s: str) -> list[str]:
    """reads comma-separated string into a list"""
    return [x.strip() for x in s.split(',') if x.strip()]


def _float_list_parser(s: str) -> list[float]:
    """reads comma-separated numbers, e.g. ``1e2,1e5``"""
    return [float(x) for x in _list_parser(s)]


class FloatList(list):
    '''Marker type selecting the comma-separated float handler.'''


_HANDLERS: dict[type, _TypeHandler[Any]] = {
    list: _TypeHandler(_list_parser),
    FloatList: _TypeHandler(_float_list_parser)
}


def get_type_handler(type_: type[T]) -> _TypeHandler[T]:
    '''Look up the handler registered for ``type_``.

    Raises
    ------
    KeyError
        If no handler is registered for the type.
    '''
    return _HANDLERS[type_]


def parse_value(raw: str, type_: type[T]) -> T:
    '''Parse ``raw`` with the handler registered for ``type_``.

    Examples
    --------
    >>> parse_value('cpd, ccpd', list)
    ['cpd', 'ccpd']

    >>> parse_value('1e2,1e5', FloatList)
    [100.0, 100000.0]
    '''
    return get_type_handler(type_).parse(raw)
