'''Tests for cluster_cpd.corelib.utils.dataclass_utils module'''

import json
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from cluster_cpd.corelib.utils.dataclass_utils import (
    dump_dataclass,
    iter_dataclass_dict,
    json_dumps_dataclass,
    to_builtin
)


class Colour(StrEnum):
    RED = 'red'


@dataclass
class Inner:
    '''Nested sample'''
    value: float


@dataclass
class Sample:
    '''Sample dataclass for testing'''
    name: str
    weights: np.ndarray
    colour: Colour
    inner: Inner
    note: str | None = None


def _sample(note: str | None = None) -> Sample:
    return Sample('s', np.array([1.5, 2.0]), Colour.RED, Inner(np.float64(0.25)), note)


class TestToBuiltin:
    '''Test cases for to_builtin'''

    def test_numpy_values(self):
        '''Test arrays and scalars become lists and floats'''
        assert to_builtin(np.array([[1, 2]])) == [[1, 2]]
        assert type(to_builtin(np.float64(1.5))) is float

    def test_nested_containers(self):
        '''Test tuples, dicts and enums are converted recursively'''
        assert to_builtin({'a': (Colour.RED, np.int64(3))}) == {'a': ['red', 3]}


class TestDumpDataclass:
    '''Test cases for dump_dataclass'''

    def test_basic_dump(self):
        '''Test nested dataclasses and numpy fields'''
        assert dump_dataclass(_sample()) == {
            'name': 's',
            'weights': [1.5, 2.0],
            'colour': 'red',
            'inner': {'value': 0.25},
            'note': None
        }

    def test_exclude_none_and_fields(self):
        '''Test excluding None values and named fields'''
        result = dump_dataclass(_sample(), exclude_none=True, exclude={'weights'})
        assert 'note' not in result
        assert 'weights' not in result

    def test_iteration_order(self):
        '''Test fields come back in declaration order'''
        names = [name for name, _ in iter_dataclass_dict(_sample('x'))]
        assert names == ['name', 'weights', 'colour', 'inner', 'note']

    def test_json_round_trip(self):
        '''Test JSON output parses back to the dumped dictionary'''
        sample = _sample('x')
        assert json.loads(json_dumps_dataclass(sample)) == dump_dataclass(sample)
