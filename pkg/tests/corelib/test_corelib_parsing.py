'''Tests for cluster_cpd.corelib.parsing module'''

import pytest
from cluster_cpd.corelib.parsing import FloatList, get_type_handler, parse_value


class TestParseValue:
    '''Test cases for parse_value'''

    def test_float_list(self):
        '''Test comma-separated numbers'''
        assert parse_value('1e2, 1e5,', FloatList) == [100.0, 100000.0]

    def test_string_list(self):
        '''Test comma-separated names are stripped'''
        assert parse_value(' cpd , ccpd', list) == ['cpd', 'ccpd']

    def test_empty_list(self):
        '''Test separators alone give an empty list'''
        assert parse_value(' , ,', list) == []

    def test_bad_float(self):
        '''Test non-numeric entries raise ValueError'''
        with pytest.raises(ValueError):
            parse_value('1,abc', FloatList)

    @pytest.mark.parametrize('type_', [str, int, bool, complex])
    def test_unknown_type(self, type_):
        '''Test only the list handlers are registered'''
        with pytest.raises(KeyError):
            get_type_handler(type_)
