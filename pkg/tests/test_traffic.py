import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from CodedXbarUtils.core.traffic import Flow, SubFlow, TrafficPattern, flow_label, enhanced_rate_vector, \
    is_admissible, line_loads, scale_rates, pattern_2xN, pattern_4x3_sim, pattern_full_2x3, pattern_from_dict, \
    rates_from_data, load_pattern_json, dump_pattern_json
from CodedXbarUtils.utils.utils import DimensionError, ValidationError, PatternParseError

from conftest import random_pattern


def test_fig1_subflow_order(fig1):
    pattern, rates = fig1
    assert pattern.num_flows == 4
    assert pattern.num_subflows == 6
    assert pattern.subflows[0] == SubFlow(0, (0, 1, 2), 0)
    assert pattern.subflows[2] == SubFlow(0, (0, 1, 2), 2)
    assert pattern.subflows[3] == SubFlow(1, (0,), 0)
    assert pattern.subflow_parent == (0, 0, 0, 1, 2, 3)
    assert pattern.flow_subflows[0] == (0, 1, 2)
    assert rates == (Fraction(2, 3), Fraction(1, 3), Fraction(1, 3), Fraction(1, 3))


def test_enhanced_rate_vector(fig1):
    pattern, rates = fig1
    e = enhanced_rate_vector(pattern, rates)
    assert e == (Fraction(2, 3),) * 3 + (Fraction(1, 3),) * 3


def test_enhanced_rate_vector_length_mismatch(fig1):
    pattern, _ = fig1
    with pytest.raises(DimensionError):
        enhanced_rate_vector(pattern, [Fraction(1, 2)] * 3)


def test_zero_rates():
    pattern, _ = pattern_2xN(3, 0, [0, 0, 0])
    assert enhanced_rate_vector(pattern, pattern.rates) == (Fraction(0),) * 6
    assert is_admissible(pattern, pattern.rates)[0]


def test_fig1_admissible_with_full_lines(fig1):
    pattern, rates = fig1
    admissible, loads = is_admissible(pattern, rates)
    assert admissible
    assert loads == (Fraction(2, 3), Fraction(1), Fraction(1), Fraction(1), Fraction(1))


def test_overload_is_not_admissible(fig1):
    pattern, rates = fig1
    admissible, loads = is_admissible(pattern, scale_rates(rates, '6/5'))
    assert not admissible
    assert max(loads) == Fraction(6, 5)


def test_line_loads_of_4x3_pattern():
    pattern, rates = pattern_4x3_sim(1)
    loads = line_loads(pattern, rates)
    assert loads[0] == Fraction(4, 9) + Fraction(1, 100)
    assert loads[4] == Fraction(4, 9) + Fraction(1, 100) + Fraction(2, 9) + Fraction(1, 100)


def test_scale_rates_is_exact():
    assert scale_rates([Fraction(1, 3), '0.1'], '0.7') == (Fraction(7, 30), Fraction(7, 100))


@pytest.mark.parametrize('flows, error', [
    ([Flow(0, (), Fraction(0))], ValidationError),
    ([Flow(0, (0, 0), Fraction(0))], ValidationError),
    ([Flow(0, (3,), Fraction(0))], ValidationError),
    ([Flow(2, (0,), Fraction(0))], ValidationError),
    ([Flow(0, (0,), Fraction(-1, 2))], ValidationError),
    ([Flow(0, (0, 1), Fraction(0)), Flow(0, (1, 0), Fraction(0))], ValidationError),
])
def test_invalid_patterns(flows, error):
    with pytest.raises(error):
        TrafficPattern(2, 3, flows)


def test_pattern_2xN_defaults_to_vertex_rates():
    pattern, rates = pattern_2xN(4)
    assert rates == (Fraction(3, 4),) + (Fraction(1, 4),) * 4
    assert pattern.num_subflows == 8


def test_full_2x3_pattern():
    pattern = pattern_full_2x3()
    assert pattern.num_flows == 14
    assert pattern.num_subflows == 24
    assert all(rate == 0 for rate in pattern.rates)


def test_flow_label_is_one_indexed(fig1):
    pattern, _ = fig1
    assert flow_label(pattern.flows[0]) == '(1,{1,2,3})'
    assert flow_label(pattern.subflows[4]) == '(2,{2},2)'


def test_pattern_json_round_trip(tmp_path, fig1):
    pattern, _ = fig1
    path = tmp_path / 'fig1.json'
    dump_pattern_json(pattern, path)
    loaded, rates = load_pattern_json(path)
    assert loaded.flows == pattern.flows
    assert rates == pattern.rates
    assert loaded.name == 'fig1'


def test_pattern_json_syntax_error_has_position(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"inputs": 2,\n "outputs": 3,\n "flows": [}\n')
    with pytest.raises(PatternParseError) as e:
        load_pattern_json(path)
    assert e.value.line == 3


def test_pattern_from_dict_missing_key():
    with pytest.raises(PatternParseError):
        pattern_from_dict({'inputs': 2, 'flows': []})


def test_rates_from_data_accepts_both_layouts(fig1):
    pattern, _ = fig1
    data = json.loads('{"rates": ["1/2", "0.25", 0, "1/4"]}')
    assert rates_from_data(pattern, data) == (Fraction(1, 2), Fraction(1, 4), Fraction(0), Fraction(1, 4))
    assert rates_from_data(pattern, [0, 0, 0, 1]) == (0, 0, 0, 1)


def _drawer(data):
    def draw_int(lo, hi):
        return data.draw(st.integers(min_value=lo, max_value=hi))
    return draw_int


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_enhanced_rate_vector_is_linear(data):
    draw_int = _drawer(data)
    pattern = random_pattern(draw_int, draw_int(1, 4), draw_int(1, 4), draw_int(1, 6))
    r = [Fraction(draw_int(0, 6), 6) for _ in range(pattern.num_flows)]
    s = [Fraction(draw_int(0, 6), 6) for _ in range(pattern.num_flows)]
    a, b = Fraction(draw_int(0, 4), draw_int(1, 4)), Fraction(draw_int(0, 4), draw_int(1, 4))
    combined = enhanced_rate_vector(pattern, [a * x + b * y for x, y in zip(r, s)])
    expected = [a * x + b * y for x, y in zip(enhanced_rate_vector(pattern, r), enhanced_rate_vector(pattern, s))]
    assert list(combined) == expected


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_admissibility_is_downward_closed(data):
    draw_int = _drawer(data)
    pattern = random_pattern(draw_int, draw_int(1, 4), draw_int(1, 4), draw_int(1, 6))
    rates = pattern.rates
    smaller = [rate * Fraction(draw_int(0, 4), 4) for rate in rates]
    if is_admissible(pattern, rates)[0]:
        assert is_admissible(pattern, smaller)[0]
    assert all(low <= high for low, high in zip(line_loads(pattern, smaller), line_loads(pattern, rates)))
