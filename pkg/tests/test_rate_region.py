from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from CodedXbarUtils.core.conflict_graph import graph_from_edges, build_enhanced_conflict_graph, maximal_cliques
from CodedXbarUtils.core.rate_region import ColoringSolution, fractional_weighted_coloring, verify_dual_certificate, \
    coloring_of_rates, in_rate_region, min_speedup, achievable_with_speedup, admissible_vertices, \
    min_speedup_for_admissible, uncoded_2xN_inequalities, uncoded_2xN_check, build_offline_schedule, \
    schedule_to_json, slot_table
from CodedXbarUtils.core.rational_simplex import maximize, check_optimality
from CodedXbarUtils.core.polytope import packing_polytope_vertices
from CodedXbarUtils.core.traffic import Flow, TrafficPattern, pattern_2xN, pattern_full_2x3, scale_rates, \
    enhanced_rate_vector, is_admissible
from CodedXbarUtils.utils.utils import RegionError, SizeCapError

from conftest import random_pattern


def test_fig1_is_exactly_on_the_boundary(fig1):
    pattern, rates = fig1
    solution = coloring_of_rates(pattern, rates)
    assert solution.value == 1
    assert in_rate_region(pattern, rates)
    assert min_speedup(pattern, rates) == 1


def test_fig1_scaled_needs_speedup(fig1):
    pattern, rates = fig1
    scaled = scale_rates(rates, Fraction(6, 5))
    assert min_speedup(pattern, scaled) == Fraction(6, 5)
    assert not in_rate_region(pattern, scaled)
    assert achievable_with_speedup(pattern, scaled, '6/5')
    assert not achievable_with_speedup(pattern, scaled, '119/100')


def test_zero_weights_give_empty_coloring(fig1_graph):
    solution = fractional_weighted_coloring(fig1_graph, [0] * 6)
    assert solution.value == 0
    assert solution.terms == []


def test_odd_hole_coloring():
    c5 = graph_from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    solution = fractional_weighted_coloring(c5, [Fraction(1, 2)] * 5)
    assert solution.value == Fraction(5, 4)
    assert verify_dual_certificate(c5, [Fraction(1, 2)] * 5, solution)


def test_tampered_certificate_is_rejected(fig1_graph, fig1):
    pattern, rates = fig1
    weights = enhanced_rate_vector(pattern, rates)
    solution = fractional_weighted_coloring(fig1_graph, weights)
    tampered = ColoringSolution(solution.value - Fraction(1, 10), solution.terms, solution.dual)
    assert not verify_dual_certificate(fig1_graph, weights, tampered)


@pytest.mark.parametrize('N', range(2, 9))
def test_2xN_vertex_is_achievable_with_coding(N):
    pattern, rates = pattern_2xN(N)
    assert coloring_of_rates(pattern, rates).value == 1


@pytest.mark.parametrize('N, expected', [(2, Fraction(1)), (3, Fraction(7, 6)), (4, Fraction(5, 4)),
                                         (5, Fraction(13, 10)), (8, Fraction(11, 8))])
def test_uncoded_2xN_scale(N, expected):
    r0, unicast = Fraction(1) - Fraction(1, N), [Fraction(1, N)] * N
    feasible, scale = uncoded_2xN_check(N, r0, unicast)
    assert scale == expected == Fraction(3, 2) - Fraction(1, N)
    assert feasible == (N == 2)


def test_uncoded_2xN_fourth_condition_at_fig1():
    rows = uncoded_2xN_inequalities(3, Fraction(2, 3), [Fraction(1, 3)] * 3)
    name, lhs, rhs = rows[-1]
    assert name.startswith('(4)')
    assert (lhs, rhs) == (Fraction(7, 3), Fraction(2))


def test_uncoded_2xN_zero_rates():
    feasible, scale = uncoded_2xN_check(3, 0, [0, 0, 0])
    assert feasible
    assert scale == 0


def test_admissible_vertices_contain_fig1_rates(fig1):
    pattern, rates = fig1
    vertices = admissible_vertices(pattern)
    assert tuple(rates) in vertices
    assert (Fraction(0),) * 4 in vertices


def test_min_speedup_for_admissible_of_perfect_pattern():
    pattern, _ = pattern_2xN(3)
    assert min_speedup_for_admissible(pattern) == 1


@pytest.mark.slow
def test_full_2x3_needs_five_quarters():
    assert min_speedup_for_admissible(pattern_full_2x3(), n_workers=2) == Fraction(5, 4)


def test_polytope_vertices_of_a_square():
    assert packing_polytope_vertices([[1, 0], [0, 1]]) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_polytope_dimension_cap():
    with pytest.raises(SizeCapError):
        packing_polytope_vertices([[1] * 5], max_dimension=4)


def test_polytope_vertex_cap():
    with pytest.raises(SizeCapError):
        packing_polytope_vertices([[1, 0], [0, 1]], max_vertices=3)


def test_polytope_needs_every_variable_bounded():
    with pytest.raises(ValueError):
        packing_polytope_vertices([[1, 0]])


def test_polytope_of_a_triangle_with_a_cut():
    # x + y <= 1 and 2x <= 1
    assert packing_polytope_vertices([[1, 1], [2, 0]]) == [(0, 0), (0, 1), (Fraction(1, 2), 0),
                                                           (Fraction(1, 2), Fraction(1, 2))]


def test_simplex_certificate():
    c, A, b = [3, 2], [[1, 1], [1, 3]], [4, 6]
    result = maximize(c, A, b)
    assert result.value == 12
    assert check_optimality(c, A, b, result)


def test_fig1_frame(fig1):
    pattern, rates = fig1
    frame = build_offline_schedule(pattern, rates)
    assert frame.frame_length == 3
    assert frame.value == 1
    for slot in range(3):
        assert len(frame.flow_outputs(slot)[0]) == 2
    assert frame.packets_per_frame(0) == 2
    assert all(frame.packets_per_frame(f) == 1 for f in (1, 2, 3))
    data = schedule_to_json(frame)
    assert data['frame_length'] == 3
    assert len(data['slots']) == 3


def test_single_unicast_frame():
    pattern = TrafficPattern(1, 1, [Flow(0, (0,), Fraction(1))])
    frame = build_offline_schedule(pattern, pattern.rates)
    assert frame.frame_length == 1
    assert frame.slots == [(0,)]


def test_2x5_frame_serves_four_outputs_per_slot():
    pattern, rates = pattern_2xN(5)
    frame = build_offline_schedule(pattern, rates)
    assert frame.frame_length == 5
    assert all(len(frame.flow_outputs(slot)[0]) == 4 for slot in range(5))


def test_out_of_region_frame_raises(fig1):
    pattern, rates = fig1
    with pytest.raises(RegionError) as e:
        build_offline_schedule(pattern, scale_rates(rates, Fraction(6, 5)))
    assert e.value.value == Fraction(6, 5)


def test_slot_table_layout(fig1):
    pattern, rates = fig1
    frame = build_offline_schedule(pattern, rates)
    table = slot_table(frame, {(0, 0): 'P1'}).splitlines()
    assert table[0].split() == ['slot', 'input', 'flow', 'code', 'outputs']
    assert len(table) == 1 + 3 * 2
    assert 'P1' in table[1]


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_every_coloring_has_a_valid_certificate(data):
    def draw_int(lo, hi):
        return data.draw(st.integers(min_value=lo, max_value=hi))

    pattern = random_pattern(draw_int, draw_int(1, 3), draw_int(1, 3), draw_int(1, 5))
    graph = build_enhanced_conflict_graph(pattern)
    weights = enhanced_rate_vector(pattern, pattern.rates)
    solution = fractional_weighted_coloring(graph, weights)
    assert verify_dual_certificate(graph, weights, solution)
    # never below the largest clique load
    admissible_load = max((sum(weights[v] for v in clique) for clique in maximal_cliques(graph)), default=0)
    assert solution.value >= admissible_load


def _drawer(data):
    def draw_int(lo, hi):
        return data.draw(st.integers(min_value=lo, max_value=hi))
    return draw_int


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_2xN_region_equals_admissible_region(data):
    draw_int = _drawer(data)
    N = draw_int(2, 6)
    q = draw_int(1, 6)
    r0 = Fraction(draw_int(0, q), q)
    unicast_rates = [Fraction(draw_int(0, q), q) for _ in range(N)]
    pattern, rates = pattern_2xN(N, r0, unicast_rates)
    assert in_rate_region(pattern, rates) == is_admissible(pattern, rates)[0]


@pytest.mark.parametrize('N', [2, 3, 4, 6])
def test_2xN_region_and_admissible_region_agree_on_both_sides(N):
    pattern, rates = pattern_2xN(N)
    assert in_rate_region(pattern, rates) and is_admissible(pattern, rates)[0]
    outside = scale_rates(rates, Fraction(7, 6))
    assert not in_rate_region(pattern, outside) and not is_admissible(pattern, outside)[0]


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_coloring_scales_with_the_weights(data):
    draw_int = _drawer(data)
    pattern = random_pattern(draw_int, draw_int(1, 3), draw_int(1, 3), draw_int(1, 5))
    graph = build_enhanced_conflict_graph(pattern)
    weights = enhanced_rate_vector(pattern, pattern.rates)
    c = Fraction(draw_int(1, 5), draw_int(1, 5))
    scaled = fractional_weighted_coloring(graph, [c * w for w in weights]).value
    assert scaled == c * fractional_weighted_coloring(graph, weights).value


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_coloring_is_monotone_in_the_weights(data):
    draw_int = _drawer(data)
    pattern = random_pattern(draw_int, draw_int(1, 3), draw_int(1, 3), draw_int(1, 5))
    graph = build_enhanced_conflict_graph(pattern)
    weights = enhanced_rate_vector(pattern, pattern.rates)
    smaller = [w * Fraction(draw_int(0, 3), 3) for w in weights]
    assert fractional_weighted_coloring(graph, smaller).value <= fractional_weighted_coloring(graph, weights).value
