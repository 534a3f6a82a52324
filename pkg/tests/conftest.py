from fractions import Fraction
from itertools import combinations

import matplotlib
import pytest

from CodedXbarUtils.core.conflict_graph import ConflictGraph, build_enhanced_conflict_graph
from CodedXbarUtils.core.traffic import Flow, TrafficPattern, pattern_fig1

matplotlib.use('Agg')


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='run the long simulation runs')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long simulation run, only with --runslow')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def fig1():
    pattern, rates = pattern_fig1()
    return pattern, rates


@pytest.fixture
def fig1_graph(fig1):
    return build_enhanced_conflict_graph(fig1[0])


def brute_force_stable_sets(graph: ConflictGraph):
    """ Every stable set, the empty one included. """
    n = graph.num_vertices
    found = []
    for size in range(n + 1):
        for vertices in combinations(range(n), size):
            if graph.is_stable(vertices):
                found.append(vertices)
    return found


def brute_force_maximal_stable_sets(graph: ConflictGraph):
    stable = brute_force_stable_sets(graph)
    stable_sets = [set(s) for s in stable]
    maximal = []
    for s, s_set in zip(stable, stable_sets):
        if not any(s_set < other for other in stable_sets):
            maximal.append(s)
    return sorted(maximal)


def brute_force_mwss_weight(graph: ConflictGraph, weights):
    return max(sum((weights[v] for v in s), 0) for s in brute_force_stable_sets(graph))


def random_pattern(draw_int, num_inputs: int, num_outputs: int, num_flows: int) -> TrafficPattern:
    """ Pattern with distinct (input, fanout) pairs drawn by `draw_int(lo, hi)`. """
    flows, seen = [], set()
    for _ in range(num_flows):
        i = draw_int(0, num_inputs - 1)
        mask = draw_int(1, 2 ** num_outputs - 1)
        fanout = tuple(j for j in range(num_outputs) if mask >> j & 1)
        if (i, fanout) in seen:
            continue
        seen.add((i, fanout))
        flows.append(Flow(i, fanout, Fraction(draw_int(0, 4), 8)))
    return TrafficPattern(num_inputs, num_outputs, flows)
