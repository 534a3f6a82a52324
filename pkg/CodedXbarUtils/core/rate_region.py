import logging
from fractions import Fraction
from functools import lru_cache
from typing import List, Tuple, Sequence, Dict, Optional, Union

from pebble import ProcessPool

from CodedXbarUtils.core.conflict_graph import ConflictGraph, StableSet, build_enhanced_conflict_graph, \
    enumerate_maximal_stable_sets
from CodedXbarUtils.core.data_objects import BaseObject
from CodedXbarUtils.core.polytope import packing_polytope_vertices
from CodedXbarUtils.core.rational_simplex import maximize
from CodedXbarUtils.core.traffic import TrafficPattern, Flow, enhanced_rate_vector, as_rate_vector, is_admissible, \
    flow_label
from CodedXbarUtils.utils import MAX_ENUMERATION_VERTICES
from CodedXbarUtils.utils.utils import ValidationError, DimensionError, RegionError, ContractError, to_fraction, \
    fraction_to_str, lcm_of_denominators

_log = logging.getLogger(__name__)


class ColoringSolution(BaseObject):
    """
    Optimal fractional weighted coloring: stable sets with positive coefficients covering the weights, together with
    the dual vector certifying the value.
    """
    def __init__(self, value: Fraction, terms: List[Tuple[StableSet, Fraction]], dual: Tuple[Fraction, ...]):
        self.value = value
        self.terms = terms
        self.dual = dual

    def get_dictionary(self):
        return {'value': fraction_to_str(self.value),
                'terms': [[fraction_to_str(weight), list(stable_set.vertices)] for stable_set, weight in self.terms],
                'dual': [fraction_to_str(y) for y in self.dual]}


def _as_weights(graph: ConflictGraph, weights: Sequence) -> Tuple[Fraction, ...]:
    weights = tuple(to_fraction(w) for w in weights)
    if len(weights) != graph.num_vertices:
        raise DimensionError(f'Expected {graph.num_vertices} weights, got {len(weights)}')
    if any(w < 0 for w in weights):
        raise ValidationError('Weights of a fractional coloring must be nonnegative')
    return weights


def _support_columns(stable_sets: List[StableSet], support: Sequence[int]) -> List[Tuple[Tuple[int, ...], StableSet]]:
    """
    Maximal stable sets of the subgraph induced by the support, each paired with a maximal stable set of the whole
    graph that contains it.
    """
    members = set(support)
    first_seen: Dict[Tuple[int, ...], StableSet] = {}
    for stable_set in stable_sets:
        key = tuple(v for v in stable_set.vertices if v in members)
        if key and key not in first_seen:
            first_seen[key] = stable_set

    keys = list(first_seen)
    key_sets = [frozenset(key) for key in keys]
    columns = []
    for key, key_set in zip(keys, key_sets):
        if any(key_set < other for other in key_sets):
            continue
        columns.append((key, first_seen[key]))
    return columns


def fractional_weighted_coloring(graph: ConflictGraph, weights: Sequence,
                                 cap: int = MAX_ENUMERATION_VERTICES) -> ColoringSolution:
    """
    Solves min sum(l) s.t. sum_S l_S chi^S >= w, l >= 0 over maximal stable sets S, exactly.

    The LP is solved in its dual form max w.y s.t. sum_{v in S} y_v <= 1, restricted to the support of w; the optimal
    coefficients l are read from the final tableau. Both solutions are verified before they are returned.

    Parameters
    ----------
    graph : ConflictGraph
    weights : one nonnegative weight per vertex
    cap : vertex cap for the stable set enumeration

    Returns
    -------
    ColoringSolution
    """
    weights = _as_weights(graph, weights)
    support = [v for v, w in enumerate(weights) if w > 0]
    if not support:
        return ColoringSolution(Fraction(0), [], tuple(Fraction(0) for _ in weights))

    stable_sets = enumerate_maximal_stable_sets(graph, cap)
    columns = _support_columns(stable_sets, support)

    position = {v: k for k, v in enumerate(support)}
    A = []
    for key, _ in columns:
        row = [0] * len(support)
        for v in key:
            row[position[v]] = 1
        A.append(row)
    result = maximize([weights[v] for v in support], A, [1] * len(columns))

    dual = [Fraction(0)] * graph.num_vertices
    for v, y in zip(support, result.primal):
        dual[v] = y
    terms = [(full_set, coefficient) for (_, full_set), coefficient in zip(columns, result.dual) if coefficient > 0]

    solution = ColoringSolution(result.value, terms, tuple(dual))
    if not verify_dual_certificate(graph, weights, solution):
        raise ContractError(f'Coloring solution with value {result.value} failed its certificate check')
    return solution


def verify_dual_certificate(graph: ConflictGraph, weights: Sequence, solution: ColoringSolution) -> bool:
    """ Exact audit: primal covering feasible, dual packing feasible, equal objective values. """
    weights = _as_weights(graph, weights)
    y = solution.dual
    if len(y) != graph.num_vertices or any(value < 0 for value in y):
        return False
    if sum(w * value for w, value in zip(weights, y)) != solution.value:
        return False
    for stable_set in enumerate_maximal_stable_sets(graph):
        if sum(y[v] for v in stable_set.vertices) > 1:
            return False

    if any(coefficient <= 0 for _, coefficient in solution.terms):
        return False
    if sum(coefficient for _, coefficient in solution.terms) != solution.value:
        return False
    covered = [Fraction(0)] * graph.num_vertices
    for stable_set, coefficient in solution.terms:
        if not graph.is_stable(stable_set.vertices):
            return False
        for v in stable_set.vertices:
            covered[v] += coefficient
    return all(c >= w for c, w in zip(covered, weights))


def coloring_of_rates(pattern: TrafficPattern, rates: Sequence,
                      graph: Optional[ConflictGraph] = None) -> ColoringSolution:
    graph = build_enhanced_conflict_graph(pattern) if graph is None else graph
    return fractional_weighted_coloring(graph, enhanced_rate_vector(pattern, rates))


def in_rate_region(pattern: TrafficPattern, rates: Sequence, graph: Optional[ConflictGraph] = None) -> bool:
    return coloring_of_rates(pattern, rates, graph).value <= 1


def min_speedup(pattern: TrafficPattern, rates: Sequence, graph: Optional[ConflictGraph] = None) -> Fraction:
    """ Fractional weighted chromatic number of the conflict graph at the enhanced rate vector. """
    admissible, loads = is_admissible(pattern, rates)
    value = coloring_of_rates(pattern, rates, graph).value
    if not admissible:
        overloaded = [k for k, load in enumerate(loads) if load > 1]
        _log.warning(f'Rates are not admissible (overloaded lines {overloaded}); the minimum speedup is {value}')
    return value


def achievable_with_speedup(pattern: TrafficPattern, rates: Sequence, speedup: Union[Fraction, str, int],
                            graph: Optional[ConflictGraph] = None) -> bool:
    """ A speedup s is equivalent to serving the rates scaled by 1/s. """
    speedup = to_fraction(speedup)
    if speedup <= 0:
        raise ValidationError(f'Speedup must be positive, got {speedup}')
    return coloring_of_rates(pattern, rates, graph).value <= speedup


def load_matrix(pattern: TrafficPattern) -> List[List[int]]:
    """ Rows for every used input and output, one column per flow. """
    rows = []
    for i in range(pattern.num_inputs):
        row = [1 if flow.input == i else 0 for flow in pattern.flows]
        if any(row):
            rows.append(row)
    for j in range(pattern.num_outputs):
        row = [1 if j in flow.fanout else 0 for flow in pattern.flows]
        if any(row):
            rows.append(row)
    return rows


def admissible_vertices(pattern: TrafficPattern) -> List[Tuple[Fraction, ...]]:
    if pattern.num_flows == 0:
        return [()]
    return packing_polytope_vertices(load_matrix(pattern))


def _pattern_key(pattern: TrafficPattern):
    return pattern.num_inputs, pattern.num_outputs, tuple((flow.input, flow.fanout) for flow in pattern.flows)


@lru_cache(maxsize=8)
def _graph_for_key(key) -> Tuple[TrafficPattern, ConflictGraph]:
    num_inputs, num_outputs, flows = key
    pattern = TrafficPattern(num_inputs, num_outputs, [Flow(i, fanout) for i, fanout in flows])
    return pattern, build_enhanced_conflict_graph(pattern)


def _vertex_speedup(task) -> Fraction:
    key, vertex = task
    pattern, graph = _graph_for_key(key)
    return fractional_weighted_coloring(graph, enhanced_rate_vector(pattern, vertex)).value


def admissible_speedup_profile(pattern: TrafficPattern, n_workers: int = 1) -> List[Tuple[Tuple[Fraction, ...],
                                                                                          Fraction]]:
    """ Minimum speedup at every vertex of the admissible polytope. """
    vertices = admissible_vertices(pattern)
    _log.info(f'{len(vertices)} vertices of the admissible polytope')
    key = _pattern_key(pattern)
    tasks = [(key, vertex) for vertex in vertices]

    if n_workers > 1:
        with ProcessPool(max_workers=n_workers) as pool:
            future = pool.map(_vertex_speedup, tasks, chunksize=max(1, len(tasks) // (4 * n_workers)))
            values = list(future.result())
    else:
        values = [_vertex_speedup(task) for task in tasks]
    return list(zip(vertices, values))


def min_speedup_for_admissible(pattern: TrafficPattern, n_workers: int = 1) -> Fraction:
    """
    Smallest speedup under which every admissible rate vector is achievable. The coloring value is convex in the
    weights, so the maximum over the admissible polytope is attained at one of its vertices.
    """
    profile = admissible_speedup_profile(pattern, n_workers)
    vertex, value = max(profile, key=lambda entry: entry[1])
    _log.info(f'Maximum speedup {value} attained at {[fraction_to_str(r) for r in vertex]}')
    return value


def uncoded_2xN_inequalities(N: int, r0, unicast_rates: Sequence) -> List[Tuple[str, Fraction, Fraction]]:
    """
    Necessary conditions for the 2xN broadcast pattern without coding:
    (1) r_i >= 0, (2) sum r_i <= 1, (3) r0 + r_i <= 1, (4) 2 r0 + sum r_i <= 2.

    Returns
    -------
    List of (name, left hand side, right hand side); the nonnegativity rows compare against 0.
    """
    N = int(N)
    r0 = to_fraction(r0)
    rates = [to_fraction(r) for r in unicast_rates]
    if N < 1:
        raise ValidationError(f'N must be positive, got {N}')
    if len(rates) != N:
        raise DimensionError(f'Expected {N} unicast rates, got {len(rates)}')
    if r0 < 0 or any(r < 0 for r in rates):
        raise ValidationError('Rates must be nonnegative')

    rows = [(f'(1) r{i + 1} >= 0', rate, Fraction(0)) for i, rate in enumerate(rates)]
    rows.append(('(2) sum r_i <= 1', sum(rates, Fraction(0)), Fraction(1)))
    rows.extend((f'(3) r0 + r{i + 1} <= 1', r0 + rate, Fraction(1)) for i, rate in enumerate(rates))
    rows.append(('(4) 2 r0 + sum r_i <= 2', 2 * r0 + sum(rates, Fraction(0)), Fraction(2)))
    return rows


def uncoded_2xN_check(N: int, r0, unicast_rates: Sequence) -> Tuple[bool, Fraction]:
    """ min_scale is the largest LHS/RHS ratio over (2)-(4); the rates are feasible without coding iff it is <= 1. """
    rows = uncoded_2xN_inequalities(N, r0, unicast_rates)
    min_scale = max(lhs / rhs for name, lhs, rhs in rows if rhs > 0)
    return min_scale <= 1, min_scale


class ScheduleFrame(BaseObject):
    """
    Cyclic frame of `frame_length` slots. `configurations[t]` is the stable set of slot t, `slots[t]` the sub-flows
    that are actually served in slot t after trimming.
    """
    def __init__(self, pattern: TrafficPattern, rates: Tuple[Fraction, ...], frame_length: int,
                 configurations: List[StableSet], slots: List[Tuple[int, ...]],
                 terms: List[Tuple[StableSet, Fraction]], value: Fraction):
        self.pattern = pattern
        self.rates = rates
        self.frame_length = frame_length
        self.configurations = configurations
        self.slots = slots
        self.terms = terms
        self.value = value

        self.subflow_counts = [0] * pattern.num_subflows
        self.flow_counts = [0] * pattern.num_flows
        for active in slots:
            served_flows = set()
            for v in active:
                self.subflow_counts[v] += 1
                served_flows.add(pattern.subflow_parent[v])
            for f in served_flows:
                self.flow_counts[f] += 1

    def flow_outputs(self, slot: int) -> Dict[int, Tuple[int, ...]]:
        """ flow index -> outputs served in slot (taken modulo the frame length). """
        grouping: Dict[int, List[int]] = {}
        for v in self.slots[slot % self.frame_length]:
            grouping.setdefault(self.pattern.subflow_parent[v], []).append(self.pattern.subflows[v].output)
        return {f: tuple(outputs) for f, outputs in sorted(grouping.items())}

    def packets_per_frame(self, flow: int) -> int:
        return int(self.rates[flow] * self.frame_length)

    def get_dictionary(self):
        return {'frame_length': self.frame_length,
                'slots': [list(active) for active in self.slots],
                'lambda': [[fraction_to_str(weight), list(stable_set.vertices)] for stable_set, weight in self.terms]}


def build_offline_schedule(pattern: TrafficPattern, rates: Sequence,
                           graph: Optional[ConflictGraph] = None) -> ScheduleFrame:
    """
    Frame schedule from an optimal coloring: every stable set occupies lambda * F contiguous slots, the rest of the
    frame idles, and each sub-flow keeps only its earliest r * F slots.
    """
    rates = as_rate_vector(pattern, rates)
    graph = build_enhanced_conflict_graph(pattern) if graph is None else graph
    weights = enhanced_rate_vector(pattern, rates)
    solution = fractional_weighted_coloring(graph, weights)
    if solution.value > 1:
        raise RegionError(f'Rates are outside of the rate region, coloring value {fraction_to_str(solution.value)}',
                          value=solution.value)

    frame_length = lcm_of_denominators([weight for _, weight in solution.terms] + list(rates))
    configurations = []
    for stable_set, weight in solution.terms:
        configurations.extend([stable_set] * int(weight * frame_length))
    idle = StableSet((), graph.num_vertices)
    configurations.extend([idle] * (frame_length - len(configurations)))

    required = [int(w * frame_length) for w in weights]
    served = [0] * graph.num_vertices
    slots = []
    for stable_set in configurations:
        active = []
        for v in stable_set.vertices:
            if served[v] < required[v]:
                served[v] += 1
                active.append(v)
        slots.append(tuple(active))

    if served != required:
        raise ContractError(f'Frame serves {served} but {required} is required')
    _log.debug(f'Frame of length {frame_length} from {len(solution.terms)} stable sets')
    return ScheduleFrame(pattern, rates, frame_length, configurations, slots, solution.terms, solution.value)


def schedule_to_json(frame: ScheduleFrame) -> Dict:
    return frame.get_dictionary()


def slot_table(frame: ScheduleFrame, codes: Optional[Dict[Tuple[int, int], str]] = None) -> str:
    """
    Human readable frame, one row per served flow and slot:  slot | input | flow | code | outputs.
    Ports and slots are 1-indexed. `codes` maps (slot, flow) to a rendered coded packet.
    """
    header = ('slot', 'input', 'flow', 'code', 'outputs')
    rows = []
    for slot in range(frame.frame_length):
        outputs_per_flow = frame.flow_outputs(slot)
        if not outputs_per_flow:
            rows.append((str(slot + 1), '-', '-', 'idle', '-'))
        for f, outputs in outputs_per_flow.items():
            flow = frame.pattern.flows[f]
            code = '' if codes is None else codes.get((slot, f), '')
            rows.append((str(slot + 1), str(flow.input + 1), flow_label(flow), code,
                         ','.join(str(j + 1) for j in outputs)))

    widths = [max(len(row[c]) for row in rows + [header]) for c in range(len(header))]
    lines = ['  '.join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in [header] + rows]
    return '\n'.join(lines) + '\n'
