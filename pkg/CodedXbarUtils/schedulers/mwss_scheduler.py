"""
Maximum weight stable set policies on the enhanced conflict graph. The weights are the degree-of-freedom backlogs of
the sub-flows; sub-flows with weight zero are never served.
"""
import logging
from fractions import Fraction
from typing import Sequence, Dict, Optional, Tuple, Union, List

import networkx as nx
import numpy as np

from CodedXbarUtils.core.conflict_graph import ConflictGraph, StableSet, stable_set_incidence_matrix
from CodedXbarUtils.schedulers.base_scheduler import Scheduler
from CodedXbarUtils.utils import MAX_MWSS_VERTICES, MAX_MWSS_TABLE_VERTICES, DEFAULT_CANDIDATES
from CodedXbarUtils.utils.utils import SizeCapError, ValidationError, DimensionError, lcm_of_denominators, \
    standard_rng_init

_log = logging.getLogger(__name__)


def _integer_weights(graph: ConflictGraph, weights: Sequence) -> List[int]:
    """ Nonnegative weights as python ints; rational weights are scaled by their common denominator. """
    if len(weights) != graph.num_vertices:
        raise DimensionError(f'Expected {graph.num_vertices} weights, got {len(weights)}')
    if isinstance(weights, np.ndarray) and np.issubdtype(weights.dtype, np.integer):
        values = [int(w) for w in weights]
    else:
        fractions = [Fraction(w) for w in weights]
        scale = lcm_of_denominators(fractions)
        values = [int(w * scale) for w in fractions]
    if any(w < 0 for w in values):
        raise ValidationError('MWSS weights must be nonnegative')
    return values


def stable_set_weight(vertices: Sequence[int], weights: Sequence) -> Union[int, Fraction]:
    return sum((weights[v] for v in vertices), 0)


def _mwss_by_table(incidence: np.ndarray, weights: List[int]) -> Tuple[int, ...]:
    """ With nonnegative weights some maximal stable set contains an optimum; zero weight vertices are cut off. """
    values = incidence.dot(np.asarray(weights, dtype=object if max(weights) > 2 ** 40 else np.int64))
    best = values.max()
    candidates = set()
    for row in np.nonzero(values == best)[0]:
        candidates.add(tuple(int(v) for v in np.nonzero(incidence[row])[0] if weights[v] > 0))
    return min(candidates)


def _mwss_by_clique_search(graph: ConflictGraph, weights: List[int], positive: List[int]) -> Tuple[int, ...]:
    """
    Max weight clique in the complement of the positive part. The weights are shifted left by n bits and vertex v adds
    2^(n-1-v), which only decides between sets of equal weight, in favour of the lexicographically smallest one.
    """
    n = graph.num_vertices
    complement = nx.complement(graph.graph.subgraph(positive))
    for v in positive:
        complement.nodes[v]['weight'] = (weights[v] << n) + (1 << (n - 1 - v))
    clique, _ = nx.max_weight_clique(complement, weight='weight')
    return tuple(sorted(clique))


def mwss_exact(graph: ConflictGraph, weights: Sequence, cap: int = MAX_MWSS_VERTICES,
               incidence: Optional[np.ndarray] = None) -> StableSet:
    """
    Maximum weight stable set, restricted to vertices of positive weight. Ties go to the lexicographically smallest
    sorted vertex sequence, so the result does not change when all weights are multiplied by the same positive factor.

    Parameters
    ----------
    graph : ConflictGraph
    weights : nonnegative integer (or rational) weight per vertex
    cap : vertex cap
    incidence : optional precomputed `stable_set_incidence_matrix(graph)`

    Returns
    -------
    StableSet
    """
    if graph.num_vertices > cap:
        raise SizeCapError(f'Exact MWSS is limited to {cap} vertices, the graph has {graph.num_vertices}', cap=cap)
    weights = _integer_weights(graph, weights)
    positive = [v for v, w in enumerate(weights) if w > 0]
    if not positive:
        return StableSet((), graph.num_vertices)

    if incidence is None and graph.num_vertices <= MAX_MWSS_TABLE_VERTICES:
        incidence = stable_set_incidence_matrix(graph)
    if incidence is not None:
        vertices = _mwss_by_table(incidence, weights)
    else:
        vertices = _mwss_by_clique_search(graph, weights, positive)
    return StableSet(vertices, graph.num_vertices)


def random_maximal_stable_set(graph: ConflictGraph, vertices: Sequence[int],
                              rng: np.random.RandomState) -> Tuple[int, ...]:
    """ Random greedy insertion: shuffle, then keep every vertex that does not conflict with the ones kept so far. """
    chosen, blocked = [], set()
    for v in rng.permutation(len(vertices)):
        vertex = vertices[v]
        if vertex not in blocked:
            chosen.append(vertex)
            blocked.update(graph.neighbors[vertex])
    return tuple(sorted(chosen))


def mwss_randomized(graph: ConflictGraph, weights: Sequence, previous: Optional[StableSet] = None,
                    k: int = DEFAULT_CANDIDATES,
                    rng: Union[np.random.RandomState, int, None] = None) -> StableSet:
    """
    Best of `k` random maximal stable sets and the previous configuration, all evaluated at the current weights and
    restricted to positive weight vertices. The random sets are built on the positive vertices only, which gives the
    same restriction as building them on all vertices with the positive ones shuffled first.
    """
    if k < 1:
        raise ValidationError(f'k must be at least 1, got {k}')
    if len(weights) != graph.num_vertices:
        raise DimensionError(f'Expected {graph.num_vertices} weights, got {len(weights)}')
    rng = standard_rng_init(rng)
    positive = [v for v in range(graph.num_vertices) if weights[v] > 0]
    if not positive:
        return StableSet((), graph.num_vertices)

    best = () if previous is None else tuple(v for v in previous.vertices if weights[v] > 0)
    best_weight = stable_set_weight(best, weights)
    for _ in range(k):
        candidate = random_maximal_stable_set(graph, positive, rng)
        weight = stable_set_weight(candidate, weights)
        if weight > best_weight:
            best, best_weight = candidate, weight
    return StableSet(best, graph.num_vertices)


class MWSSScheduler(Scheduler):
    """ Exact MWSS every slot. """
    def __init__(self, graph: ConflictGraph, settings: Dict, rng: Union[np.random.RandomState, int, None] = 0):
        super(MWSSScheduler, self).__init__(graph, settings, rng)
        self.cap = settings.get('cap', MAX_MWSS_VERTICES)
        self.incidence = None

    def setup(self):
        if self.graph.num_vertices <= MAX_MWSS_TABLE_VERTICES:
            self.incidence = stable_set_incidence_matrix(self.graph)

    def select(self, weights: Sequence) -> StableSet:
        stable_set = mwss_exact(self.graph, weights, cap=self.cap, incidence=self.incidence)
        self._check_stable(stable_set.vertices)
        return stable_set


class RandomizedMWSSScheduler(Scheduler):
    """ Best of k random maximal stable sets and the previous slot's set. """
    def __init__(self, graph: ConflictGraph, settings: Dict, rng: Union[np.random.RandomState, int, None] = 0):
        super(RandomizedMWSSScheduler, self).__init__(graph, settings, rng)
        self.k = settings.get('k', DEFAULT_CANDIDATES)
        self.previous = None

    def select(self, weights: Sequence) -> StableSet:
        stable_set = mwss_randomized(self.graph, weights, self.previous, self.k, self.rng)
        self._check_stable(stable_set.vertices)
        self.previous = stable_set
        return stable_set
