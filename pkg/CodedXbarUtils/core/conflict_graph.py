import logging
from typing import NamedTuple, Tuple, List, Iterable, Optional, Dict

import networkx as nx
import numpy as np

from CodedXbarUtils.core.data_objects import BaseObject
from CodedXbarUtils.core.traffic import TrafficPattern, SubFlow, flow_label
from CodedXbarUtils.utils import MAX_ENUMERATION_VERTICES, MAX_PERFECTION_VERTICES
from CodedXbarUtils.utils.utils import SizeCapError, ContractError

_log = logging.getLogger(__name__)


class StableSet(NamedTuple):
    """ Sorted vertex indices of a stable set in a graph with `num_vertices` vertices. """
    vertices: Tuple[int, ...]
    num_vertices: int

    @property
    def incidence(self) -> Tuple[int, ...]:
        members = set(self.vertices)
        return tuple(1 if v in members else 0 for v in range(self.num_vertices))


class ConflictGraph(BaseObject):
    """
    Enhanced conflict graph. Vertex v is sub-flow v of the pattern in canonical order.

    The graph is not modified after construction, so the enumerations are cached on the instance.
    """
    def __init__(self, graph: nx.Graph, pattern: Optional[TrafficPattern] = None):
        self.graph = graph
        self.pattern = pattern
        self.num_vertices = graph.number_of_nodes()
        assert sorted(graph.nodes) == list(range(self.num_vertices)), 'Vertices must be 0..n-1'
        assert nx.number_of_selfloops(graph) == 0, 'Conflict graphs have no self-loops'

        self.neighbors = tuple(frozenset(graph.neighbors(v)) for v in range(self.num_vertices))
        self._maximal_stable_sets = None
        self._maximal_cliques = None

    @property
    def num_edges(self) -> int:
        return self.graph.number_of_edges()

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return sorted(tuple(sorted(edge)) for edge in self.graph.edges)

    def subflow(self, vertex: int) -> SubFlow:
        return self.pattern.subflows[vertex]

    def vertex_of(self, subflow: SubFlow) -> int:
        return self.pattern.subflows.index(subflow)

    def label(self, vertex: int) -> str:
        if self.pattern is None:
            return str(vertex)
        return flow_label(self.subflow(vertex))

    def adjacent(self, u: int, v: int) -> bool:
        return v in self.neighbors[u]

    def is_stable(self, vertices: Iterable[int]) -> bool:
        vertices = list(vertices)
        members = set(vertices)
        return all(not (self.neighbors[v] & members) for v in vertices)

    def stable_set(self, vertices: Iterable[int]) -> StableSet:
        vertices = tuple(sorted(set(vertices)))
        if not self.is_stable(vertices):
            raise ContractError(f'{vertices} is not a stable set')
        return StableSet(vertices, self.num_vertices)

    def complement(self) -> nx.Graph:
        return nx.complement(self.graph)

    def get_dictionary(self):
        return {'num_vertices': self.num_vertices,
                'num_edges': self.num_edges,
                'edges': self.edges}


def graph_from_edges(num_vertices: int, edges: Iterable[Tuple[int, int]]) -> ConflictGraph:
    """ A conflict graph without traffic pattern, e.g. odd holes for testing. """
    graph = nx.Graph()
    graph.add_nodes_from(range(num_vertices))
    graph.add_edges_from(edges)
    return ConflictGraph(graph)


def build_enhanced_conflict_graph(pattern: TrafficPattern) -> ConflictGraph:
    """
    One vertex per sub-flow. Two sub-flows conflict if they belong to different flows at the same input, or if they
    share an output.
    """
    graph = nx.Graph()
    graph.add_nodes_from(range(pattern.num_subflows))
    for u, sub_u in enumerate(pattern.subflows):
        for v in range(u + 1, pattern.num_subflows):
            sub_v = pattern.subflows[v]
            same_input = sub_u.input == sub_v.input and pattern.subflow_parent[u] != pattern.subflow_parent[v]
            if same_input or sub_u.output == sub_v.output:
                graph.add_edge(u, v)
    _log.debug(f'Conflict graph with {graph.number_of_nodes()} vertices and {graph.number_of_edges()} edges')
    return ConflictGraph(graph, pattern)


def _check_cap(graph: ConflictGraph, cap: int, what: str):
    if graph.num_vertices > cap:
        raise SizeCapError(f'{what} is limited to graphs with at most {cap} vertices, '
                           f'but the graph has {graph.num_vertices}', cap=cap)


def enumerate_maximal_stable_sets(graph: ConflictGraph, cap: int = MAX_ENUMERATION_VERTICES) -> List[StableSet]:
    """ All inclusion-maximal stable sets, as maximal cliques of the complement, sorted lexicographically. """
    _check_cap(graph, cap, 'Stable set enumeration')
    if graph._maximal_stable_sets is None:
        if graph.num_vertices == 0:
            found = [()]
        else:
            found = sorted(tuple(sorted(clique)) for clique in nx.find_cliques(graph.complement()))
        stable_sets = []
        for vertices in found:
            if not graph.is_stable(vertices):
                raise ContractError(f'Enumerated set {vertices} is not conflict-free')
            stable_sets.append(StableSet(vertices, graph.num_vertices))
        graph._maximal_stable_sets = stable_sets
        _log.debug(f'{len(stable_sets)} maximal stable sets')
    return list(graph._maximal_stable_sets)


def maximal_cliques(graph: ConflictGraph, cap: int = MAX_ENUMERATION_VERTICES) -> List[Tuple[int, ...]]:
    _check_cap(graph, cap, 'Clique enumeration')
    if graph._maximal_cliques is None:
        if graph.num_vertices == 0:
            graph._maximal_cliques = []
        else:
            graph._maximal_cliques = sorted(tuple(sorted(clique)) for clique in nx.find_cliques(graph.graph))
    return list(graph._maximal_cliques)


def stable_set_incidence_matrix(graph: ConflictGraph, cap: int = MAX_ENUMERATION_VERTICES) -> np.ndarray:
    """ Rows are the incidence vectors of the maximal stable sets. """
    stable_sets = enumerate_maximal_stable_sets(graph, cap)
    matrix = np.zeros((len(stable_sets), graph.num_vertices), dtype=np.int64)
    for row, stable_set in enumerate(stable_sets):
        matrix[row, list(stable_set.vertices)] = 1
    return matrix


def is_split_graph(graph: ConflictGraph) -> Tuple[bool, Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]]:
    """
    Degree sequence test for split graphs.

    Returns
    -------
    bool, (clique, stable set) or None
    """
    n = graph.num_vertices
    if n == 0:
        return True, ((), ())

    order = sorted(range(n), key=lambda v: (-len(graph.neighbors[v]), v))
    degrees = [len(graph.neighbors[v]) for v in order]
    m = max(i for i in range(1, n + 1) if degrees[i - 1] >= i - 1)
    is_split = sum(degrees[:m]) == m * (m - 1) + sum(degrees[m:])
    if not is_split:
        return False, None

    clique = tuple(sorted(order[:m]))
    stable = tuple(sorted(order[m:]))
    if not graph.is_stable(stable) or any(not graph.adjacent(u, v) for u in clique for v in clique if u < v):
        raise ContractError(f'Split partition {clique} | {stable} failed verification')
    return True, (clique, stable)


def _has_odd_hole(graph: nx.Graph) -> bool:
    bound = graph.number_of_nodes()
    for cycle in nx.chordless_cycles(graph, length_bound=bound):
        if len(cycle) >= 5 and len(cycle) % 2 == 1:
            _log.debug(f'Odd hole {cycle}')
            return True
    return False


def is_perfect(graph: ConflictGraph, cap: int = MAX_PERFECTION_VERTICES) -> bool:
    """ No induced odd cycle of length >= 5 in the graph or in its complement. """
    _check_cap(graph, cap, 'Perfection test')
    if graph.num_vertices < 5:
        return True
    return not _has_odd_hole(graph.graph) and not _has_odd_hole(graph.complement())


def export_edge_list(graph: ConflictGraph) -> str:
    return ''.join(f'{u} {v}\n' for u, v in graph.edges)


def export_json(graph: ConflictGraph) -> Dict:
    vertices = []
    for v in range(graph.num_vertices):
        entry = {'index': v, 'label': graph.label(v)}
        if graph.pattern is not None:
            subflow = graph.subflow(v)
            entry.update({'input': subflow.input, 'fanout': list(subflow.fanout), 'output': subflow.output})
        vertices.append(entry)
    return {'vertices': vertices, 'edges': [list(edge) for edge in graph.edges]}
