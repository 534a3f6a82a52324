"""
Vertex enumeration of {x >= 0 : A x <= 1} with cddlib's double description method in exact rational arithmetic.

cddlib reads a polyhedron in H-representation, one row [b, -a] per inequality a.x <= b, and returns the
V-representation: rows starting with 1 are vertices, rows starting with 0 are rays.
"""
import logging
from fractions import Fraction
from typing import List, Sequence, Tuple

import cdd

from CodedXbarUtils.utils import MAX_POLYTOPE_DIMENSION, MAX_POLYTOPE_VERTICES
from CodedXbarUtils.utils.utils import SizeCapError

_log = logging.getLogger(__name__)


def _inequality_rows(A: Sequence[Sequence[int]], dimension: int) -> List[List[int]]:
    rows = []
    for k in range(dimension):
        row = [0] * (dimension + 1)
        row[k + 1] = 1
        rows.append(row)
    for load_row in A:
        rows.append([1] + [-int(a) for a in load_row])
    return rows


def packing_polytope_vertices(A: Sequence[Sequence[int]],
                              max_dimension: int = MAX_POLYTOPE_DIMENSION,
                              max_vertices: int = MAX_POLYTOPE_VERTICES) -> List[Tuple[Fraction, ...]]:
    """
    Vertices of {x >= 0 : A x <= 1} for a nonnegative integer matrix A in which every column is nonzero.

    Parameters
    ----------
    A : rows of the load constraints
    max_dimension : cap on the number of variables
    max_vertices : cap on the number of vertices returned

    Returns
    -------
    List of vertices as tuples of Fractions, sorted.
    """
    if not A:
        raise ValueError('At least one load constraint is needed to bound the polytope')
    dimension = len(A[0])
    if dimension > max_dimension:
        raise SizeCapError(f'Vertex enumeration is limited to {max_dimension} dimensions, got {dimension}',
                           cap=max_dimension)
    if any(not any(row[k] for row in A) for k in range(dimension)):
        raise ValueError('Every variable needs a load constraint, the polytope is unbounded otherwise')

    matrix = cdd.Matrix(_inequality_rows(A, dimension), number_type='fraction')
    matrix.rep_type = cdd.RepType.INEQUALITY
    generators = cdd.Polyhedron(matrix).get_generators()
    _log.debug(f'cddlib returned {generators.row_size} generators in dimension {dimension}')

    vertices = set()
    for i in range(generators.row_size):
        row = generators[i]
        if row[0] == 0:
            raise ValueError(f'The polytope is unbounded along {[str(Fraction(x)) for x in row[1:]]}')
        vertices.add(tuple(Fraction(x) / Fraction(row[0]) for x in row[1:]))
        if len(vertices) > max_vertices:
            raise SizeCapError(f'Vertex enumeration is limited to {max_vertices} vertices', cap=max_vertices)
    return sorted(vertices)
