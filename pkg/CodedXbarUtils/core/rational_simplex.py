"""
Exact primal simplex on a dense tableau of Fractions.

Solves  max c.y  s.t.  A y <= b, y >= 0  for b >= 0, so the slack basis is feasible and no first phase is needed.
Bland's rule (smallest entering index, smallest leaving basic variable on ties) prevents cycling. At the optimum the
objective row entries of the slack columns are an optimal solution of the dual  min b.l  s.t.  A^T l >= c, l >= 0.
"""
import logging
from fractions import Fraction
from typing import List, NamedTuple, Sequence, Tuple

from CodedXbarUtils.utils.utils import ContractError

_log = logging.getLogger(__name__)


class LPResult(NamedTuple):
    value: Fraction
    primal: Tuple[Fraction, ...]
    dual: Tuple[Fraction, ...]
    iterations: int


class UnboundedError(ContractError):
    pass


class SimplexTableau:
    def __init__(self, c: Sequence, A: Sequence[Sequence], b: Sequence):
        self.m = len(A)
        self.n = len(c)
        if len(b) != self.m:
            raise ContractError(f'{self.m} constraint rows but {len(b)} right hand sides')
        if any(len(row) != self.n for row in A):
            raise ContractError(f'All constraint rows need {self.n} entries')
        if any(Fraction(value) < 0 for value in b):
            raise ContractError('Right hand sides must be nonnegative')

        width = self.n + self.m
        self.rows = []
        for i, row in enumerate(A):
            tableau_row = [Fraction(value) for value in row] + [Fraction(0)] * self.m
            tableau_row[self.n + i] = Fraction(1)
            self.rows.append(tableau_row)
        self.rhs = [Fraction(value) for value in b]
        self.objective = [-Fraction(value) for value in c] + [Fraction(0)] * self.m
        self.value = Fraction(0)
        self.basis = list(range(self.n, width))
        self.iterations = 0

    def entering_column(self):
        for j, reduced_cost in enumerate(self.objective):
            if reduced_cost < 0:
                return j
        return None

    def leaving_row(self, j: int):
        best_row, best_ratio = None, None
        for i in range(self.m):
            coefficient = self.rows[i][j]
            if coefficient > 0:
                ratio = self.rhs[i] / coefficient
                if best_ratio is None or ratio < best_ratio \
                        or (ratio == best_ratio and self.basis[i] < self.basis[best_row]):
                    best_row, best_ratio = i, ratio
        return best_row

    def pivot(self, i: int, j: int):
        pivot_row = self.rows[i]
        pivot = pivot_row[j]
        if pivot != 1:
            self.rows[i] = pivot_row = [value / pivot for value in pivot_row]
            self.rhs[i] /= pivot
        support = [col for col, value in enumerate(pivot_row) if value != 0]

        for k in range(self.m):
            factor = self.rows[k][j]
            if k == i or factor == 0:
                continue
            row = self.rows[k]
            for col in support:
                row[col] -= factor * pivot_row[col]
            self.rhs[k] -= factor * self.rhs[i]

        factor = self.objective[j]
        if factor != 0:
            for col in support:
                self.objective[col] -= factor * pivot_row[col]
            self.value -= factor * self.rhs[i]

        self.basis[i] = j
        self.iterations += 1

    def solve(self, max_iterations: int = 100000) -> LPResult:
        while True:
            j = self.entering_column()
            if j is None:
                break
            i = self.leaving_row(j)
            if i is None:
                raise UnboundedError(f'Objective unbounded along column {j}')
            self.pivot(i, j)
            if self.iterations > max_iterations:
                raise ContractError(f'Simplex did not terminate within {max_iterations} pivots')

        primal = [Fraction(0)] * self.n
        for i, variable in enumerate(self.basis):
            if variable < self.n:
                primal[variable] = self.rhs[i]
        dual = tuple(self.objective[self.n:])
        _log.debug(f'Simplex optimum {self.value} after {self.iterations} pivots')
        return LPResult(self.value, tuple(primal), dual, self.iterations)


def maximize(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    return SimplexTableau(c, A, b).solve()


def check_optimality(c: Sequence, A: List[Sequence], b: Sequence, result: LPResult) -> bool:
    """ Exact certificate check: both solutions feasible and objective values equal. """
    c = [Fraction(v) for v in c]
    primal, dual = result.primal, result.dual
    if any(v < 0 for v in primal) or any(v < 0 for v in dual):
        return False
    for row, bound in zip(A, b):
        if sum(Fraction(a) * y for a, y in zip(row, primal)) > bound:
            return False
    for j in range(len(c)):
        if sum(Fraction(A[i][j]) * dual[i] for i in range(len(A))) < c[j]:
            return False
    primal_value = sum(cj * yj for cj, yj in zip(c, primal))
    dual_value = sum(Fraction(bi) * li for bi, li in zip(b, dual))
    return primal_value == dual_value == result.value
