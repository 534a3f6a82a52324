"""
Intra-flow linear network coding over GF(2^m).

Field arithmetic uses precomputed multiplication and inverse tables. Receivers keep their coefficient rows in reduced
row echelon form together with the equally transformed payloads, so the innovation test is a single reduction and
decoding at full rank reads the payloads off directly.
"""
import logging
import struct
from itertools import product
from typing import NamedTuple, List, Optional, Sequence, Tuple, Union

import numpy as np

from CodedXbarUtils.utils import EXHAUSTIVE_SEARCH_LIMIT, DEFAULT_INNOVATION_ATTEMPTS
from CodedXbarUtils.utils.utils import FieldArithmeticError, ContractError, IntegrityError, CodingError, \
    ValidationError, standard_rng_init

_log = logging.getLogger(__name__)

# x+1, x^2+x+1, x^4+x+1, x^8+x^4+x^3+x+1
IRREDUCIBLE_POLYNOMIALS = {1: 0b11, 2: 0b111, 4: 0b10011, 8: 0x11B}


class GaloisField:
    def __init__(self, order: int = 256):
        degree = int(order).bit_length() - 1
        if order != 2 ** degree or degree not in IRREDUCIBLE_POLYNOMIALS:
            raise ValidationError(f'Field order must be one of '
                                  f'{[2 ** m for m in sorted(IRREDUCIBLE_POLYNOMIALS)]}, got {order}')
        self.order = int(order)
        self.degree = degree
        self.polynomial = IRREDUCIBLE_POLYNOMIALS[degree]

        a = np.arange(self.order, dtype=np.int64)[:, None]
        b = np.arange(self.order, dtype=np.int64)[None, :]
        result = np.zeros((self.order, self.order), dtype=np.int64)
        shifted = np.repeat(a, self.order, axis=1)
        for bit in range(degree):
            result ^= np.where((b >> bit) & 1, shifted, 0)
            shifted = shifted << 1
            shifted = np.where(shifted & self.order, shifted ^ self.polynomial, shifted)
        self.mul_table = result.astype(np.uint8)

        self.inv_table = np.zeros(self.order, dtype=np.uint8)
        for value in range(1, self.order):
            self.inv_table[value] = int(np.argmax(self.mul_table[value] == 1))

    def __repr__(self):
        return f'GF({self.order})'

    @staticmethod
    def add(a: int, b: int) -> int:
        return int(a) ^ int(b)

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldArithmeticError('Zero has no multiplicative inverse')
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def scale(self, factor: int, vector: np.ndarray) -> np.ndarray:
        return self.mul_table[factor][vector]

    def combine(self, coefficients: np.ndarray, rows: np.ndarray) -> np.ndarray:
        """ sum_p coefficients[p] * rows[p] """
        nonzero = np.nonzero(coefficients)[0]
        if len(nonzero) == 0:
            return np.zeros(rows.shape[1], dtype=np.uint8)
        products = self.mul_table[coefficients[nonzero][:, None], rows[nonzero]]
        return np.bitwise_xor.reduce(products, axis=0)


_FIELDS = {}


def get_field(order: int = 256) -> GaloisField:
    if order not in _FIELDS:
        _FIELDS[order] = GaloisField(order)
    return _FIELDS[order]


def _as_vector(values, length: Optional[int] = None) -> np.ndarray:
    vector = np.asarray(values, dtype=np.uint8).reshape(-1)
    if length is not None and len(vector) < length:
        vector = np.concatenate([vector, np.zeros(length - len(vector), dtype=np.uint8)])
    return vector


def rank_and_basis(matrix: Sequence[Sequence[int]], field: GaloisField) -> Tuple[int, np.ndarray]:
    """ Rank over the field and a reduced row echelon basis of the row space. """
    rows = [list(row) for row in matrix]
    if rows and any(len(row) != len(rows[0]) for row in rows):
        raise ContractError('All rows need the same length')
    width = len(rows[0]) if rows else 0
    state = ReceiverState(field, dimension=width)
    for row in rows:
        state.absorb_vector(_as_vector(row))
    return state.rank, state.basis()


class PacketPool:
    """ Original packets of one flow and batch, in arrival order. Only grows. """
    def __init__(self, flow: int = 0, batch: int = 0, payload_length: int = 0):
        self.flow = flow
        self.batch = batch
        self.payload_length = payload_length
        self.payloads = np.zeros((4, payload_length), dtype=np.uint8)
        self.arrival_slots: List[int] = []

    @property
    def size(self) -> int:
        return len(self.arrival_slots)

    def add(self, payload: Union[np.ndarray, bytes, None] = None, slot: int = 0) -> int:
        if self.size == len(self.payloads):
            grown = np.zeros((2 * len(self.payloads), self.payload_length), dtype=np.uint8)
            grown[:self.size] = self.payloads[:self.size]
            self.payloads = grown
        if payload is not None:
            payload = np.frombuffer(payload, dtype=np.uint8) if isinstance(payload, bytes) else payload
            if len(payload) != self.payload_length:
                raise ValidationError(f'Payloads must have {self.payload_length} bytes, got {len(payload)}')
            self.payloads[self.size] = payload
        self.arrival_slots.append(slot)
        return self.size - 1

    def packet(self, index: int) -> np.ndarray:
        return self.payloads[index]


class CodedPacket(NamedTuple):
    flow: int
    batch: int
    coefficients: np.ndarray
    payload: np.ndarray

    def to_bytes(self) -> bytes:
        """ flow, batch, n as big endian uint32, then the coefficients and the payload. """
        header = struct.pack('>III', self.flow, self.batch, len(self.coefficients))
        return header + self.coefficients.astype(np.uint8).tobytes() + self.payload.astype(np.uint8).tobytes()


def encode(pool: PacketPool, coefficients, field: GaloisField) -> CodedPacket:
    """ Combination of the first len(coefficients) packets, i.e. of the pool as it was when it had that size. """
    coefficients = _as_vector(coefficients)
    if len(coefficients) > pool.size:
        raise ContractError(f'{len(coefficients)} coefficients for a pool of {pool.size} packets')
    payload = field.combine(coefficients, pool.payloads[:len(coefficients)]) if pool.payload_length \
        else np.zeros(0, dtype=np.uint8)
    return CodedPacket(pool.flow, pool.batch, coefficients, payload)


class DecodeResult(NamedTuple):
    ready: bool
    payloads: Optional[List[np.ndarray]]
    deficiency: int


class ReceiverState:
    """
    Everything one output has received for one flow and batch.

    Rows are kept in reduced row echelon form (unordered, `pivots[r]` is the pivot column of row r). Payloads undergo
    the same row operations.
    """
    def __init__(self, field: GaloisField, flow: int = 0, batch: int = 0, output: int = 0, dimension: int = 0,
                 payload_length: int = 0):
        self.field = field
        self.flow = flow
        self.batch = batch
        self.output = output
        self.dimension = dimension
        self.payload_length = payload_length
        self.rows = np.zeros((4, dimension), dtype=np.uint8)
        self.payloads = np.zeros((4, payload_length), dtype=np.uint8)
        self._pivots = np.zeros(4, dtype=np.int64)
        self.rank = 0
        self.pivot_set = set()
        self._first_free = 0
        self.inconsistent = False

    @property
    def pivots(self) -> List[int]:
        return [int(p) for p in self._pivots[:self.rank]]

    def grow(self, dimension: int):
        """ Pad all rows with zero coefficients for packets that arrived later. """
        if dimension < self.dimension:
            raise ContractError(f'Pool dimension can not shrink from {self.dimension} to {dimension}')
        if dimension > self.rows.shape[1]:
            capacity = max(dimension, 2 * self.rows.shape[1])
            grown = np.zeros((self.rows.shape[0], capacity), dtype=np.uint8)
            grown[:, :self.rows.shape[1]] = self.rows
            self.rows = grown
        self.dimension = dimension

    def _row_block(self) -> np.ndarray:
        return self.rows[:self.rank, :self.dimension]

    def reduce(self, coefficients: np.ndarray, payload: Optional[np.ndarray] = None):
        """ Residual of a vector after elimination against the stored rows. """
        residual = _as_vector(coefficients, self.dimension).copy()
        if self.rank == 0:
            return residual, None if payload is None else payload.copy()
        factors = residual[self._pivots[:self.rank]]
        used = np.nonzero(factors)[0]
        if len(used) == 0:
            return residual, None if payload is None else payload.copy()
        rows = self._row_block()[used]
        residual ^= np.bitwise_xor.reduce(self.field.mul_table[factors[used][:, None], rows], axis=0)
        reduced_payload = None
        if payload is not None:
            reduced_payload = payload ^ np.bitwise_xor.reduce(
                self.field.mul_table[factors[used][:, None], self.payloads[used]], axis=0)
        return residual, reduced_payload

    def is_innovative(self, coefficients: np.ndarray) -> bool:
        if len(coefficients) > self.dimension:
            self.grow(len(coefficients))
        residual, _ = self.reduce(coefficients)
        return bool(residual.any())

    def non_pivot_column(self) -> int:
        # pivots are never removed, so the first free column only moves right
        while self._first_free in self.pivot_set:
            self._first_free += 1
        if self._first_free >= self.dimension:
            raise ContractError('Receiver is already at full rank')
        return self._first_free

    def absorb_vector(self, coefficients: np.ndarray, payload: Optional[np.ndarray] = None) -> bool:
        coefficients = _as_vector(coefficients)
        if len(coefficients) < self.dimension:
            raise ContractError(f'Coefficient vector of length {len(coefficients)} is shorter than the '
                                f'{self.dimension} dimensions already received')
        self.grow(len(coefficients))
        if payload is None:
            payload = np.zeros(self.payload_length, dtype=np.uint8)
        residual, residual_payload = self.reduce(coefficients, payload)

        nonzero = np.nonzero(residual)[0]
        if len(nonzero) == 0:
            if residual_payload is not None and residual_payload.any():
                self.inconsistent = True
                _log.warning(f'Receiver {self.output} of flow {self.flow} got a payload inconsistent with its rows')
            return False

        pivot = int(nonzero[0])
        scale = self.field.inv(int(residual[pivot]))
        new_row = self.field.scale(scale, residual)
        new_payload = self.field.scale(scale, residual_payload)

        if self.rank > 0:
            block = self._row_block()
            hits = np.nonzero(block[:, pivot])[0]
            if len(hits) > 0:
                factors = block[hits, pivot]
                block[hits] ^= self.field.mul_table[factors[:, None], new_row[None, :]]
                self.payloads[hits] ^= self.field.mul_table[factors[:, None], new_payload[None, :]]

        if self.rank == self.rows.shape[0]:
            self.rows = np.concatenate([self.rows, np.zeros_like(self.rows)])
            self.payloads = np.concatenate([self.payloads, np.zeros_like(self.payloads)])
            self._pivots = np.concatenate([self._pivots, np.zeros_like(self._pivots)])
        self.rows[self.rank, :self.dimension] = new_row
        self.payloads[self.rank] = new_payload
        self._pivots[self.rank] = pivot
        self.pivot_set.add(pivot)
        self.rank += 1
        return True

    def absorb(self, packet: CodedPacket) -> bool:
        if packet.flow != self.flow or packet.batch != self.batch:
            raise ContractError(f'Packet of flow {packet.flow}/batch {packet.batch} offered to receiver of flow '
                                f'{self.flow}/batch {self.batch}')
        payload = packet.payload if self.payload_length else None
        return self.absorb_vector(packet.coefficients, payload)

    def basis(self) -> np.ndarray:
        order = np.argsort(self._pivots[:self.rank], kind='stable')
        return self._row_block()[order].copy()

    def decode(self, batch_size: int) -> DecodeResult:
        if self.dimension > batch_size:
            raise ContractError(f'Receiver holds {self.dimension} dimensions, batch has {batch_size}')
        self.grow(batch_size)
        if self.rank < batch_size:
            return DecodeResult(False, None, batch_size - self.rank)
        if self.inconsistent:
            raise IntegrityError(f'Inconsistent system at output {self.output} of flow {self.flow}')

        order = np.argsort(self._pivots[:self.rank], kind='stable')
        block = self._row_block()[order]
        if not np.array_equal(block, np.eye(batch_size, dtype=np.uint8)):
            raise IntegrityError('Full rank receiver rows are not the identity')
        return DecodeResult(True, [self.payloads[r].copy() for r in order], 0)


def _innovative_for_all(vector: np.ndarray, receivers: Sequence[ReceiverState]) -> bool:
    return all(receiver.is_innovative(vector) for receiver in receivers)


def find_innovative(n: int, receivers: Sequence[ReceiverState], field: GaloisField,
                    rng: Union[np.random.RandomState, int, None] = None,
                    max_attempts: int = DEFAULT_INNOVATION_ATTEMPTS,
                    exhaustive_limit: int = EXHAUSTIVE_SEARCH_LIMIT) -> Optional[np.ndarray]:
    """
    Coefficient vector of length n that increases the rank of every receiver.

    Random candidates are drawn first on the coordinates that are free (non-pivot) for at least one receiver, then on
    all coordinates. Each receiver misses such a free coordinate, so a uniform draw on that subspace fails for a single
    receiver with probability at most 1/q, and a vector exists whenever q exceeds the number of receivers. If all draws
    fail, small spaces are searched exhaustively.

    Returns
    -------
    np.ndarray or None if the exhaustive search proves that no such vector exists.
    """
    rng = standard_rng_init(rng)
    for receiver in receivers:
        receiver.grow(n)
        if receiver.rank >= n:
            raise ContractError(f'Receiver {receiver.output} is already at full rank {receiver.rank} of {n}')

    if len(receivers) == 0:
        vector = np.zeros(n, dtype=np.uint8)
        if n > 0:
            vector[0] = 1
        return vector

    free = sorted({receiver.non_pivot_column() for receiver in receivers})
    for coordinates in (free, list(range(n))):
        for _ in range(max_attempts):
            values = rng.randint(0, field.order, size=len(coordinates)).astype(np.uint8)
            if not values.any():
                continue
            vector = np.zeros(n, dtype=np.uint8)
            vector[coordinates] = values
            if _innovative_for_all(vector, receivers):
                return vector

    if field.order ** n <= exhaustive_limit:
        _log.debug(f'Exhaustive search over {field!r}^{n} for {len(receivers)} receivers')
        for values in product(range(field.order), repeat=n):
            vector = np.asarray(values, dtype=np.uint8)
            if vector.any() and _innovative_for_all(vector, receivers):
                return vector
        return None

    raise CodingError(f'No innovative vector found for {len(receivers)} receivers over {field!r} in dimension {n}')


def describe_coefficients(coefficients: np.ndarray) -> str:
    """ Renders a code as e.g. 'P1 ⊕ P2' or '3·P1 ⊕ P2' (1-indexed packets). """
    terms = []
    for index, value in enumerate(coefficients):
        if value == 1:
            terms.append(f'P{index + 1}')
        elif value != 0:
            terms.append(f'{int(value)}·P{index + 1}')
    return ' ⊕ '.join(terms) if terms else '0'
