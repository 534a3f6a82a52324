import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from CodedXbarUtils.core.gf_coding import GaloisField, get_field, rank_and_basis, PacketPool, CodedPacket, encode, \
    ReceiverState, find_innovative, describe_coefficients
from CodedXbarUtils.utils.utils import FieldArithmeticError, ValidationError, ContractError, IntegrityError


@pytest.mark.parametrize('order', [2, 4, 16])
def test_field_axioms_exhaustive(order):
    field = GaloisField(order)
    T = field.mul_table.astype(np.int64)
    a = np.arange(order)
    assert np.array_equal(T, T.T)
    assert np.array_equal(T[1], a)
    assert not T[0].any()
    # (a*b)*c == a*(b*c)
    assert np.array_equal(T[T[:, :, None], a[None, None, :]], T[a[:, None, None], T[None, :, :]])
    # a*(b+c) == a*b + a*c
    assert np.array_equal(T[a[:, None, None], a[None, :, None] ^ a[None, None, :]],
                          T[:, :, None] ^ T[:, None, :])
    for value in range(1, order):
        assert field.mul(value, field.inv(value)) == 1


def test_aes_field():
    field = get_field(256)
    assert field.mul(0x02, 0x80) == 0x1B
    assert field.mul(0x53, 0xCA) == 0x01
    assert field.inv(0x53) == 0xCA
    assert field.div(0x1B, 0x80) == 0x02
    assert field.add(0x53, 0x53) == 0


@settings(max_examples=200)
@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
def test_aes_field_distributes(a, b, c):
    field = get_field(256)
    assert field.mul(a, b ^ c) == field.mul(a, b) ^ field.mul(a, c)
    assert field.mul(field.mul(a, b), c) == field.mul(a, field.mul(b, c))


def test_zero_has_no_inverse():
    with pytest.raises(FieldArithmeticError):
        get_field(16).inv(0)


def test_unsupported_order():
    with pytest.raises(ValidationError):
        GaloisField(3)


def test_rank_over_different_fields():
    matrix = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    rank, basis = rank_and_basis(matrix, get_field(2))
    assert rank == 2
    assert basis.tolist() == [[1, 0, 1], [0, 1, 1]]
    assert rank_and_basis(matrix, get_field(256))[0] == 2
    assert rank_and_basis([[1, 2], [2, 1]], get_field(256))[0] == 2
    assert rank_and_basis([[1, 1], [1, 1]], get_field(256))[0] == 1


def _receiver_knowing(field, n, vectors, output=0):
    receiver = ReceiverState(field, output=output, dimension=n)
    for vector in vectors:
        receiver.absorb_vector(np.asarray(vector, dtype=np.uint8))
    return receiver


def test_three_lines_over_gf2_have_no_innovative_vector():
    field = get_field(2)
    receivers = [_receiver_knowing(field, 2, [v], k) for k, v in enumerate([(1, 0), (0, 1), (1, 1)])]
    assert find_innovative(2, receivers, field, rng=0, max_attempts=20) is None


def test_three_lines_over_gf4_have_an_innovative_vector():
    field = get_field(4)
    receivers = [_receiver_knowing(field, 2, [v], k) for k, v in enumerate([(1, 0), (0, 1), (1, 1)])]
    vector = find_innovative(2, receivers, field, rng=0)
    assert vector is not None
    assert all(receiver.is_innovative(vector) for receiver in receivers)
    assert vector[0] != 0 and vector[1] not in (0, vector[0])


def test_full_rank_receiver_is_rejected():
    field = get_field(2)
    receiver = _receiver_knowing(field, 1, [(1,)])
    with pytest.raises(ContractError):
        find_innovative(1, [receiver], field)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_innovative_vector_exists_when_field_exceeds_receivers(data):
    order = data.draw(st.sampled_from([4, 16, 256]))
    field = get_field(order)
    n = data.draw(st.integers(1, 6))
    num_receivers = data.draw(st.integers(1, min(order - 1, 5)))
    receivers = []
    for k in range(num_receivers):
        vectors = data.draw(st.lists(st.lists(st.integers(0, order - 1), min_size=n, max_size=n), max_size=n - 1))
        receivers.append(_receiver_knowing(field, n, vectors, k))
    ranks = [receiver.rank for receiver in receivers]

    vector = find_innovative(n, receivers, field, rng=data.draw(st.integers(0, 2 ** 31)))
    assert vector is not None
    for receiver, rank in zip(receivers, ranks):
        assert receiver.absorb_vector(vector)
        assert receiver.rank == rank + 1


def _pool(payloads):
    pool = PacketPool(flow=1, batch=0, payload_length=len(payloads[0]))
    for slot, payload in enumerate(payloads):
        pool.add(np.asarray(payload, dtype=np.uint8), slot)
    return pool


def test_encode_then_decode():
    field = get_field(256)
    originals = [[1, 2, 3, 4], [200, 0, 7, 9], [13, 13, 13, 13]]
    pool = _pool(originals)
    receiver = ReceiverState(field, flow=1, batch=0, dimension=3, payload_length=4)

    assert receiver.absorb(encode(pool, [1, 1, 0], field))
    assert not receiver.decode(3).ready
    assert receiver.decode(3).deficiency == 2
    assert receiver.absorb(encode(pool, [0, 1, 1], field))
    assert not receiver.absorb(encode(pool, [1, 0, 1], field))
    assert receiver.absorb(encode(pool, [1, 1, 1], field))

    result = receiver.decode(3)
    assert result.ready
    assert [p.tolist() for p in result.payloads] == originals


def test_receiver_follows_a_growing_pool():
    field = get_field(16)
    pool = _pool([[5], [6]])
    receiver = ReceiverState(field, flow=1, batch=0, payload_length=1)
    assert receiver.absorb(encode(pool, [1, 3], field))
    assert receiver.absorb(encode(pool, [0, 1], field))
    pool.add(np.asarray([7], dtype=np.uint8), 2)
    assert receiver.absorb(encode(pool, [1, 1, 1], field))
    assert [p.tolist() for p in receiver.decode(3).payloads] == [[5], [6], [7]]


def test_encode_needs_enough_packets():
    pool = _pool([[5]])
    with pytest.raises(ContractError):
        encode(pool, [1, 1], get_field(2))


def test_packet_for_another_flow_is_rejected():
    field = get_field(2)
    receiver = ReceiverState(field, flow=0, batch=0, dimension=1)
    with pytest.raises(ContractError):
        receiver.absorb(CodedPacket(1, 0, np.asarray([1], dtype=np.uint8), np.zeros(0, dtype=np.uint8)))


def test_inconsistent_payloads_fail_decoding():
    field = get_field(256)
    receiver = ReceiverState(field, dimension=1, payload_length=1)
    receiver.absorb_vector(np.asarray([1], dtype=np.uint8), np.asarray([5], dtype=np.uint8))
    assert not receiver.absorb_vector(np.asarray([1], dtype=np.uint8), np.asarray([6], dtype=np.uint8))
    with pytest.raises(IntegrityError):
        receiver.decode(1)


def test_coded_packet_bytes():
    packet = CodedPacket(1, 2, np.asarray([3, 4], dtype=np.uint8), np.asarray([5], dtype=np.uint8))
    data = packet.to_bytes()
    assert struct.unpack('>III', data[:12]) == (1, 2, 2)
    assert data[12:] == bytes([3, 4, 5])


def test_describe_coefficients():
    assert describe_coefficients(np.asarray([1, 0, 3])) == 'P1 ⊕ 3·P3'
    assert describe_coefficients(np.asarray([0, 1])) == 'P2'
    assert describe_coefficients(np.asarray([0, 0])) == '0'


def test_rank_over_gf4():
    assert rank_and_basis([[1, 2, 0], [0, 1, 1], [1, 3, 1]], get_field(4))[0] == 2
    assert rank_and_basis(np.eye(5, dtype=np.uint8), get_field(4))[0] == 5


@pytest.mark.parametrize('order', [16, 256])
def test_thousand_random_instances(order):
    field = get_field(order)
    rng = np.random.RandomState(order)
    for _ in range(1000):
        n = rng.randint(1, 9)
        num_receivers = rng.randint(1, min(order, 9))
        receivers = []
        for k in range(num_receivers):
            known = rng.randint(0, n)
            vectors = rng.randint(0, order, size=(known, n))
            receivers.append(_receiver_knowing(field, n, vectors, k))
        ranks = [receiver.rank for receiver in receivers]
        vector = find_innovative(n, receivers, field, rng=rng)
        assert vector is not None
        for receiver, rank in zip(receivers, ranks):
            assert receiver.absorb_vector(vector)
            assert receiver.rank == rank + 1


@pytest.mark.parametrize('seed', [0, 1, 2])
def test_five_random_packets_decode_over_gf256(seed):
    field = get_field(256)
    rng = np.random.RandomState(seed)
    originals = rng.randint(0, 256, size=(5, 32)).astype(np.uint8)
    pool = _pool(originals)
    receiver = ReceiverState(field, flow=1, batch=0, dimension=5, payload_length=32)

    sent = 0
    while receiver.rank < 5:
        receiver.absorb(encode(pool, rng.randint(0, 256, size=5), field))
        sent += 1
    assert sent < 20
    result = receiver.decode(5)
    assert result.ready
    assert np.array_equal(np.stack(result.payloads), originals)
