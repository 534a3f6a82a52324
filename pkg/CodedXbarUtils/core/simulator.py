"""
Slotted simulation of the multicast switch.

Every slot first serves the configuration chosen by the policy and then appends the slot's Bernoulli arrivals, so a
packet is served at the earliest in the slot after its arrival. Arrivals and coding draw from two independent random
streams derived from the run's seed; identical configurations give identical metrics.

Coded runs track the degree-of-freedom backlog x of every sub-flow: packets that arrived for the flow minus innovative
packets delivered to the sub-flow's output.
"""
import json
import logging
from collections import deque
from fractions import Fraction
from math import ceil, floor
from typing import Dict, List, Sequence, Tuple, Union, Optional

import numpy as np
from pebble import ProcessPool

from CodedXbarUtils.core.conflict_graph import ConflictGraph, build_enhanced_conflict_graph
from CodedXbarUtils.core.data_objects import SimConfig, Metrics, BatchRecord
from CodedXbarUtils.core.gf_coding import PacketPool, ReceiverState, get_field, find_innovative, encode
from CodedXbarUtils.schedulers.base_scheduler import Scheduler
from CodedXbarUtils.utils import CSV_HEADER
from CodedXbarUtils.utils.scheduler_utils import SchedulerEnum, scheduler_str_to_enum, get_scheduler
from CodedXbarUtils.utils.utils import ValidationError, CodingError, IntegrityError, ContractError, \
    standard_rng_init, derive_seed

_log = logging.getLogger(__name__)

MODES = ('online', 'finite_horizon', 'offline', 'uncoded')
_MODE_SCHEDULERS = {'online': (SchedulerEnum.MWSS, SchedulerEnum.MWSS_RANDOMIZED),
                    'finite_horizon': (SchedulerEnum.MWSS, SchedulerEnum.MWSS_RANDOMIZED),
                    'offline': (SchedulerEnum.OFFLINE,),
                    'uncoded': (SchedulerEnum.UNCODED,)}


def bernoulli_arrivals(rates: Sequence, slot: int, rng: np.random.RandomState) -> np.ndarray:
    """
    One arrival indicator per flow. Arrivals are i.i.d. over slots and independent across flows; all sub-flows of a
    flow see the same arrival.
    """
    probabilities = np.asarray([float(rate) for rate in rates], dtype=np.float64)
    if np.any(probabilities > 1) or np.any(probabilities < 0):
        raise ValidationError(f'Arrival rates must lie in [0, 1], got {list(rates)} in slot {slot}')
    return rng.random_sample(len(probabilities)) < probabilities


def batch_window(delta: int, epsilon: Union[Fraction, int]) -> int:
    """ ceil((1 + epsilon) * delta) """
    return int(ceil((1 + Fraction(epsilon)) * delta))


def _random_streams(seed: int) -> Tuple[np.random.RandomState, np.random.RandomState]:
    return standard_rng_init(seed % 2 ** 32), standard_rng_init((seed + 1) % 2 ** 32)


def _payload(config: SimConfig, rng: np.random.RandomState) -> Optional[np.ndarray]:
    if config.payload_length == 0:
        return None
    # one field symbol per payload byte
    return rng.randint(0, config.field_order, size=config.payload_length).astype(np.uint8)


def _check_config(config: SimConfig):
    if config.mode not in MODES:
        raise ValidationError(f'Unknown mode {config.mode}. Should be one of {", ".join(MODES)}')
    if config.coding not in ('full', 'dof'):
        raise ValidationError(f'Unknown coding {config.coding}, expected full or dof')
    if config.slots < 1:
        raise ValidationError(f'At least one slot is needed, got {config.slots}')
    if any(rate > 1 for rate in config.rates):
        raise ValidationError(f'Arrival rates must not exceed 1, got {[str(rate) for rate in config.rates]}')
    if config.coding == 'dof' and config.field_order <= max(config.pattern.fanouts, default=0):
        raise ValidationError(f'Degree-of-freedom accounting needs a field larger than the largest fanout, '
                              f'got GF({config.field_order})')


def make_scheduler(config: SimConfig, graph: ConflictGraph, rng: np.random.RandomState) -> Scheduler:
    scheduler_enum = scheduler_str_to_enum(config.scheduler)
    if scheduler_enum not in _MODE_SCHEDULERS[config.mode]:
        raise ValidationError(f'Scheduler {scheduler_enum} can not run in mode {config.mode}')
    settings = dict(k=config.k, check_invariants=config.check_invariants, rates=config.rates,
                    max_attempts=config.max_attempts)
    scheduler = get_scheduler(scheduler_enum)(graph, settings, rng)
    scheduler.setup()
    return scheduler


def _log_progress(t: int, total: int, what: str):
    step = max(1, total // 10)
    if t > 0 and t % step == 0:
        _log.info(f'{what}: {t}/{total} slots')


def _group_by_flow(graph: ConflictGraph, vertices: Sequence[int]) -> Dict[int, List[int]]:
    grouping = {}
    for v in vertices:
        grouping.setdefault(graph.pattern.subflow_parent[v], []).append(v)
    return grouping


class _CodedTransmitter:
    """
    Pools and receivers of one batch (online runs use a single, unbounded batch). In 'dof' mode no packets are
    materialised: with a field larger than every fanout an innovative packet always exists, so every service to an
    output with positive backlog raises its rank by one.
    """
    def __init__(self, config: SimConfig, graph: ConflictGraph, batch: int, rng: np.random.RandomState):
        self.config = config
        self.graph = graph
        self.pattern = graph.pattern
        self.full = config.coding == 'full'
        self.field = get_field(config.field_order) if self.full else None
        self.rng = rng
        self.rank = np.zeros(self.pattern.num_subflows, dtype=np.int64)
        self.full_rank_at = np.full(self.pattern.num_subflows, -1, dtype=np.int64)
        self.wasted = 0
        if self.full:
            self.pools = {f: PacketPool(f, batch, config.payload_length) for f in range(self.pattern.num_flows)}
            self.receivers = {v: ReceiverState(self.field, self.pattern.subflow_parent[v], batch, sub.output, 0,
                                               config.payload_length)
                              for v, sub in enumerate(self.pattern.subflows)}

    def add_packet(self, flow: int, slot: int, payload_rng: np.random.RandomState):
        if self.full:
            self.pools[flow].add(_payload(self.config, payload_rng), slot)

    def transmit(self, flow: int, vertices: Sequence[int], dimension: int, total: int, slot: int) -> int:
        """
        One coded packet of `flow` over its first `dimension` packets to the outputs of `vertices`.

        Returns
        -------
        int : number of outputs whose rank increased
        """
        vertices = [v for v in vertices if self.rank[v] < dimension]
        if not vertices:
            return 0
        if self.full:
            receivers = [self.receivers[v] for v in vertices]
            coefficients = find_innovative(dimension, receivers, self.field, self.rng,
                                           max_attempts=self.config.max_attempts)
            if coefficients is None:
                raise CodingError(f'No innovative packet for flow {flow} over {self.field!r}')
            packet = encode(self.pools[flow], coefficients, self.field)
            gained = []
            for v, receiver in zip(vertices, receivers):
                if receiver.absorb(packet):
                    gained.append(v)
                else:
                    self.wasted += 1
        else:
            gained = vertices

        for v in gained:
            self.rank[v] += 1
            if self.rank[v] == total:
                self.full_rank_at[v] = slot
        return len(gained)

    def verify(self, sizes: Sequence[int]) -> int:
        """ Decodes every receiver at its batch size and compares with the originals. Returns the failures. """
        failures = 0
        for v, subflow in enumerate(self.pattern.subflows):
            flow = self.pattern.subflow_parent[v]
            size = sizes[flow]
            if size == 0:
                continue
            if not self.full:
                failures += int(self.rank[v] < size)
                continue
            try:
                result = self.receivers[v].decode(size)
            except IntegrityError as e:
                _log.warning(f'Decoding failed at output {subflow.output} of flow {flow}: {e}')
                failures += 1
                continue
            if not result.ready:
                failures += 1
            elif self.config.payload_length and \
                    not np.array_equal(np.stack(result.payloads), self.pools[flow].payloads[:size]):
                _log.warning(f'Decoded payloads differ from the originals at output {subflow.output} of flow {flow}')
                failures += 1
        return failures


def _check_conservation(arrived: np.ndarray, x: np.ndarray, delivered: np.ndarray, parent: np.ndarray) -> bool:
    return bool(np.all(x >= 0) and np.array_equal(arrived[parent], x + delivered))


def run_online(config: SimConfig) -> Metrics:
    """
    MWSS on the degree-of-freedom backlogs, without batches. Pools are never emptied, so only backlog and
    throughput are reported; per packet delay is not applicable.
    """
    _check_config(config)
    pattern = config.pattern
    graph = build_enhanced_conflict_graph(pattern)
    arrival_rng, coding_rng = _random_streams(config.seed)
    scheduler = make_scheduler(config, graph, coding_rng)
    transmitter = _CodedTransmitter(config, graph, 0, coding_rng)

    parent = np.asarray(pattern.subflow_parent, dtype=np.int64)
    arrived = np.zeros(pattern.num_flows, dtype=np.int64)
    backlog = np.zeros(config.slots, dtype=np.int64)
    violations = 0

    for t in range(config.slots):
        x = arrived[parent] - transmitter.rank
        stable_set = scheduler.select(x)
        for flow, vertices in _group_by_flow(graph, stable_set.vertices).items():
            transmitter.transmit(flow, vertices, int(arrived[flow]), -1, t)

        for flow in np.nonzero(bernoulli_arrivals(config.rates, t, arrival_rng))[0]:
            arrived[flow] += 1
            transmitter.add_packet(int(flow), t, coding_rng)

        x = arrived[parent] - transmitter.rank
        backlog[t] = x.sum()
        if config.check_invariants and not _check_conservation(arrived, x, transmitter.rank, parent):
            violations += 1
        _log_progress(t, config.slots, f'Online {config.policy}')

    delivered = np.bincount(parent, weights=transmitter.rank, minlength=pattern.num_flows).astype(np.int64)
    scheduler.shutdown()
    return Metrics(config.slots, backlog, delays=None, delivered=delivered, arrived=arrived,
                   fanouts=pattern.fanouts, conservation_violations=violations,
                   wasted_transmissions=transmitter.wasted, slope_threshold=config.slope_threshold,
                   delay_applicable=False)


def _round_robin_group(graph: ConflictGraph, deficiency: np.ndarray, pointer: int) -> List[int]:
    """ Starting at `pointer`, greedily collect conflict-free sub-flows that still miss packets. """
    n = graph.num_vertices
    chosen, blocked = [], set()
    for offset in range(n):
        v = (pointer + offset) % n
        if deficiency[v] > 0 and v not in blocked:
            chosen.append(v)
            blocked.update(graph.neighbors[v])
    return chosen


def _busy_periods(intervals: List[Tuple[int, int]]) -> List[int]:
    """ Lengths of the maximal runs of back to back busy intervals. """
    periods = []
    current_start, current_end = None, None
    for start, end in sorted(intervals):
        if current_end is not None and start <= current_end:
            current_end = max(current_end, end)
        else:
            if current_end is not None:
                periods.append(current_end - current_start)
            current_start, current_end = start, end
    if current_end is not None:
        periods.append(current_end - current_start)
    return periods


def run_finite_horizon(config: SimConfig) -> Metrics:
    """
    Batched MWSS. Arrivals are collected in windows of delta0 = ceil((1 + epsilon) delta) slots. A batch is processed
    once it has fully arrived and the previous batch is flushed: a frame of delta MWSS slots in which frame slot kappa
    only sees the batch's arrivals before window slot floor(delta0 kappa / delta), then a clearance phase that serves
    the remaining deficiencies round robin in conflict-free groups, then a verified flush.

    The backlog series counts buffered packets over the arrival horizon; batches that arrived within the horizon are
    processed to completion.
    """
    _check_config(config)
    delta = int(config.delta)
    delta0 = batch_window(delta, config.epsilon)
    num_batches = config.slots // delta0
    if config.slots < 10 * delta0:
        raise ValidationError(f'Finite horizon runs need at least 10 batch windows of {delta0} slots, '
                              f'got {config.slots} slots')
    if config.visibility not in ('staggered', 'full'):
        raise ValidationError(f'Unknown visibility {config.visibility}, expected staggered or full')
    horizon = num_batches * delta0

    pattern = config.pattern
    graph = build_enhanced_conflict_graph(pattern)
    arrival_rng, coding_rng = _random_streams(config.seed)
    scheduler = make_scheduler(config, graph, coding_rng)
    parent = np.asarray(pattern.subflow_parent, dtype=np.int64)

    arrival_slots = [[] for _ in range(pattern.num_flows)]
    for t in range(horizon):
        for flow in np.nonzero(bernoulli_arrivals(config.rates, t, arrival_rng))[0]:
            arrival_slots[flow].append(t)
    arrival_slots = [np.asarray(slots, dtype=np.int64) for slots in arrival_slots]
    arrived = np.asarray([len(slots) for slots in arrival_slots], dtype=np.int64)

    limits = [delta0 if config.visibility == 'full' else floor(delta0 * kappa / delta) for kappa in range(delta)]
    delivered = np.zeros(pattern.num_flows, dtype=np.int64)
    delays, batches, intervals = [], [], []
    departures = np.zeros(horizon + 1, dtype=np.int64)
    failures, wasted = 0, 0
    server_free = 0

    for k in range(num_batches):
        window_start = k * delta0
        batch_arrivals = []
        for slots in arrival_slots:
            lo, hi = np.searchsorted(slots, [window_start, window_start + delta0])
            batch_arrivals.append(slots[lo:hi])
        sizes = [len(slots) for slots in batch_arrivals]
        arrived_at = window_start + delta0
        start = max(arrived_at, server_free)
        record = BatchRecord(k, arrived_at, int(sum(sizes)), frame_start=start)
        batches.append(record)

        if record.num_packets == 0:
            record.flushed_at = start
            record.decoded = True
            continue

        transmitter = _CodedTransmitter(config, graph, k, coding_rng)
        for flow, slots in enumerate(batch_arrivals):
            for slot in slots:
                transmitter.add_packet(flow, int(slot), coding_rng)
        offsets = [slots - window_start for slots in batch_arrivals]
        sizes_array = np.asarray(sizes, dtype=np.int64)

        for kappa in range(delta):
            visible = np.asarray([np.searchsorted(offset, limits[kappa]) for offset in offsets], dtype=np.int64)
            x = visible[parent] - transmitter.rank
            stable_set = scheduler.select(x)
            for flow, vertices in _group_by_flow(graph, stable_set.vertices).items():
                transmitter.transmit(flow, vertices, int(visible[flow]), sizes[flow], start + kappa)

        clearance, pointer = 0, 0
        deficiency = sizes_array[parent] - transmitter.rank
        while deficiency.any():
            group = _round_robin_group(graph, deficiency, pointer)
            slot = start + delta + clearance
            for flow, vertices in _group_by_flow(graph, group).items():
                transmitter.transmit(flow, vertices, sizes[flow], sizes[flow], slot)
            pointer = (group[0] + 1) % graph.num_vertices
            clearance += 1
            deficiency = sizes_array[parent] - transmitter.rank

        finish = start + delta + clearance
        batch_failures = transmitter.verify(sizes)
        failures += batch_failures
        wasted += transmitter.wasted
        record.clearance_slots = clearance
        record.flushed_at = finish
        record.decoded = batch_failures == 0
        server_free = finish
        intervals.append((start, finish))
        departures[min(finish, horizon)] += record.num_packets

        if batch_failures == 0:
            for flow, slots in enumerate(batch_arrivals):
                if len(slots) == 0:
                    continue
                done = transmitter.full_rank_at[list(pattern.flow_subflows[flow])].max()
                delays.extend((done - slots).tolist())
                delivered[flow] += len(slots) * len(pattern.flows[flow].fanout)
        if (k + 1) % max(1, num_batches // 10) == 0:
            _log.info(f'Finite horizon {config.policy}: batch {k + 1}/{num_batches}, clearance {clearance} slots')

    arrivals_per_slot = np.zeros(horizon, dtype=np.int64)
    for slots in arrival_slots:
        np.add.at(arrivals_per_slot, slots, 1)
    backlog = np.cumsum(arrivals_per_slot) - np.cumsum(departures[:horizon])

    end = max(horizon, server_free)
    busy = sum(finish - start for start, finish in intervals)
    scheduler.shutdown()
    return Metrics(horizon, backlog, delays=delays, delivered=delivered, arrived=arrived, fanouts=pattern.fanouts,
                   decode_failures=failures, wasted_transmissions=wasted, batches=batches, idle_slots=end - busy,
                   busy_periods=_busy_periods(intervals), slope_threshold=config.slope_threshold)


def run_offline(config: SimConfig) -> Metrics:
    """
    Frame based operation. The batch of frame b is served during frame b with saturated arrivals (r F packets per flow
    at the frame start) and during frame b + 1 with Bernoulli arrivals, where at most r F queued packets per flow join
    a batch. Every output has to decode its batch by the end of the frame.
    """
    _check_config(config)
    if config.arrivals not in ('saturated', 'bernoulli'):
        raise ValidationError(f'Unknown arrivals {config.arrivals}, expected saturated or bernoulli')
    if config.coding != 'full':
        raise ValidationError('The offline frame executor needs materialised packets (coding: full)')
    pattern = config.pattern
    graph = build_enhanced_conflict_graph(pattern)
    arrival_rng, coding_rng = _random_streams(config.seed)
    scheduler = make_scheduler(config, graph, coding_rng)
    frame = scheduler.frame
    frame_length = frame.frame_length
    num_frames = config.slots // frame_length
    if num_frames < 1:
        raise ValidationError(f'{config.slots} slots do not hold one frame of {frame_length} slots')
    slots = num_frames * frame_length
    quota = [frame.packets_per_frame(f) for f in range(pattern.num_flows)]
    field = get_field(config.field_order)

    fifos = [deque() for _ in range(pattern.num_flows)]
    arrived = np.zeros(pattern.num_flows, dtype=np.int64)
    delivered = np.zeros(pattern.num_flows, dtype=np.int64)
    backlog = np.zeros(slots, dtype=np.int64)
    delays, batches = [], []
    failures, wasted = 0, 0

    for b in range(num_frames):
        frame_start = b * frame_length
        batch_arrivals = []
        for flow in range(pattern.num_flows):
            if config.arrivals == 'saturated':
                arrived[flow] += quota[flow]
                batch_arrivals.append([frame_start] * quota[flow])
            else:
                take = min(quota[flow], len(fifos[flow]))
                batch_arrivals.append([fifos[flow].popleft() for _ in range(take)])

        pools = {f: PacketPool(f, b, config.payload_length) for f in range(pattern.num_flows)}
        for flow, arrivals in enumerate(batch_arrivals):
            for slot in arrivals:
                pools[flow].add(_payload(config, coding_rng), slot)
        receivers = {(f, j): ReceiverState(field, f, b, j, 0, config.payload_length)
                     for f, flow in enumerate(pattern.flows) for j in flow.fanout}
        full_rank_at = {}
        record = BatchRecord(b, frame_start, sum(len(a) for a in batch_arrivals), frame_start=frame_start)

        for s in range(frame_length):
            t = frame_start + s
            decision = scheduler.execute(t, pools, receivers, field)
            for flow, (packet, outputs) in decision.coded.items():
                for output in outputs:
                    receiver = receivers[(flow, output)]
                    if not receiver.absorb(packet):
                        wasted += 1
                    elif receiver.rank == pools[flow].size:
                        full_rank_at[(flow, output)] = t
            if config.arrivals == 'bernoulli':
                for flow in np.nonzero(bernoulli_arrivals(config.rates, t, arrival_rng))[0]:
                    arrived[flow] += 1
                    fifos[flow].append(t)
            in_batch = record.num_packets if s < frame_length - 1 else 0
            backlog[t] = in_batch + sum(len(fifo) for fifo in fifos)

        batch_failures = 0
        for (flow, output), receiver in receivers.items():
            size = pools[flow].size
            if size == 0:
                continue
            try:
                result = receiver.decode(size)
            except IntegrityError:
                batch_failures += 1
                continue
            if not result.ready or (config.payload_length and
                                    not np.array_equal(np.stack(result.payloads), pools[flow].payloads[:size])):
                batch_failures += 1
        failures += batch_failures
        record.flushed_at = frame_start + frame_length
        record.decoded = batch_failures == 0
        batches.append(record)

        for flow, arrivals in enumerate(batch_arrivals):
            if not arrivals or batch_failures:
                continue
            done = max(full_rank_at[(flow, j)] for j in pattern.flows[flow].fanout)
            delays.extend(done - slot for slot in arrivals)
            delivered[flow] += len(arrivals) * len(pattern.flows[flow].fanout)
        _log_progress(frame_start, slots, f'Offline {config.policy}')

    scheduler.shutdown()
    return Metrics(slots, backlog, delays=delays, delivered=delivered, arrived=arrived, fanouts=pattern.fanouts,
                   decode_failures=failures, wasted_transmissions=wasted, batches=batches,
                   slope_threshold=config.slope_threshold)


def run_uncoded(config: SimConfig) -> Metrics:
    """ Head-of-line fanout splitting without coding; a packet's delay ends when its last output got its copy. """
    _check_config(config)
    pattern = config.pattern
    graph = build_enhanced_conflict_graph(pattern)
    arrival_rng, policy_rng = _random_streams(config.seed)
    scheduler = make_scheduler(config, graph, policy_rng)

    arrived = np.zeros(pattern.num_flows, dtype=np.int64)
    delivered = np.zeros(pattern.num_flows, dtype=np.int64)
    backlog = np.zeros(config.slots, dtype=np.int64)
    fanouts = np.asarray(pattern.fanouts, dtype=np.int64)
    delays = []
    violations = 0

    for t in range(config.slots):
        decision = scheduler.select()
        departed = scheduler.serve(decision)
        for flow, (_, outputs) in decision.uncoded.items():
            delivered[flow] += len(outputs)
        for flow, packet in departed.items():
            if packet is not None:
                delays.append(t - packet.arrived_at)

        for flow in np.nonzero(bernoulli_arrivals(config.rates, t, arrival_rng))[0]:
            arrived[flow] += 1
            scheduler.enqueue(int(flow), t)

        backlog[t] = sum(scheduler.backlogs)
        if config.check_invariants and \
                not np.array_equal(arrived * fanouts, np.asarray(scheduler.backlogs) + delivered):
            violations += 1
        _log_progress(t, config.slots, f'Uncoded {config.policy}')

    scheduler.shutdown()
    return Metrics(config.slots, backlog, delays=delays, delivered=delivered, arrived=arrived,
                   fanouts=pattern.fanouts, conservation_violations=violations,
                   slope_threshold=config.slope_threshold)


def simulate(config: SimConfig) -> Metrics:
    """ Dispatch on the configured mode. """
    _log.debug(f'Simulate {config.policy} ({config.mode}) at alpha {config.alpha} with seed {config.seed}')
    if config.mode == 'online':
        return run_online(config)
    elif config.mode == 'finite_horizon':
        return run_finite_horizon(config)
    elif config.mode == 'offline':
        return run_offline(config)
    elif config.mode == 'uncoded':
        return run_uncoded(config)
    raise ValidationError(f'Unknown mode {config.mode}. Should be one of {", ".join(MODES)}')


def metrics_to_row(config: SimConfig, metrics: Metrics) -> Dict:
    return {'alpha': str(float(config.alpha)),
            'policy': config.policy,
            'seed': config.seed,
            'slots': metrics.slots,
            'mean_delay': metrics.mean_delay,
            'p95_delay': metrics.p95_delay,
            'mean_backlog': metrics.mean_backlog,
            'backlog_slope': metrics.backlog_slope,
            'stable': metrics.stable,
            'decode_failures': metrics.decode_failures,
            'throughput_per_flow': json.dumps(metrics.throughput_per_flow)}


def _sweep_task(config: SimConfig) -> Dict:
    return metrics_to_row(config, simulate(config))


def sweep_configs(configs: Union[SimConfig, Sequence[SimConfig]], alphas: Sequence) -> List[SimConfig]:
    """ One configuration per (policy, alpha); the seeds derive from (master seed, alpha, policy). """
    configs = [configs] if isinstance(configs, SimConfig) else list(configs)
    runs = []
    for config in configs:
        for alpha in alphas:
            runs.append(config.replace(alpha=alpha, seed=derive_seed(config.seed, alpha, config.policy)))
    return runs


def sweep(configs: Union[SimConfig, Sequence[SimConfig]], alphas: Sequence, n_workers: int = 1) -> List[Dict]:
    """
    Runs every policy at every load multiplier. The row order is policy-major and does not depend on the number of
    workers.

    Returns
    -------
    List of CSV rows (dicts keyed by the CSV header)
    """
    alphas = list(alphas)
    if any(later < earlier for earlier, later in zip(alphas, alphas[1:])):
        raise ValidationError('The load multipliers of a sweep must be monotone')
    runs = sweep_configs(configs, alphas)
    _log.info(f'Sweep over {len(runs)} runs with {n_workers} worker(s)')

    if n_workers > 1:
        with ProcessPool(max_workers=n_workers) as pool:
            future = pool.map(_sweep_task, runs)
            rows = list(future.result())
    else:
        rows = [_sweep_task(run) for run in runs]

    for row in rows:
        if set(row) != set(CSV_HEADER):
            raise ContractError(f'Sweep row with unexpected columns {sorted(row)}')
    return rows
