import copy
from fractions import Fraction
from typing import Union, Dict, List, Optional

import numpy as np
import scipy.stats as scst

from CodedXbarUtils.utils.utils import to_fraction


class BaseObject(object):
    def get_dictionary(self):
        raise NotImplementedError()

    def __repr__(self):
        return f' \n '.join((f'{key}: {value}' for key, value in self.get_dictionary().items()))


class SimConfig(BaseObject):
    """
    Everything a single simulation run depends on. Two runs with equal configurations produce identical metrics.

    Parameters
    ----------
    pattern : TrafficPattern
        Switch workload. The rates stored in the pattern are the base rates; they are multiplied with `alpha`.
    policy : str
        Name of an entry in policy_settings.yaml.
    scheduler : str
        Scheduler family, see `SchedulerEnum`.
    mode : str
        online | finite_horizon | offline | uncoded
    alpha : Fraction
        Load multiplier.
    seed : int
    slots : int
        Horizon in slots. For finite-horizon runs this is the arrival horizon; queued batches are still cleared.
    delta : int
        Frame length of the finite-horizon scheme.
    epsilon : Fraction
        Batch window is ceil((1 + epsilon) * delta).
    field_order : int
        2, 4, 16 or 256.
    payload_length : int
        Bytes per packet.
    k : int
        Number of random candidates for the randomized policies.
    coding : str
        'full' materialises coded packets, 'dof' only tracks degrees of freedom.
    arrivals : str
        'bernoulli' or 'saturated'.
    visibility : str
        'staggered' or 'full' (finite horizon only).
    slope_threshold : float
        A run is stable if the least-squares backlog slope over the last half is below this value.
    check_invariants : bool
        Verify stable sets, conservation and innovation every slot.
    """
    def __init__(self,
                 pattern,
                 policy: str = 'mwss',
                 scheduler: str = 'mwss',
                 mode: str = 'online',
                 alpha: Union[Fraction, int] = 1,
                 seed: int = 0,
                 slots: int = 10000,
                 delta: int = 1000,
                 epsilon: Fraction = Fraction(1, 200),
                 field_order: int = 256,
                 payload_length: int = 64,
                 k: int = 10,
                 coding: str = 'full',
                 arrivals: str = 'bernoulli',
                 visibility: str = 'staggered',
                 slope_threshold: float = 1e-3,
                 check_invariants: bool = False,
                 max_attempts: int = 64):
        self.pattern = pattern
        self.policy = policy
        self.scheduler = scheduler
        self.mode = mode
        self.alpha = to_fraction(alpha)
        self.seed = seed
        self.slots = slots
        self.delta = delta
        self.epsilon = to_fraction(epsilon)
        self.field_order = field_order
        self.payload_length = payload_length
        self.k = k
        self.coding = coding
        self.arrivals = arrivals
        self.visibility = visibility
        self.slope_threshold = slope_threshold
        self.check_invariants = check_invariants
        self.max_attempts = max_attempts

    @property
    def rates(self):
        return tuple(rate * self.alpha for rate in self.pattern.rates)

    def replace(self, **changes) -> 'SimConfig':
        config = copy.copy(self)
        for key, value in changes.items():
            if not hasattr(config, key):
                raise AttributeError(f'SimConfig has no parameter {key}')
            setattr(config, key, value)
        config.alpha = to_fraction(config.alpha)
        config.epsilon = to_fraction(config.epsilon)
        return config

    def get_dictionary(self):
        return {'pattern': self.pattern.get_dictionary(),
                'policy': self.policy,
                'scheduler': self.scheduler,
                'mode': self.mode,
                'alpha': str(self.alpha),
                'seed': self.seed,
                'slots': self.slots,
                'delta': self.delta,
                'epsilon': str(self.epsilon),
                'field_order': self.field_order,
                'payload_length': self.payload_length,
                'k': self.k,
                'coding': self.coding,
                'arrivals': self.arrivals,
                'visibility': self.visibility,
                'slope_threshold': self.slope_threshold,
                'check_invariants': self.check_invariants,
                'max_attempts': self.max_attempts,
                }


class BatchRecord(BaseObject):
    """ Life cycle of one finite-horizon batch, all times in absolute slots. """
    def __init__(self,
                 index: int,
                 arrived_at: int,
                 num_packets: int,
                 frame_start: Optional[int] = None,
                 clearance_slots: int = 0,
                 flushed_at: Optional[int] = None,
                 decoded: bool = False):
        self.index = index
        self.arrived_at = arrived_at
        self.num_packets = num_packets
        self.frame_start = frame_start
        self.clearance_slots = clearance_slots
        self.flushed_at = flushed_at
        self.decoded = decoded

    @property
    def waiting_time(self):
        return None if self.flushed_at is None else self.flushed_at - self.arrived_at

    def get_dictionary(self):
        return {'index': self.index,
                'arrived_at': self.arrived_at,
                'num_packets': self.num_packets,
                'frame_start': self.frame_start,
                'clearance_slots': self.clearance_slots,
                'flushed_at': self.flushed_at,
                'decoded': self.decoded}


class Metrics(BaseObject):
    def __init__(self,
                 slots: int,
                 backlog: np.ndarray,
                 delays: Union[np.ndarray, List, None] = None,
                 delivered: Union[np.ndarray, None] = None,
                 arrived: Union[np.ndarray, None] = None,
                 fanouts: Union[List[int], None] = None,
                 decode_failures: int = 0,
                 conservation_violations: int = 0,
                 wasted_transmissions: int = 0,
                 batches: Union[List[BatchRecord], None] = None,
                 idle_slots: int = 0,
                 busy_periods: Union[List[int], None] = None,
                 slope_threshold: float = 1e-3,
                 delay_applicable: bool = True):
        self.slots = slots
        self.backlog = np.asarray(backlog, dtype=np.int64)
        self.delays = np.asarray([] if delays is None else delays, dtype=np.float64)
        self.delivered = np.zeros(0, dtype=np.int64) if delivered is None else np.asarray(delivered)
        self.arrived = np.zeros(0, dtype=np.int64) if arrived is None else np.asarray(arrived)
        self.fanouts = [] if fanouts is None else list(fanouts)
        self.decode_failures = decode_failures
        self.conservation_violations = conservation_violations
        self.wasted_transmissions = wasted_transmissions
        self.batches = [] if batches is None else batches
        self.idle_slots = idle_slots
        self.busy_periods = [] if busy_periods is None else busy_periods
        self.slope_threshold = slope_threshold
        self.delay_applicable = delay_applicable

    @property
    def mean_delay(self) -> float:
        if not self.delay_applicable or len(self.delays) == 0:
            return float('nan')
        return float(np.mean(self.delays))

    @property
    def p95_delay(self) -> float:
        if not self.delay_applicable or len(self.delays) == 0:
            return float('nan')
        return float(np.percentile(self.delays, 95))

    @property
    def mean_backlog(self) -> float:
        return float(np.mean(self.backlog)) if len(self.backlog) > 0 else 0.0

    @property
    def backlog_slope(self) -> float:
        """ Least-squares slope of the total backlog over the last half of the run. """
        tail = self.backlog[len(self.backlog) // 2:]
        if len(tail) < 2 or np.all(tail == tail[0]):
            return 0.0
        return float(scst.linregress(np.arange(len(tail)), tail).slope)

    @property
    def stable(self) -> bool:
        return self.backlog_slope < self.slope_threshold

    @property
    def throughput_per_flow(self) -> List[float]:
        """ Decoded packets per slot per output, one entry per flow. """
        if self.slots == 0:
            return [0.0 for _ in self.fanouts]
        return [float(delivered) / (fanout * self.slots) for delivered, fanout in zip(self.delivered, self.fanouts)]

    def get_dictionary(self):
        return {'slots': self.slots,
                'mean_delay': self.mean_delay,
                'p95_delay': self.p95_delay,
                'mean_backlog': self.mean_backlog,
                'backlog_slope': self.backlog_slope,
                'stable': self.stable,
                'decode_failures': self.decode_failures,
                'conservation_violations': self.conservation_violations,
                'wasted_transmissions': self.wasted_transmissions,
                'throughput_per_flow': self.throughput_per_flow,
                'delivered': [int(d) for d in self.delivered],
                'arrived': [int(a) for a in self.arrived],
                'idle_slots': self.idle_slots,
                'busy_periods': list(self.busy_periods),
                'batches': [batch.get_dictionary() for batch in self.batches],
                }
