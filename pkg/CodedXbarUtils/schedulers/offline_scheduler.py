import logging
from typing import Dict, Tuple, Union, Optional

import numpy as np

from CodedXbarUtils.core.conflict_graph import ConflictGraph, StableSet
from CodedXbarUtils.core.gf_coding import GaloisField, PacketPool, ReceiverState, find_innovative, encode
from CodedXbarUtils.core.rate_region import ScheduleFrame, build_offline_schedule
from CodedXbarUtils.schedulers.base_scheduler import Scheduler, SwitchConfig, PolicyDecision
from CodedXbarUtils.utils import DEFAULT_INNOVATION_ATTEMPTS
from CodedXbarUtils.utils.utils import CodingError, standard_rng_init

_log = logging.getLogger(__name__)


def offline_executor(frame: ScheduleFrame, t: int,
                     pools: Dict[int, PacketPool],
                     receivers: Dict[Tuple[int, int], ReceiverState],
                     field: GaloisField,
                     rng: Union[np.random.RandomState, int, None] = None,
                     max_attempts: int = DEFAULT_INNOVATION_ATTEMPTS) -> PolicyDecision:
    """
    Serves the frame's configuration of slot t (mod F). Every served flow sends one coded packet that is innovative for
    all of its served outputs that still miss packets of the batch; outputs that already hold the whole batch get
    nothing.

    Parameters
    ----------
    frame : ScheduleFrame
    t : slot, taken modulo the frame length
    pools : flow -> pool of the batch in service
    receivers : (flow, output) -> receiver state of that batch
    field : GaloisField
    rng : np.random.RandomState, int, None
    max_attempts : random draws per phase of the innovative vector search

    Returns
    -------
    PolicyDecision
    """
    rng = standard_rng_init(rng)
    slot = t % frame.frame_length
    config = SwitchConfig(StableSet(frame.slots[slot], frame.pattern.num_subflows), frame.flow_outputs(slot))

    coded = {}
    for flow, outputs in config.flow_outputs.items():
        pool = pools.get(flow)
        if pool is None or pool.size == 0:
            continue
        deficient = tuple(j for j in outputs if receivers[(flow, j)].rank < pool.size)
        if not deficient:
            continue
        coefficients = find_innovative(pool.size, [receivers[(flow, j)] for j in deficient], field, rng,
                                       max_attempts=max_attempts)
        if coefficients is None:
            raise CodingError(f'No innovative packet exists for flow {flow} and outputs {deficient} over {field!r}')
        coded[flow] = (encode(pool, coefficients, field), deficient)
    return PolicyDecision(config, coded=coded)


class OfflineScheduler(Scheduler):
    """ Replays the frame built from an optimal fractional coloring of the rates. """
    def __init__(self, graph: ConflictGraph, settings: Dict, rng: Union[np.random.RandomState, int, None] = 0,
                 frame: Optional[ScheduleFrame] = None):
        super(OfflineScheduler, self).__init__(graph, settings, rng)
        self.frame = frame
        self.max_attempts = settings.get('max_attempts', DEFAULT_INNOVATION_ATTEMPTS)

    def setup(self):
        if self.frame is None:
            self.frame = build_offline_schedule(self.graph.pattern, self.settings['rates'], self.graph)
        _log.info(f'Offline frame of {self.frame.frame_length} slots, coloring value {self.frame.value}')

    def select(self, t: int) -> StableSet:
        return StableSet(self.frame.slots[t % self.frame.frame_length], self.graph.num_vertices)

    def execute(self, t: int, pools: Dict[int, PacketPool], receivers: Dict[Tuple[int, int], ReceiverState],
                field: GaloisField) -> PolicyDecision:
        decision = offline_executor(self.frame, t, pools, receivers, field, self.rng, self.max_attempts)
        self._check_stable(decision.config.stable_set.vertices)
        return decision
