"""
Fanout splitting without coding. Every flow keeps a FIFO of stored packets; a partially served head-of-line packet
stays at the head with its residual fanout until every output of the fanout has a copy.
"""
import logging
from collections import deque
from typing import Deque, Dict, List, Optional, Sequence, Union

import numpy as np

from CodedXbarUtils.core.conflict_graph import ConflictGraph
from CodedXbarUtils.schedulers.base_scheduler import Scheduler, SwitchConfig, PolicyDecision, switch_config
from CodedXbarUtils.schedulers.mwss_scheduler import random_maximal_stable_set
from CodedXbarUtils.utils import DEFAULT_CANDIDATES
from CodedXbarUtils.utils.utils import ValidationError, standard_rng_init

_log = logging.getLogger(__name__)


class UncodedPacket:
    __slots__ = ('arrived_at', 'residual')

    def __init__(self, arrived_at: int, fanout: Sequence[int]):
        self.arrived_at = arrived_at
        self.residual = set(fanout)

    def __repr__(self):
        return f'UncodedPacket(arrived_at={self.arrived_at}, residual={sorted(self.residual)})'


def residual_backlogs(queues: Sequence[Deque[UncodedPacket]]) -> List[int]:
    """ Outstanding output copies per flow. """
    return [sum(len(packet.residual) for packet in queue) for queue in queues]


def _eligible_subflows(graph: ConflictGraph, queues: Sequence[Deque[UncodedPacket]]) -> List[int]:
    pattern = graph.pattern
    eligible = []
    for v, subflow in enumerate(pattern.subflows):
        queue = queues[pattern.subflow_parent[v]]
        if queue and subflow.output in queue[0].residual:
            eligible.append(v)
    return eligible


def uncoded_fanout_policy(graph: ConflictGraph, queues: Sequence[Deque[UncodedPacket]],
                          previous: Optional[SwitchConfig] = None, k: int = DEFAULT_CANDIDATES,
                          rng: Union[np.random.RandomState, int, None] = None,
                          backlogs: Optional[Sequence[int]] = None) -> PolicyDecision:
    """
    Best of k random candidates and the previous configuration. A candidate is a random maximal conflict-free set of
    sub-flows (i, J, j) whose flow has a head-of-line packet still missing output j. Its weight is the sum of the
    residual backlogs of the flows it serves, each served flow counted once.

    Parameters
    ----------
    graph : ConflictGraph
    queues : one FIFO of UncodedPacket per flow
    previous : configuration of the previous slot
    k : number of random candidates
    rng : np.random.RandomState, int, None
    backlogs : residual backlog per flow, computed from the queues if not given

    Returns
    -------
    PolicyDecision with the head-of-line packet and its served outputs per flow
    """
    if k < 1:
        raise ValidationError(f'k must be at least 1, got {k}')
    rng = standard_rng_init(rng)
    backlogs = residual_backlogs(queues) if backlogs is None else backlogs
    parent = graph.pattern.subflow_parent

    eligible = _eligible_subflows(graph, queues)
    if not eligible:
        return PolicyDecision(switch_config(graph, ()))

    def weight(vertices):
        return sum(backlogs[f] for f in {parent[v] for v in vertices})

    eligible_set = set(eligible)
    best = () if previous is None else tuple(v for v in previous.stable_set.vertices if v in eligible_set)
    best_weight = weight(best)
    for _ in range(k):
        candidate = random_maximal_stable_set(graph, eligible, rng)
        candidate_weight = weight(candidate)
        if candidate_weight > best_weight:
            best, best_weight = candidate, candidate_weight

    config = switch_config(graph, best)
    uncoded = {flow: (queues[flow][0], outputs) for flow, outputs in config.flow_outputs.items()}
    return PolicyDecision(config, uncoded=uncoded)


class UncodedScheduler(Scheduler):
    def __init__(self, graph: ConflictGraph, settings: Dict, rng: Union[np.random.RandomState, int, None] = 0):
        super(UncodedScheduler, self).__init__(graph, settings, rng)
        self.k = settings.get('k', DEFAULT_CANDIDATES)
        self.previous = None
        self.queues = [deque() for _ in range(graph.pattern.num_flows)]
        self.backlogs = [0] * graph.pattern.num_flows

    def enqueue(self, flow: int, slot: int):
        self.queues[flow].append(UncodedPacket(slot, self.graph.pattern.flows[flow].fanout))
        self.backlogs[flow] += len(self.graph.pattern.flows[flow].fanout)

    def select(self) -> PolicyDecision:
        decision = uncoded_fanout_policy(self.graph, self.queues, self.previous, self.k, self.rng, self.backlogs)
        self._check_stable(decision.config.stable_set.vertices)
        self.previous = decision.config
        return decision

    def serve(self, decision: PolicyDecision) -> Dict[int, Optional[UncodedPacket]]:
        """
        Removes the served outputs from the residual fanouts.

        Returns
        -------
        flow -> the packet if it departed in this slot, otherwise None
        """
        departed = {}
        for flow, (packet, outputs) in decision.uncoded.items():
            packet.residual.difference_update(outputs)
            self.backlogs[flow] -= len(outputs)
            if not packet.residual:
                departed[flow] = self.queues[flow].popleft()
            else:
                departed[flow] = None
        return departed
