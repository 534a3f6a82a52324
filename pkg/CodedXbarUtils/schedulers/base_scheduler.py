import logging
from abc import ABC
from typing import Dict, NamedTuple, Tuple, Iterable, Optional, Union

import numpy as np

from CodedXbarUtils.core.conflict_graph import ConflictGraph, StableSet
from CodedXbarUtils.core.data_objects import BaseObject
from CodedXbarUtils.utils.utils import ContractError, standard_rng_init

_log = logging.getLogger(__name__)


class SwitchConfig(NamedTuple):
    """ Sub-flows served in one slot, and the same set grouped as flow -> outputs. """
    stable_set: StableSet
    flow_outputs: Dict[int, Tuple[int, ...]]


def switch_config(graph: ConflictGraph, vertices: Iterable[int]) -> SwitchConfig:
    stable_set = StableSet(tuple(sorted(vertices)), graph.num_vertices)
    grouping = {}
    for v in stable_set.vertices:
        subflow = graph.subflow(v)
        grouping.setdefault(graph.pattern.subflow_parent[v], []).append(subflow.output)
    return SwitchConfig(stable_set, {flow: tuple(outputs) for flow, outputs in sorted(grouping.items())})


class PolicyDecision(BaseObject):
    """
    What the switch transmits in one slot.

    coded : flow -> (CodedPacket, outputs that have to absorb it)
    uncoded : flow -> (stored packet, outputs it is copied to)
    """
    def __init__(self, config: SwitchConfig, coded: Optional[Dict] = None, uncoded: Optional[Dict] = None):
        self.config = config
        self.coded = {} if coded is None else coded
        self.uncoded = {} if uncoded is None else uncoded

    @property
    def is_noop(self) -> bool:
        return not self.coded and not self.uncoded

    def get_dictionary(self):
        return {'stable_set': list(self.config.stable_set.vertices),
                'flow_outputs': {flow: list(outputs) for flow, outputs in self.config.flow_outputs.items()},
                'coded': {flow: {'coefficients': [int(c) for c in packet.coefficients], 'outputs': list(outputs)}
                          for flow, (packet, outputs) in self.coded.items()},
                'uncoded': {flow: {'arrived_at': packet.arrived_at, 'outputs': list(outputs)}
                            for flow, (packet, outputs) in self.uncoded.items()}}


class Scheduler(ABC):
    """ Base class of the scheduling policies. One instance drives one simulation run. """
    def __init__(self, graph: ConflictGraph, settings: Dict, rng: Union[np.random.RandomState, int, None] = 0):
        if graph.pattern is None:
            raise ContractError('Schedulers need a conflict graph built from a traffic pattern')
        self.graph = graph
        self.settings = settings
        self.rng = standard_rng_init(rng)
        self.check_invariants = settings.get('check_invariants', False)

    def setup(self):
        pass

    def select(self, *args, **kwargs):
        raise NotImplementedError()

    def shutdown(self):
        pass

    def _check_stable(self, vertices: Iterable[int]):
        if self.check_invariants and not self.graph.is_stable(vertices):
            raise ContractError(f'Scheduler returned the conflicting configuration {tuple(vertices)}')
