"""
Traffic patterns of a multicast crossbar switch.

A flow is a packet stream from one input to a set of outputs (its fanout). Every flow splits into one sub-flow per
output of its fanout. Sub-flows are indexed in a canonical order: flow order first, then fanout order. All other
modules rely on that order.

Ports are 0-indexed here and 1-indexed whenever something is printed for a user.
"""
import json
import logging
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import NamedTuple, Tuple, Sequence, Union, List, Dict, Optional

from CodedXbarUtils.core.data_objects import BaseObject
from CodedXbarUtils.utils.io import load_json_file
from CodedXbarUtils.utils.utils import DimensionError, ValidationError, PatternParseError, to_fraction, \
    fraction_to_str

_log = logging.getLogger(__name__)

RateVector = Tuple[Fraction, ...]
EnhancedRateVector = Tuple[Fraction, ...]


class Flow(NamedTuple):
    input: int
    fanout: Tuple[int, ...]
    rate: Fraction = Fraction(0)


class SubFlow(NamedTuple):
    input: int
    fanout: Tuple[int, ...]
    output: int


def flow_label(flow: Union[Flow, SubFlow]) -> str:
    """ User facing name in 1-indexed port numbers, e.g. '(1,{1,2,3})' or '(1,{1,2,3},2)'. """
    fanout = ','.join(str(j + 1) for j in flow.fanout)
    if isinstance(flow, SubFlow):
        return f'({flow.input + 1},{{{fanout}}},{flow.output + 1})'
    return f'({flow.input + 1},{{{fanout}}})'


class TrafficPattern(BaseObject):
    def __init__(self, num_inputs: int, num_outputs: int, flows: Sequence[Flow], name: Optional[str] = None):
        if num_inputs < 1 or num_outputs < 1:
            raise ValidationError(f'A switch needs at least one input and one output, got {num_inputs}x{num_outputs}')

        checked_flows = []
        seen = set()
        for flow in flows:
            fanout = tuple(int(j) for j in flow.fanout)
            rate = to_fraction(flow.rate)
            if not 0 <= flow.input < num_inputs:
                raise ValidationError(f'Flow input {flow.input} outside of 0..{num_inputs - 1}')
            if len(fanout) == 0:
                raise ValidationError(f'Flow at input {flow.input} has an empty fanout')
            if len(set(fanout)) != len(fanout):
                raise ValidationError(f'Fanout {fanout} contains duplicates')
            if any(not 0 <= j < num_outputs for j in fanout):
                raise ValidationError(f'Fanout {fanout} addresses an output outside of 0..{num_outputs - 1}')
            if rate < 0:
                raise ValidationError(f'Negative rate {rate} for flow {flow_label(flow)}')
            key = (flow.input, frozenset(fanout))
            if key in seen:
                raise ValidationError(f'Two flows share input {flow.input} and fanout {sorted(fanout)}')
            seen.add(key)
            checked_flows.append(Flow(int(flow.input), fanout, rate))

        self.num_inputs = int(num_inputs)
        self.num_outputs = int(num_outputs)
        self.flows = tuple(checked_flows)
        self.name = name

        subflows, parents, flow_subflows = [], [], []
        for flow_index, flow in enumerate(self.flows):
            indices = []
            for output in flow.fanout:
                indices.append(len(subflows))
                subflows.append(SubFlow(flow.input, flow.fanout, output))
                parents.append(flow_index)
            flow_subflows.append(tuple(indices))

        self.subflows = tuple(subflows)
        self.subflow_parent = tuple(parents)
        self.flow_subflows = tuple(flow_subflows)

    @property
    def num_flows(self) -> int:
        return len(self.flows)

    @property
    def num_subflows(self) -> int:
        return len(self.subflows)

    @property
    def rates(self) -> RateVector:
        return tuple(flow.rate for flow in self.flows)

    @property
    def fanouts(self) -> List[int]:
        return [len(flow.fanout) for flow in self.flows]

    def with_rates(self, rates: Sequence) -> 'TrafficPattern':
        rates = as_rate_vector(self, rates)
        return TrafficPattern(self.num_inputs, self.num_outputs,
                              [Flow(flow.input, flow.fanout, rate) for flow, rate in zip(self.flows, rates)],
                              name=self.name)

    def get_dictionary(self):
        return {'inputs': self.num_inputs,
                'outputs': self.num_outputs,
                'flows': [{'input': flow.input, 'fanout': list(flow.fanout), 'rate': fraction_to_str(flow.rate)}
                          for flow in self.flows]}


def as_rate_vector(pattern: TrafficPattern, rates: Sequence) -> RateVector:
    rates = tuple(to_fraction(rate) for rate in rates)
    if len(rates) != pattern.num_flows:
        raise DimensionError(f'Expected {pattern.num_flows} rates, one per flow, but got {len(rates)}')
    negative = [i for i, rate in enumerate(rates) if rate < 0]
    if negative:
        raise ValidationError(f'Rates must be nonnegative, flows {negative} are not')
    return rates


def scale_rates(rates: Sequence, factor: Union[Fraction, int, str]) -> RateVector:
    factor = to_fraction(factor)
    if factor < 0:
        raise ValidationError(f'Scaling factor must be nonnegative, got {factor}')
    return tuple(to_fraction(rate) * factor for rate in rates)


def enhanced_rate_vector(pattern: TrafficPattern, rates: Sequence) -> EnhancedRateVector:
    """ Copies every flow rate onto each of the flow's sub-flows (canonical sub-flow order). """
    rates = as_rate_vector(pattern, rates)
    return tuple(rates[parent] for parent in pattern.subflow_parent)


def line_loads(pattern: TrafficPattern, rates: Sequence) -> Tuple[Fraction, ...]:
    """ Input loads followed by output loads. """
    rates = as_rate_vector(pattern, rates)
    loads = [Fraction(0)] * (pattern.num_inputs + pattern.num_outputs)
    for flow, rate in zip(pattern.flows, rates):
        loads[flow.input] += rate
        for output in flow.fanout:
            loads[pattern.num_inputs + output] += rate
    return tuple(loads)


def is_admissible(pattern: TrafficPattern, rates: Sequence) -> Tuple[bool, Tuple[Fraction, ...]]:
    loads = line_loads(pattern, rates)
    return all(load <= 1 for load in loads), loads


def pattern_fig1() -> Tuple[TrafficPattern, RateVector]:
    """ One multicast from input 1 to all three outputs and three unicasts from input 2. """
    return pattern_2xN(3, Fraction(2, 3), [Fraction(1, 3)] * 3, name='fig1')


def pattern_2xN(N: int,
                r0: Union[Fraction, str, float, None] = None,
                unicast_rates: Optional[Sequence] = None,
                name: Optional[str] = None) -> Tuple[TrafficPattern, RateVector]:
    """
    Broadcast from input 1 to all N outputs plus one unicast from input 2 to every output.

    Parameters
    ----------
    N : int
    r0 : rate of the broadcast, defaults to 1 - 1/N
    unicast_rates : N rates, defaults to 1/N each

    Returns
    -------
    TrafficPattern, RateVector
    """
    N = int(N)
    if N < 1:
        raise ValidationError(f'N must be positive, got {N}')
    r0 = Fraction(1) - Fraction(1, N) if r0 is None else to_fraction(r0)
    unicast_rates = [Fraction(1, N)] * N if unicast_rates is None else [to_fraction(r) for r in unicast_rates]
    if len(unicast_rates) != N:
        raise DimensionError(f'Expected {N} unicast rates, got {len(unicast_rates)}')
    if r0 < 0 or any(rate < 0 for rate in unicast_rates):
        raise ValidationError('Rates of the 2xN pattern must be nonnegative')

    flows = [Flow(0, tuple(range(N)), r0)] + [Flow(1, (j,), rate) for j, rate in enumerate(unicast_rates)]
    pattern = TrafficPattern(2, N, flows, name=name or f'2x{N}')
    return pattern, pattern.rates


def pattern_4x3_sim(alpha: Union[Fraction, str, float, int] = 1) -> Tuple[TrafficPattern, RateVector]:
    """
    Load-sweep pattern: a broadcast of rate 4/9 alpha from input 1, small unicasts of rate alpha/100 from inputs 1, 3
    and 4 to outputs 1, 2 and 3, and a unicast of rate (2/9 + 1/100) alpha from input 2 to output 1.
    """
    alpha = to_fraction(alpha)
    if alpha < 0:
        raise ValidationError(f'alpha must be nonnegative, got {alpha}')
    small = Fraction(1, 100) * alpha
    flows = [Flow(0, (0, 1, 2), Fraction(4, 9) * alpha),
             Flow(0, (0,), small),
             Flow(1, (0,), (Fraction(2, 9) + Fraction(1, 100)) * alpha),
             Flow(2, (1,), small),
             Flow(3, (2,), small)]
    pattern = TrafficPattern(4, 3, flows, name='sim4x3')
    return pattern, pattern.rates


def pattern_full(num_inputs: int, num_outputs: int, max_fanout: Optional[int] = None) -> TrafficPattern:
    """ Every input carries one flow per nonempty output subset (up to max_fanout outputs), all rates zero. """
    max_fanout = num_outputs if max_fanout is None else max_fanout
    flows = []
    for i in range(num_inputs):
        for size in range(1, max_fanout + 1):
            for fanout in combinations(range(num_outputs), size):
                flows.append(Flow(i, fanout, Fraction(0)))
    return TrafficPattern(num_inputs, num_outputs, flows, name=f'full{num_inputs}x{num_outputs}')


def pattern_full_2x3() -> TrafficPattern:
    """ Three unicasts, three two-casts and one broadcast from each of two inputs: 14 flows, 24 sub-flows. """
    return pattern_full(2, 3)


def pattern_from_dict(data: Dict, name: Optional[str] = None) -> TrafficPattern:
    """
    Reads the pattern JSON schema
    {"inputs": M, "outputs": N, "flows": [{"input": i, "fanout": [j, ...], "rate": "p/q"}, ...]}.
    Ports in the file are 0-indexed; rates are decimal or 'p/q' strings (numbers are accepted too).
    """
    try:
        flows = [Flow(int(entry['input']), tuple(int(j) for j in entry['fanout']), to_fraction(entry.get('rate', 0)))
                 for entry in data['flows']]
        return TrafficPattern(int(data['inputs']), int(data['outputs']), flows, name=name)
    except (KeyError, TypeError) as e:
        raise PatternParseError(f'Malformed pattern description: {e!r}') from e


def rates_from_data(pattern: TrafficPattern, data: Union[Dict, Sequence]) -> RateVector:
    """ Rates given either as a plain list or as {"rates": [...]}. """
    if isinstance(data, dict):
        data = data.get('rates', [])
    return as_rate_vector(pattern, data)


def load_pattern_json(path: Union[str, Path]) -> Tuple[TrafficPattern, RateVector]:
    """ Pattern and its rates from a pattern JSON file; syntax errors carry line and column. """
    path = Path(path)
    pattern = pattern_from_dict(load_json_file(path), name=path.stem)
    return pattern, pattern.rates


def dump_pattern_json(pattern: TrafficPattern, path: Union[str, Path, None] = None) -> str:
    text = json.dumps(pattern.get_dictionary(), indent=2)
    if path is not None:
        Path(path).write_text(text + '\n', encoding='utf-8')
    return text
