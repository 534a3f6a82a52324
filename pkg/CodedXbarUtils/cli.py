"""
Command line front end, installed as `codedxbar`.

    codedxbar analyze  --pattern fig1
    codedxbar schedule --pattern fig1
    codedxbar simulate --pattern fig1 --policy offline --slots 999 --seed 7
    codedxbar sweep    --pattern sim4x3 --policies mwss-rand,uncoded-rand --alphas 0.6:1.5:0.1 --out sweep.csv
    codedxbar region   --2xN 3 2/3 1/3 1/3 1/3

Analytical outputs are exact 'p/q' strings. Exit codes: 0 ok, 2 parse or usage error, 3 size cap exceeded,
4 rates outside the rate region, 5 decode failure.
"""
import argparse
import json
import logging
import sys
from typing import Dict, List, Optional

import numpy as np

from CodedXbarUtils import _log as _root_log
from CodedXbarUtils.core.conflict_graph import build_enhanced_conflict_graph, enumerate_maximal_stable_sets, \
    maximal_cliques, is_split_graph, is_perfect
from CodedXbarUtils.core.gf_coding import PacketPool, ReceiverState, get_field, describe_coefficients
from CodedXbarUtils.core.rate_region import ScheduleFrame, coloring_of_rates, build_offline_schedule, \
    schedule_to_json, slot_table, uncoded_2xN_inequalities, uncoded_2xN_check, min_speedup
from CodedXbarUtils.core.simulator import simulate, sweep, metrics_to_row
from CodedXbarUtils.core.traffic import TrafficPattern, is_admissible, pattern_2xN, scale_rates
from CodedXbarUtils.schedulers.offline_scheduler import offline_executor
from CodedXbarUtils.run_simulation import build_config
from CodedXbarUtils.utils import EXIT_OK, EXIT_PARSE, EXIT_SIZE_CAP, EXIT_OUT_OF_REGION, EXIT_DECODE_FAILURE, \
    DEFAULT_FIELD_ORDER
from CodedXbarUtils.utils.io import write_csv
from CodedXbarUtils.utils.runner_utils import transform_unknown_params_to_dict, build_pattern, load_rates, \
    parse_alphas, get_pattern_settings, get_pattern_names
from CodedXbarUtils.utils.utils import CodedXbarError, SizeCapError, RegionError, CodingError, \
    PatternParseError, fraction_to_str, to_fraction

_root_log.setLevel(logging.INFO)
_log = logging.getLogger(__name__)


def _load_traffic(args, generator_params: Dict) -> TrafficPattern:
    traffic, rates = build_pattern(args.pattern, **generator_params)
    rates = load_rates(traffic, args.rates) if args.rates is not None else rates
    return traffic.with_rates(scale_rates(rates, args.alpha))


def analyze(traffic: TrafficPattern) -> Dict:
    """ Graph statistics, admissibility and the rate region verdict of a pattern at its rates. """
    graph = build_enhanced_conflict_graph(traffic)
    admissible, loads = is_admissible(traffic, traffic.rates)
    split, partition = is_split_graph(graph)
    solution = coloring_of_rates(traffic, traffic.rates, graph)
    return {'pattern': traffic.name,
            'vertices': graph.num_vertices,
            'edges': graph.num_edges,
            'maximal_stable_sets': len(enumerate_maximal_stable_sets(graph)),
            'maximal_cliques': len(maximal_cliques(graph)),
            'admissible': admissible,
            'loads': [fraction_to_str(load) for load in loads],
            'split': split,
            'split_partition': None if partition is None else [list(partition[0]), list(partition[1])],
            'perfect': is_perfect(graph),
            'chi_f': fraction_to_str(solution.value),
            'in_region': solution.value <= 1,
            'speedup': fraction_to_str(min_speedup(traffic, traffic.rates, graph)),
            'coloring': solution.get_dictionary()}


def frame_codes(frame: ScheduleFrame, field_order: Optional[int] = None, seed: int = 0) -> Dict:
    """
    Runs the frame once on a batch of r F packets per flow and renders the coded packet of every (slot, flow).
    Without an explicit field the codes are searched over GF(2) first, then over GF(256).
    """
    orders = [field_order] if field_order is not None else [2, DEFAULT_FIELD_ORDER]
    for order in orders:
        field = get_field(order)
        rng = np.random.RandomState(seed)
        pools = {f: PacketPool(f, 0, 0) for f in range(frame.pattern.num_flows)}
        for f, pool in pools.items():
            for _ in range(frame.packets_per_frame(f)):
                pool.add(None, 0)
        receivers = {(f, j): ReceiverState(field, f, 0, j, 0, 0)
                     for f, flow in enumerate(frame.pattern.flows) for j in flow.fanout}
        codes = {}
        try:
            for t in range(frame.frame_length):
                decision = offline_executor(frame, t, pools, receivers, field, rng)
                for flow, (packet, outputs) in decision.coded.items():
                    codes[(t, flow)] = describe_coefficients(packet.coefficients)
                    for output in outputs:
                        receivers[(flow, output)].absorb(packet)
        except CodingError as e:
            _log.info(f'No code over {field!r}: {e}')
            continue
        _log.debug(f'Frame codes over {field!r}')
        return codes
    raise CodingError(f'No code found over GF({", ".join(str(order) for order in orders)})')


def region_report(N: int, r0, unicast_rates: List) -> Dict:
    """ The 2xN necessary conditions without coding, the uncoded scale and the coded speedup. """
    rows = uncoded_2xN_inequalities(N, r0, unicast_rates)
    feasible, min_scale = uncoded_2xN_check(N, r0, unicast_rates)
    traffic, rates = pattern_2xN(N, r0, unicast_rates)
    inequalities = []
    for name, lhs, rhs in rows:
        holds = lhs >= rhs if name.startswith('(1)') else lhs <= rhs
        relation = ('>=' if name.startswith('(1)') else '<=') if holds else ('<' if name.startswith('(1)') else '>')
        inequalities.append({'name': name, 'lhs': fraction_to_str(lhs), 'rhs': fraction_to_str(rhs),
                             'holds': holds, 'text': f'{lhs} {relation} {rhs}'})
    return {'N': N,
            'inequalities': inequalities,
            'uncoded_feasible': feasible,
            'uncoded_scale': fraction_to_str(min_scale),
            'coded_speedup': fraction_to_str(min_speedup(traffic, rates))}


def _print_json(data):
    print(json.dumps(data, indent=2))


def _run_analyze(args, generator_params) -> int:
    report = analyze(_load_traffic(args, generator_params))
    if not args.json:
        report.pop('coloring')
    _print_json(report)
    return EXIT_OK


def _run_schedule(args, generator_params) -> int:
    traffic = _load_traffic(args, generator_params)
    frame = build_offline_schedule(traffic, traffic.rates)
    codes = frame_codes(frame, args.field, args.seed or 0)
    data = schedule_to_json(frame)
    data['chi_f'] = fraction_to_str(frame.value)
    data['codes'] = [{'slot': t + 1, 'flow': flow, 'code': code} for (t, flow), code in sorted(codes.items())]
    _print_json(data)
    if not args.json:
        print(slot_table(frame, codes), end='')
    return EXIT_OK


def _config_params(args) -> Dict:
    return dict(seed=args.seed, slots=args.slots, delta=args.delta, epsilon=args.epsilon, rates=args.rates,
                field_order=args.field or DEFAULT_FIELD_ORDER)


def _emit_rows(rows: List[Dict], out: Optional[str]):
    text = write_csv(rows, out)
    if out is None:
        print(text, end='')


def _run_simulate(args, generator_params) -> int:
    config = build_config(args.pattern, args.policy, alpha=args.alpha, **_config_params(args), **generator_params)
    metrics = simulate(config)
    if args.json:
        _print_json(metrics.get_dictionary())
    else:
        _emit_rows([metrics_to_row(config, metrics)], args.out)
    return EXIT_DECODE_FAILURE if metrics.decode_failures > 0 else EXIT_OK


def _run_sweep(args, generator_params) -> int:
    alphas = args.alphas
    if alphas is None:
        alphas = get_pattern_settings(args.pattern).get('alphas', '1') if args.pattern in get_pattern_names() else '1'
    policies = [policy.strip() for policy in args.policies.split(',') if policy.strip()]
    configs = [build_config(args.pattern, policy, **_config_params(args), **generator_params) for policy in policies]
    rows = sweep(configs, parse_alphas(alphas), n_workers=args.workers)
    _emit_rows(rows, args.out)
    return EXIT_DECODE_FAILURE if any(row['decode_failures'] > 0 for row in rows) else EXIT_OK


def _run_region(args, generator_params) -> int:
    values = args.two_by_n
    if values is None or len(values) < 1:
        raise PatternParseError('region needs --2xN N [r0 r1 .. rN]')
    N = int(values[0])
    if len(values) == 1:
        r0, unicast_rates = None, None
    elif len(values) == N + 2:
        r0, unicast_rates = values[1], values[2:]
    else:
        raise PatternParseError(f'--2xN {N} expects r0 and {N} unicast rates, got {len(values) - 1} values')
    traffic, rates = pattern_2xN(N, r0, unicast_rates)
    report = region_report(N, rates[0], list(rates[1:]))
    if args.json:
        _print_json(report)
    else:
        for row in report['inequalities']:
            print(f"{row['name']}: {row['text']}")
        print(f"uncoded scale: {report['uncoded_scale']}")
        print(f"coded speedup: {report['coded_speedup']}")
    return EXIT_OK


COMMANDS = {'analyze': _run_analyze,
            'schedule': _run_schedule,
            'simulate': _run_simulate,
            'sweep': _run_sweep,
            'region': _run_region}


def get_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='codedxbar',
                                     description='Rate regions, frame schedules and simulations of a multicast '
                                                 'crossbar switch with intra-flow network coding')
    parser.add_argument('command', choices=list(COMMANDS.keys()))
    parser.add_argument('--pattern', default='fig1', type=str,
                        help=f'One of {", ".join(get_pattern_names())} or a pattern JSON file')
    parser.add_argument('--rates', default=None, type=str, help='JSON file, inline JSON list or comma separated list')
    parser.add_argument('--alpha', default='1', type=str, help='Load multiplier, exact (e.g. 6/5)')
    parser.add_argument('--alphas', default=None, type=str, help='a:b:step or comma separated list')
    parser.add_argument('--policy', default='mwss', type=str)
    parser.add_argument('--policies', default='mwss-rand,uncoded-rand', type=str)
    parser.add_argument('--slots', default=None, type=int)
    parser.add_argument('--seed', default=None, type=int)
    parser.add_argument('--delta', default=None, type=int)
    parser.add_argument('--epsilon', default=None, type=str)
    parser.add_argument('--field', default=None, type=int, choices=[2, 16, 256])
    parser.add_argument('--workers', default=1, type=int)
    parser.add_argument('--out', default=None, type=str)
    parser.add_argument('--json', action='store_true', default=False)
    parser.add_argument('--2xN', dest='two_by_n', nargs='+', default=None, metavar='N r0 r1 .. rN')
    parser.add_argument('--debug', action='store_true', default=False, help="When given, enables debug mode logging.")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = get_parser()
    try:
        args, unknown = parser.parse_known_args(argv)
        generator_params = transform_unknown_params_to_dict(unknown)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_PARSE
    except IndexError as e:
        _log.error(e)
        return EXIT_PARSE

    if args.debug:
        _root_log.setLevel(level=logging.DEBUG)
        _log.setLevel(level=logging.DEBUG)

    try:
        to_fraction(args.alpha)
        return COMMANDS[args.command](args, generator_params)
    except SizeCapError as e:
        _log.error(f'{e} (cap {e.cap})')
        return EXIT_SIZE_CAP
    except RegionError as e:
        _log.error(e)
        print(json.dumps({'in_region': False, 'chi_f': fraction_to_str(e.value)}))
        return EXIT_OUT_OF_REGION
    except PatternParseError as e:
        _log.error(f'{e} (line {e.line}, column {e.column})')
        return EXIT_PARSE
    except CodingError as e:
        _log.error(e)
        return EXIT_DECODE_FAILURE
    except (CodedXbarError, AssertionError, ValueError, KeyError) as e:
        _log.error(e)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
