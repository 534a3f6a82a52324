import logging
from pathlib import Path
from typing import Union, Dict, List, Optional, Sequence

from CodedXbarUtils import _log as _root_log
from CodedXbarUtils.core.data_objects import SimConfig, Metrics
from CodedXbarUtils.core.simulator import simulate, sweep
from CodedXbarUtils.utils import METRICS_FILENAME, RUNHISTORY_FILENAME, DEFAULT_FIELD_ORDER, \
    DEFAULT_PAYLOAD_LENGTH, DEFAULT_SLOPE_THRESHOLD, DEFAULT_INNOVATION_ATTEMPTS
from CodedXbarUtils.utils.io import write_line_to_file, write_csv
from CodedXbarUtils.utils.runner_utils import transform_unknown_params_to_dict, get_pattern_settings, \
    get_pattern_names, get_policy_settings_names, get_policy_setting, build_pattern, load_rates, parse_alphas
from CodedXbarUtils.utils.utils import resolve_seed

_root_log.setLevel(logging.INFO)
_log = logging.getLogger(__name__)


def build_config(pattern: str,
                 policy: str,
                 alpha: Union[str, int, float] = 1,
                 seed: Optional[int] = None,
                 slots: Optional[int] = None,
                 delta: Optional[int] = None,
                 epsilon: Union[str, None] = None,
                 rates: Optional[str] = None,
                 field_order: int = DEFAULT_FIELD_ORDER,
                 payload_length: int = DEFAULT_PAYLOAD_LENGTH,
                 check_invariants: bool = False,
                 **generator_params) -> SimConfig:
    """
    Combines the pattern settings, the policy settings and the explicitly given parameters (in this order of
    precedence, the last one wins) into one SimConfig. The seed can be overridden by the environment, see
    `resolve_seed`.
    """
    policy_settings = get_policy_setting(policy)
    pattern_settings = get_pattern_settings(pattern) if pattern in get_pattern_names() else {}
    settings = dict(dict(slots=10000, delta=1000, epsilon='1/200'), **pattern_settings)
    settings = dict(settings, **policy_settings)
    explicit = dict(slots=slots, delta=delta, epsilon=epsilon)
    settings.update({key: value for key, value in explicit.items() if value is not None})
    _log.debug(f'Settings loaded: {settings}')

    traffic, base_rates = build_pattern(pattern, **generator_params)
    if rates is not None:
        base_rates = load_rates(traffic, rates)
    traffic = traffic.with_rates(base_rates)

    return SimConfig(pattern=traffic,
                     policy=policy,
                     scheduler=settings['scheduler'],
                     mode=settings['mode'],
                     alpha=alpha,
                     seed=resolve_seed(seed),
                     slots=int(settings['slots']),
                     delta=int(settings['delta']),
                     epsilon=settings['epsilon'],
                     field_order=int(field_order),
                     payload_length=int(payload_length),
                     k=int(settings['k']),
                     coding=settings['coding'],
                     arrivals=settings['arrivals'],
                     visibility=settings['visibility'],
                     slope_threshold=float(settings.get('slope_threshold', DEFAULT_SLOPE_THRESHOLD)),
                     check_invariants=check_invariants,
                     max_attempts=int(settings.get('max_attempts', DEFAULT_INNOVATION_ATTEMPTS)))


def run_simulation(pattern: str,
                   policy: str,
                   output_dir: Union[Path, str, None] = None,
                   alpha: Union[str, int, float] = 1,
                   seed: Optional[int] = None,
                   slots: Optional[int] = None,
                   delta: Optional[int] = None,
                   epsilon: Union[str, None] = None,
                   rates: Optional[str] = None,
                   field_order: int = DEFAULT_FIELD_ORDER,
                   payload_length: int = DEFAULT_PAYLOAD_LENGTH,
                   check_invariants: bool = False,
                   debug: bool = False,
                   **generator_params: Dict) -> Metrics:
    """
    Simulate one policy on one traffic pattern.

    Parameters
    ----------
    pattern : str
        Name of a builtin pattern (see pattern_settings.yaml) or path to a pattern JSON file.
    policy : str
        Name of a policy setting. Those are defined in the policy_settings.yaml file.
    output_dir : str, Path, None
        If given, the metrics and the run history are stored in <output_dir>/<pattern>/<policy>/run-<seed>. The
        directory must not exist yet.
    alpha : str, int, float
        Load multiplier applied to the pattern's rates.
    seed : int, None
        Master seed of the run. The environment variable CODEDXBAR_SEED takes precedence.
    rates : str, None
        Overrides the pattern's rates: a JSON file, an inline JSON list or a comma separated list.
    generator_params : Dict
        Parameters of the pattern generator, e.g. N for the 2xN family.

    Returns
    -------
    Metrics
    """
    _log.info(f'Start simulating policy {policy} on pattern {pattern} at alpha {alpha}.')

    if debug:
        _root_log.setLevel(level=logging.DEBUG)
        _log.setLevel(level=logging.DEBUG)

    config = build_config(pattern, policy, alpha=alpha, seed=seed, slots=slots, delta=delta, epsilon=epsilon,
                          rates=rates, field_order=field_order, payload_length=payload_length,
                          check_invariants=check_invariants, **generator_params)

    run_dir = None
    if output_dir is not None:
        run_dir = Path(output_dir) / Path(pattern).stem / policy / f'run-{config.seed}'
        run_dir = run_dir.absolute()
        if run_dir.is_dir():
            raise ValueError("Outputdir %s already exists, pass" % run_dir)
        run_dir.mkdir(exist_ok=True, parents=True)
        _log.debug(f'Output dir: {run_dir}')

    metrics = simulate(config)
    _log.info(f'Mean backlog {metrics.mean_backlog:.2f}, slope {metrics.backlog_slope:.2e}, '
              f'stable: {metrics.stable}, decode failures: {metrics.decode_failures}')

    if run_dir is not None:
        write_line_to_file(run_dir / RUNHISTORY_FILENAME, {'config': config.get_dictionary()})
        for batch in metrics.batches:
            write_line_to_file(run_dir / RUNHISTORY_FILENAME, {'batch': batch.get_dictionary()})
        write_line_to_file(run_dir / METRICS_FILENAME, metrics.get_dictionary(), mode='w')

    _log.info(f'Run Simulation - Finished.')
    return metrics


def run_sweep(pattern: str,
              policies: Sequence[str],
              alphas: Union[str, List, None] = None,
              out: Union[Path, str, None] = None,
              n_workers: int = 1,
              debug: bool = False,
              **config_params) -> List[Dict]:
    """
    Sweep the load multiplier for every policy. The multipliers default to the `alphas` entry of the pattern settings.

    Returns
    -------
    List of CSV rows; written to `out` if given.
    """
    if debug:
        _root_log.setLevel(level=logging.DEBUG)
        _log.setLevel(level=logging.DEBUG)

    if alphas is None:
        pattern_settings = get_pattern_settings(pattern) if pattern in get_pattern_names() else {}
        alphas = pattern_settings.get('alphas', '1')
    alphas = parse_alphas(alphas)

    configs = [build_config(pattern, policy, **config_params) for policy in policies]
    _log.info(f'Sweep {", ".join(policies)} on {pattern} over {len(alphas)} load multipliers')
    rows = sweep(configs, alphas, n_workers=n_workers)
    if out is not None:
        write_csv(rows, out)
        _log.info(f'Sweep written to {out}')
    return rows


if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(prog='CodedXbar Simulation',
                                     description='Simulate a scheduling policy of the coded multicast switch on a '
                                                 'traffic pattern')

    parser.add_argument('--output_dir', required=False, type=str)
    parser.add_argument('--pattern', required=True, type=str,
                        help=f'One of {", ".join(get_pattern_names())} or a pattern JSON file')
    parser.add_argument('--policy', choices=get_policy_settings_names(), required=True, type=str)
    parser.add_argument('--alpha', required=False, default='1', type=str)
    parser.add_argument('--seed', required=False, default=None, type=int)
    parser.add_argument('--slots', required=False, default=None, type=int)
    parser.add_argument('--delta', required=False, default=None, type=int)
    parser.add_argument('--epsilon', required=False, default=None, type=str)
    parser.add_argument('--rates', required=False, default=None, type=str)
    parser.add_argument('--field_order', required=False, default=DEFAULT_FIELD_ORDER, type=int)
    parser.add_argument('--check_invariants', action='store_true', default=False)
    parser.add_argument('--debug', action='store_true', default=False, help="When given, enables debug mode logging.")
    args, unknown = parser.parse_known_args()
    generator_params = transform_unknown_params_to_dict(unknown)

    run_simulation(**vars(args), **generator_params)
