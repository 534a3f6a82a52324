import logging
from fractions import Fraction
from pathlib import Path
from typing import List, Dict, Tuple, Union, Optional

import yaml

from CodedXbarUtils.core.traffic import TrafficPattern, RateVector, pattern_fig1, pattern_2xN, pattern_4x3_sim, \
    pattern_full, load_pattern_json, rates_from_data
from CodedXbarUtils.utils.io import load_json_file, load_json_text
from CodedXbarUtils.utils.utils import ValidationError, get_mandatory_setting, to_fraction

_log = logging.getLogger(__name__)


def transform_unknown_params_to_dict(unknown_args: List) -> Dict:
    """
    Given a list of unknown parameters in form ['--name', 'value', ...], it transforms the list into a dictionary.
    Integers are cast, everything else stays a string (rates like '2/3' are parsed by the pattern generators).

    This function is used to extract the generator parameters (such as N for the 2xN pattern) from the
    command line arguments.

    Parameters
    ----------
    unknown_args : List

    Returns
    -------
    Dict
    """
    generator_params = {}
    for i in range(0, len(unknown_args), 2):
        try:
            value = int(unknown_args[i+1])
        except ValueError:
            value = unknown_args[i+1]
        except IndexError:
            raise IndexError('While parsing additional arguments an index error occured. '
                             'This means a parameter has no value.')

        generator_params[unknown_args[i][2:]] = value
    return generator_params


def parse_alphas(alphas: Union[str, List]) -> List[Fraction]:
    """ 'a:b:step' (inclusive, exact) or a comma separated list. """
    if isinstance(alphas, (list, tuple)):
        return [to_fraction(alpha) for alpha in alphas]
    alphas = str(alphas).strip()
    if ':' in alphas:
        parts = alphas.split(':')
        if len(parts) != 3:
            raise ValidationError(f'Expected a:b:step, got {alphas}')
        start, stop, step = (to_fraction(part) for part in parts)
        if step <= 0:
            raise ValidationError(f'Step must be positive, got {step}')
        count = int((stop - start) / step) + 1
        return [start + i * step for i in range(max(count, 0))]
    return [to_fraction(alpha) for alpha in alphas.split(',') if alpha.strip()]


def load_policy_settings() -> Dict:
    """ Load the policy settings from file """
    policy_settings_path = Path(__file__).absolute().parent.parent / 'policy_settings.yaml'
    with policy_settings_path.open('r') as fh:
        policy_settings = yaml.load(fh, yaml.FullLoader)
    return policy_settings


def get_policy_settings_names():
    settings = load_policy_settings()
    return list(settings.keys())


def get_policy_setting(policy_setting_str: str) -> Dict:
    policy_settings = load_policy_settings()
    settings_names = get_policy_settings_names()

    assert policy_setting_str in settings_names,\
        f"Policy setting {policy_setting_str} not found. Should be one of {', '.join(settings_names)}"

    policy_settings = policy_settings[policy_setting_str]

    mandatory = ['scheduler', 'mode']
    found = [option in policy_settings for option in mandatory]
    assert all(found), "Missing mandatory option(s) %s in policy settings %s" % \
                       (str([o for b, o in zip(found, mandatory) if not b]), str(policy_settings))

    default_params = dict(k=10,
                          coding='full',
                          arrivals='bernoulli',
                          visibility='staggered',
                          display_name=policy_setting_str)
    return dict(default_params, **policy_settings)


def load_pattern_settings() -> Dict:
    """ Load the builtin pattern settings from file """
    pattern_settings_path = Path(__file__).absolute().parent.parent / 'pattern_settings.yaml'
    with pattern_settings_path.open('r') as fh:
        pattern_settings = yaml.load(fh, yaml.FullLoader)
    return pattern_settings


def get_pattern_names():
    """ Get the names of the builtin patterns. """
    pattern_settings = load_pattern_settings()
    return list(pattern_settings.keys())


def get_pattern_settings(pattern: str) -> Dict:
    """
    Settings of a builtin pattern: the generator with its parameters and the default run parameters.

    Parameters
    ----------
    pattern : str

    Returns
    -------
        Dict
    """
    pattern_settings = load_pattern_settings()
    pattern_names = get_pattern_names()

    assert pattern in pattern_names,\
        f"pattern name {pattern} not found. Should be one of {', '.join(pattern_names)}"

    pattern_settings = pattern_settings[pattern]
    get_mandatory_setting(pattern_settings, 'generator',
                          f"The settings of pattern {pattern} must name a 'generator'.")

    default_params = dict(slots=10000,
                          delta=1000,
                          epsilon='1/200')
    return dict(default_params, **pattern_settings)


GENERATOR_PARAMETERS = {'fig1': [],
                        '2xN': ['N', 'r0', 'unicast_rates'],
                        'sim4x3': ['alpha'],
                        'full': ['num_inputs', 'num_outputs', 'max_fanout']}


def _split_rates(value) -> Optional[List]:
    if value is None or isinstance(value, (list, tuple)):
        return value
    return [part for part in str(value).split(',') if part.strip()]


def build_pattern(pattern: str, **generator_params) -> Tuple[TrafficPattern, RateVector]:
    """
    Builtin pattern by name, or a pattern JSON file. Generator parameters override those of the settings file.

    Returns
    -------
        TrafficPattern, RateVector
    """
    if pattern in get_pattern_names():
        settings = get_pattern_settings(pattern)
        generator = settings['generator']
        assert generator in GENERATOR_PARAMETERS, \
            f"Unknown generator {generator}. Should be one of {', '.join(GENERATOR_PARAMETERS)}"
        params = {key: settings[key] for key in GENERATOR_PARAMETERS[generator] if key in settings}
        params.update({key: value for key, value in generator_params.items()
                       if key in GENERATOR_PARAMETERS[generator]})
        unused = set(generator_params) - set(GENERATOR_PARAMETERS[generator])
        if unused:
            _log.warning(f'Generator {generator} ignores the parameters {sorted(unused)}')
        _log.debug(f'Build pattern {pattern} with {generator}({params})')

        if generator == 'fig1':
            return pattern_fig1()
        elif generator == '2xN':
            return pattern_2xN(int(params.get('N', 3)), params.get('r0'), _split_rates(params.get('unicast_rates')))
        elif generator == 'sim4x3':
            return pattern_4x3_sim(params.get('alpha', 1))
        else:
            full = pattern_full(int(params.get('num_inputs', 2)), int(params.get('num_outputs', 3)),
                                params.get('max_fanout'))
            return full, full.rates

    path = Path(pattern)
    if not path.exists():
        raise ValidationError(f'{pattern} is neither a builtin pattern ({", ".join(get_pattern_names())}) nor a file')
    return load_pattern_json(path)


def load_rates(traffic: TrafficPattern, rates: Optional[str]) -> RateVector:
    """ Rates from a JSON file, an inline JSON list or a comma separated list; the pattern's own rates if None. """
    if rates is None:
        return traffic.rates
    path = Path(rates)
    if path.exists():
        return rates_from_data(traffic, load_json_file(path))
    text = rates.strip()
    if text.startswith('[') or text.startswith('{'):
        return rates_from_data(traffic, load_json_text(text))
    return rates_from_data(traffic, _split_rates(text))
