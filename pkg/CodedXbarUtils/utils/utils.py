import hashlib
import logging
import os
from fractions import Fraction
from math import gcd
from typing import Union, Iterable, Optional

import numpy as np

from CodedXbarUtils.utils import SEED_ENV_VARIABLE

_log = logging.getLogger(__name__)


class CodedXbarError(Exception):
    pass


class DimensionError(CodedXbarError, ValueError):
    pass


class ValidationError(CodedXbarError, ValueError):
    pass


class SizeCapError(CodedXbarError):
    def __init__(self, message: str, cap: int):
        super(SizeCapError, self).__init__(message)
        self.cap = cap


class RegionError(CodedXbarError):
    def __init__(self, message: str, value: Fraction):
        super(RegionError, self).__init__(message)
        self.value = value


class CodingError(CodedXbarError):
    pass


class ContractError(CodedXbarError):
    pass


class IntegrityError(CodedXbarError):
    pass


class FieldArithmeticError(CodedXbarError, ZeroDivisionError):
    pass


class PatternParseError(CodedXbarError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super(PatternParseError, self).__init__(message)
        self.line = line
        self.column = column


def get_mandatory_setting(settings_dict: dict, setting_name: str, err_msg: str = None):
    """ Convenience function that tries to fetch a given string from the settings dictionary and raises an error if it
    is not found. """

    if err_msg is None:
        err_msg = "The settings must include '%s'." % setting_name

    try:
        return settings_dict[setting_name]
    except KeyError as e:
        raise KeyError(err_msg) from e


def standard_rng_init(rng: Union[np.random.RandomState, int, None]):
    if isinstance(rng, np.random.RandomState):
        return rng
    else:
        return np.random.RandomState(rng)


def to_fraction(value: Union[Fraction, int, float, str]) -> Fraction:
    """
    Parse a rate into an exact rational.

    Decimal strings and floats are read through their shortest decimal representation, so 0.01 becomes 1/100 and
    not the binary approximation of 0.01. Strings of the form 'p/q' are accepted as well.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError(f'Can not interpret {value} as a rate')
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as e:
            raise ValidationError(f'Can not interpret {value!r} as an exact fraction') from e
    raise ValidationError(f'Unsupported rate type {type(value)}')


def fraction_to_str(value: Fraction) -> str:
    """ Exact 'p/q' rendering, integers included ('1/1'). """
    value = Fraction(value)
    return f'{value.numerator}/{value.denominator}'


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    result = 1
    for value in values:
        denominator = Fraction(value).denominator
        result = result * denominator // gcd(result, denominator)
    return result


def resolve_seed(seed: Optional[int]) -> int:
    """ The environment variable overrides the configured seed. """
    env_seed = os.environ.get(SEED_ENV_VARIABLE)
    if env_seed is not None:
        _log.info(f'Seed {seed} overridden by {SEED_ENV_VARIABLE}={env_seed}')
        return int(env_seed)
    return 0 if seed is None else int(seed)


def derive_seed(master_seed: int, alpha: Union[Fraction, float, str], policy: str) -> int:
    """ Per-run seed from (master seed, alpha, policy). Independent of execution order. """
    token = f'{int(master_seed)}:{fraction_to_str(to_fraction(alpha))}:{policy}'
    digest = hashlib.sha256(token.encode('utf-8')).hexdigest()
    return int(digest[:8], 16)
