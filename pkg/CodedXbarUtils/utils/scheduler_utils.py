import logging
from enum import Enum
from typing import Union

from CodedXbarUtils.utils.runner_utils import get_policy_settings_names

_log = logging.getLogger(__name__)


class SchedulerEnum(Enum):
    """ Enumeration type for the supported scheduler families """
    def __str__(self):
        return str(self.value)

    MWSS = 'mwss'
    MWSS_RANDOMIZED = 'mwss_randomized'
    OFFLINE = 'offline'
    UNCODED = 'uncoded'


def scheduler_str_to_enum(scheduler: Union[SchedulerEnum, str]) -> SchedulerEnum:
    """
    Maps a name as string or enumeration type of a scheduler to the enumeration object.

    Parameters
    ----------
    scheduler : Union[SchedulerEnum, str]
        If the type is 'str': return the scheduler-enumeration object.
        But if it is already the scheduler enumeration, just return the type again.

    Returns
    -------
        SchedulerEnum
    """
    if isinstance(scheduler, SchedulerEnum):
        return scheduler

    if not isinstance(scheduler, str):
        raise TypeError(f'Unknown scheduler type. Must be one of str|SchedulerEnum, but was {type(scheduler)}')

    name = scheduler.lower().replace('-', '_')
    if name in ('mwss', 'mwss_exact'):
        return SchedulerEnum.MWSS
    elif name in ('mwss_randomized', 'mwss_rand'):
        return SchedulerEnum.MWSS_RANDOMIZED
    elif name == 'offline':
        return SchedulerEnum.OFFLINE
    elif 'uncoded' in name:
        return SchedulerEnum.UNCODED

    raise ValueError(f'Unknown scheduler str. Must be a scheduler of one of the policies '
                     f'{get_policy_settings_names()}, but was {scheduler}')


def get_scheduler(scheduler_enum: SchedulerEnum):
    if scheduler_enum is SchedulerEnum.MWSS:
        from CodedXbarUtils.schedulers.mwss_scheduler import MWSSScheduler
        scheduler = MWSSScheduler
    elif scheduler_enum is SchedulerEnum.MWSS_RANDOMIZED:
        from CodedXbarUtils.schedulers.mwss_scheduler import RandomizedMWSSScheduler
        scheduler = RandomizedMWSSScheduler
    elif scheduler_enum is SchedulerEnum.OFFLINE:
        from CodedXbarUtils.schedulers.offline_scheduler import OfflineScheduler
        scheduler = OfflineScheduler
    elif scheduler_enum is SchedulerEnum.UNCODED:
        from CodedXbarUtils.schedulers.uncoded_scheduler import UncodedScheduler
        scheduler = UncodedScheduler
    else:
        raise ValueError(f'Unknown scheduler: {scheduler_enum}')
    return scheduler
