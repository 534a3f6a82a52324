import logging
from pathlib import Path
from typing import Union, List, Optional

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from CodedXbarUtils.core.data_objects import Metrics
from CodedXbarUtils.utils.plotting_utils import color_per_policy, marker_per_policy, linestyle_per_policy, \
    unify_layout, export_legend
from CodedXbarUtils.utils.runner_utils import get_policy_setting, get_policy_settings_names

_log = logging.getLogger(__name__)


def load_sweep(csv_file: Union[Path, str]) -> pd.DataFrame:
    """ Sweep CSV as a DataFrame with a numeric alpha column, sorted by policy and alpha. """
    csv_file = Path(csv_file)
    assert csv_file.is_file(), f'Sweep file doesn\"t exist: {csv_file}'
    df = pd.read_csv(csv_file)
    df['alpha'] = df['alpha'].astype(float)
    return df.sort_values(['policy', 'alpha'], kind='stable').reset_index(drop=True)


def instability_threshold(df: pd.DataFrame, policy: str) -> Optional[float]:
    """ Smallest load multiplier at which the policy was judged unstable, None if it was stable everywhere. """
    unstable = df[(df['policy'] == policy) & (~df['stable'].astype(bool))]
    if len(unstable) == 0:
        return None
    return float(unstable['alpha'].min())


def _label(policy: str) -> str:
    if policy in get_policy_settings_names():
        return get_policy_setting(policy).get('display_name', policy)
    return policy


def plot_delay_vs_load(csv_file: Union[Path, str], output_dir: Union[Path, str], criterion: str = 'mean_delay',
                       policies: Optional[List[str]] = None, yscale: str = 'log') -> Path:
    """
    Delay (or any other numeric column) against the load multiplier, one line per policy. Points of unstable runs
    are drawn hollow.
    """
    df = load_sweep(csv_file)
    assert criterion in df.columns, f'Unknown column {criterion}. Should be one of {", ".join(df.columns)}'
    output_dir = Path(output_dir)
    output_dir.mkdir(exist_ok=True, parents=True)

    policies = list(df['policy'].unique()) if policies is None else policies
    f, ax = plt.subplots(1, 1)
    for policy in policies:
        policy_df = df[df['policy'] == policy]
        if len(policy_df) == 0:
            _log.critical(f'Skip unknown policy {policy}')
            continue
        stats = policy_df.groupby('alpha').agg(value=(criterion, 'median'), stable=('stable', 'all'))
        color = color_per_policy.get(policy, 'k')
        marker = marker_per_policy.get(policy, 'o')
        ax.plot(stats.index, stats['value'], c=color, linestyle=linestyle_per_policy.get(policy, '-'),
                linewidth=2, label=_label(policy))
        stable = stats['stable'].astype(bool).values
        ax.scatter(stats.index[stable], stats['value'][stable], c=color, marker=marker)
        ax.scatter(stats.index[~stable], stats['value'][~stable], facecolors='none', edgecolors=color, marker=marker)
        threshold = instability_threshold(df, policy)
        _log.info(f'{policy}: first unstable alpha {threshold}')

    ax.set_yscale(yscale)
    ax.set_xlabel('Load multiplier')
    ax.set_ylabel(criterion.replace('_', ' ').capitalize())
    unify_layout(ax, add_legend=False, capacity=1.0)

    plt.tight_layout()
    filename = output_dir / f'{criterion}_vs_load_{Path(csv_file).stem}.png'
    plt.savefig(filename)
    legend_file = filename.parent / (filename.stem + '_legend.png')
    export_legend(ax, legend_file)
    plt.close('all')
    return filename


def plot_backlog(metrics: Metrics, output_dir: Union[Path, str], name: str = 'backlog',
                 window: int = 100) -> Path:
    """ Total backlog over time with its moving average; the fitted tail slope is given in the title. """
    output_dir = Path(output_dir)
    output_dir.mkdir(exist_ok=True, parents=True)
    backlog = metrics.backlog.astype(np.float64)

    f, ax = plt.subplots(1, 1)
    ax.plot(np.arange(len(backlog)), backlog, c='cornflowerblue', linewidth=1, alpha=0.5, label='backlog')
    if len(backlog) >= window:
        average = np.convolve(backlog, np.ones(window) / window, mode='valid')
        ax.plot(np.arange(window - 1, len(backlog)), average, c='#e31a1c', linewidth=2,
                label=f'moving average ({window})')
    ax.set_xlabel('Slot')
    ax.set_ylabel('Backlog')
    unify_layout(ax, fontsize=12, title=f'slope {metrics.backlog_slope:.2e}, stable: {metrics.stable}')

    plt.tight_layout()
    filename = output_dir / f'{name}.png'
    plt.savefig(filename)
    plt.close('all')
    return filename
