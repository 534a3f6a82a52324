import logging
from pathlib import Path
from typing import Union, List, Optional

import pandas as pd

from CodedXbarUtils.analysis.load_plotting import load_sweep, instability_threshold
from CodedXbarUtils.core.conflict_graph import build_enhanced_conflict_graph, is_split_graph, is_perfect
from CodedXbarUtils.core.rate_region import min_speedup, uncoded_2xN_check
from CodedXbarUtils.core.traffic import pattern_2xN
from CodedXbarUtils.utils.utils import fraction_to_str

_log = logging.getLogger(__name__)


def speedup_table(max_N: int, min_N: int = 2) -> pd.DataFrame:
    """
    Speedups of the 2xN broadcast pattern at its vertex rates r0 = 1 - 1/N, rj = 1/N: with coding (the fractional
    coloring value) and without coding (the scale of the necessary conditions, 1.5 - 1/N).
    """
    assert 1 <= min_N <= max_N, f'Need 1 <= min_N <= max_N, got {min_N} and {max_N}'
    rows = []
    for N in range(min_N, max_N + 1):
        pattern, rates = pattern_2xN(N)
        graph = build_enhanced_conflict_graph(pattern)
        coded = min_speedup(pattern, rates, graph)
        _, uncoded = uncoded_2xN_check(N, rates[0], rates[1:])
        rows.append({'N': N,
                     'split': is_split_graph(graph)[0],
                     'perfect': is_perfect(graph),
                     'coded': fraction_to_str(coded),
                     'uncoded': fraction_to_str(uncoded),
                     'coded_float': float(coded),
                     'uncoded_float': float(uncoded)})
        _log.debug(f'N={N}: coded {coded}, uncoded {uncoded}')
    return pd.DataFrame(rows)


def stability_table(csv_file: Union[Path, str], policies: Optional[List[str]] = None) -> pd.DataFrame:
    """ Per policy: the first unstable load multiplier and the mean delay at the lightest load. """
    df = load_sweep(csv_file)
    policies = list(df['policy'].unique()) if policies is None else policies
    rows = []
    for policy in policies:
        policy_df = df[df['policy'] == policy]
        lightest = policy_df[policy_df['alpha'] == policy_df['alpha'].min()]
        rows.append({'policy': policy,
                     'first_unstable_alpha': instability_threshold(df, policy),
                     'light_load_alpha': float(lightest['alpha'].iloc[0]),
                     'light_load_mean_delay': float(lightest['mean_delay'].mean())})
    return pd.DataFrame(rows)


def write_latex(result_df: pd.DataFrame, output_file: Union[Path, str], col_list: Optional[List[str]] = None) -> str:
    col_list = list(result_df.columns) if col_list is None else col_list
    replace_dc = {
        'mwss-rand': r"\mwssrand",
        'uncoded-rand': r"\uncodedrand",
    }
    latex = result_df.to_latex(index=False, columns=col_list)
    for i in replace_dc:
        latex = latex.replace(i, replace_dc[i])
    output_file = Path(output_file)
    output_file.parent.mkdir(exist_ok=True, parents=True)
    with output_file.open('w') as fh:
        fh.write(latex)
    return latex
