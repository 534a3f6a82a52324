import argparse
import csv
from fractions import Fraction

import numpy as np
import pytest

from CodedXbarUtils.analysis.load_plotting import load_sweep, instability_threshold, plot_delay_vs_load, plot_backlog
from CodedXbarUtils.analysis.table_generation import speedup_table, stability_table, write_latex
from CodedXbarUtils.core.data_objects import Metrics
from CodedXbarUtils.evaluate_sweep import main as evaluate_main
from CodedXbarUtils.utils import CSV_HEADER


def _row(policy, alpha, mean_delay, stable):
    return {'alpha': alpha, 'policy': policy, 'seed': 1, 'slots': 1000, 'mean_delay': mean_delay,
            'p95_delay': mean_delay, 'mean_backlog': 2.5, 'backlog_slope': 0.0 if stable else 0.1,
            'stable': stable, 'decode_failures': 0, 'throughput_per_flow': '[0.5, 0.5]'}


@pytest.fixture
def sweep_csv(tmp_path):
    rows = [_row('uncoded-rand', '1.0', 80.0, False),
            _row('uncoded-rand', '0.5', 1.5, True),
            _row('uncoded-rand', '0.8', 40.0, False),
            _row('mwss-rand', '0.5', 20.0, True),
            _row('mwss-rand', '0.8', 30.0, True),
            _row('mwss-rand', '1.0', 90.0, True)]
    path = tmp_path / 'sweep.csv'
    with path.open('w', newline='') as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_HEADER)
        writer.writeheader()
        writer.writerows(rows)
    return path


def test_load_sweep_sorts_by_policy_and_alpha(sweep_csv):
    df = load_sweep(sweep_csv)
    assert list(df['policy']) == ['mwss-rand'] * 3 + ['uncoded-rand'] * 3
    assert list(df['alpha']) == [0.5, 0.8, 1.0] * 2


def test_missing_sweep_file(tmp_path):
    with pytest.raises(AssertionError):
        load_sweep(tmp_path / 'missing.csv')


def test_instability_threshold(sweep_csv):
    df = load_sweep(sweep_csv)
    assert instability_threshold(df, 'uncoded-rand') == 0.8
    assert instability_threshold(df, 'mwss-rand') is None


def test_stability_table(sweep_csv):
    table = stability_table(sweep_csv, policies=['uncoded-rand', 'mwss-rand'])
    assert list(table['policy']) == ['uncoded-rand', 'mwss-rand']
    assert table['first_unstable_alpha'].iloc[0] == 0.8
    assert list(table['light_load_alpha']) == [0.5, 0.5]
    assert list(table['light_load_mean_delay']) == [1.5, 20.0]


def test_speedup_table():
    table = speedup_table(8)
    assert list(table['N']) == list(range(2, 9))
    assert all(table['coded'] == '1/1')
    assert list(table['uncoded']) == [str(Fraction(3, 2) - Fraction(1, N)) if N > 2 else '1/1' for N in range(2, 9)]
    assert np.allclose(table['uncoded_float'], [1.5 - 1 / N for N in range(2, 9)])
    assert table['perfect'].all()


def test_speedup_table_needs_a_range():
    with pytest.raises(AssertionError):
        speedup_table(3, min_N=4)


def test_write_latex(tmp_path, sweep_csv):
    output_file = tmp_path / 'tables' / 'stability.tex'
    latex = write_latex(stability_table(sweep_csv), output_file, col_list=['policy', 'first_unstable_alpha'])
    assert output_file.read_text() == latex
    assert r'\uncodedrand' in latex and r'\mwssrand' in latex
    assert 'light_load_alpha' not in latex


def test_plot_delay_vs_load(tmp_path, sweep_csv):
    filename = plot_delay_vs_load(sweep_csv, tmp_path / 'plots')
    assert filename == tmp_path / 'plots' / 'mean_delay_vs_load_sweep.png'
    assert filename.is_file()
    assert (tmp_path / 'plots' / 'mean_delay_vs_load_sweep_legend.png').is_file()

    with pytest.raises(AssertionError):
        plot_delay_vs_load(sweep_csv, tmp_path, criterion='jitter')


def test_plot_backlog(tmp_path):
    backlog = np.concatenate([np.arange(150), np.full(150, 150)])
    metrics = Metrics(300, backlog, delays=[1, 2, 3], delivered=[3], arrived=[3], fanouts=[1])
    filename = plot_backlog(metrics, tmp_path, name='ramp', window=50)
    assert filename == tmp_path / 'ramp.png'
    assert filename.is_file()


def test_evaluate_sweep(tmp_path, sweep_csv):
    args = argparse.Namespace(output_dir=str(tmp_path / 'out'), input=str(sweep_csv), what='all', max_N=4)
    evaluate_main(args)
    produced = sorted(path.name for path in (tmp_path / 'out').iterdir())
    assert 'speedup_2xN_4.tex' in produced
    assert 'stability_sweep.tex' in produced
    assert 'p95_delay_vs_load_sweep.png' in produced
