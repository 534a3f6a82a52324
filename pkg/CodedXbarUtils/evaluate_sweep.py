import argparse
import logging
from pathlib import Path

from CodedXbarUtils import _log as _root_log
from CodedXbarUtils.analysis.load_plotting import plot_delay_vs_load
from CodedXbarUtils.analysis.table_generation import speedup_table, stability_table, write_latex

_root_log.setLevel(logging.INFO)
_log = logging.getLogger(__name__)


def main(args):
    output_dir = Path(args.output_dir)

    if args.what in ("all", "delay"):
        assert args.input is not None, "Plotting the delay needs --input <sweep csv>"
        for criterion in ('mean_delay', 'p95_delay', 'mean_backlog'):
            filename = plot_delay_vs_load(args.input, output_dir, criterion=criterion)
            _log.info(f'Saved {filename}')

    if args.what in ("all", "stability"):
        assert args.input is not None, "The stability table needs --input <sweep csv>"
        table = stability_table(args.input)
        write_latex(table, output_dir / f'stability_{Path(args.input).stem}.tex')
        _log.info(f'Stability per policy:\n{table}')

    if args.what in ("all", "speedup"):
        table = speedup_table(args.max_N)
        write_latex(table, output_dir / f'speedup_2xN_{args.max_N}.tex', col_list=['N', 'coded', 'uncoded'])
        _log.info(f'Speedups of the 2xN pattern:\n{table}')


if __name__ == "__main__":
    parser = argparse.ArgumentParser(prog='CodedXbar - Plotting tool',
                                     description='Plots and tables from a stored sweep')

    parser.add_argument('--output_dir', required=True, type=str)
    parser.add_argument('--input', required=False, type=str, default=None, help='Sweep CSV')
    parser.add_argument('--what', choices=["all", "delay", "stability", "speedup"], default="all")
    parser.add_argument('--max_N', type=int, default=8)
    parser.add_argument('--debug', action='store_true', default=False, help="When given, enables debug mode logging.")
    args, unknown = parser.parse_known_args()

    if args.debug:
        _root_log.setLevel(logging.DEBUG)
    main(args)
