import csv
import io
import json

import pytest

from CodedXbarUtils import cli
from CodedXbarUtils.cli import main, analyze, region_report
from CodedXbarUtils.core.traffic import pattern_fig1
from CodedXbarUtils.utils import CSV_HEADER, SEED_ENV_VARIABLE, EXIT_DECODE_FAILURE
from CodedXbarUtils.utils.utils import CodingError


@pytest.fixture(autouse=True)
def no_seed_override(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VARIABLE, raising=False)


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def _csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_analyze_fig1(capsys):
    code, out = _run(capsys, 'analyze', '--pattern', 'fig1')
    assert code == 0
    report = json.loads(out)
    assert report['chi_f'] == '1/1'
    assert report['in_region'] is True
    assert report['split'] is True
    assert report['split_partition'] == [[3, 4, 5], [0, 1, 2]]
    assert (report['vertices'], report['edges']) == (6, 6)
    assert (report['maximal_stable_sets'], report['maximal_cliques']) == (4, 4)
    assert report['loads'] == ['2/3', '1/1', '1/1', '1/1', '1/1']
    assert 'coloring' not in report


def test_analyze_with_json_includes_the_coloring(capsys):
    code, out = _run(capsys, 'analyze', '--json')
    assert code == 0
    coloring = json.loads(out)['coloring']
    assert coloring['value'] == '1/1'
    assert sorted(weight for weight, _ in coloring['terms']) == ['1/3', '1/3', '1/3']


def test_analyze_2xN_is_perfect(capsys):
    code, out = _run(capsys, 'analyze', '--pattern', '2xN', '--N', '4')
    assert code == 0
    report = json.loads(out)
    assert report['perfect'] is True
    assert report['speedup'] == '1/1'


def test_analyze_scaled_fig1(capsys):
    code, out = _run(capsys, 'analyze', '--alpha', '6/5')
    assert code == 0
    report = json.loads(out)
    assert report['speedup'] == '6/5'
    assert report['in_region'] is False
    assert report['admissible'] is False


def test_analyze_function_without_the_command_line():
    pattern, rates = pattern_fig1()
    assert analyze(pattern.with_rates(rates))['chi_f'] == '1/1'


def test_schedule_fig1(capsys):
    code, out = _run(capsys, 'schedule', '--pattern', 'fig1', '--json')
    assert code == 0
    data = json.loads(out)
    assert data['frame_length'] == 3
    assert data['chi_f'] == '1/1'
    assert len(data['codes']) == 6
    broadcast_codes = {entry['code'] for entry in data['codes'] if entry['flow'] == 0}
    assert broadcast_codes == {'P1', 'P2', 'P1 ⊕ P2'}


def test_schedule_prints_the_slot_table(capsys):
    code, out = _run(capsys, 'schedule')
    assert code == 0
    table = out[out.index('\nslot') + 1:].splitlines()
    assert table[0].split() == ['slot', 'input', 'flow', 'code', 'outputs']
    assert len(table) == 7


def test_schedule_out_of_region(capsys):
    code, out = _run(capsys, 'schedule', '--alpha', '6/5')
    assert code == 4
    assert json.loads(out.strip().splitlines()[-1]) == {'in_region': False, 'chi_f': '6/5'}


def test_schedule_single_unicast(tmp_path, capsys):
    path = tmp_path / 'unicast.json'
    path.write_text(json.dumps({'inputs': 1, 'outputs': 1, 'flows': [{'input': 0, 'fanout': [0], 'rate': '1'}]}))
    code, out = _run(capsys, 'schedule', '--pattern', str(path), '--json')
    assert code == 0
    assert json.loads(out)['frame_length'] == 1


def test_schedule_2x5(capsys):
    code, out = _run(capsys, 'schedule', '--pattern', '2xN', '--N', '5', '--json')
    assert code == 0
    data = json.loads(out)
    assert data['frame_length'] == 5
    assert len(data['slots']) == 5


def test_parse_errors(tmp_path, capsys):
    path = tmp_path / 'broken.json'
    path.write_text('{"inputs": 1,\n "flows": [\n')
    assert _run(capsys, 'analyze', '--pattern', str(path))[0] == 2
    assert _run(capsys, 'transmit')[0] == 2
    assert _run(capsys, 'analyze', '--pattern', 'no-such-pattern')[0] == 2
    assert _run(capsys, 'analyze', '--alpha', 'fast')[0] == 2


def test_size_cap(capsys):
    assert _run(capsys, 'analyze', '--pattern', 'full2x3', '--num_outputs', '4')[0] == 3


def test_region_2x3(capsys):
    code, out = _run(capsys, 'region', '--2xN', '3', '2/3', '1/3', '1/3', '1/3')
    assert code == 0
    lines = out.splitlines()
    assert '(4) 2 r0 + sum r_i <= 2: 7/3 > 2' in lines
    assert 'uncoded scale: 7/6' in lines
    assert 'coded speedup: 1/1' in lines


def test_region_boundary_and_zero_rates(capsys):
    code, out = _run(capsys, 'region', '--2xN', '2', '--json')
    assert code == 0
    assert json.loads(out)['uncoded_scale'] == '1/1'

    code, out = _run(capsys, 'region', '--2xN', '3', '0', '0', '0', '0', '--json')
    assert code == 0
    assert all(row['holds'] for row in json.loads(out)['inequalities'])


def test_region_needs_all_rates(capsys):
    assert _run(capsys, 'region', '--2xN', '3', '2/3', '1/3')[0] == 2


def test_region_report_values():
    report = region_report(5, '4/5', ['1/5'] * 5)
    assert report['uncoded_scale'] == '13/10'
    assert report['coded_speedup'] == '1/1'
    assert not report['uncoded_feasible']


def test_simulate_offline_fig1(capsys):
    argv = ('simulate', '--pattern', 'fig1', '--policy', 'offline', '--slots', '999', '--seed', '7')
    code, out = _run(capsys, *argv)
    assert code == 0
    rows = _csv_rows(out)
    assert list(rows[0]) == CSV_HEADER
    assert rows[0]['decode_failures'] == '0'
    assert rows[0]['seed'] == '7'
    assert _run(capsys, *argv)[1] == out


def test_simulate_json(capsys):
    code, out = _run(capsys, 'simulate', '--policy', 'offline', '--slots', '30', '--json')
    assert code == 0
    assert json.loads(out)['delivered'] == [60, 10, 10, 10]


def test_sweep_to_file(tmp_path, capsys):
    out = tmp_path / 'sweep.csv'
    code, _ = _run(capsys, 'sweep', '--pattern', 'fig1', '--policies', 'offline,uncoded-rand', '--alphas', '0.5,1',
                   '--slots', '300', '--seed', '3', '--out', str(out))
    assert code == 0
    rows = _csv_rows(out.read_text())
    assert [(row['policy'], row['alpha']) for row in rows] == [('offline', '0.5'), ('offline', '1.0'),
                                                               ('uncoded-rand', '0.5'), ('uncoded-rand', '1.0')]
    assert all(row['decode_failures'] == '0' for row in rows)


def test_field_choices(capsys):
    assert _run(capsys, 'schedule', '--field', '4')[0] == 2
    code, out = _run(capsys, 'schedule', '--field', '16', '--json')
    assert code == 0
    assert json.loads(out)['frame_length'] == 3


def test_coding_failure_is_a_decode_failure(monkeypatch, capsys):
    def no_code(*args, **kwargs):
        raise CodingError('No innovative vector')

    monkeypatch.setattr(cli, 'frame_codes', no_code)
    assert _run(capsys, 'schedule')[0] == EXIT_DECODE_FAILURE
