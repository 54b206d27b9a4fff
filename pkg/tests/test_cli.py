"""
Tests for the command-line surface: reports, exit codes and the run ledger.
"""
import json
from unittest.mock import patch

import pytest

from cli.commands import EXIT_INPUT, EXIT_OK, EXIT_UNDECIDED, run
from core import storage
from core.spectrum import CSV_HEADER


@pytest.fixture
def files(tmp_path, square, hexagon, solenoid8):
    """Inputs written the way users write them."""
    paths = {
        'square': tmp_path / 'square.json',
        'hexagon': tmp_path / 'hexagon.json',
        'solenoid': tmp_path / 'solenoid.json',
        'boundary': tmp_path / 'boundary.json',
        'hexloop': tmp_path / 'hexloop.json',
    }
    storage.save_json(paths['square'], storage.space_to_dict(square))
    storage.save_json(paths['hexagon'], storage.space_to_dict(hexagon))
    storage.save_json(paths['solenoid'], storage.tower_to_dict(solenoid8))
    storage.save_json(paths['boundary'], {'points': [0, 1, 2, 3, 0]})
    storage.save_json(paths['hexloop'], {'points': [0, 1, 2, 3, 4, 5, 0]})
    return {k: str(v) for k, v in paths.items()}


def _report(mock_ledger):
    mock_ledger.log_report.assert_called_once()
    return mock_ledger.log_report.call_args[0][0]


class TestSpaceCommands:

    def test_components(self, files, mock_ledger, capsys):
        code = run(['components', files['square'], '--scale', '1.2'], ledger=mock_ledger)
        assert code == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out['count'] == 1
        assert out['threshold'] == 1.0
        report = _report(mock_ledger)
        assert report.exit_code == EXIT_OK
        assert set(report.inputs) == {'space'}

    def test_components_in_ball(self, files, mock_ledger, capsys):
        code = run(['components', files['square'], '--scale', '1.2', '--center', '0',
                    '--kappa', '0.5'], ledger=mock_ledger)
        assert code == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out['count'] == 3

    def test_spectrum_csv(self, files, mock_ledger, capsys):
        assert run(['spectrum', files['hexagon']], ledger=mock_ledger) == EXIT_OK
        lines = capsys.readouterr().out.strip().split('\n')
        assert lines[0] == ','.join(CSV_HEADER)
        assert len(lines) == 5

    def test_report_to_file(self, files, mock_ledger, tmp_path, capsys):
        out = tmp_path / 'reports' / 'components.json'
        run(['components', files['square'], '--scale', '0.5', '--out', str(out)], ledger=mock_ledger)
        assert capsys.readouterr().out == ''
        assert storage.load_json(out)['count'] == 4


class TestNullCommands:

    def test_nonnull_boundary(self, files, mock_ledger, capsys):
        code = run(['null-check', files['square'], files['boundary'], '--scale', '1.2'],
                   ledger=mock_ledger)
        assert code == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out['status'] == 'nonnull'
        assert set(_report(mock_ledger).inputs) == {'space', 'loop'}

    def test_unknown_exits_two(self, files, mock_ledger, capsys):
        code = run(['null-check', files['hexagon'], files['hexloop'], '--scale', '2.5',
                    '--budget', '1'], ledger=mock_ledger)
        assert code == EXIT_UNDECIDED
        assert json.loads(capsys.readouterr().out)['status'] == 'unknown'
        assert _report(mock_ledger).exit_code == EXIT_UNDECIDED

    def test_oracle(self, files, mock_ledger, capsys):
        code = run(['oracle', files['square'], files['boundary'], '--scale', '1.5'],
                   ledger=mock_ledger)
        assert code == EXIT_OK
        assert json.loads(capsys.readouterr().out)['status'] == 'null'


class TestCoverCommands:

    def test_cover(self, files, mock_ledger, capsys):
        assert run(['cover', files['square'], '--scale', '1.5'], ledger=mock_ledger) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out['status'] == 'complete'
        assert len(out['vertices']) == 4

    def test_lift_opens(self, files, mock_ledger, capsys):
        code = run(['lift', files['square'], files['boundary'], '--scale', '1.2',
                    '--budget', '1000'], ledger=mock_ledger)
        assert code == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out['closed'] is False
        assert out['classes'][-1] == [0, 1]

    def test_lift_unknown_coset(self, files, mock_ledger):
        code = run(['lift', files['square'], files['boundary'], '--scale', '1.5',
                    '--coset', '5'], ledger=mock_ledger)
        assert code == EXIT_INPUT


class TestTowerCommands:

    def test_validate(self, files, mock_ledger, capsys):
        assert run(['tower-validate', files['solenoid']], ledger=mock_ledger) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out['ok'] is True
        assert out['preimage_diameters'] == [1.0]

    def test_refine_check(self, files, mock_ledger, capsys):
        code = run(['refine-check', files['solenoid'], '--r', '0', '--t', '1', '--eps', '0.3'],
                   ledger=mock_ledger)
        assert code == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out['status'] == 'false'
        assert out['counterexample'] == [0, 0, 0, 8]
        assert out['gref']['reason'] == 'preimage_diameter'

    def test_invlim_scan(self, files, mock_ledger, capsys):
        code = run(['invlim-scan', files['solenoid'], '--eps-grid', '0.3'], ledger=mock_ledger)
        assert code == EXIT_OK
        lines = capsys.readouterr().out.strip().split('\n')
        assert lines[0] == 'r,t,eps,status,method'
        assert lines[1] == '0,1,0.3,false,search'

    def test_empty_grid(self, files, mock_ledger):
        assert run(['invlim-scan', files['solenoid'], '--eps-grid', ','],
                   ledger=mock_ledger) == EXIT_INPUT


class TestFixtureCommand:

    def test_fixture_to_file(self, tmp_path, mock_ledger):
        out = tmp_path / 'c12.json'
        assert run(['fixture', 'circle', 'n=12', '-o', str(out)], ledger=mock_ledger) == EXIT_OK
        assert storage.load_space(out).n == 12

    def test_seed_moves_jittered_points(self, tmp_path, mock_ledger):
        paths = []
        for seed in ('3', '3', '4'):
            out = tmp_path / f'c{len(paths)}.json'
            args = ['fixture', 'circle', 'n=12', 'jitter=0.5', '--seed', seed, '-o', str(out)]
            assert run(args, ledger=mock_ledger) == EXIT_OK
            paths.append(out)
        a, b, c = (storage.load_space(p).digest for p in paths)
        assert a == b
        assert a != c

    def test_fixture_saved_by_name(self, temp_data_dir, mock_ledger, capsys):
        with patch('cli.commands.DATA_DIR', temp_data_dir):
            code = run(['fixture', 'solenoid', 'depth=2', 'm=8', '--save', 'sol8'], ledger=mock_ledger)
        assert code == EXIT_OK
        assert (temp_data_dir / 'fixtures' / 'sol8.json').exists()
        assert len(json.loads(capsys.readouterr().out)['stages']) == 2

    def test_bad_fixture_kind(self, mock_ledger, capsys):
        assert run(['fixture', 'torus'], ledger=mock_ledger) == EXIT_INPUT
        assert 'SpecInvalidError' in capsys.readouterr().err
        assert _report(mock_ledger).exit_code == EXIT_INPUT


class TestErrors:

    def test_usage_error(self, files, mock_ledger, capsys):
        assert run(['components', files['square']], ledger=mock_ledger) == EXIT_INPUT
        assert 'error' in capsys.readouterr().err
        mock_ledger.log_report.assert_not_called()

    def test_no_subcommand(self, mock_ledger):
        assert run([], ledger=mock_ledger) == EXIT_INPUT

    def test_missing_file(self, tmp_path, mock_ledger):
        code = run(['components', str(tmp_path / 'absent.json'), '--scale', '1.0'], ledger=mock_ledger)
        assert code == EXIT_INPUT
        report = _report(mock_ledger)
        assert report.inputs == {}
        assert report.payload['type'] == 'SchemaError'

    def test_scale_mismatch(self, files, mock_ledger):
        code = run(['null-check', files['square'], files['boundary'], '--scale', '1.0'],
                   ledger=mock_ledger)
        assert code == EXIT_INPUT
