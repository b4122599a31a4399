import json

import pytest

import main
from fixtures.builders import write_spec
from usecases.experiment_uc import EvalUC


FAST_FLAGS = ['--embed-dim', '8', '--train-steps', '20', '--pretrain-steps', '20', '--epochs', '1',
              '--episodes-per-epoch', '5', '--val-episodes', '5', '--finetune-iters', '10']


def run_ok(capsys, *argv) -> dict:
    assert main.run(list(argv)) == 0
    output = json.loads(capsys.readouterr().out)
    assert output['success'] is True
    return output['data']


@pytest.fixture(scope='module')
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp('cli')
    spec = write_spec(root / 'spec.json', pretrain_classes=4)
    assert main.run(['gen', '--spec', str(spec), '--out', str(root / 'bench')]) == 0
    return root


@pytest.fixture(scope='module')
def checkpoint(workspace):
    path = workspace / 'meta.ckpt'
    argv = ['train', '--method', 'meta-baseline', '--manifest', str(workspace / 'bench' / 'manifest.json'),
            '--seed', '1', '--out', str(path), *FAST_FLAGS]
    assert main.run(argv) == 0
    return path


def test_gen(tmp_path, capsys):
    spec = write_spec(tmp_path / 'spec.json')
    data = run_ok(capsys, 'gen', '--spec', str(spec), '--out', str(tmp_path / 'bench'))
    assert data['classes'] == 19
    assert data['videos'] == 19 * 8
    assert data['pretrain_manifest'] is None
    assert (tmp_path / 'bench' / 'manifest.json').is_file()


def test_gen_rejects_bad_spec(tmp_path, capsys):
    spec = write_spec(tmp_path / 'spec.json', t=20)
    assert main.run(['gen', '--spec', str(spec), '--out', str(tmp_path / 'bench')]) == 1
    assert capsys.readouterr().err.startswith('Error: invalid GeneratorSpec')


def test_splits(workspace, capsys):
    manifest = workspace / 'bench' / 'manifest.json'
    data = run_ok(capsys, 'splits', '--manifest', str(manifest), '--classes', '10,4,5', '--cap', '3', '--seed', '2')
    assert data['classes'] == {'train': 10, 'val': 4, 'test': 5}
    assert data['videos'] == {'train': 30, 'val': 32, 'test': 40}
    assert (workspace / 'bench' / 'split_manifest.json').is_file()


def test_splits_without_cap(workspace, capsys):
    out = workspace / 'uncapped.json'
    data = run_ok(capsys, 'splits', '--manifest', str(workspace / 'bench' / 'manifest.json'),
                  '--classes', '10,4,5', '--cap', 'inf', '--out', str(out))
    assert data['videos']['train'] == 80
    assert json.loads(out.read_text())['videos'][0]['file_path'].startswith('bench/')


def test_splits_needs_three_counts(workspace, capsys):
    assert main.run(['splits', '--manifest', str(workspace / 'bench' / 'manifest.json'), '--classes', '10,4']) == 2
    assert 'three class counts' in capsys.readouterr().err


def test_train_pretrained(workspace, capsys):
    bench = workspace / 'bench'
    data = run_ok(capsys, 'train', '--method', 'baseline-plus', '--manifest', str(bench / 'manifest.json'),
                  '--init', 'pretrained', '--pretrain-manifest', str(bench / 'pretrain_manifest.json'),
                  '--out', str(workspace / 'plus.ckpt'), *FAST_FLAGS)
    assert data['method'] == 'baseline-plus'
    assert (workspace / 'plus.ckpt').is_file()


def test_eval_is_byte_deterministic(workspace, checkpoint, capsys):
    manifest = str(workspace / 'bench' / 'manifest.json')
    for name in ('first.json', 'second.json'):
        run_ok(capsys, 'eval', '--ckpt', str(checkpoint), '--manifest', manifest, '--episodes', '50',
               '--seed', '3', '--report', str(workspace / name))
    assert (workspace / 'first.json').read_bytes() == (workspace / 'second.json').read_bytes()
    assert 'wall_time' not in json.loads((workspace / 'first.json').read_text())


def test_eval_records_shot_and_timing(workspace, checkpoint, capsys):
    data = run_ok(capsys, 'eval', '--ckpt', str(checkpoint), '--manifest', str(workspace / 'bench' / 'manifest.json'),
                  '--shot', '5', '--episodes', '20', '--threads', '2', '--with-timing',
                  '--report', str(workspace / 'five.csv'), '--format', 'csv')
    assert data['report']['k_shot'] == 5
    assert data['report']['episodes'] == 20
    assert 'wall_time' in data['report']
    assert (workspace / 'five.csv').read_text().splitlines()[1].startswith('meta-baseline,5,5,20,')


def test_compare(workspace, capsys):
    report = workspace / 'compare.json'
    data = run_ok(capsys, 'compare', '--methods', 'baseline,baseline-plus', '--manifest',
                  str(workspace / 'bench' / 'manifest.json'), '--episodes', '20', '--report', str(report), *FAST_FLAGS)
    assert [row['method'] for row in data['reports']] == ['baseline', 'baseline-plus']
    assert json.loads(report.read_text())['reports'] == data['reports']


def test_selftest(capsys):
    data = run_ok(capsys, 'selftest', '--grad-points', '3')
    assert data and all(row['passed'] for row in data)


def test_unknown_method_is_a_usage_error(workspace):
    with pytest.raises(SystemExit) as exc:
        main.run(['train', '--method', 'knn', '--manifest', 'm.json', '--out', 'x.ckpt'])
    assert exc.value.code == 2

    with pytest.raises(SystemExit) as exc:
        main.run(['compare', '--methods', 'baseline,knn', '--manifest', 'm.json'])
    assert exc.value.code == 2


def test_missing_checkpoint(workspace, capsys):
    code = main.run(['eval', '--ckpt', str(workspace / 'missing.ckpt'),
                     '--manifest', str(workspace / 'bench' / 'manifest.json')])
    assert code == 1
    assert capsys.readouterr().err.startswith('Error: cannot read checkpoint')


def test_invalid_arguments_exit_with_two(workspace, checkpoint, capsys):
    code = main.run(['eval', '--ckpt', str(checkpoint), '--manifest', str(workspace / 'bench' / 'manifest.json'),
                     '--episodes', '0'])
    assert code == 2
    assert 'Min value is 1 (episodes)' in capsys.readouterr().err


def test_use_case_collects_field_errors():
    response = EvalUC({'manifest': 'm.json', 'format': 'xml'}).exec()
    assert not response
    assert response.exit_code == 2
    assert {error['location'] for error in response.errors} == {'ckpt', 'format'}
