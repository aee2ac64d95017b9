"""
test_cli: unit tests for the prax command line

"""
from prax import cli
from prax import export


def test_parser() -> None:
    args = cli.build_parser().parse_args(
        ['cross-check', '--set', 'g=0.5', '--set', 'tau=0.2', '--workers', '3'])
    assert args.command == 'cross-check'
    assert args.overrides == ['g=0.5', 'tau=0.2']
    assert args.workers == 3
    assert not args.refine
    return

def test_thresholds(capsys) -> None:
    assert cli.main(['thresholds']) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert 'regime = monomorphic-convergence' in out
    assert 'mu = 0.5' in out
    assert cli.main(['thresholds', '--set', 'kernel=raw_arctan']) == (
        cli.EXIT_HYPOTHESIS)
    return

def test_classify(capsys) -> None:
    code = cli.main(['classify', '--set', 'g=0.065', '--set', 'tau=0.5'])
    assert code == cli.EXIT_OK
    out = capsys.readouterr().out
    assert 'regime = beyond-mu1' in out
    assert 'initial_fitness_type = ' in out
    return

def test_hypotheses(capsys) -> None:
    assert cli.main(['hypotheses']) == cli.EXIT_OK
    assert cli.main(['hypotheses', '--set', 'tau=2.2']) == cli.EXIT_HYPOTHESIS
    assert 'HR2' in capsys.readouterr().out
    return

def test_configuration_errors(tmp_path, capsys) -> None:
    assert cli.main(['thresholds', '--set', 'N=8']) == cli.EXIT_CONFIG
    assert cli.main(['thresholds', '--set', 'colour=red']) == cli.EXIT_CONFIG
    path = tmp_path / 'run.cfg'
    path.write_text('g = 1.0\nbogus = 3\n')
    assert cli.main(['thresholds', '--config', str(path)]) == cli.EXIT_CONFIG
    assert 'line 2' in capsys.readouterr().err
    missing = tmp_path / 'missing.cfg'
    assert cli.main(['thresholds', '--config', str(missing)]) == cli.EXIT_CONFIG
    return

def test_simulate_limit(tmp_path, capsys) -> None:
    code = cli.main([
        'simulate-limit',
        '--set', 'N=257',
        '--set', 'T=1',
        '--snapshots', '500',
        '--out', str(tmp_path)])
    assert code == cli.EXIT_OK
    assert 'status = horizon' in capsys.readouterr().out
    paths = list(tmp_path.glob('limit_*.csv'))
    assert len(paths) == 1
    record = export.read_record(paths[0])
    assert record.status == 'horizon'
    assert 'monomorphism' in record
    assert 'positivity' in record
    assert any(p.is_dir() for p in tmp_path.iterdir())
    return


if __name__ == '__main__':
    test_parser()
