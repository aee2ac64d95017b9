"""
test_workshop: unit tests for prax sweeps and cross-validation

"""
import math

import numpy as np
import pytest

from prax import model
from prax import workshop


def test_sweep() -> None:
    configs = [
        model.ModelConfig(N = 257, T = 0.5),
        model.ModelConfig(N = 257, T = 0.5, tau = 0.5)]
    records = workshop.sweep(configs)
    assert [r.digest for r in records] == [c.digest for c in configs]
    assert all(r.status == 'horizon' for r in records)
    assert records[0].zbar[-1] != records[1].zbar[-1]
    return

def test_report() -> None:
    report = workshop.CrossCheckReport(digest = 'abc')
    report.add('dp', 0.01, 0.02)
    report.add('gradient', math.nan, 1.0)
    assert report['dp'].passed
    assert not report['gradient'].passed
    assert not report.passed
    with pytest.raises(KeyError):
        report['eps_limit']
    block = report.block()
    assert block['config'] == 'abc'
    assert block['dp_tolerance'] == 0.02
    assert block['aborted'] == 'none'
    assert report.lines()[-1] == 'passed = false'
    clean = workshop.CrossCheckReport(gaps = [workshop.Gap('dp', 0.0, 0.0)])
    assert clean.passed
    clean.aborted = 'eps run 0.001 stopped with status extinction'
    assert not clean.passed
    assert clean.lines()[-2].startswith('aborted: ')
    return

def test_limit_fitness_provider() -> None:
    cfg = model.ModelConfig(N = 257, T = 0.5)
    record = workshop.run_config(cfg)
    fitness, gradient = workshop.limit_fitness_provider(record, cfg)
    values = fitness(0.0, cfg.nodes)
    assert values[cfg.N // 2] == pytest.approx(0.0, abs = 1e-12)
    assert gradient(0.0, 0.0) == pytest.approx(1.0, abs = 1e-9)
    assert np.all(np.isfinite(values))
    return

@pytest.mark.slow
def test_gradient_shots() -> None:
    cfg = model.ModelConfig(N = 257, T = 6.0)
    gap, record, u_end, table = workshop._dp_gap(cfg, None)
    assert gap < 5.0 * (cfg.dt + cfg.dz)
    found = workshop._shoot_gradients(cfg, record, u_end, table, 20, 4.0, 0)
    assert found['t_start'] == pytest.approx(2.0, abs = cfg.dz)
    assert found['multivalued'] == 0
    assert found['gradient'] < 5.0 * cfg.dz**2
    assert found['excess'] < found['slack']
    return

@pytest.mark.slow
def test_cross_check() -> None:
    report = workshop.cross_check(model.ModelConfig(), refine = True)
    assert report.aborted is None
    for name in (
            'dp', 'dp_refinement', 'gradient', 'dominance', 'eps_order',
            'eps_limit'):
        assert report[name].passed, report.lines()
    assert report['gradient'].tolerance == pytest.approx(
        5.0 * model.ModelConfig().dz**2)
    assert report.passed
    return


if __name__ == '__main__':
    test_sweep()
    test_report()
    test_limit_fitness_provider()
    test_gradient_shots()
    test_cross_check()
