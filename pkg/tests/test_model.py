"""
test_model: unit tests for prax configurations, thresholds and regimes

"""
import math

import numpy as np
import pytest

from prax import base
from prax import defaults
from prax import diagnostics
from prax import kernels
from prax import model


def test_defaults() -> None:
    cfg = model.ModelConfig()
    assert cfg.kernel_label == 'tanh'
    assert isinstance(cfg.kernel, kernels.TanhKernel)
    assert cfg.mu == pytest.approx(0.5)
    assert cfg.extinction_trait == pytest.approx(1.0)
    assert cfg.half_width == pytest.approx(5.5)
    assert cfg.dz == pytest.approx(11.0 / 512)
    assert cfg.nodes.size == cfg.N
    assert cfg.validate() is cfg
    assert len(cfg.digest) == 12
    assert cfg.digest == model.ModelConfig().digest
    assert cfg.replace(tau = 0.9).digest != cfg.digest
    assert cfg.replace(g = 0.25).growth.g == 0.25
    assert 'kernel = tanh' in cfg.to_text().splitlines()
    return

def test_set_default() -> None:
    defaults.set_default('n', 129)
    try:
        assert model.ModelConfig().N == 129
    finally:
        defaults.set_default('N', 513)
    assert model.ModelConfig().N == 513
    with pytest.raises(KeyError):
        defaults.set_default('viscosity', 1.0)
    return

def test_validate() -> None:
    with pytest.raises(base.ConfigError):
        model.ModelConfig(N = 8).validate()
    with pytest.raises(base.ConfigError):
        model.ModelConfig(z0 = 1.2).validate()
    with pytest.raises(base.ConfigError):
        model.ModelConfig(epsilon = 0.0).validate()
    with pytest.raises(base.ConfigError):
        model.ModelConfig(solver = 'spectral').validate()
    with pytest.raises(base.ConfigError):
        model.ModelConfig(kernel = 'logistic')
    with pytest.raises(base.ConfigError):
        model.ModelConfig(g = -1.0)
    return

def test_parse_config_text() -> None:
    text = '\n'.join([
        '# transfer dominated run',
        'tau = 0.8   # below 2 sqrt(g)',
        'N = 1025',
        'normalize_mass = no',
        'kernel = scaled_arctan'])
    settings = model.parse_config_text(text)
    assert settings == {
        'tau': 0.8,
        'N': 1025,
        'normalize_mass': False,
        'kernel': 'scaled_arctan'}
    with pytest.raises(base.ConfigError) as error:
        model.parse_config_text('g = 0.5\n\nbogus = 1\n')
    assert error.value.line == 3
    assert 'line 3' in str(error.value)
    with pytest.raises(base.ConfigError) as error:
        model.parse_config_text('tau 1')
    assert error.value.line == 1
    with pytest.raises(base.ConfigError) as error:
        model.parse_config_text('T = 1\nN = many')
    assert error.value.line == 2
    return

def test_overrides_and_loading(tmp_path) -> None:
    assert model.parse_overrides(['tau=0.8', 'stride = 5']) == {
        'tau': 0.8, 'stride': 5}
    with pytest.raises(base.ConfigError):
        model.parse_overrides(['tau'])
    with pytest.raises(base.ConfigError):
        model.parse_overrides(['colour=red'])
    path = tmp_path / 'run.cfg'
    path.write_text('tau = 0.8\nT = 40\n')
    cfg = model.load_config(path, overrides = ['T=5'])
    assert cfg.tau == 0.8
    assert cfg.T == 5.0
    with pytest.raises(base.ConfigError):
        model.load_config(tmp_path / 'missing.cfg')
    with pytest.raises(base.ConfigError):
        model.load_config(overrides = ['N=8'])
    return

def test_thresholds() -> None:
    kernel = kernels.TanhKernel()
    d1 = model.compute_d1(kernel)
    mu1 = model.compute_mu1(kernel, d1)
    assert d1 == pytest.approx(1.6061, abs = 2e-3)
    assert mu1 == pytest.approx(1.8869, abs = 5e-3)
    slope = 1.0 - math.tanh(d1)**2
    assert abs(d1 * (1.0 + slope) - 2.0 * math.tanh(d1)) < 1e-10
    alternate = 2.0 * math.tanh(d1) / ((1.0 - slope) * (1.0 + slope))
    assert abs(mu1 - alternate) < 1e-9
    assert d1 > kernel.z_h
    dilated = kernels.DilatedKernel(scale = 2.0)
    assert model.compute_d1(dilated) == pytest.approx(2.0 * d1, abs = 1e-9)
    assert model.compute_mu1(dilated) == pytest.approx(2.0 * mu1, abs = 1e-8)
    return

def test_tangency_at_mu1() -> None:
    kernel = kernels.TanhKernel()
    d1 = model.compute_d1(kernel)
    mu1 = model.compute_mu1(kernel, d1)
    cfg = model.ModelConfig(g = 0.1, tau = 2.0 * 0.1 * mu1)
    assert cfg.mu == pytest.approx(mu1)
    assert abs(model.fitness_stationary(mu1 - d1, mu1, cfg)) < 1e-8
    z = np.linspace(mu1 - 6.0, mu1 + 3.0, 3001)
    assert np.max(model.fitness_stationary(z, mu1, cfg)) < 1e-9
    beyond = cfg.replace(tau = 2.0 * 0.1 * (mu1 + 0.2))
    assert model.fitness_stationary(beyond.mu - d1, beyond.mu, beyond) > 0
    return

def test_fitness() -> None:
    cfg = model.ModelConfig()
    z = np.linspace(-2.0, 2.0, 9)
    expected = -(z**2 - 0.25) + np.tanh(z - 0.5)
    assert np.allclose(model.fitness_dynamic(z, 0.5, cfg), expected)
    assert model.fitness_dynamic(0.0, 0.0, cfg, order = 1) == pytest.approx(1.0)
    assert model.fitness_dynamic(0.3, 0.3, cfg, order = 2) == pytest.approx(-2.0)
    assert model.fitness_stationary(0.5, 0.5, cfg) == 0.0
    with pytest.raises(ValueError):
        model.fitness_dynamic(0.0, 0.0, cfg, order = 3)
    return

def test_regimes() -> None:
    report = model.classify_regime(model.ModelConfig())
    assert report.regime == 'monomorphic-convergence'
    assert report.predicted_limit_trait == pytest.approx(0.5)
    assert report.predicted_extinction_trait is None
    assert report.suicide_threshold == pytest.approx(2.0)
    assert 'regime = monomorphic-convergence' in report.lines()
    beyond = model.classify_regime(model.ModelConfig(g = 0.065, tau = 0.5))
    assert beyond.regime == 'beyond-mu1'
    assert beyond.mu == pytest.approx(3.846, abs = 1e-3)
    finite = model.classify_regime(model.ModelConfig(tau = 2.2))
    assert finite.regime == 'suicide-finite-time'
    assert finite.predicted_extinction_trait == pytest.approx(1.0)
    assert finite.predicted_limit_trait is None
    boundary = model.classify_regime(model.ModelConfig(tau = 2.0))
    assert boundary.regime == 'suicide-asymptotic'
    assert set(boundary.flags) == {
        'monomorphic-convergence', 'suicide-asymptotic'}
    assert all(r in model.REGIMES for r in boundary.flags)
    return

def test_initial_fitness_types() -> None:
    cfg = model.ModelConfig()
    assert model.classify_initial_fitness_type(cfg) == 'type-one'
    scanned = model.scan_initial_types(cfg, [0.0, 0.3])
    assert [z0 for z0, _ in scanned] == [0.0, 0.3]
    assert all(kind == 'type-one' for _, kind in scanned)
    split = model.ModelConfig(g = 0.065, tau = 0.5, z0 = 3.87, N = 2049)
    assert split.validate() is split
    assert model.classify_initial_fitness_type(split) == 'type-two'
    for z0 in (0.0, 1.0, 2.5, 3.87, 4.5):
        moved = split.replace(z0 = z0)
        sets = diagnostics.positivity_sets(
            fitness = lambda z: model.fitness_dynamic(z, z0, moved),
            zbar = z0,
            nodes = moved.nodes)
        kind = model.classify_initial_fitness_type(moved)
        expected = {0: 'degenerate', 1: 'type-one'}.get(
            sets.n_components, 'type-two')
        assert kind == expected
    return

def test_transfer_inequality() -> None:
    kernel = kernels.TanhKernel()
    value, x, mu = model.transfer_inequality_minimum(kernel)
    assert value >= -1e-12
    assert value < 1e-3
    assert x == pytest.approx(model.compute_d1(kernel), abs = 0.05)
    assert mu == pytest.approx(model.compute_mu1(kernel))
    assert model.transfer_inequality(kernel, 0.0, 1.0) == 0.0
    return

def test_scaling() -> None:
    scaling = model.nondimensionalize(
        sigma = 1e-4, K = 1.0, kappa = 1.0, r = 1.0, tau = 1.0, g = 1.0)
    assert scaling.epsilon == pytest.approx(1e-2)
    assert scaling.time_scale == pytest.approx(1e-2)
    wide = model.nondimensionalize(
        sigma = 1e-4, K = 2.0, kappa = 3.0, r = 1.0, tau = 0.5, g = 1.0)
    assert wide.epsilon == pytest.approx(2e-2)
    assert wide.g == pytest.approx(0.25)
    assert wide.density_scale == pytest.approx(1.5)
    with pytest.raises(base.ConfigError):
        model.nondimensionalize(
            sigma = 0.0, K = 1.0, kappa = 1.0, r = 1.0, tau = 1.0, g = 1.0)
    cfg = model.ModelConfig()
    assert model.rho_max(cfg) == pytest.approx(1.0)
    assert model.rho_max(cfg, rho_M = 2.0) == pytest.approx(2.0)
    return


if __name__ == '__main__':
    test_defaults()
    test_set_default()
    test_validate()
    test_parse_config_text()
    test_thresholds()
    test_tangency_at_mu1()
    test_fitness()
    test_regimes()
    test_initial_fitness_types()
    test_transfer_inequality()
    test_scaling()
