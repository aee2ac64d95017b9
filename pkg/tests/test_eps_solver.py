"""
test_eps_solver: unit tests for the prax epsilon-problem solver

"""
import math

import numpy as np
import pytest

from prax import base
from prax import eps_solver
from prax import model


def _coarse(**changes) -> model.ModelConfig:
    return model.ModelConfig(solver = 'eps', N = 257, **changes)

def _worst_residual(cfg: model.ModelConfig, steps: int) -> float:
    operators = eps_solver.Operators.from_config(cfg)
    state = eps_solver.init_gaussian(cfg, operators)
    worst = 0.0
    for _ in range(steps):
        after = eps_solver.step(state, cfg, cfg.dt, operators)
        worst = max(
            worst, eps_solver.mass_residual(state, after, cfg.dt, operators))
        state = after
    return worst


def test_initial_state() -> None:
    cfg = _coarse()
    state = eps_solver.init_gaussian(cfg)
    assert state.t == 0.0
    assert state.rho == pytest.approx(1.0, abs = 1e-6)
    assert state.zbar == pytest.approx(0.0, abs = 1e-12)
    assert state.d2u_at_zbar == pytest.approx(-2.0, abs = 1e-8)
    assert abs(state.zero_sum) < 1e-12
    assert state.weights.sum() == pytest.approx(1.0)
    raw = eps_solver.init_gaussian(_coarse(normalize_mass = False))
    assert raw.rho == pytest.approx(math.sqrt(math.pi), abs = 1e-6)
    shifted = eps_solver.init_gaussian(_coarse(z0 = 0.4))
    assert shifted.rho == pytest.approx(1.0 - 0.16, abs = 1e-6)
    assert shifted.zbar == pytest.approx(0.4, abs = 1e-9)
    with pytest.raises(base.MaladaptedInitialDatum):
        eps_solver.init_gaussian(_coarse(z0 = 1.5))
    return

def test_envelope() -> None:
    cfg = _coarse()
    state = eps_solver.init_gaussian(cfg)
    envelope = eps_solver.Envelope.from_config(cfg, model.rho_max(cfg))
    assert envelope.b2 == pytest.approx(0.5)
    assert envelope.c1 == envelope.c2 == pytest.approx(3.0)
    assert envelope.margin(state) >= 0.0
    return

def test_step() -> None:
    cfg = _coarse()
    operators = eps_solver.Operators.from_config(cfg)
    state = eps_solver.init_gaussian(cfg, operators)
    dt = eps_solver.choose_dt(state, cfg)
    assert 0 < dt <= min(cfg.dt, cfg.epsilon / state.rho)
    after = eps_solver.step(state, cfg, dt, operators)
    assert after.t == pytest.approx(dt)
    assert after.zbar > state.zbar
    assert abs(after.zero_sum) < 1e-12
    with pytest.raises(base.StepRejected) as rejected:
        eps_solver.step(state, cfg, 1.0, operators)
    assert 0 < rejected.value.suggested_dt < 1.0
    smoothed = operators.solve_diffusion(np.ones(cfg.N), 0.1)
    assert np.allclose(smoothed, 1.0)
    return

def test_mass_residual_refines() -> None:
    coarse = model.ModelConfig(solver = 'eps', N = 513, dt = 5e-4)
    fine = coarse.replace(N = 1025, dt = 2.5e-4)
    first = _worst_residual(coarse, 40)
    second = _worst_residual(fine, 80)
    assert first < 0.05
    assert first / second >= 1.5
    return

def test_short_run() -> None:
    cfg = _coarse(T = 1.0)
    record = eps_solver.run(cfg, snapshot_stride = 250)
    assert record.status == 'horizon'
    assert record.solver == 'eps'
    assert record.digest == cfg.digest
    assert record.times[-1] == pytest.approx(1.0)
    assert np.all(np.diff(record.times) > 0)
    assert 0.05 < record.zbar[-1] < 0.55
    assert np.all(record.rho > 0)
    assert np.max(record.rho) <= 1.0 + 1e-3
    assert np.all(record.column('n_maxima') == 1)
    assert record.events['max_zero_sum'] < 1e-10
    assert record.events['rho_bound_violations'] == 0
    assert record.events['zbar_final'] == pytest.approx(record.zbar[-1])
    assert record.snapshots[0][0] == 0.0
    assert record.snapshots[-1][0] == pytest.approx(1.0)
    with pytest.raises(base.ConfigError):
        eps_solver.run(cfg.replace(N = 8))
    return

@pytest.mark.slow
def test_fine_run_invariants() -> None:
    cfg = model.ModelConfig(solver = 'eps', N = 1025, T = 10.0)
    record = eps_solver.run(cfg)
    assert record.status == 'horizon'
    assert record.events['max_zero_sum'] < 1e-10
    assert record.events['rho_bound_violations'] == 0
    assert np.all(record.rho > 0)
    assert np.all(np.diff(record.zbar) >= -cfg.dz)
    return


if __name__ == '__main__':
    test_initial_state()
    test_envelope()
    test_step()
    test_mass_residual_refines()
    test_short_run()
    test_fine_run_invariants()
