"""
test_oracle: unit tests for the dynamic programming, shooting and mass oracles

"""
import math

import numpy as np
import pytest
from scipy import interpolate

from prax import base
from prax import grid
from prax import oracle


def _still(t: float, z: np.ndarray) -> np.ndarray:
    return np.zeros_like(np.asarray(z, dtype = float))

def _harmonic(t: float, z: np.ndarray) -> np.ndarray:
    return -np.asarray(z, dtype = float)**2

def _parabola(c: float = 1.0) -> grid.Field1D:
    return grid.Field1D.from_function(lambda z: -c * z**2, -3.0, 3.0, 301)


def test_lax_oleinik_step() -> None:
    values = np.full(41, -1e6)
    values[20] = 0.0
    dz, dt = 0.1, 0.05
    result = oracle.lax_oleinik_step(values, dz, dt)
    offsets = (np.arange(41) - 20) * dz
    assert np.allclose(result, -offsets**2 / (4.0 * dt))
    narrow = oracle.lax_oleinik_step(values, dz, dt, reach = 3)
    assert np.allclose(narrow[17:24], result[17:24])
    assert narrow[0] == -1e6
    return

def test_continuous_lax_oleinik_step() -> None:
    dz, dt = 0.1, 0.05
    nodes = grid.make_grid(-2.0, 2.0, 41)
    values = -nodes**2
    smooth = oracle.continuous_lax_oleinik_step(values, -2.0, dz, dt)
    assert np.allclose(smooth, -nodes**2 / (1.0 + 4.0 * dt), atol = 1e-12)
    assert np.all(smooth >= oracle.lax_oleinik_step(values, dz, dt) - 1e-15)
    spike = np.full(41, -1e6)
    spike[20] = 0.0
    assert oracle.continuous_lax_oleinik_step(spike, -2.0, dz, dt)[20] >= 0.0
    return

def test_hopf_lax_free_motion() -> None:
    u0 = _parabola()
    table = oracle.hopf_lax_dp(u0, _still, dt = 0.02, T = 0.5)
    assert table.times[0] == 0.0
    assert table.times[-1] == pytest.approx(0.5)
    assert np.array_equal(table.values[0], u0.values)
    assert table.dt == pytest.approx(0.02)
    nodes = table.nodes
    exact = -nodes**2 / 3.0
    inside = np.abs(nodes) <= 1.0
    error = table.values[-1] - exact
    assert np.max(np.abs(error[inside])) < 0.05
    assert np.all(error[inside] <= 1e-12)
    full = oracle.hopf_lax_dp(u0, _still, dt = 0.02, T = 0.5, windowed = False)
    assert np.allclose(full.values, table.values, atol = 1e-12)
    assert table.at(0.26).values.size == 301
    return

def test_hopf_lax_constant_fitness() -> None:
    u0 = _parabola()
    lifted = oracle.hopf_lax_dp(
        u0, lambda t, z: np.full_like(z, 0.7), dt = 0.05, T = 0.5)
    still = oracle.hopf_lax_dp(u0, _still, dt = 0.05, T = 0.5)
    assert np.allclose(lifted.values[-1] - still.values[-1], 0.35)
    sparse = oracle.hopf_lax_dp(u0, _still, dt = 0.05, T = 0.5, keep_every = 3)
    assert sparse.times.tolist() == pytest.approx([0.0, 0.15, 0.3, 0.45, 0.5])
    with pytest.raises(ValueError):
        oracle.hopf_lax_dp(u0, _still, dt = 0.0, T = 0.5)
    with pytest.raises(base.NumericalBreakdown):
        oracle.hopf_lax_dp(
            u0, lambda t, z: np.full_like(z, math.inf), dt = 0.05, T = 0.1)
    return

def test_hopf_lax_converges_at_fixed_ratio() -> None:
    # u = -a(t) z² with a' = 1 - 4a², a(0) = 1
    T = 1.0
    a = 0.5 / math.tanh(2.0 * T + math.atanh(0.5))
    errors = []
    for size, dt in ((151, 0.04), (301, 0.02)):
        u0 = grid.Field1D.from_function(lambda z: -z**2, -3.0, 3.0, size)
        table = oracle.hopf_lax_dp(u0, _harmonic, dt = dt, T = T)
        inside = np.abs(table.nodes) <= 1.0
        error = np.abs(table.values[-1] + a * table.nodes**2)
        errors.append(float(np.max(error[inside])))
    assert errors[0] < 5.0 * (0.04 + 0.04)
    assert errors[0] / errors[1] >= 1.5
    u0 = grid.Field1D.from_function(lambda z: -z**2, -3.0, 3.0, 151)
    nodal = oracle.hopf_lax_dp(
        u0, _harmonic, dt = 0.04, T = T, continuous = False)
    inside = np.abs(nodal.nodes) <= 1.0
    nodal_error = np.max(np.abs(nodal.values[-1] + a * nodal.nodes**2)[inside])
    assert errors[0] < 0.25 * nodal_error
    return

def test_integrate_rk4() -> None:
    times, states = oracle.integrate_rk4(
        lambda t, y: -y, np.array([1.0]), 0.0, 1.0, 100)
    assert times[-1] == pytest.approx(1.0)
    assert states.shape == (101, 1)
    assert states[-1, 0] == pytest.approx(math.exp(-1.0), abs = 1e-9)
    return

def test_shooting_free_motion() -> None:
    c, t, z = 1.0, 0.5, 0.6
    shot = oracle.euler_lagrange_shoot(
        t = t,
        z = z,
        fitness_provider = _still,
        u0_fn = lambda x: -c * x**2,
        u0_grad_fn = lambda x: -2.0 * c * x,
        p_max = 6.0)
    assert shot.candidates == 1
    assert not shot.multivalued
    assert shot.path[0] == pytest.approx(z / (1.0 + 4.0 * c * t), abs = 1e-9)
    assert shot.path[-1] == pytest.approx(z, abs = 1e-9)
    assert shot.action == pytest.approx(-c * z**2 / (1.0 + 4.0 * c * t), abs = 1e-9)
    assert shot.gradient == pytest.approx(-2.0 * c * z / (1.0 + 4.0 * c * t), abs = 1e-9)
    assert np.allclose(np.diff(shot.path), np.diff(shot.path)[0])
    unbounded = oracle.euler_lagrange_shoot(
        t = t,
        z = z,
        fitness_provider = _still,
        u0_fn = lambda x: -c * x**2,
        u0_grad_fn = lambda x: -2.0 * c * x)
    assert unbounded.action == pytest.approx(shot.action, abs = 1e-9)
    return

def test_shooting_from_sampled_slice() -> None:
    nodes = grid.make_grid(-3.0, 3.0, 301)
    spline = interpolate.CubicSpline(nodes, -0.5 * nodes**2)
    z = 0.7
    shot = oracle.euler_lagrange_shoot(
        t = 4.0,
        z = z,
        fitness_provider = _harmonic,
        u0_fn = lambda x: float(spline(x)),
        u0_grad_fn = lambda x: float(spline(x, 1)),
        p_max = 3.0,
        fitness_gradient = lambda s, x: -2.0 * x,
        domain = (-3.0, 3.0))
    assert not shot.multivalued
    assert abs(shot.path[0]) < 1e-3
    assert shot.gradient == pytest.approx(-z, abs = 1e-6)
    assert shot.action == pytest.approx(-0.5 * z**2, abs = 1e-6)
    return

def test_shooting_stationary_trait() -> None:
    fitness = lambda t, z: -(np.asarray(z) - 0.5)**2
    shot = oracle.euler_lagrange_shoot(
        t = 1.0,
        z = 0.5,
        fitness_provider = fitness,
        u0_fn = lambda x: -(x - 0.5)**2,
        u0_grad_fn = lambda x: -2.0 * (x - 0.5),
        p_max = 7.0,
        fitness_gradient = lambda t, z: -2.0 * (z - 0.5))
    assert np.allclose(shot.path, 0.5, atol = 1e-9)
    assert abs(shot.action) < 1e-10
    assert abs(shot.gradient) < 1e-9
    return

def test_shooting_below_dynamic_programming() -> None:
    u0 = _parabola()
    table = oracle.hopf_lax_dp(u0, _still, dt = 0.05, T = 0.5)
    j = u0.index_of(0.6)
    z = float(table.nodes[j])
    shot = oracle.euler_lagrange_shoot(
        t = 0.5,
        z = z,
        fitness_provider = _still,
        u0_fn = lambda x: -x**2,
        u0_grad_fn = lambda x: -2.0 * x,
        p_max = 6.0)
    assert table.values[-1][j] <= shot.action + 1e-9
    assert shot.action - table.values[-1][j] < 0.05
    return

def test_mass_relaxation() -> None:
    assert oracle.mass_relaxation(math.log(0.75), 0.75, 3.0) == pytest.approx(
        math.log(0.75), abs = 1e-12)
    assert oracle.mass_relaxation(0.0, 0.75, 40.0) == pytest.approx(
        math.log(0.75), abs = 1e-9)
    collapse = oracle.mass_relaxation(0.0, -0.21, 40.0)
    assert collapse < -8.0
    assert oracle.mass_relaxation(0.0, -0.21, 41.0) < collapse
    assert oracle.mass_relaxation(0.0, 0.0, 1.0) == pytest.approx(-math.log(2.0))
    assert oracle.mass_relaxation(0.3, 0.5, 0.0) == pytest.approx(0.3)
    with pytest.raises(base.MassDomainError):
        oracle.mass_relaxation(0.0, 0.0, -2.0)
    with pytest.raises(base.MassDomainError):
        oracle.mass_relaxation(1.0, 1.0, -1.0)
    with pytest.raises(base.MassDomainError):
        oracle.mass_relaxation(math.nan, 1.0, 1.0)
    return

def test_mass_relaxation_solves_its_ode() -> None:
    generator = np.random.default_rng(3)
    for _ in range(50):
        J0 = generator.uniform(-2.0, 1.0)
        Rz = generator.uniform(-1.0, 1.0)
        s = generator.uniform(0.5, 5.0)
        _, states = oracle.integrate_rk4(
            lambda t, y: Rz - np.exp(y), np.array([J0]), 0.0, s, 2000)
        assert oracle.mass_relaxation(J0, Rz, s) == pytest.approx(
            states[-1, 0], abs = 1e-8)
        h = 1e-4
        slope = (oracle.mass_relaxation(J0, Rz, s + h)
                 - oracle.mass_relaxation(J0, Rz, s - h)) / (2.0 * h)
        value = oracle.mass_relaxation(J0, Rz, s)
        assert slope == pytest.approx(Rz - math.exp(value), abs = 1e-6)
    return


if __name__ == '__main__':
    test_lax_oleinik_step()
    test_continuous_lax_oleinik_step()
    test_hopf_lax_free_motion()
    test_hopf_lax_constant_fitness()
    test_hopf_lax_converges_at_fixed_ratio()
    test_integrate_rk4()
    test_shooting_free_motion()
    test_shooting_from_sampled_slice()
    test_shooting_stationary_trait()
    test_shooting_below_dynamic_programming()
    test_mass_relaxation()
    test_mass_relaxation_solves_its_ode()
