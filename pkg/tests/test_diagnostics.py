"""
test_diagnostics: unit tests for prax positivity sets and monomorphism checks

"""
import math

import numpy as np
import pytest

from prax import base
from prax import diagnostics
from prax import eps_solver
from prax import grid
from prax import model


def _record(zbar: list[float], maxima: list[int]) -> base.RunRecord:
    record = base.RunRecord(solver = 'eps', dz = 0.01, stride = 1)
    for step, (z, n) in enumerate(zip(zbar, maxima)):
        record.append(t = 0.1 * step, zbar = z, n_maxima = n, left_set = 0.0)
    return record


def test_positivity_sets() -> None:
    nodes = grid.make_grid(-3.0, 3.0, 601)
    report = diagnostics.positivity_sets(lambda z: 1.0 - z**2, 0.0, nodes)
    assert report.n_components == 1
    assert report.contains_zbar == 0
    assert np.allclose(report.current_set, (-1.0, 1.0), atol = 1e-8)
    assert not report.has_left_set
    assert report.block()['J'] == 'none'
    nodes = grid.make_grid(0.0, 6.0, 601)
    two = lambda z: -(z - 1.0) * (z - 2.0) * (z - 4.0) * (z - 5.0)
    report = diagnostics.positivity_sets(two, 4.5, nodes)
    assert report.n_components == 2
    assert np.allclose(report.current_set, (4.0, 5.0), atol = 1e-8)
    assert np.allclose(report.left_set_J, (1.0, 2.0), atol = 1e-8)
    sampled = grid.Field1D(values = two(nodes), z_min = 0.0, z_max = 6.0)
    assert diagnostics.positivity_sets(sampled, 4.5).has_left_set
    with pytest.raises(ValueError):
        diagnostics.positivity_sets(two, 4.5)
    return

def test_degenerate_positivity() -> None:
    nodes = grid.make_grid(0.0, 6.0, 601)
    report = diagnostics.positivity_sets(
        lambda z: 1e-6 - (z - 1.0)**2, 1.0, nodes)
    assert report.n_components == 0
    assert len(report.degenerate) == 1
    lo, hi = report.degenerate[0]
    assert lo == pytest.approx(0.999, abs = 1e-8)
    assert hi == pytest.approx(1.001, abs = 1e-8)
    assert report.current_set is None
    return

def test_zero_set() -> None:
    single = grid.Field1D.from_function(
        lambda z: -(z - 0.3)**2, -2.0, 2.0, 401)
    points = diagnostics.zero_set(single)
    assert len(points) == 1
    assert points[0] == pytest.approx(0.3, abs = 1e-10)
    double = grid.Field1D.from_function(
        lambda z: -np.minimum((z - 1.0)**2, (z + 1.0)**2), -2.0, 2.0, 401)
    points = diagnostics.zero_set(double)
    assert len(points) == 2
    assert abs(points[0] + points[1]) < 1e-10
    lowered = grid.Field1D.from_function(
        lambda z: -np.minimum((z - 1.0)**2, (z + 1.0)**2 + 0.1),
        -2.0, 2.0, 401)
    assert diagnostics.zero_set(lowered) == pytest.approx([1.0], abs = 1e-10)
    assert len(diagnostics.zero_set(lowered, tol = 0.2)) == 2
    return

def test_monomorphism_monitor() -> None:
    record = _record([0.0, 0.01, 0.02, 1.0, 1.01, 0.0], [1, 1, 1, 2, 1, 1])
    report = diagnostics.monomorphism_monitor(record)
    assert report.threshold == pytest.approx(0.05)
    assert report.t_m == pytest.approx(0.3)
    assert report.max_maxima == 2
    assert report.oscillations == 2
    assert report.reversals == 1
    assert report.discontinuous
    assert report.period == pytest.approx(0.2)
    assert not report.monomorphic
    smooth = diagnostics.monomorphism_monitor(
        _record([0.0, 0.01, 0.02, 0.03], [1, 1, 1, 1]))
    assert smooth.monomorphic
    assert math.isnan(smooth.period)
    assert smooth.block()['t_m'] == 'none'
    empty = diagnostics.monomorphism_monitor(base.RunRecord(solver = 'limit'))
    assert empty.oscillations == 0
    return

@pytest.mark.slow
def test_dimorphic_oscillations() -> None:
    cfg = model.ModelConfig(solver = 'eps', epsilon = 1e-3, g = 0.065, tau = 0.5)
    record = eps_solver.run(cfg)
    report = diagnostics.monomorphism_monitor(record)
    assert report.t_left_set is not None
    assert report.oscillations > 0
    assert report.t_m is not None and math.isfinite(report.t_m)
    assert not report.monomorphic
    return


if __name__ == '__main__':
    test_positivity_sets()
    test_degenerate_positivity()
    test_zero_set()
    test_monomorphism_monitor()
    test_dimorphic_oscillations()
