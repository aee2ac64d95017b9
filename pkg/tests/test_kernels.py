"""
test_kernels: unit tests for prax transfer kernels and growth profiles

"""
import math

import numpy as np
import pytest

import prax
from prax import base
from prax import kernels


NODES = np.linspace(-5.0, 5.0, 201)


def test_tanh_kernel() -> None:
    kernel = kernels.TanhKernel()
    x = np.linspace(-4.0, 4.0, 81)
    assert np.array_equal(kernel.evaluate(-x), -kernel.evaluate(x))
    assert np.array_equal(kernel.evaluate(-x, 1), kernel.evaluate(x, 1))
    assert kernel.evaluate(0.0, 1) == 1.0
    assert isinstance(kernel.evaluate(0.5), float)
    assert kernel(0.5) == pytest.approx(math.tanh(0.5), abs = 1e-15)
    assert kernel.z_h == pytest.approx(math.atanh(1.0 / math.sqrt(3.0)), abs = 1e-9)
    with pytest.raises(ValueError):
        kernel.evaluate(0.5, order = 4)
    return

def test_arctan_kernels() -> None:
    scaled = kernels.create_kernel('scaled_arctan')
    assert isinstance(scaled, kernels.ScaledArctanKernel)
    assert scaled.evaluate(0.0, 1) == pytest.approx(1.0, abs = 1e-15)
    assert scaled.z_h == pytest.approx(2.0 / (math.pi * math.sqrt(3.0)), abs = 1e-9)
    raw = kernels.RawArctanKernel()
    assert raw.evaluate(0.0, 1) == pytest.approx(2.0 / math.pi, abs = 1e-15)
    assert raw.z_h == pytest.approx(1.0 / math.sqrt(3.0), abs = 1e-9)
    report = kernels.verify_hypotheses(
        kernel = raw,
        growth = kernels.QuadraticGrowth(g = 1.0),
        nodes = NODES)
    assert not report.passed
    assert not report['HT.origin'].passed
    assert report['HT.odd'].passed
    return

def test_dilated_kernel() -> None:
    kernel = kernels.DilatedKernel(scale = 2.0)
    assert kernel.evaluate(1.0) == pytest.approx(2.0 * math.tanh(0.5))
    assert kernel.evaluate(0.0, 1) == pytest.approx(1.0)
    report = kernels.verify_hypotheses(
        kernel = kernel,
        growth = kernels.QuadraticGrowth(g = 1.0),
        nodes = NODES)
    assert not report['HT.range'].passed
    assert report['HT.origin'].passed
    with pytest.raises(ValueError):
        kernels.DilatedKernel(scale = 0.0)
    return

def test_tabulated_kernel(tmp_path) -> None:
    x = np.linspace(0.0, 6.0, 601)
    path = tmp_path / 'tanh.csv'
    rows = ['# x, H(x)'] + [f'{a:.6f}, {math.tanh(a):.16f}' for a in x]
    path.write_text('\n'.join(rows) + '\n')
    kernel = kernels.create_kernel(str(path))
    assert isinstance(kernel, kernels.TabulatedKernel)
    assert kernel.domain == (-6.0, 6.0)
    points = np.linspace(-5.0, 5.0, 37)
    assert np.max(np.abs(kernel.evaluate(points) - np.tanh(points))) < 1e-5
    assert kernel.evaluate(-1.3) == -kernel.evaluate(1.3)
    with pytest.raises(base.KernelRangeError):
        kernel.evaluate(7.0)
    with pytest.raises(ValueError):
        kernels.TabulatedKernel(x = [0.0, 1.0], h = [0.0, 0.5])
    bad = tmp_path / 'bad.txt'
    bad.write_text('0 0 0\n1 1 1\n')
    with pytest.raises(ValueError):
        kernels.load_tabulated(bad)
    return

def test_factories() -> None:
    assert set(['tanh', 'scaled_arctan', 'raw_arctan', 'dilated',
                'quadratic']) <= set(base.Families.names())
    assert isinstance(kernels.create_kernel('tanh'), kernels.TanhKernel)
    with pytest.raises(KeyError):
        kernels.create_kernel('logistic')
    assert kernels.kernel_eval(prax.TanhKernel(), 0.3, 1) == pytest.approx(
        1.0 - math.tanh(0.3)**2)
    assert kernels.kernel_zH(prax.TanhKernel()) == pytest.approx(0.658478948)
    return

def test_quadratic_growth() -> None:
    growth = kernels.create_growth('quadratic', g = 0.25)
    assert growth.viable() == pytest.approx((-2.0, 2.0))
    assert growth.z_mu(0.5) == pytest.approx(1.0)
    assert growth.evaluate(1.0) == pytest.approx(0.75)
    assert growth.evaluate(1.0, 1) == pytest.approx(-0.5)
    assert growth.maximum() == pytest.approx(1.0)
    assert growth.envelope['K2'] == 0.25
    with pytest.raises(ValueError):
        kernels.QuadraticGrowth(g = -1.0)
    return

def test_custom_growth() -> None:
    growth = kernels.CustomGrowth(
        function = lambda z: 2.0 - z**2,
        derivative = lambda z: -2.0 * z,
        second = lambda z: -2.0 * np.ones_like(z))
    left, right = growth.viable()
    assert left == pytest.approx(-math.sqrt(2.0))
    assert right == pytest.approx(math.sqrt(2.0))
    assert growth.z_mu(1.0) == pytest.approx(0.5)
    with pytest.raises(TypeError):
        kernels.CustomGrowth(function = lambda z: z)
    return

def test_verify_hypotheses() -> None:
    kernel = kernels.TanhKernel()
    growth = kernels.QuadraticGrowth(g = 1.0)
    report = kernels.verify_hypotheses(kernel, growth, NODES, tau = 1.0)
    assert report.passed
    assert [c.name for c in report.checks] == [
        'HT.odd', 'HT.range', 'HT.increasing', 'HT.origin', 'HT.concave',
        'HT.inflection', 'HR1.envelope', 'HR1.curvature', 'HR2']
    assert all(line.split(' = ')[1].startswith('PASS') for line in report.lines())
    suicidal = kernels.verify_hypotheses(kernel, growth, NODES, tau = 2.2)
    assert [c.name for c in suicidal.failures] == ['HR2']
    with pytest.raises(KeyError):
        report['HR3']
    return


if __name__ == '__main__':
    test_tanh_kernel()
    test_arctan_kernels()
    test_dilated_kernel()
    test_factories()
    test_quadratic_growth()
    test_custom_growth()
    test_verify_hypotheses()
