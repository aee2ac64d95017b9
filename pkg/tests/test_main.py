"""Main file for unit tests."""

from __future__ import annotations

import prax


def test_prax() -> None:
    assert prax.__version__
    assert set(prax.__all__) <= set(dir(prax))
    assert prax.create_kernel('tanh').family == 'tanh'
    assert 'TanhKernel' in prax.__all__
    assert isinstance(prax.create_kernel('tanh'), prax.TanhKernel)
    return

if __name__ == '__main__':
    test_prax()
