"""Functions that type check prax objects using structural subtyping.

Contents:
    is_kernel: returns whether the passed item behaves like a transfer kernel.
    is_growth: returns whether the passed item behaves like a growth profile.
    is_field: returns whether the passed item behaves like a Field1D.

To Do:


"""
from __future__ import annotations
from typing import Any, Type, Union

import miller


def is_kernel(item: Union[Type[Any], object]) -> bool:
    """Returns whether 'item' is a transfer kernel.

    Any object with an 'evaluate(x, order)' method and a 'domain' is accepted,
    so user kernels need not inherit from kernels.TransferKernel.

    Args:
        item (Union[Type[Any], object]): class or instance to test.

    Returns:
        bool: whether 'item' is a transfer kernel.

    """
    return (
        miller.has_methods(item = item, methods = ['evaluate'])
        and hasattr(item, 'domain'))

def is_growth(item: Union[Type[Any], object]) -> bool:
    """Returns whether 'item' is a growth profile.

    Args:
        item (Union[Type[Any], object]): class or instance to test.

    Returns:
        bool: whether 'item' is a growth profile.

    """
    return miller.has_methods(
        item = item,
        methods = ['evaluate', 'viable', 'z_mu'])

def is_field(item: object) -> bool:
    """Returns whether 'item' is a sampled field on a uniform grid.

    Args:
        item (object): instance to test.

    Returns:
        bool: whether 'item' is a sampled field.

    """
    return all(
        hasattr(item, attribute)
        for attribute in ('values', 'z_min', 'z_max', 'dz', 'nodes'))
