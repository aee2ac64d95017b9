"""Default settings for model configurations and solver tolerances.

Contents:
    set_default: changes one of the module-level defaults.
    get_default: returns one of the module-level defaults.

To Do:


"""
from __future__ import annotations
from typing import Any


KERNEL: str = 'tanh'
GROWTH: str = 'quadratic'
SOLVER: str = 'limit'
G: float = 1.0
TAU: float = 1.0
EPSILON: float = 1e-2
Z0: float = 0.0
C: float = 1.0
N: int = 513
DT: float = 1e-3
T: float = 30.0
STRIDE: int = 10
NORMALIZE_MASS: bool = True
TOL_CONVERGE: float = 1e-6
RHO_FLOOR: float = 1e-10
CFL_SAFETY: float = 0.9
ENO_CFL: float = 0.5
CONCAVITY_FLOOR: float = 1e-8
ARGMAX_TIE: float = 1e-12
ROOT_TOLERANCE: float = 1e-12

def set_default(name: str, value: Any) -> None:
    """Sets a module-level default.

    Args:
        name (str): name of the default (case insensitive).
        value (Any): new value.

    Raises:
        KeyError: if 'name' is not a known default.

    """
    variable = name.upper()
    if variable not in globals() or variable.startswith('_'):
        raise KeyError(f'{name} is not a prax default')
    globals()[variable] = value
    return

def get_default(name: str) -> Any:
    """Returns the module-level default called 'name'."""
    variable = name.upper()
    if variable not in globals():
        raise KeyError(f'{name} is not a prax default')
    return globals()[variable]
