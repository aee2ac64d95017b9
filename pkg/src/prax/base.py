"""Base classes and errors shared across prax.

Contents:
    PraxError (Exception): root of every error raised by prax.
    ConfigError (PraxError, ValueError): unparsable or invalid configuration.
    HypothesisViolation (PraxError, ValueError): a structural assumption on
        the kernel or growth profile does not hold.
    DegenerateKernelError (PraxError, ArithmeticError): threshold formulas
        break down for the kernel.
    KernelRangeError (PraxError, ValueError): evaluation outside the range
        where a quantity is defined.
    MaladaptedInitialDatum (PraxError, ValueError): the initial peak lies
        where the growth rate is not positive.
    StepRejected (PraxError, RuntimeError): a time step violates its
        stability restriction.
    ConcavityLoss (PraxError, RuntimeError): the peak of u is no longer
        strictly concave.
    BoundaryArgmax (PraxError, RuntimeError): the peak reached the edge of the
        computational domain.
    NumericalBreakdown (PraxError, FloatingPointError): NaN or Inf appeared.
    MassDomainError (PraxError, ValueError): invalid arguments to the closed
        form mass relaxation.
    Families (object): registry of kernel and growth profile families.
    RunRecord (object): time series produced by the solvers.

To Do:
    Store snapshots lazily on disk for very long runs.

"""
from __future__ import annotations
import contextlib
import dataclasses
from collections.abc import Mapping
from typing import Any, ClassVar, Optional, Type, TYPE_CHECKING

import camina
import numpy as np

if TYPE_CHECKING:
    from . import grid


""" Errors """

class PraxError(Exception):
    """Base class for all errors raised by prax."""


class ConfigError(PraxError, ValueError):
    """Raised when a configuration cannot be parsed or is invalid.

    Args:
        message (str): description of the problem.
        line (Optional[int]): 1-based line number in the config file, if the
            problem comes from a file. Defaults to None.

    """

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)


class HypothesisViolation(PraxError, ValueError):
    """Raised when a kernel or growth profile breaks a structural assumption."""


class DegenerateKernelError(PraxError, ArithmeticError):
    """Raised when the threshold formulas are undefined for a kernel."""


class KernelRangeError(PraxError, ValueError):
    """Raised when a quantity is requested outside its range of definition."""


class MaladaptedInitialDatum(PraxError, ValueError):
    """Raised when the initial peak is outside the viable trait interval."""


class StepRejected(PraxError, RuntimeError):
    """Raised when a time step is larger than its stability limit.

    Args:
        message (str): description of the violated restriction.
        suggested_dt (float): largest time step that satisfies it.

    """

    def __init__(self, message: str, suggested_dt: float) -> None:
        self.suggested_dt = suggested_dt
        super().__init__(f'{message} (suggested dt = {suggested_dt:.6g})')


class ConcavityLoss(PraxError, RuntimeError):
    """Raised when the second derivative at the peak is no longer negative."""


class BoundaryArgmax(PraxError, RuntimeError):
    """Raised when the maximum of a field sits in a boundary cell."""


class NumericalBreakdown(PraxError, FloatingPointError):
    """Raised when a solver produces NaN or Inf values.

    Args:
        message (str): description of the failure.
        last_good (Any): last state with finite values. Defaults to None.

    """

    def __init__(self, message: str, last_good: Any = None) -> None:
        self.last_good = last_good
        super().__init__(message)


class MassDomainError(PraxError, ValueError):
    """Raised when the closed-form mass relaxation leaves its domain."""


""" Family Registry """

@dataclasses.dataclass
class Families(object):
    """Registry of transfer kernel and growth profile families.

    Args:
        registry (camina.Dictionary): keys are family names and values are
            TransferKernel or GrowthProfile subclasses.

    """
    registry: ClassVar[camina.Dictionary] = camina.Dictionary()

    """ Public Methods """

    @classmethod
    def register(cls, item: Type[Any], name: Optional[str] = None) -> None:
        """Adds 'item' to 'registry'.

        The key assigned for storing 'item' is determined using the
        camina.namify method if 'name' is not passed.

        Args:
            item (Type[Any]): class to register.
            name (Optional[str]): key to use for storing 'item'. Defaults to
                None.

        """
        name = name or camina.namify(item)
        cls.registry.add(item = {name: item})
        return

    @classmethod
    def build(cls, name: str, **kwargs: Any) -> Any:
        """Returns an instance of the family registered under 'name'.

        Args:
            name (str): registered family name.
            kwargs: passed to the family constructor.

        Raises:
            KeyError: if 'name' is not a registered family.

        Returns:
            Any: the new kernel or growth profile.

        """
        key = name.replace('-', '_').lower()
        if key not in cls.registry.keys():
            known = ', '.join(sorted(cls.registry.keys()))
            raise KeyError(
                f'{name} is not a registered family (known: {known})')
        return cls.registry[key](**kwargs)

    @classmethod
    def names(cls) -> list[str]:
        """Returns the sorted registered family names."""
        return sorted(cls.registry.keys())


""" Run Records """

COLUMNS: tuple[str, ...] = (
    't',
    'rho',
    'log_rho',
    'zbar',
    'u_max',
    'd2u_zbar',
    'n_positivity_components',
    'n_maxima',
    'left_set')


@dataclasses.dataclass
class RunRecord(object):
    """Time series of one solver run plus its report blocks.

    Args:
        solver (str): 'eps' or 'limit'.
        digest (str): hash of the configuration that produced the run.
        epsilon (float): mutation scale of the run (0.0 for the limit solver).
        dz (float): grid spacing of the run.
        dt (float): nominal time step of the run.
        stride (int): number of steps between recorded rows.
        rows (list[tuple[float, ...]]): recorded rows ordered as COLUMNS.
        status (str): terminal status of the run. Defaults to 'running'.
        events (dict[str, float]): named scalar results (extinction time,
            limit trait, curvature extrema, ...).
        blocks (dict[str, dict[str, Any]]): named report blocks appended to
            the text output.
        snapshots (list[tuple[float, grid.Field1D]]): optional field
            snapshots with their times.

    """
    solver: str
    digest: str = ''
    epsilon: float = 0.0
    dz: float = 0.0
    dt: float = 0.0
    stride: int = 1
    rows: list[tuple[float, ...]] = dataclasses.field(default_factory = list)
    status: str = 'running'
    events: dict[str, float] = dataclasses.field(default_factory = dict)
    blocks: dict[str, dict[str, Any]] = dataclasses.field(
        default_factory = dict)
    snapshots: list[tuple[float, grid.Field1D]] = dataclasses.field(
        default_factory = list)

    columns: ClassVar[tuple[str, ...]] = COLUMNS

    """ Public Methods """

    def append(self, **values: float) -> None:
        """Adds a row to the record.

        Args:
            values: one keyword per entry in COLUMNS. Missing entries are
                stored as NaN.

        Raises:
            KeyError: if a keyword is not a recorded column.

        """
        unknown = set(values) - set(self.columns)
        if unknown:
            raise KeyError(f'{sorted(unknown)} are not RunRecord columns')
        self.rows.append(
            tuple(float(values.get(c, np.nan)) for c in self.columns))
        return

    def add_block(self, name: str, contents: Mapping[str, Any]) -> None:
        """Stores a report block under 'name', merging existing entries."""
        self.blocks.setdefault(name, {}).update(contents)
        return

    def column(self, name: str) -> np.ndarray:
        """Returns the recorded values of column 'name'.

        Args:
            name (str): a name in COLUMNS.

        Raises:
            KeyError: if 'name' is not a recorded column.

        Returns:
            np.ndarray: one entry per recorded row.

        """
        try:
            index = self.columns.index(name)
        except ValueError as e:
            raise KeyError(f'{name} is not a RunRecord column') from e
        if not self.rows:
            return np.empty(0)
        return np.asarray(self.rows, dtype = float)[:, index]

    def as_array(self) -> np.ndarray:
        """Returns the rows as a (rows x columns) array."""
        if not self.rows:
            return np.empty((0, len(self.columns)))
        return np.asarray(self.rows, dtype = float)

    @property
    def times(self) -> np.ndarray:
        """Returns the recorded times."""
        return self.column('t')

    @property
    def zbar(self) -> np.ndarray:
        """Returns the recorded peak traits."""
        return self.column('zbar')

    @property
    def rho(self) -> np.ndarray:
        """Returns the recorded population sizes."""
        return self.column('rho')

    @property
    def final(self) -> dict[str, float]:
        """Returns the last recorded row keyed by column name."""
        if not self.rows:
            return {}
        return dict(zip(self.columns, self.rows[-1]))

    """ Dunder Methods """

    def __len__(self) -> int:
        """Returns the number of recorded rows."""
        return len(self.rows)

    def __contains__(self, item: str) -> bool:
        """Returns whether 'item' names an event or a report block."""
        with contextlib.suppress(TypeError):
            return item in self.events or item in self.blocks
        return False
