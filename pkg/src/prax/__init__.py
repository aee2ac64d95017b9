"""Selection dynamics of trait-structured populations with horizontal transfer.

Contents:
    Top-level access to the configuration, solvers, oracles and reports.

"""
from __future__ import annotations

from .base import (
    BoundaryArgmax,
    ConcavityLoss,
    ConfigError,
    DegenerateKernelError,
    Families,
    HypothesisViolation,
    KernelRangeError,
    MaladaptedInitialDatum,
    MassDomainError,
    NumericalBreakdown,
    PraxError,
    RunRecord,
    StepRejected)
from .grid import Field1D
from .kernels import (
    GrowthProfile,
    QuadraticGrowth,
    TanhKernel,
    TransferKernel,
    create_growth,
    create_kernel,
    verify_hypotheses)
from .model import (
    ModelConfig,
    RegimeReport,
    classify_regime,
    compute_d1,
    compute_mu1,
    load_config)
from . import diagnostics
from . import eps_solver
from . import export
from . import limit_solver
from . import oracle
from . import workshop


__version__ = '0.1.0'

__author__: str = 'Corey Rayburn Yung'

__all__: list[str] = [
    'BoundaryArgmax',
    'ConcavityLoss',
    'ConfigError',
    'DegenerateKernelError',
    'Families',
    'Field1D',
    'GrowthProfile',
    'HypothesisViolation',
    'KernelRangeError',
    'MaladaptedInitialDatum',
    'MassDomainError',
    'ModelConfig',
    'NumericalBreakdown',
    'PraxError',
    'QuadraticGrowth',
    'RegimeReport',
    'RunRecord',
    'StepRejected',
    'TanhKernel',
    'TransferKernel',
    'classify_regime',
    'compute_d1',
    'compute_mu1',
    'create_growth',
    'create_kernel',
    'diagnostics',
    'eps_solver',
    'export',
    'limit_solver',
    'load_config',
    'oracle',
    'verify_hypotheses',
    'workshop']
