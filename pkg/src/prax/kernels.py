"""Transfer kernels, growth profiles and checks of their structural hypotheses.

Contents:
    TransferKernel (abc.ABC): odd saturating transfer flux H with three
        derivatives.
    TanhKernel (TransferKernel): H(x) = tanh(x).
    ScaledArctanKernel (TransferKernel): H(x) = (2/π)arctan(πx/2).
    RawArctanKernel (TransferKernel): H(x) = (2/π)arctan(x), which has
        H'(0) = 2/π and is flagged by 'verify_hypotheses'.
    DilatedKernel (TransferKernel): slope-preserving dilation sH(x/s) of
        another kernel.
    TabulatedKernel (TransferKernel): monotone cubic interpolation of
        tabulated values.
    GrowthProfile (abc.ABC): growth rate R with two derivatives and its
        envelope constants.
    QuadraticGrowth (GrowthProfile): R(z) = 1 - gz².
    CustomGrowth (GrowthProfile): user supplied R, R', R''.
    HypothesisCheck (NamedTuple): outcome of one sampled hypothesis.
    HypothesisReport (object): outcomes of all sampled hypotheses.
    create_kernel: builds a registered kernel family by name.
    create_growth: builds a registered growth family by name.
    load_tabulated: reads a two-column kernel table.
    kernel_eval: H or one of its derivatives at a point.
    kernel_zH: positive root of H'''.
    verify_hypotheses: samples every kernel and growth hypothesis on a grid.

To Do:


"""
from __future__ import annotations
import abc
from collections.abc import Callable, Sequence
import contextlib
import dataclasses
import logging
import math
import pathlib
from typing import Any, ClassVar, NamedTuple, Optional, Union

import numpy as np
from scipy import interpolate
from scipy import optimize

from . import base
from . import check


logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

_ZH_BRACKET = (1e-6, 10.0)


""" Transfer Kernels """

@dataclasses.dataclass
class TransferKernel(abc.ABC):
    """Base class for odd, increasing, saturating transfer kernels.

    Subclasses implement '_positive', the kernel and its derivatives for
    nonnegative arguments; 'evaluate' extends them by parity so that odd
    orders are even functions and even orders are odd functions exactly.

    Args:
        tolerance (float): tolerance used when checking H(0) = 0 and
            H'(0) = 1. Defaults to 1e-12.

    """
    tolerance: float = 1e-12

    family: ClassVar[str] = ''

    """ Initialization Methods """

    @classmethod
    def __init_subclass__(cls, *args: Any, **kwargs: Any):
        """Automatically registers concrete subclasses by family name."""
        with contextlib.suppress(AttributeError):
            super().__init_subclass__(*args, **kwargs) # type: ignore
        if cls.family:
            base.Families.register(item = cls, name = cls.family)

    def __post_init__(self) -> None:
        """Initializes the lazily computed inflection point."""
        self._z_h: Optional[float] = None

    """ Required Subclass Methods """

    @abc.abstractmethod
    def _positive(self, x: np.ndarray, order: int) -> np.ndarray:
        """Returns the 'order' derivative of H at nonnegative 'x'."""

    """ Properties """

    @property
    def z_h(self) -> float:
        """Returns the positive root of H''' (computed once)."""
        if self._z_h is None:
            self._z_h = kernel_zH(self)
        return self._z_h

    @property
    def domain(self) -> tuple[float, float]:
        """Returns the interval where the kernel can be evaluated."""
        return (-math.inf, math.inf)

    """ Public Methods """

    def evaluate(self, x: ArrayLike, order: int = 0) -> ArrayLike:
        """Returns H or one of its first three derivatives at 'x'.

        Args:
            x (ArrayLike): evaluation point(s).
            order (int): derivative order in 0..3. Defaults to 0.

        Raises:
            ValueError: if 'order' is not in 0..3.

        Returns:
            ArrayLike: float for scalar 'x', array otherwise.

        """
        if order not in (0, 1, 2, 3):
            raise ValueError(f'order must be 0, 1, 2 or 3, not {order}')
        values = np.asarray(x, dtype = float)
        magnitude = np.abs(values)
        result = self._positive(magnitude, order)
        if order % 2 == 0:
            result = np.where(values < 0, -result, result)
        if np.ndim(x) == 0:
            return float(result)
        return result

    def __call__(self, x: ArrayLike) -> ArrayLike:
        """Returns H(x)."""
        return self.evaluate(x, 0)


@dataclasses.dataclass
class TanhKernel(TransferKernel):
    """Hyperbolic tangent kernel."""

    family: ClassVar[str] = 'tanh'

    def _positive(self, x: np.ndarray, order: int) -> np.ndarray:
        """Returns derivatives of tanh written in terms of t = tanh(x)."""
        t = np.tanh(x)
        sech2 = 1.0 - t**2
        if order == 0:
            return t
        elif order == 1:
            return sech2
        elif order == 2:
            return -2.0 * t * sech2
        return sech2 * (6.0 * t**2 - 2.0)


@dataclasses.dataclass
class ScaledArctanKernel(TransferKernel):
    """Arctangent kernel rescaled so that H'(0) = 1."""

    family: ClassVar[str] = 'scaled_arctan'

    def _positive(self, x: np.ndarray, order: int) -> np.ndarray:
        """Returns derivatives of (2/π)arctan(ax) with a = π/2."""
        a = math.pi / 2
        q = 1.0 + (a * x)**2
        if order == 0:
            return np.arctan(a * x) / a
        elif order == 1:
            return 1.0 / q
        elif order == 2:
            return -2.0 * a**2 * x / q**2
        return -2.0 * a**2 * (1.0 - 3.0 * (a * x)**2) / q**3


@dataclasses.dataclass
class RawArctanKernel(TransferKernel):
    """Plain (2/π)arctan(x) kernel, whose slope at the origin is 2/π."""

    family: ClassVar[str] = 'raw_arctan'

    def _positive(self, x: np.ndarray, order: int) -> np.ndarray:
        """Returns derivatives of (2/π)arctan(x)."""
        scale = 2.0 / math.pi
        q = 1.0 + x**2
        if order == 0:
            return scale * np.arctan(x)
        elif order == 1:
            return scale / q
        elif order == 2:
            return -2.0 * scale * x / q**2
        return -2.0 * scale * (1.0 - 3.0 * x**2) / q**3


@dataclasses.dataclass
class DilatedKernel(TransferKernel):
    """Kernel sH(x/s) built from another kernel H.

    The dilation keeps H'(0) and widens the transition region by s, so the
    range becomes (-s, s) and the range hypothesis fails for s > 1.

    Args:
        tolerance (float): see TransferKernel.
        kernel (Optional[TransferKernel]): kernel to dilate. Defaults to None,
            which means TanhKernel.
        scale (float): dilation factor s > 0. Defaults to 2.0.

    """
    kernel: Optional[TransferKernel] = None
    scale: float = 2.0

    family: ClassVar[str] = 'dilated'

    def __post_init__(self) -> None:
        """Validates the dilation factor."""
        super().__post_init__()
        if self.scale <= 0:
            raise ValueError('scale must be positive')
        self.kernel = self.kernel or TanhKernel()

    def _positive(self, x: np.ndarray, order: int) -> np.ndarray:
        """Returns s^(1 - order) H^(order)(x/s)."""
        factor = self.scale**(1 - order)
        return factor * self.kernel._positive(x / self.scale, order)


@dataclasses.dataclass
class TabulatedKernel(TransferKernel):
    """Kernel given by samples (x, H(x)) and monotone cubic interpolation.

    Tables covering only x >= 0 are extended by oddness. Derivatives come
    from the interpolant and are less accurate than closed forms, especially
    the third one.

    Args:
        tolerance (float): see TransferKernel. Defaults to 1e-3.
        x (Sequence[float]): increasing abscissas.
        h (Sequence[float]): kernel samples.

    """
    tolerance: float = 1e-3
    x: Sequence[float] = dataclasses.field(default_factory = list)
    h: Sequence[float] = dataclasses.field(default_factory = list)

    family: ClassVar[str] = 'tabulated'

    def __post_init__(self) -> None:
        """Builds the interpolant and its derivatives."""
        super().__post_init__()
        x = np.asarray(self.x, dtype = float)
        h = np.asarray(self.h, dtype = float)
        if x.ndim != 1 or x.size != h.size or x.size < 4:
            raise ValueError('a kernel table needs at least 4 (x, H) pairs')
        order = np.argsort(x)
        x, h = x[order], h[order]
        if x[0] >= 0:
            positive = x > 0
            x = np.concatenate([-x[positive][::-1], x])
            h = np.concatenate([-h[positive][::-1], h])
        self.x, self.h = x, h
        self._spline = interpolate.PchipInterpolator(x, h, extrapolate = False)
        self._derivatives = [self._spline] + [
            self._spline.derivative(n) for n in (1, 2, 3)]

    @property
    def domain(self) -> tuple[float, float]:
        """Returns the tabulated range."""
        return (float(self.x[0]), float(self.x[-1]))

    def _positive(self, x: np.ndarray, order: int) -> np.ndarray:
        """Returns the interpolated derivative at nonnegative 'x'."""
        low, high = self.domain
        if np.any(x > min(high, -low)):
            raise base.KernelRangeError(
                f'kernel evaluated outside its table [{low}, {high}]')
        return np.asarray(self._derivatives[order](x), dtype = float)


""" Growth Profiles """

@dataclasses.dataclass
class GrowthProfile(abc.ABC):
    """Base class for growth rates R satisfying the quadratic envelopes.

    Args:
        envelope (dict[str, float]): constants K1..K5, K0_low and K0_high of
            the bounds K3 - K4 z² <= R <= K1 - K2 z² and
            -K0_low <= R'' <= -K0_high.

    """
    envelope: dict[str, float] = dataclasses.field(default_factory = dict)

    family: ClassVar[str] = ''

    @classmethod
    def __init_subclass__(cls, *args: Any, **kwargs: Any):
        """Automatically registers concrete subclasses by family name."""
        with contextlib.suppress(AttributeError):
            super().__init_subclass__(*args, **kwargs) # type: ignore
        if cls.family:
            base.Families.register(item = cls, name = cls.family)

    """ Required Subclass Methods """

    @abc.abstractmethod
    def evaluate(self, z: ArrayLike, order: int = 0) -> ArrayLike:
        """Returns R, R' or R'' at 'z'."""

    @abc.abstractmethod
    def viable(self) -> tuple[float, float]:
        """Returns the open interval D_R where R > 0."""

    @abc.abstractmethod
    def z_mu(self, tau: float) -> float:
        """Returns the trait solving τ + R'(z) = 0."""

    """ Public Methods """

    def __call__(self, z: ArrayLike) -> ArrayLike:
        """Returns R(z)."""
        return self.evaluate(z, 0)

    def maximum(self) -> float:
        """Returns max R, attained where R' = 0."""
        return float(self.evaluate(self.z_mu(0.0), 0))


@dataclasses.dataclass
class QuadraticGrowth(GrowthProfile):
    """Growth rate R(z) = 1 - gz².

    Args:
        envelope (dict[str, float]): filled from 'g' when left empty.
        g (float): selection curvature. Defaults to 1.0.

    """
    g: float = 1.0

    family: ClassVar[str] = 'quadratic'

    def __post_init__(self) -> None:
        """Validates 'g' and fills in the exact envelope constants."""
        if self.g <= 0:
            raise ValueError('g must be positive')
        defaults = {
            'K1': 1.0, 'K2': self.g, 'K3': 1.0, 'K4': self.g, 'K5': 0.0,
            'K0_low': 2 * self.g, 'K0_high': 2 * self.g}
        self.envelope = {**defaults, **self.envelope}

    def evaluate(self, z: ArrayLike, order: int = 0) -> ArrayLike:
        """Returns R, R' or R'' at 'z'."""
        values = np.asarray(z, dtype = float)
        if order == 0:
            result = 1.0 - self.g * values**2
        elif order == 1:
            result = -2.0 * self.g * values
        elif order == 2:
            result = np.full_like(values, -2.0 * self.g)
        else:
            raise ValueError(f'order must be 0, 1 or 2, not {order}')
        return float(result) if np.ndim(z) == 0 else result

    def viable(self) -> tuple[float, float]:
        """Returns (-1/√g, 1/√g)."""
        edge = 1.0 / math.sqrt(self.g)
        return (-edge, edge)

    def z_mu(self, tau: float) -> float:
        """Returns τ/(2g)."""
        return tau / (2.0 * self.g)


@dataclasses.dataclass
class CustomGrowth(GrowthProfile):
    """Growth rate given by user callables.

    Args:
        envelope (dict[str, float]): optional envelope constants; missing
            constants skip the corresponding check.
        function (Optional[Callable]): R.
        derivative (Optional[Callable]): R'.
        second (Optional[Callable]): R''.
        bracket (tuple[float, float]): interval searched for D_R and z_μ.
            Defaults to (-100.0, 100.0).

    """
    function: Optional[Callable[[ArrayLike], ArrayLike]] = None
    derivative: Optional[Callable[[ArrayLike], ArrayLike]] = None
    second: Optional[Callable[[ArrayLike], ArrayLike]] = None
    bracket: tuple[float, float] = (-100.0, 100.0)

    family: ClassVar[str] = 'custom'

    def __post_init__(self) -> None:
        """Checks that the three callables were supplied."""
        hooks = (self.function, self.derivative, self.second)
        if not all(callable(h) for h in hooks):
            raise TypeError('CustomGrowth needs function, derivative, second')

    def evaluate(self, z: ArrayLike, order: int = 0) -> ArrayLike:
        """Returns R, R' or R'' at 'z'."""
        hooks = (self.function, self.derivative, self.second)
        if order not in (0, 1, 2):
            raise ValueError(f'order must be 0, 1 or 2, not {order}')
        result = np.asarray(hooks[order](np.asarray(z, dtype = float)))
        return float(result) if np.ndim(z) == 0 else result

    def viable(self) -> tuple[float, float]:
        """Returns D_R by bracketing the roots of R around its maximum."""
        peak = self.z_mu(0.0)
        if self.evaluate(peak) <= 0:
            raise base.HypothesisViolation('R is nowhere positive')
        low, high = self.bracket
        left = optimize.brentq(self.function, low, peak)
        right = optimize.brentq(self.function, peak, high)
        return (float(left), float(right))

    def z_mu(self, tau: float) -> float:
        """Returns the root of τ + R' inside 'bracket'."""
        low, high = self.bracket
        return float(optimize.brentq(
            lambda z: tau + self.derivative(z), low, high))


""" Factories and Loading """

def create_kernel(name: str, **kwargs: Any) -> TransferKernel:
    """Returns the kernel family registered under 'name'.

    Args:
        name (str): family name ('tanh', 'scaled_arctan', 'raw_arctan',
            'dilated', 'tabulated'). A path to an existing file loads a
            tabulated kernel.
        kwargs: passed to the family constructor.

    Returns:
        TransferKernel: the kernel.

    """
    path = pathlib.Path(name)
    if path.suffix and path.is_file():
        return load_tabulated(path)
    kernel = base.Families.build(name, **kwargs)
    if not check.is_kernel(item = kernel):
        raise TypeError(f'{name} is not a transfer kernel family')
    return kernel

def create_growth(name: str, **kwargs: Any) -> GrowthProfile:
    """Returns the growth family registered under 'name'."""
    growth = base.Families.build(name, **kwargs)
    if not check.is_growth(item = growth):
        raise TypeError(f'{name} is not a growth profile family')
    return growth

def load_tabulated(path: Union[str, pathlib.Path]) -> TabulatedKernel:
    """Reads a kernel table with one 'x, H(x)' pair per line.

    Columns may be separated by commas or whitespace; lines starting with
    '#' are skipped.

    Args:
        path (Union[str, pathlib.Path]): file to read.

    Returns:
        TabulatedKernel: the interpolated kernel.

    """
    text = pathlib.Path(path).read_text().replace(',', ' ')
    table = np.loadtxt(text.splitlines(), comments = '#', ndmin = 2)
    if table.shape[1] != 2:
        raise ValueError(f'{path} must have exactly two columns')
    logger.info('loaded kernel table %s with %d rows', path, table.shape[0])
    return TabulatedKernel(x = table[:, 0], h = table[:, 1])


""" Kernel Operations """

def kernel_eval(kernel: TransferKernel, x: float, order: int = 0) -> float:
    """Returns H, H', H'' or H''' at 'x'."""
    return kernel.evaluate(x, order)

def kernel_zH(kernel: TransferKernel) -> float:
    """Returns the positive root z_H of H''' found by bisection.

    Args:
        kernel (TransferKernel): kernel to inspect.

    Raises:
        HypothesisViolation: if H''' does not change sign on the bracket.

    Returns:
        float: z_H.

    """
    low, high = _ZH_BRACKET
    high = min(high, kernel.domain[1])
    third = lambda x: kernel.evaluate(x, 3)
    if not third(low) < 0 < third(high):
        raise base.HypothesisViolation(
            f'H\'\'\' has no sign change on ({low}, {high})')
    return float(optimize.bisect(third, low, high, xtol = 1e-15, maxiter = 200))


""" Hypothesis Verification """

class HypothesisCheck(NamedTuple):
    """Outcome of one sampled hypothesis.

    Args:
        name (str): short label of the hypothesis.
        passed (bool): whether every sample satisfied it.
        worst_z (float): sample point with the largest violation (or the
            smallest margin when it passed).
        worst_value (float): signed margin at 'worst_z'; negative values are
            violations.
        detail (str): human readable summary.

    """
    name: str
    passed: bool
    worst_z: float
    worst_value: float
    detail: str = ''


@dataclasses.dataclass
class HypothesisReport(object):
    """All sampled hypothesis outcomes for a kernel and a growth profile.

    Args:
        checks (list[HypothesisCheck]): individual outcomes.

    """
    checks: list[HypothesisCheck] = dataclasses.field(default_factory = list)

    @property
    def passed(self) -> bool:
        """Returns whether every hypothesis holds."""
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[HypothesisCheck]:
        """Returns the failed hypotheses."""
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> HypothesisCheck:
        """Returns the check labelled 'name'."""
        for item in self.checks:
            if item.name == name:
                return item
        raise KeyError(f'{name} is not a checked hypothesis')

    def lines(self) -> list[str]:
        """Returns one 'name = PASS/FAIL ...' line per hypothesis."""
        return [
            f'{c.name} = {"PASS" if c.passed else "FAIL"} '
            f'(worst z = {c.worst_z:.6g}, margin = {c.worst_value:.3e})'
            f'{" " + c.detail if c.detail else ""}'
            for c in self.checks]


def _margin_check(
    name: str,
    nodes: np.ndarray,
    margins: np.ndarray,
    detail: str = '') -> HypothesisCheck:
    """Builds a check from margins that must be nonnegative."""
    if margins.size == 0:
        return HypothesisCheck(name, True, math.nan, math.inf, detail)
    worst = int(np.argmin(margins))
    return HypothesisCheck(
        name = name,
        passed = bool(margins[worst] >= 0),
        worst_z = float(nodes[worst]),
        worst_value = float(margins[worst]),
        detail = detail)

def verify_hypotheses(
    kernel: TransferKernel,
    growth: GrowthProfile,
    nodes: np.ndarray,
    tau: Optional[float] = None) -> HypothesisReport:
    """Samples the kernel and growth hypotheses on 'nodes'.

    Failures are reported, never raised.

    Args:
        kernel (TransferKernel): transfer kernel H.
        growth (GrowthProfile): growth rate R.
        nodes (np.ndarray): sample points.
        tau (Optional[float]): transfer strength for the z_μ ∈ D_R check.
            Defaults to None, which skips that check.

    Returns:
        HypothesisReport: one entry per hypothesis.

    """
    report = HypothesisReport()
    nodes = np.asarray(nodes, dtype = float)
    low, high = kernel.domain
    x = nodes[np.abs(nodes) <= min(high, -low)]
    tol = kernel.tolerance
    h = kernel.evaluate(x, 0)
    report.checks.append(_margin_check(
        'HT.odd', x, tol - np.abs(kernel.evaluate(-x, 0) + h)))
    report.checks.append(_margin_check(
        'HT.range', x, 1.0 - np.abs(h)))
    report.checks.append(_margin_check(
        'HT.increasing', x, kernel.evaluate(x, 1)))
    h0 = kernel.evaluate(0.0, 0)
    slope = kernel.evaluate(0.0, 1)
    report.checks.append(HypothesisCheck(
        name = 'HT.origin',
        passed = abs(h0) <= tol and abs(slope - 1.0) <= tol,
        worst_z = 0.0,
        worst_value = tol - max(abs(h0), abs(slope - 1.0)),
        detail = f"H(0) = {h0:.3g}, H'(0) = {slope:.12g}"))
    positive = x[x > 0]
    report.checks.append(_margin_check(
        'HT.concave', positive, -kernel.evaluate(positive, 2)))
    try:
        z_h = kernel.z_h
    except base.HypothesisViolation as e:
        report.checks.append(HypothesisCheck(
            'HT.inflection', False, math.nan, -math.inf, str(e)))
    else:
        third = kernel.evaluate(positive, 3)
        slack = 1e-9 * max(1.0, float(np.max(np.abs(third), initial = 0.0)))
        margins = np.where(positive <= z_h, slack - third, third + slack)
        report.checks.append(_margin_check(
            'HT.inflection', positive, margins, f'z_H = {z_h:.10g}'))
    r = growth.evaluate(nodes, 0)
    constants = growth.envelope
    if {'K1', 'K2', 'K3', 'K4'} <= constants.keys():
        upper = constants['K1'] - constants['K2'] * nodes**2 - r
        lower = r - (constants['K3'] - constants['K4'] * nodes**2)
        report.checks.append(_margin_check(
            'HR1.envelope', nodes, np.minimum(upper, lower) + 1e-12))
    if {'K0_low', 'K0_high'} <= constants.keys():
        r2 = growth.evaluate(nodes, 2)
        margins = np.minimum(
            r2 + constants['K0_low'], -constants['K0_high'] - r2)
        report.checks.append(_margin_check(
            'HR1.curvature', nodes, margins + 1e-12))
    if tau is not None:
        z_mu = growth.z_mu(tau)
        left, right = growth.viable()
        report.checks.append(HypothesisCheck(
            name = 'HR2',
            passed = left < z_mu < right,
            worst_z = z_mu,
            worst_value = min(z_mu - left, right - z_mu),
            detail = f'z_mu = {z_mu:.6g}, D_R = ({left:.6g}, {right:.6g})'))
    for failure in report.failures:
        logger.warning('hypothesis %s fails: %s', failure.name, failure.detail)
    return report
