"""Model parameters, fitness functions, thresholds and regime classification.

Contents:
    CONFIG_KEYS: recognized configuration keys and their types.
    ModelConfig (object): complete parameter set of a run.
    RegimeReport (object): thresholds and the predicted long time behavior.
    Scaling (NamedTuple): output of 'nondimensionalize'.
    parse_config_text: parses key=value text into a mapping.
    parse_overrides: parses '--set KEY=VALUE' strings.
    load_config: reads a config file and applies overrides.
    compute_d1: positive root of d(1 + H'(d)) - 2H(d).
    compute_mu1: monomorphism threshold d₁/(1 - H'(d₁)).
    fitness_stationary: fitness around a stationary trait μ.
    fitness_dynamic: fitness around the current dominant trait z̄.
    classify_regime: monomorphic convergence, suicide or beyond μ₁.
    classify_initial_fitness_type: one or two positivity sets of F(0, ·).
    scan_initial_types: 'classify_initial_fitness_type' over many z₀.
    transfer_inequality: μH(x) - x(μ - x/2).
    transfer_inequality_minimum: minimum of 'transfer_inequality' on a grid.
    nondimensionalize: maps physical parameters to the rescaled model.
    rho_max: upper bound on the population size.

To Do:


"""
from __future__ import annotations
from collections.abc import Iterable, Mapping, Sequence
import dataclasses
import functools
import hashlib
import logging
import math
import pathlib
from typing import Any, NamedTuple, Optional, Union

import numpy as np
from scipy import optimize

from . import base
from . import defaults
from . import diagnostics
from . import grid
from . import kernels


logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

CONFIG_KEYS: dict[str, type] = {
    'kernel': str,
    'growth': str,
    'g': float,
    'tau': float,
    'epsilon': float,
    'z0': float,
    'c': float,
    'L': float,
    'N': int,
    'dt': float,
    'T': float,
    'solver': str,
    'normalize_mass': bool,
    'stride': int,
    'tol_converge': float,
    'rho_floor': float}

REGIMES: tuple[str, ...] = (
    'monomorphic-convergence',
    'suicide-finite-time',
    'suicide-asymptotic',
    'beyond-mu1')

SOLVERS: tuple[str, ...] = ('eps', 'limit')

_TRUE = {'true', 'yes', 'on', '1'}
_FALSE = {'false', 'no', 'off', '0'}
_D1_BRACKET = (0.1, 50.0)
_D1_FLOOR = 1e-6
_BOUNDARY_TOLERANCE = 1e-12


""" Configuration """

def _default(name: str) -> dataclasses.Field:
    """Returns a dataclass field whose default is read from 'defaults'."""
    return dataclasses.field(
        default_factory = functools.partial(defaults.get_default, name))


@dataclasses.dataclass(frozen = True)
class ModelConfig(object):
    """Complete parameter set of a simulation.

    String kernel and growth names are resolved through the family registry
    when the config is created. The quadratic growth profile is always
    rebuilt from 'g' so that 'replace(g = ...)' stays consistent.

    Args:
        kernel (Union[str, kernels.TransferKernel]): transfer kernel or its
            family name (or the path of a kernel table).
        growth (Union[str, kernels.GrowthProfile]): growth profile or its
            family name.
        g (float): selection curvature.
        tau (float): transfer strength.
        epsilon (float): mutation scale.
        z0 (float): trait of the initial concentration.
        c (float): stiffness of the initial datum -c(z - z0)².
        L (Optional[float]): half-width of the domain. None selects
            max(3 edge(D_R), |z0| + 5, |μ| + 5).
        N (int): number of grid nodes.
        dt (float): nominal time step.
        T (float): time horizon.
        solver (str): 'eps' or 'limit'.
        normalize_mass (bool): whether the initial mass is set to R(z0).
        stride (int): number of steps between recorded rows.
        tol_converge (float): convergence tolerance |z̄ - μ| of the limit
            solver.
        rho_floor (float): relative mass below which the ε-solver declares
            extinction.

    """
    kernel: Union[str, kernels.TransferKernel] = _default('kernel')
    growth: Union[str, kernels.GrowthProfile] = _default('growth')
    g: float = _default('g')
    tau: float = _default('tau')
    epsilon: float = _default('epsilon')
    z0: float = _default('z0')
    c: float = _default('c')
    L: Optional[float] = None
    N: int = _default('n')
    dt: float = _default('dt')
    T: float = _default('t')
    solver: str = _default('solver')
    normalize_mass: bool = _default('normalize_mass')
    stride: int = _default('stride')
    tol_converge: float = _default('tol_converge')
    rho_floor: float = _default('rho_floor')
    kernel_label: str = dataclasses.field(
        default = '', init = False, compare = False)
    growth_label: str = dataclasses.field(
        default = '', init = False, compare = False)

    """ Initialization Methods """

    def __post_init__(self) -> None:
        """Builds the kernel and growth profile from their names."""
        kernel = self.kernel
        if isinstance(kernel, str):
            label = kernel
            try:
                kernel = kernels.create_kernel(kernel)
            except (KeyError, ValueError, OSError) as e:
                raise base.ConfigError(f'kernel: {e}') from e
        else:
            label = getattr(kernel, 'family', '') or type(kernel).__name__
        object.__setattr__(self, 'kernel', kernel)
        object.__setattr__(self, 'kernel_label', label)
        growth = self.growth
        if isinstance(growth, str) or isinstance(
                growth, kernels.QuadraticGrowth):
            name = growth if isinstance(growth, str) else 'quadratic'
            if name.lower() != 'quadratic':
                raise base.ConfigError(
                    f'growth {name} cannot be built from a config file')
            if self.g <= 0:
                raise base.ConfigError(f'g must be positive, not {self.g}')
            growth = kernels.create_growth('quadratic', g = self.g)
        label = getattr(growth, 'family', '') or type(growth).__name__
        object.__setattr__(self, 'growth', growth)
        object.__setattr__(self, 'growth_label', label)

    @classmethod
    def from_mapping(cls, settings: Mapping[str, Any]) -> ModelConfig:
        """Returns a config built from (already coerced) settings.

        Args:
            settings (Mapping[str, Any]): keys from CONFIG_KEYS.

        Raises:
            ConfigError: if a key is unknown.

        Returns:
            ModelConfig: the configuration.

        """
        unknown = set(settings) - set(CONFIG_KEYS)
        if unknown:
            raise base.ConfigError(f'unknown keys {sorted(unknown)}')
        return cls(**settings)

    """ Properties """

    @property
    def mu(self) -> float:
        """Returns the transfer-selection balance trait τ/(2g)."""
        return self.growth.z_mu(self.tau)

    @property
    def extinction_trait(self) -> float:
        """Returns the right edge of D_R (1/√g for quadratic growth)."""
        return self.growth.viable()[1]

    @property
    def half_width(self) -> float:
        """Returns L, applying the default sizing rule when it is unset."""
        if self.L is not None:
            return float(self.L)
        edge = max(abs(e) for e in self.growth.viable())
        return max(3.0 * edge, abs(self.z0) + 5.0, abs(self.mu) + 5.0)

    @property
    def dz(self) -> float:
        """Returns the grid spacing 2L/(N - 1)."""
        return 2.0 * self.half_width / (self.N - 1)

    @property
    def nodes(self) -> np.ndarray:
        """Returns the grid nodes on [-L, L]."""
        return grid.make_grid(-self.half_width, self.half_width, self.N)

    @property
    def digest(self) -> str:
        """Returns a short hash of the canonical key=value rendering."""
        text = self.to_text().encode('utf-8')
        return hashlib.sha256(text).hexdigest()[:12]

    """ Public Methods """

    def validate(self) -> ModelConfig:
        """Checks every invariant of the parameter set.

        Raises:
            ConfigError: on the first violated invariant.

        Returns:
            ModelConfig: the config itself, for chaining.

        """
        for name in ('g', 'tau', 'epsilon', 'c', 'dt', 'T', 'tol_converge',
                     'rho_floor'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise base.ConfigError(f'{name} must be positive, not {value}')
        if self.L is not None and not self.L > 0:
            raise base.ConfigError(f'L must be positive, not {self.L}')
        if self.N < grid.MINIMUM_NODES:
            raise base.ConfigError(
                f'N must be at least {grid.MINIMUM_NODES}, not {self.N}')
        if self.stride < 1:
            raise base.ConfigError('stride must be at least 1')
        if self.solver not in SOLVERS:
            raise base.ConfigError(
                f'solver must be one of {SOLVERS}, not {self.solver}')
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise base.ConfigError(f'mu = {self.mu} must be finite and positive')
        try:
            z_h = self.kernel.z_h
        except base.HypothesisViolation as e:
            raise base.ConfigError(f'kernel: {e}') from e
        if self.dz > z_h / 10:
            raise base.ConfigError(
                f'grid spacing {self.dz:.4g} does not resolve the kernel '
                f'(needs dz <= z_H/10 = {z_h / 10:.4g}); increase N')
        left, right = self.growth.viable()
        if not left < self.z0 < right:
            raise base.ConfigError(
                f'z0 = {self.z0} is outside D_R = ({left:.6g}, {right:.6g})')
        return self

    def replace(self, **changes: Any) -> ModelConfig:
        """Returns a copy with 'changes' applied."""
        return dataclasses.replace(self, **changes)

    def settings(self) -> dict[str, Any]:
        """Returns the configuration as a CONFIG_KEYS mapping."""
        values = {key: getattr(self, key) for key in CONFIG_KEYS}
        values['kernel'] = self.kernel_label
        values['growth'] = self.growth_label
        return values

    def to_text(self) -> str:
        """Returns the canonical key=value rendering used for hashing."""
        lines = []
        for key, value in self.settings().items():
            if value is None:
                continue
            if isinstance(value, bool):
                value = str(value).lower()
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f'{key} = {value}')
        return '\n'.join(lines) + '\n'


def _coerce(key: str, raw: str, line: Optional[int] = None) -> Any:
    """Converts the text 'raw' to the type of configuration 'key'."""
    kind = CONFIG_KEYS[key]
    text = raw.strip()
    if kind is bool:
        if text.lower() in _TRUE:
            return True
        if text.lower() in _FALSE:
            return False
        raise base.ConfigError(f'{key} expects a boolean, not {raw!r}', line)
    try:
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
    except ValueError as e:
        raise base.ConfigError(
            f'{key} expects {kind.__name__}, not {raw!r}', line) from e
    return text

def parse_config_text(text: str) -> dict[str, Any]:
    """Parses 'key = value' lines.

    '#' starts a comment and blank lines are skipped.

    Args:
        text (str): contents of a config file.

    Raises:
        ConfigError: with the 1-based line number of the first bad line.

    Returns:
        dict[str, Any]: coerced settings.

    """
    settings = {}
    for number, line in enumerate(text.splitlines(), start = 1):
        content = line.split('#', 1)[0].strip()
        if not content:
            continue
        if '=' not in content:
            raise base.ConfigError(f'expected key = value, got {line!r}', number)
        key, raw = (part.strip() for part in content.split('=', 1))
        if key not in CONFIG_KEYS:
            raise base.ConfigError(f'unknown key {key!r}', number)
        settings[key] = _coerce(key, raw, number)
    return settings

def parse_overrides(overrides: Iterable[str]) -> dict[str, Any]:
    """Parses 'KEY=VALUE' override strings with the config file rules."""
    settings = {}
    for item in overrides:
        if '=' not in item:
            raise base.ConfigError(f'override {item!r} is not KEY=VALUE')
        key, raw = (part.strip() for part in item.split('=', 1))
        if key not in CONFIG_KEYS:
            raise base.ConfigError(f'unknown override key {key!r}')
        settings[key] = _coerce(key, raw)
    return settings

def load_config(
    path: Optional[Union[str, pathlib.Path]] = None,
    overrides: Sequence[str] = ()) -> ModelConfig:
    """Reads and validates a configuration.

    Args:
        path (Optional[Union[str, pathlib.Path]]): config file. Defaults to
            None, which starts from the defaults.
        overrides (Sequence[str]): 'KEY=VALUE' strings applied after the
            file. Defaults to an empty tuple.

    Raises:
        ConfigError: if the file or an override cannot be parsed, or the
            resulting parameters are invalid.

    Returns:
        ModelConfig: the validated configuration.

    """
    settings = {}
    if path is not None:
        try:
            text = pathlib.Path(path).read_text()
        except OSError as e:
            raise base.ConfigError(f'cannot read {path}: {e}') from e
        settings = parse_config_text(text)
    settings.update(parse_overrides(overrides))
    config = ModelConfig.from_mapping(settings).validate()
    logger.info('loaded config %s (%s)', path or '<defaults>', config.digest)
    return config


""" Thresholds """

def _phi(kernel: kernels.TransferKernel, d: float) -> float:
    """Returns d(1 + H'(d)) - 2H(d)."""
    return d * (1.0 + kernel.evaluate(d, 1)) - 2.0 * kernel.evaluate(d, 0)

def compute_d1(
    kernel: kernels.TransferKernel,
    tol: float = defaults.ROOT_TOLERANCE) -> float:
    """Returns the positive root d₁ of φ(d) = d(1 + H'(d)) - 2H(d).

    The bracket starts at (max(z_H, 0.1), 50) and its lower end is halved
    until φ is negative there.

    Args:
        kernel (kernels.TransferKernel): transfer kernel H.
        tol (float): residual tolerance on |φ(d₁)|.

    Raises:
        HypothesisViolation: if no sign change is found, the residual is
            larger than 'tol' or φ has the wrong sign around the root.

    Returns:
        float: d₁.

    """
    try:
        z_h = kernel.z_h
    except base.HypothesisViolation:
        z_h = 0.0
    low = max(z_h, _D1_BRACKET[0])
    high = min(_D1_BRACKET[1], kernel.domain[1])
    phi = functools.partial(_phi, kernel)
    while phi(low) >= 0 and low > _D1_FLOOR:
        low /= 2
    if not (phi(low) < 0 < phi(high)):
        raise base.HypothesisViolation(
            f'd(1 + H\'(d)) - 2H(d) has no sign change on ({_D1_FLOOR}, {high})')
    d1 = float(optimize.bisect(phi, low, high, xtol = 1e-15, maxiter = 500))
    if abs(phi(d1)) >= tol:
        raise base.HypothesisViolation(
            f'residual {phi(d1):.3e} at d1 = {d1} exceeds {tol:.1e}')
    step = 1e-6 * max(1.0, d1)
    if not (phi(d1 - step) < 0 < phi(d1 + step)):
        raise base.HypothesisViolation(f'no sign change of φ across d1 = {d1}')
    if z_h and d1 <= z_h:
        logger.warning('d1 = %.10g does not exceed z_H = %.10g', d1, z_h)
    logger.debug('d1 = %.15g (residual %.2e)', d1, phi(d1))
    return d1

def compute_mu1(
    kernel: kernels.TransferKernel,
    d1: Optional[float] = None) -> float:
    """Returns the monomorphism threshold μ₁ = d₁/(1 - H'(d₁)).

    The alternate form 2H(d₁)/((1 - H'(d₁))(1 + H'(d₁))) must agree to
    1e-9.

    Args:
        kernel (kernels.TransferKernel): transfer kernel H.
        d1 (Optional[float]): precomputed d₁. Defaults to None.

    Raises:
        DegenerateKernelError: if H'(d₁) >= 1 or the two forms disagree.

    Returns:
        float: μ₁.

    """
    d1 = compute_d1(kernel) if d1 is None else d1
    slope = kernel.evaluate(d1, 1)
    if slope >= 1:
        raise base.DegenerateKernelError(
            f"H'(d1) = {slope} >= 1, so mu1 is undefined")
    mu1 = d1 / (1.0 - slope)
    alternate = 2.0 * kernel.evaluate(d1, 0) / ((1.0 - slope) * (1.0 + slope))
    if abs(mu1 - alternate) > 1e-9 * max(1.0, abs(mu1)):
        raise base.DegenerateKernelError(
            f'the two forms of mu1 disagree: {mu1} != {alternate}')
    return mu1


""" Fitness """

def fitness_stationary(z: ArrayLike, mu: float, cfg: ModelConfig) -> ArrayLike:
    """Returns F_μ(z) = R(z) - R(μ) + τH(z - μ).

    For quadratic growth this is -g(z² - μ²) + τH(z - μ).

    """
    return fitness_dynamic(z, mu, cfg)

def fitness_dynamic(
    z: ArrayLike,
    zbar: float,
    cfg: ModelConfig,
    order: int = 0) -> ArrayLike:
    """Returns the limit fitness F(t, z) or one of its z-derivatives.

    F = R(z) - R(z̄) + τH(z - z̄), the fitness once the population size has
    relaxed to R(z̄); for quadratic growth it is -g(z² - z̄²) + τH(z - z̄).

    Args:
        z (ArrayLike): trait(s).
        zbar (float): dominant trait.
        cfg (ModelConfig): parameters.
        order (int): 0 for F, 1 for ∂_zF, 2 for ∂²_zzF. Defaults to 0.

    Returns:
        ArrayLike: float for scalar 'z', array otherwise.

    """
    if order not in (0, 1, 2):
        raise ValueError(f'order must be 0, 1 or 2, not {order}')
    growth = cfg.growth.evaluate(z, order)
    transfer = cfg.tau * cfg.kernel.evaluate(np.subtract(z, zbar), order)
    if order == 0:
        growth = growth - cfg.growth.evaluate(zbar, 0)
    return growth + transfer


""" Regimes """

@dataclasses.dataclass
class RegimeReport(object):
    """Thresholds and the regime they predict.

    Args:
        mu (float): balance trait τ/(2g).
        mu1 (float): monomorphism threshold.
        d1 (float): root defining μ₁.
        regime (str): one of REGIMES.
        predicted_limit_trait (Optional[float]): limit of z̄ when the
            population survives.
        predicted_extinction_trait (Optional[float]): trait where the
            population size vanishes.
        flags (tuple[str, ...]): every regime compatible with the
            parameters; two entries on the boundary τ = 2√g.
        z_h (float): positive root of H'''.
        suicide_threshold (float): τ at which μ reaches the edge of D_R
            (2√g for quadratic growth).

    """
    mu: float
    mu1: float
    d1: float
    regime: str
    predicted_limit_trait: Optional[float] = None
    predicted_extinction_trait: Optional[float] = None
    flags: tuple[str, ...] = ()
    z_h: float = math.nan
    suicide_threshold: float = math.nan

    def lines(self) -> list[str]:
        """Returns 'key = value' lines for text reports."""
        optional = lambda v: 'none' if v is None else f'{v:.12g}'
        return [
            f'd1 = {self.d1:.12g}',
            f'mu1 = {self.mu1:.12g}',
            f'z_H = {self.z_h:.12g}',
            f'mu = {self.mu:.12g}',
            f'suicide_threshold = {self.suicide_threshold:.12g}',
            f'regime = {self.regime}',
            f'flags = {",".join(self.flags)}',
            f'predicted_limit_trait = {optional(self.predicted_limit_trait)}',
            'predicted_extinction_trait = '
            f'{optional(self.predicted_extinction_trait)}']


def _suicide_threshold(cfg: ModelConfig) -> float:
    """Returns the τ for which z_μ reaches the right edge of D_R."""
    edge = cfg.extinction_trait
    return float(-cfg.growth.evaluate(edge, 1))

def classify_regime(cfg: ModelConfig) -> RegimeReport:
    """Predicts the long time behavior of the limit problem.

    μ > μ₁ is beyond the monomorphic theory. Otherwise the population
    converges to μ when μ lies inside D_R (τ < 2√g), goes extinct in finite
    time when μ lies beyond it (τ > 2√g) and asymptotically on the boundary,
    where both the convergence and the asymptotic suicide flags are set.

    Args:
        cfg (ModelConfig): parameters.

    Returns:
        RegimeReport: the thresholds and the predicted regime.

    """
    d1 = compute_d1(cfg.kernel)
    mu1 = compute_mu1(cfg.kernel, d1)
    mu = cfg.mu
    edge = cfg.extinction_trait
    report = RegimeReport(
        mu = mu,
        mu1 = mu1,
        d1 = d1,
        regime = 'beyond-mu1',
        z_h = cfg.kernel.z_h,
        suicide_threshold = _suicide_threshold(cfg))
    if mu > mu1:
        report.flags = ('beyond-mu1',)
    elif abs(mu - edge) <= _BOUNDARY_TOLERANCE * max(1.0, abs(edge)):
        report.regime = 'suicide-asymptotic'
        report.flags = ('monomorphic-convergence', 'suicide-asymptotic')
        report.predicted_limit_trait = mu
        report.predicted_extinction_trait = edge
    elif mu < edge:
        report.regime = 'monomorphic-convergence'
        report.flags = (report.regime,)
        report.predicted_limit_trait = mu
    else:
        report.regime = 'suicide-finite-time'
        report.flags = (report.regime,)
        report.predicted_extinction_trait = edge
    logger.info(
        'regime %s (mu = %.6g, mu1 = %.6g)', report.regime, mu, mu1)
    return report

def classify_initial_fitness_type(cfg: ModelConfig) -> str:
    """Counts the positivity sets of F(0, ·) = fitness_dynamic(·, z₀).

    Sets narrower than two cells are degenerate and not counted, as in
    diagnostics.positivity_sets.

    Args:
        cfg (ModelConfig): parameters.

    Returns:
        str: 'type-one' for one set, 'type-two' for two or more and
            'degenerate' when F(0, ·) has no counted set.

    """
    sets = diagnostics.positivity_sets(
        fitness = lambda z: fitness_dynamic(z, cfg.z0, cfg),
        zbar = cfg.z0,
        nodes = cfg.nodes)
    if sets.n_components == 0:
        return 'degenerate'
    if sets.n_components == 1:
        return 'type-one'
    if sets.n_components > 2:
        logger.warning(
            'F(0, .) has %d positivity sets at z0 = %g',
            sets.n_components,
            cfg.z0)
    return 'type-two'

def scan_initial_types(
    cfg: ModelConfig,
    z0_values: Iterable[float]) -> list[tuple[float, str]]:
    """Returns (z0, type) for every initial trait in 'z0_values'."""
    return [
        (float(z0), classify_initial_fitness_type(cfg.replace(z0 = float(z0))))
        for z0 in z0_values]


""" Supplementary Relations """

def transfer_inequality(
    kernel: kernels.TransferKernel,
    x: ArrayLike,
    mu: ArrayLike) -> ArrayLike:
    """Returns μH(x) - x(μ - x/2), nonnegative for x >= 0 when μ <= μ₁."""
    x = np.asarray(x, dtype = float)
    return mu * kernel.evaluate(x, 0) - x * (mu - x / 2.0)

def transfer_inequality_minimum(
    kernel: kernels.TransferKernel,
    x_max: float = 5.0,
    size: int = 200) -> tuple[float, float, float]:
    """Minimizes 'transfer_inequality' over (0, x_max] x (0, μ₁].

    Args:
        kernel (kernels.TransferKernel): transfer kernel H.
        x_max (float): largest sampled x. Defaults to 5.0.
        size (int): samples per axis. Defaults to 200.

    Returns:
        tuple[float, float, float]: the minimum and its (x, μ) location.

    """
    mu1 = compute_mu1(kernel)
    x = np.linspace(x_max / size, x_max, size)
    mu = np.linspace(mu1 / size, mu1, size)
    xx, mm = np.meshgrid(x, mu, indexing = 'ij')
    values = transfer_inequality(kernel, xx, mm)
    i, j = np.unravel_index(int(np.argmin(values)), values.shape)
    return float(values[i, j]), float(x[i]), float(mu[j])


class Scaling(NamedTuple):
    """Rescaled parameters of the physical model.

    Args:
        epsilon (float): mutation scale √(σK²/r).
        tau (float): rescaled transfer rate τ/r.
        g (float): rescaled selection curvature g/(rK²).
        time_scale (float): factor rε mapping physical to rescaled time.
        trait_scale (float): factor K mapping physical to rescaled traits.
        density_scale (float): factor κ/(rK) mapping physical to rescaled
            densities.

    """
    epsilon: float
    tau: float
    g: float
    time_scale: float
    trait_scale: float
    density_scale: float


def nondimensionalize(
    sigma: float,
    K: float,
    kappa: float,
    r: float,
    tau: float,
    g: float) -> Scaling:
    """Maps the physical model parameters to the rescaled ones.

    Args:
        sigma (float): mutation variance.
        K (float): transfer kernel width parameter, H(K(z - y)).
        kappa (float): competition intensity.
        r (float): growth rate scale.
        tau (float): transfer rate.
        g (float): selection curvature of the physical growth rate.

    Raises:
        ConfigError: if a parameter is not positive.

    Returns:
        Scaling: rescaled parameters.

    """
    named = {
        'sigma': sigma, 'K': K, 'kappa': kappa, 'r': r, 'tau': tau, 'g': g}
    for name, value in named.items():
        if not value > 0:
            raise base.ConfigError(f'{name} must be positive, not {value}')
    epsilon = math.sqrt(sigma * K**2 / r)
    return Scaling(
        epsilon = epsilon,
        tau = tau / r,
        g = g / (r * K**2),
        time_scale = r * epsilon,
        trait_scale = K,
        density_scale = kappa / (r * K))

def rho_max(cfg: ModelConfig, rho_M: float = 1.0) -> float:
    """Returns the population size bound max(max R, ρ_M)."""
    return max(cfg.growth.maximum(), rho_M)
