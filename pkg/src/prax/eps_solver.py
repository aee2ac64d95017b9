"""Time integration of the Hopf-Cole transformed ε-problem.

The unknown is u_ε = ε ln n_ε, evolving by

    ∂_t u = ε ∂²_zz u + (∂_z u)² + R(z) - ρ(t) + Φ(t, z),

with ρ = ∫ e^(u/ε) and Φ = τ ∫ (n/ρ) H(z - y) dy. Diffusion is implicit,
the Hamiltonian and the reaction terms are explicit with ρ and Φ frozen at
the start of each step.

Contents:
    EpsState (object): one time level of the ε-problem.
    Operators (object): grid quantities shared by every step of a run.
    Envelope (object): quadratic bounds that every u_ε satisfies.
    init_gaussian: Gaussian initial density, optionally mass normalized.
    evaluate: builds an EpsState from a field of u values.
    step: one IMEX step.
    choose_dt: largest stable step for a state.
    mass_residual: discrete residual of the mass balance ερ' = -ρ² + ∫nR.
    run: integrates a configuration and records its trajectory.

To Do:


"""
from __future__ import annotations
import dataclasses
import logging
import math
from typing import Optional

import numpy as np
from scipy import linalg

from . import base
from . import defaults
from . import diagnostics
from . import grid
from . import model


logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen = True)
class EpsState(object):
    """One time level of the ε-problem.

    Args:
        t (float): time.
        u (grid.Field1D): Hopf-Cole transformed density.
        log_rho (float): logarithm of the population size.
        rho (float): population size (may underflow while 'log_rho' does
            not).
        phi (grid.Field1D): transfer flux.
        weights (np.ndarray): probability weights n/ρ times quadrature
            weights.
        peak (grid.Peak): refined maximum of 'u'.
        d2u_at_zbar (float): ∂²_zz u at the peak (NaN near the boundary).

    """
    t: float
    u: grid.Field1D
    log_rho: float
    rho: float
    phi: grid.Field1D
    weights: np.ndarray
    peak: grid.Peak
    d2u_at_zbar: float

    @property
    def zbar(self) -> float:
        """Returns the refined dominant trait."""
        return self.peak.z

    @property
    def zero_sum(self) -> float:
        """Returns Σ p_i Φ(y_i), which vanishes for an odd kernel."""
        return float(np.dot(self.weights, self.phi.values))


@dataclasses.dataclass
class Operators(object):
    """Grid quantities reused by every step of a run.

    Args:
        cfg (model.ModelConfig): parameters.
        nodes (np.ndarray): grid nodes.
        growth (np.ndarray): R at the nodes.
        matrix (np.ndarray): transfer matrix H(z_j - y_i).

    """
    cfg: model.ModelConfig
    nodes: np.ndarray
    growth: np.ndarray
    matrix: np.ndarray

    @classmethod
    def from_config(cls, cfg: model.ModelConfig) -> Operators:
        """Samples the growth rate and the kernel on the config grid."""
        nodes = cfg.nodes
        return cls(
            cfg = cfg,
            nodes = nodes,
            growth = np.asarray(cfg.growth.evaluate(nodes, 0), dtype = float),
            matrix = grid.transfer_matrix(nodes = nodes, kernel = cfg.kernel))

    @property
    def dz(self) -> float:
        """Returns the grid spacing."""
        return float(self.nodes[1] - self.nodes[0])

    def fitness(self, state: EpsState) -> grid.Field1D:
        """Returns R - ρ + Φ at the nodes."""
        return state.u.like(self.growth - state.rho + state.phi.values)

    def solve_diffusion(self, rhs: np.ndarray, dt: float) -> np.ndarray:
        """Solves (I - dt ε D²) v = rhs with D² the three-point Laplacian.

        The boundary rows keep v = rhs.

        """
        ratio = dt * self.cfg.epsilon / self.dz**2
        size = rhs.size
        banded = np.empty((3, size))
        banded[0, :] = -ratio
        banded[1, :] = 1.0 + 2.0 * ratio
        banded[2, :] = -ratio
        banded[1, 0] = banded[1, -1] = 1.0
        banded[0, 1] = 0.0
        banded[2, -2] = 0.0
        return linalg.solve_banded((1, 1), banded, rhs)


@dataclasses.dataclass(frozen = True)
class Envelope(object):
    """Quadratic bounds -A₁ - B₁z² - C₁t <= u_ε <= A₂ - B₂z² + C₂t.

    Args:
        a1 (float): A₁.
        b1 (float): B̄₁ = max(B₁, √K₄/2).
        c1 (float): C₁.
        a2 (float): A₂.
        b2 (float): B̄₂ = min(B₂, √K₂/2).
        c2 (float): C₂.

    """
    a1: float
    b1: float
    c1: float
    a2: float
    b2: float
    c2: float

    @classmethod
    def from_config(
        cls,
        cfg: model.ModelConfig,
        rho_bound: float) -> Envelope:
        """Derives the bounds from the Gaussian initial datum.

        -c(z - z0)² lies between -2cz² - 2cz0² and -(c/2)z² + cz0². The
        growth constants then cap the curvatures and C₁ = C₂ = ρ_max + τ + 1.

        """
        shift = abs(_initial_shift(cfg))
        constants = cfg.growth.envelope
        b1 = 2.0 * cfg.c
        b2 = cfg.c / 2.0
        if 'K4' in constants:
            b1 = max(b1, math.sqrt(constants['K4']) / 2.0)
        if 'K2' in constants:
            b2 = min(b2, math.sqrt(constants['K2']) / 2.0)
        slope = rho_bound + cfg.tau + 1.0
        return cls(
            a1 = 2.0 * cfg.c * cfg.z0**2 + shift,
            b1 = b1,
            c1 = slope,
            a2 = cfg.c * cfg.z0**2 + shift,
            b2 = b2,
            c2 = slope)

    def margin(self, state: EpsState) -> float:
        """Returns the smallest distance of u to either bound (negative when
        a bound is violated)."""
        z = state.u.nodes
        lower = -self.a1 - self.b1 * z**2 - self.c1 * state.t
        upper = self.a2 - self.b2 * z**2 + self.c2 * state.t
        values = state.u.values
        return float(min(np.min(values - lower), np.min(upper - values)))


def _initial_shift(cfg: model.ModelConfig) -> float:
    """Returns the constant added to -c(z - z0)² in the initial datum."""
    shift = -0.5 * cfg.epsilon * math.log(cfg.epsilon)
    if cfg.normalize_mass:
        mass = cfg.growth.evaluate(cfg.z0, 0) * math.sqrt(cfg.c / math.pi)
        shift += cfg.epsilon * math.log(mass)
    return shift

def init_gaussian(
    cfg: model.ModelConfig,
    operators: Optional[Operators] = None) -> EpsState:
    """Returns the state of n_ε(0, z) = ε^(-1/2) e^(-c(z - z0)²/ε).

    With 'normalize_mass' the density is multiplied by R(z0)√(c/π), so that
    ρ(0) = R(z0) exactly instead of √(π/c).

    Args:
        cfg (model.ModelConfig): parameters.
        operators (Optional[Operators]): precomputed grid quantities.
            Defaults to None.

    Raises:
        MaladaptedInitialDatum: if z0 is outside D_R.

    Returns:
        EpsState: the initial state.

    """
    left, right = cfg.growth.viable()
    if not left < cfg.z0 < right:
        raise base.MaladaptedInitialDatum(
            f'z0 = {cfg.z0} is outside D_R = ({left:.6g}, {right:.6g})')
    operators = operators or Operators.from_config(cfg)
    shift = _initial_shift(cfg)
    u = grid.Field1D(
        values = -cfg.c * (operators.nodes - cfg.z0)**2 + shift,
        z_min = float(operators.nodes[0]),
        z_max = float(operators.nodes[-1]))
    return evaluate(u, 0.0, cfg, operators)

def evaluate(
    u: grid.Field1D,
    t: float,
    cfg: model.ModelConfig,
    operators: Optional[Operators] = None) -> EpsState:
    """Computes ρ, Φ and the peak of 'u'.

    Args:
        u (grid.Field1D): Hopf-Cole transformed density.
        t (float): time of 'u'.
        cfg (model.ModelConfig): parameters.
        operators (Optional[Operators]): precomputed grid quantities.
            Defaults to None.

    Returns:
        EpsState: the complete state.

    """
    operators = operators or Operators.from_config(cfg)
    measure = grid.softmax_measure(u, cfg.epsilon)
    phi = grid.transfer_field(
        weights = measure.weights,
        nodes = operators.nodes,
        kernel = cfg.kernel,
        tau = cfg.tau,
        matrix = operators.matrix)
    peak = grid.argmax_refined(u)
    try:
        curvature = grid.second_derivative_at(u, peak.z)
    except base.KernelRangeError:
        curvature = math.nan
    return EpsState(
        t = float(t),
        u = u,
        log_rho = measure.log_rho,
        rho = measure.rho,
        phi = phi,
        weights = measure.weights,
        peak = peak,
        d2u_at_zbar = curvature)

def step(
    state: EpsState,
    cfg: model.ModelConfig,
    dt: Optional[float] = None,
    operators: Optional[Operators] = None) -> EpsState:
    """Advances 'state' by one IMEX step.

    Args:
        state (EpsState): current state.
        cfg (model.ModelConfig): parameters.
        dt (Optional[float]): time step. Defaults to None, which uses cfg.dt.
        operators (Optional[Operators]): precomputed grid quantities.
            Defaults to None.

    Raises:
        StepRejected: if 'dt' exceeds Δz/(2 max|∂_z u|).
        NumericalBreakdown: if the update is not finite.

    Returns:
        EpsState: the state at t + dt.

    """
    dt = cfg.dt if dt is None else dt
    operators = operators or Operators.from_config(cfg)
    slope = grid.gradient_bound(state.u)
    limit = state.u.dz / (2.0 * slope) if slope > 0 else math.inf
    if dt > limit:
        raise base.StepRejected(
            f'dt = {dt:.6g} violates the Hamiltonian CFL limit {limit:.6g}',
            suggested_dt = defaults.CFL_SAFETY * limit)
    hamiltonian = grid.upwind_hamiltonian(state.u).values
    reaction = operators.growth - state.rho + state.phi.values
    explicit = state.u.values + dt * (hamiltonian + reaction)
    values = operators.solve_diffusion(explicit, dt)
    if not np.all(np.isfinite(values)):
        raise base.NumericalBreakdown(
            f'non-finite u at t = {state.t + dt:.6g}', last_good = state)
    return evaluate(state.u.like(values), state.t + dt, cfg, operators)

def choose_dt(state: EpsState, cfg: model.ModelConfig) -> float:
    """Returns min(cfg.dt, CFL bound, ε/ρ, remaining time)."""
    slope = grid.gradient_bound(state.u)
    candidates = [cfg.dt, cfg.T - state.t]
    if slope > 0:
        candidates.append(defaults.CFL_SAFETY * state.u.dz / (2.0 * slope))
    if state.rho > 0:
        candidates.append(cfg.epsilon / state.rho)
    return max(min(candidates), 0.0)

def mass_residual(
    before: EpsState,
    after: EpsState,
    dt: float,
    operators: Operators) -> float:
    """Returns |ε(ρⁿ⁺¹ - ρⁿ)/Δt + (ρⁿ)² - ρⁿ Σ p_i R(z_i)|."""
    growth = float(np.dot(before.weights, operators.growth))
    epsilon = operators.cfg.epsilon
    derivative = epsilon * (after.rho - before.rho) / dt
    return abs(derivative + before.rho**2 - before.rho * growth)

def _row(
    state: EpsState,
    operators: Operators,
    dt: float) -> dict[str, float]:
    """Returns the recorded columns for 'state'."""
    positivity = diagnostics.positivity_sets(
        fitness = operators.fitness(state),
        zbar = state.zbar)
    renormalized = state.u.shifted(-state.peak.value)
    maxima = diagnostics.zero_set(renormalized, dt = dt)
    return {
        't': state.t,
        'rho': state.rho,
        'log_rho': state.log_rho,
        'zbar': state.zbar,
        'u_max': state.peak.value,
        'd2u_zbar': state.d2u_at_zbar,
        'n_positivity_components': positivity.n_components,
        'n_maxima': len(maxima),
        'left_set': float(positivity.has_left_set)}

def run(
    cfg: model.ModelConfig,
    snapshot_stride: int = 0,
    operators: Optional[Operators] = None) -> base.RunRecord:
    """Integrates the ε-problem until T, extinction or a boundary peak.

    Args:
        cfg (model.ModelConfig): parameters.
        snapshot_stride (int): steps between stored u snapshots; the final
            state is stored too. 0 stores none. Defaults to 0.
        operators (Optional[Operators]): precomputed grid quantities.
            Defaults to None.

    Raises:
        ConfigError: if 'cfg' is invalid.
        NumericalBreakdown: if NaN or Inf appears; 'last_good' holds the
            last finite EpsState.

    Returns:
        base.RunRecord: rows every 'cfg.stride' steps plus events.

    """
    cfg.validate()
    operators = operators or Operators.from_config(cfg)
    state = init_gaussian(cfg, operators)
    record = base.RunRecord(
        solver = 'eps',
        digest = cfg.digest,
        epsilon = cfg.epsilon,
        dz = cfg.dz,
        dt = cfg.dt,
        stride = cfg.stride)
    bound = model.rho_max(cfg, state.rho)
    envelope = Envelope.from_config(cfg, bound)
    log_floor = math.log(cfg.rho_floor) + state.log_rho
    tolerance = 1e-9 * max(1.0, bound)
    zero_sum = abs(state.zero_sum)
    violations = {'rho': 0, 'envelope': 0}
    logger.info(
        'eps run %s: epsilon = %g, N = %d, T = %g',
        record.digest, cfg.epsilon, cfg.N, cfg.T)
    record.append(**_row(state, operators, cfg.dt))
    if snapshot_stride:
        record.snapshots.append((state.t, state.u))
    steps = 0
    dt = cfg.dt
    while state.t < cfg.T * (1.0 - 1e-12):
        dt = choose_dt(state, cfg)
        try:
            state_next = step(state, cfg, dt, operators)
        except base.StepRejected as e:
            logger.debug('step rejected at t = %g: %s', state.t, e)
            dt = e.suggested_dt
            state_next = step(state, cfg, dt, operators)
        except base.NumericalBreakdown as e:
            logger.error('numerical breakdown at t = %g', state.t)
            raise base.NumericalBreakdown(str(e), last_good = state) from e
        state = state_next
        steps += 1
        zero_sum = max(zero_sum, abs(state.zero_sum))
        if state.rho > bound + tolerance:
            violations['rho'] += 1
        if state.peak.boundary:
            record.status = 'boundary-argmax'
            logger.warning('peak reached the boundary at t = %g', state.t)
            break
        if state.log_rho < log_floor:
            record.status = 'extinction'
            record.events['T_rho'] = state.t
            record.events['zbar_T_rho'] = state.zbar
            record.add_block('extinction', {
                'T_rho_num': state.t,
                'zbar': state.zbar,
                'log_rho': state.log_rho})
            logger.info(
                'numerical extinction at t = %g, zbar = %g',
                state.t, state.zbar)
            break
        if steps % cfg.stride == 0:
            record.append(**_row(state, operators, dt))
            if envelope.margin(state) < -tolerance:
                if not violations['envelope']:
                    logger.warning(
                        'u leaves its quadratic envelope at t = %g', state.t)
                violations['envelope'] += 1
        if snapshot_stride and steps % snapshot_stride == 0:
            record.snapshots.append((state.t, state.u))
    else:
        record.status = 'horizon'
    if not record.rows or record.rows[-1][0] != state.t:
        record.append(**_row(state, operators, dt))
    if snapshot_stride and record.snapshots[-1][0] != state.t:
        record.snapshots.append((state.t, state.u))
    record.events.update({
        'steps': float(steps),
        'zbar_final': state.zbar,
        'rho_final': state.rho,
        'rho_max': bound,
        'max_zero_sum': zero_sum,
        'rho_bound_violations': float(violations['rho']),
        'envelope_violations': float(violations['envelope'])})
    if violations['rho']:
        logger.warning(
            'rho exceeded rho_max = %g at %d steps', bound, violations['rho'])
    logger.info(
        'eps run %s finished: %s at t = %g, zbar = %g',
        record.digest, record.status, state.t, state.zbar)
    return record
