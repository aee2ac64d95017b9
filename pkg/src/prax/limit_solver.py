"""Constrained Hamilton-Jacobi limit of the model and its trait dynamics.

The limit problem couples

    ∂_t u = (∂_z u)² + F(t, z),   F = R(z) - R(z̄) + τH(z - z̄),
    z̄' = ∂_zF(t, z̄)/|∂²_zz u(t, z̄)|,   ρ = max(R(z̄), 0),

under the constraint max u(t, ·) = u(t, z̄(t)) = 0.

Contents:
    LimitState (object): one time level of the limit problem.
    SandwichReport (object): exponential bounds on z̄ checked along a run.
    init_state: state of the initial datum -c(z - z0)².
    trait_ode_rhs: right-hand side of the trait equation.
    step: one step of the split scheme.
    run: integrates a configuration until convergence, extinction or T.
    sandwich_check: checks the exponential bounds on a completed run.

To Do:


"""
from __future__ import annotations
import dataclasses
import logging
import math
from typing import Any, Optional

import numpy as np

from . import base
from . import defaults
from . import diagnostics
from . import grid
from . import model


logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen = True)
class LimitState(object):
    """One time level of the constrained problem.

    Args:
        t (float): time.
        u (grid.Field1D): renormalized solution, max u = 0.
        zbar (float): dominant trait.
        rho (float): population size max(R(z̄), 0).
        d2u (float): ∂²_zz u at z̄.
        lambda_run (float): running minimum of |∂²_zz u(z̄)|/2.
        s_c_run (float): running maximum of |∂²_zz u(z̄)|.
        drift (float): |max u| before the last renormalization.

    """
    t: float
    u: grid.Field1D
    zbar: float
    rho: float
    d2u: float
    lambda_run: float
    s_c_run: float
    drift: float = 0.0


def _curvature(u: grid.Field1D, z: float) -> float:
    """Returns ∂²_zz u at 'z', translating range errors to BoundaryArgmax."""
    try:
        return grid.second_derivative_at(u, z)
    except base.KernelRangeError as e:
        raise base.BoundaryArgmax(
            f'peak at z = {z:.6g} reached the boundary') from e

def init_state(cfg: model.ModelConfig) -> LimitState:
    """Returns the state of u₀ = -c(z - z0)² with z̄ = z0."""
    u = grid.Field1D(
        values = -cfg.c * (cfg.nodes - cfg.z0)**2,
        z_min = -cfg.half_width,
        z_max = cfg.half_width)
    d2u = _curvature(u, cfg.z0)
    return LimitState(
        t = 0.0,
        u = u,
        zbar = float(cfg.z0),
        rho = max(float(cfg.growth.evaluate(cfg.z0, 0)), 0.0),
        d2u = d2u,
        lambda_run = abs(d2u) / 2.0,
        s_c_run = abs(d2u))

def _trait_velocity(
    u: grid.Field1D,
    zbar: float,
    cfg: model.ModelConfig) -> float:
    """Returns ∂_zF(z̄)/|∂²_zz u(z̄)| for the field 'u'."""
    curvature = _curvature(u, zbar)
    if curvature >= -defaults.CONCAVITY_FLOOR:
        raise base.ConcavityLoss(
            f'd2u = {curvature:.3e} at zbar = {zbar:.6g} is not negative')
    slope = float(model.fitness_dynamic(zbar, zbar, cfg, order = 1))
    return slope / abs(curvature)

def trait_ode_rhs(state: LimitState, cfg: model.ModelConfig) -> float:
    """Returns z̄' = (τH'(0) + R'(z̄))/|∂²_zz u(t, z̄)|.

    For quadratic growth this is 2g(μ - z̄)/|∂²_zz u(t, z̄)|.

    Args:
        state (LimitState): current state.
        cfg (model.ModelConfig): parameters.

    Raises:
        ConcavityLoss: if ∂²_zz u(z̄) >= -1e-8.
        BoundaryArgmax: if z̄ is within two cells of the boundary.

    Returns:
        float: the trait velocity.

    """
    return _trait_velocity(state.u, state.zbar, cfg)

def step(
    state: LimitState,
    cfg: model.ModelConfig,
    dt: Optional[float] = None) -> LimitState:
    """Advances the constrained problem by one step.

    z̄ moves by an explicit midpoint step of the trait equation, u by a Heun
    step of the ENO upwind Hamiltonian with F(·, z̄) frozen at the midpoint.
    u is then shifted so that its maximum is 0.

    Args:
        state (LimitState): current state.
        cfg (model.ModelConfig): parameters.
        dt (Optional[float]): time step. Defaults to None, which uses cfg.dt.

    Raises:
        StepRejected: if 'dt' exceeds Δz/(2 max|∂_z u|).
        ConcavityLoss: if the peak is no longer strictly concave.
        BoundaryArgmax: if the peak reaches the boundary.

    Returns:
        LimitState: the state at t + dt.

    """
    dt = cfg.dt if dt is None else dt
    slope = grid.gradient_bound(state.u)
    limit = state.u.dz / (2.0 * slope) if slope > 0 else math.inf
    if dt > limit:
        raise base.StepRejected(
            f'dt = {dt:.6g} violates the Hamiltonian CFL limit {limit:.6g}',
            suggested_dt = defaults.ENO_CFL * limit)
    first = trait_ode_rhs(state, cfg)
    middle = state.zbar + 0.5 * dt * first
    zbar = state.zbar + dt * _trait_velocity(state.u, middle, cfg)
    fitness = model.fitness_dynamic(state.u.nodes, middle, cfg)
    predictor = state.u.values + dt * (
        grid.eno_hamiltonian(state.u).values + fitness)
    corrector = predictor + dt * (
        grid.eno_hamiltonian(state.u.like(predictor)).values + fitness)
    advanced = state.u.like(0.5 * (state.u.values + corrector))
    peak = grid.argmax_refined(advanced)
    if peak.boundary:
        raise base.BoundaryArgmax(
            f'maximum of u at the boundary (z = {peak.z:.6g})')
    u = advanced.shifted(-peak.value)
    d2u = _curvature(u, zbar)
    return LimitState(
        t = state.t + dt,
        u = u,
        zbar = float(zbar),
        rho = max(float(cfg.growth.evaluate(zbar, 0)), 0.0),
        d2u = d2u,
        lambda_run = min(state.lambda_run, abs(d2u) / 2.0),
        s_c_run = max(state.s_c_run, abs(d2u)),
        drift = abs(peak.value))

def _row(
    state: LimitState,
    cfg: model.ModelConfig,
    dt: float) -> dict[str, float]:
    """Returns the recorded columns for 'state'."""
    positivity = diagnostics.positivity_sets(
        fitness = lambda z: model.fitness_dynamic(z, state.zbar, cfg),
        zbar = state.zbar,
        nodes = state.u.nodes)
    maxima = diagnostics.zero_set(state.u, dt = dt)
    return {
        't': state.t,
        'rho': state.rho,
        'log_rho': math.log(state.rho) if state.rho > 0 else -math.inf,
        'zbar': state.zbar,
        'u_max': float(np.max(state.u.values)),
        'd2u_zbar': state.d2u,
        'n_positivity_components': positivity.n_components,
        'n_maxima': len(maxima),
        'left_set': float(positivity.has_left_set)}

def _choose_dt(state: LimitState, cfg: model.ModelConfig) -> float:
    """Returns min(cfg.dt, CFL bound, remaining time)."""
    slope = grid.gradient_bound(state.u)
    candidates = [cfg.dt, cfg.T - state.t]
    if slope > 0:
        candidates.append(defaults.ENO_CFL * state.u.dz / (2.0 * slope))
    return max(min(candidates), 0.0)

def _selection_rate(cfg: model.ModelConfig) -> float:
    """Returns g, or -R''(μ)/2 for a general growth profile."""
    return -0.5 * float(cfg.growth.evaluate(cfg.mu, 2))

def run(
    cfg: model.ModelConfig,
    snapshot_stride: int = 0,
    stop_on_convergence: bool = True) -> base.RunRecord:
    """Integrates the constrained problem.

    The run stops when |z̄ - μ| < tol_converge, when z̄ leaves D_R (the
    extinction time T_ρ is located by linear interpolation of R(z̄)), when
    the peak loses concavity or reaches the boundary, or at T. Initial
    traits above μ whose fitness has two positivity sets are refused with
    the 'open-regime' status.

    Args:
        cfg (model.ModelConfig): parameters.
        snapshot_stride (int): steps between stored u snapshots; the final
            state is stored too. 0 stores none. Defaults to 0.
        stop_on_convergence (bool): whether to stop once |z̄ - μ| is below
            tolerance. Defaults to True.

    Raises:
        ConfigError: if 'cfg' is invalid.

    Returns:
        base.RunRecord: rows every 'cfg.stride' steps, events and the
            sandwich block.

    """
    cfg.validate()
    record = base.RunRecord(
        solver = 'limit',
        digest = cfg.digest,
        dz = cfg.dz,
        dt = cfg.dt,
        stride = cfg.stride)
    mu = cfg.mu
    try:
        regime = model.classify_regime(cfg)
    except (base.HypothesisViolation, base.DegenerateKernelError) as e:
        logger.warning('thresholds unavailable: %s', e)
        regime = None
    state = init_state(cfg)
    record.events.update({
        'mu': mu,
        'g': _selection_rate(cfg),
        'zbar0': state.zbar})
    record.append(**_row(state, cfg, cfg.dt))
    if cfg.z0 > mu:
        kind = model.classify_initial_fitness_type(cfg)
        record.add_block('initial', {'fitness_type': kind})
        if kind == 'type-two':
            record.status = 'open-regime'
            logger.warning(
                'z0 = %g > mu = %g with two positivity sets; not simulated',
                cfg.z0, mu)
            return record
    logger.info('limit run %s: mu = %g, z0 = %g', record.digest, mu, cfg.z0)
    edge = cfg.extinction_trait
    drift = 0.0
    steps = 0
    dt = cfg.dt
    converged = False
    if snapshot_stride:
        record.snapshots.append((state.t, state.u))
    while state.t < cfg.T * (1.0 - 1e-12):
        dt = _choose_dt(state, cfg)
        try:
            try:
                after = step(state, cfg, dt)
            except base.StepRejected as e:
                logger.debug('step rejected at t = %g: %s', state.t, e)
                dt = e.suggested_dt
                after = step(state, cfg, dt)
        except base.ConcavityLoss as e:
            record.status = 'concavity-loss'
            record.events['T_m'] = state.t
            logger.warning('%s at t = %g', e, state.t)
            break
        except base.BoundaryArgmax as e:
            record.status = 'boundary-argmax'
            logger.warning('%s at t = %g', e, state.t)
            break
        before, state = state, after
        steps += 1
        drift = max(drift, state.drift)
        growth_before = float(cfg.growth.evaluate(before.zbar, 0))
        growth_after = float(cfg.growth.evaluate(state.zbar, 0))
        if growth_before > 0 > growth_after:
            fraction = growth_before / (growth_before - growth_after)
            t_rho = before.t + fraction * (state.t - before.t)
            z_rho = before.zbar + fraction * (state.zbar - before.zbar)
            record.status = 'extinction'
            record.events.update({'T_rho': t_rho, 'zbar_T_rho': z_rho})
            record.add_block('extinction', {
                'T_rho': t_rho,
                'zbar': z_rho,
                'predicted_zbar': edge})
            logger.info('extinction at T_rho = %g, zbar = %g', t_rho, z_rho)
            break
        if steps % cfg.stride == 0:
            record.append(**_row(state, cfg, dt))
            if 'T_m' not in record.events and record.final['n_maxima'] > 1:
                record.events['T_m'] = state.t
        if snapshot_stride and steps % snapshot_stride == 0:
            record.snapshots.append((state.t, state.u))
        converged = abs(state.zbar - mu) < cfg.tol_converge
        if converged and stop_on_convergence:
            break
    if record.rows[-1][0] != state.t:
        record.append(**_row(state, cfg, dt))
    if snapshot_stride and record.snapshots[-1][0] != state.t:
        record.snapshots.append((state.t, state.u))
    if record.status == 'running':
        record.status = _terminal_status(converged, regime)
    if record.status in ('converged', 'asymptotic-extinction'):
        record.add_block('converged', {
            't': state.t,
            'zbar': state.zbar,
            'mu': mu,
            'gap': abs(state.zbar - mu),
            'rho': state.rho})
    record.events.update({
        'steps': float(steps),
        'zbar_final': state.zbar,
        'rho_final': state.rho,
        'lambda': state.lambda_run,
        'S_c': state.s_c_run,
        'max_drift': drift})
    if record.status != 'open-regime':
        report = sandwich_check(record)
        record.add_block('sandwich', report.block())
    logger.info(
        'limit run %s finished: %s at t = %g, zbar = %g',
        record.digest, record.status, state.t, state.zbar)
    return record

def _terminal_status(
    converged: bool,
    regime: Optional[model.RegimeReport]) -> str:
    """Returns the status of a run that stopped without an event."""
    if regime is not None and regime.regime == 'suicide-asymptotic':
        return 'asymptotic-extinction'
    return 'converged' if converged else 'horizon'


@dataclasses.dataclass
class SandwichReport(object):
    """Exponential bounds on z̄ along a run.

    The slow bound uses the rate 2g/S_c and the fast bound the rate g/λ,
    with λ and S_c the measured curvature extrema at the peak.

    Args:
        rows (np.ndarray): columns t, lower, zbar, upper, margin_lo,
            margin_hi.
        tolerance (float): admitted violation 2Δz + 10Δt.
        lambda_ (float): λ used for the fast bound.
        s_c (float): S_c used for the slow bound.

    """
    rows: np.ndarray
    tolerance: float
    lambda_: float
    s_c: float

    @property
    def worst_lower(self) -> float:
        """Returns the smallest margin to the lower bound."""
        return float(np.min(self.rows[:, 4])) if self.rows.size else math.inf

    @property
    def worst_upper(self) -> float:
        """Returns the smallest margin to the upper bound."""
        return float(np.min(self.rows[:, 5])) if self.rows.size else math.inf

    @property
    def passed(self) -> bool:
        """Returns whether both bounds hold within tolerance."""
        return min(self.worst_lower, self.worst_upper) >= -self.tolerance

    def block(self) -> dict[str, Any]:
        """Returns the report as a text block mapping."""
        return {
            'passed': self.passed,
            'lambda': self.lambda_,
            'S_c': self.s_c,
            'tolerance': self.tolerance,
            'worst_margin_lo': self.worst_lower,
            'worst_margin_hi': self.worst_upper}


def sandwich_check(record: base.RunRecord) -> SandwichReport:
    """Checks μ - (μ - z̄(0))e^(-(2g/S_c)t) and μ - (μ - z̄(0))e^(-(g/λ)t)
    bracket z̄(t) at every recorded time.

    Args:
        record (base.RunRecord): completed limit run.

    Returns:
        SandwichReport: bounds and margins; violations are not raised.

    """
    events = record.events
    mu, rate, start = events['mu'], events['g'], events['zbar0']
    lam = events.get('lambda', math.nan)
    s_c = events.get('S_c', math.nan)
    times = record.times
    zbar = record.zbar
    slow = mu - (mu - start) * np.exp(-(2.0 * rate / s_c) * times)
    fast = mu - (mu - start) * np.exp(-(rate / lam) * times)
    lower = np.minimum(slow, fast)
    upper = np.maximum(slow, fast)
    rows = np.column_stack([
        times, lower, zbar, upper, zbar - lower, upper - zbar])
    report = SandwichReport(
        rows = rows,
        tolerance = 2.0 * record.dz + 10.0 * record.dt,
        lambda_ = lam,
        s_c = s_c)
    if not report.passed:
        logger.warning(
            'sandwich bounds violated (margins %.3e, %.3e)',
            report.worst_lower, report.worst_upper)
    return report
