"""Orchestration of several runs: parameter sweeps and cross-validation.

Contents:
    run_config: runs the solver named by a configuration.
    sweep: runs independent configurations, optionally in parallel.
    Gap (NamedTuple): one measured discrepancy with its tolerance.
    CrossCheckReport (object): every gap measured by 'cross_check'.
    limit_fitness_provider: F(t, z) along a completed limit run.
    cross_check: compares the limit solver with the oracles and with
        ε-runs.

To Do:
    Let cross_check reuse snapshots from an existing run file.

"""
from __future__ import annotations
from collections.abc import Callable, Sequence
import concurrent.futures
import dataclasses
import itertools
import logging
import math
from typing import Any, NamedTuple, Optional

import numpy as np
from scipy import interpolate

from . import base
from . import eps_solver
from . import grid
from . import limit_solver
from . import model
from . import oracle


logger = logging.getLogger(__name__)

EPSILONS: tuple[float, ...] = (4e-3, 2e-3, 1e-3)
USABLE: tuple[str, ...] = ('converged', 'horizon', 'asymptotic-extinction')


""" Sweeps """

def run_config(
    cfg: model.ModelConfig,
    snapshot_stride: int = 0) -> base.RunRecord:
    """Runs the solver selected by 'cfg.solver'."""
    if cfg.solver == 'eps':
        return eps_solver.run(cfg, snapshot_stride = snapshot_stride)
    return limit_solver.run(cfg, snapshot_stride = snapshot_stride)

def sweep(
    configs: Sequence[model.ModelConfig],
    workers: int = 1,
    snapshot_stride: int = 0) -> list[base.RunRecord]:
    """Runs every configuration and returns the records in input order.

    Args:
        configs (Sequence[model.ModelConfig]): independent runs.
        workers (int): worker processes. Values of 1 or less run
            sequentially in this process. Defaults to 1.
        snapshot_stride (int): passed to every solver. Defaults to 0.

    Returns:
        list[base.RunRecord]: one record per configuration.

    """
    if workers <= 1 or len(configs) <= 1:
        return [run_config(c, snapshot_stride) for c in configs]
    logger.info('sweeping %d configurations on %d workers', len(configs), workers)
    with concurrent.futures.ProcessPoolExecutor(
            max_workers = workers) as executor:
        return list(executor.map(
            run_config, configs, itertools.repeat(snapshot_stride)))


""" Cross Validation """

class Gap(NamedTuple):
    """A measured discrepancy and the tolerance it is held to."""
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        """Returns whether the gap is finite and within tolerance."""
        return math.isfinite(self.value) and self.value <= self.tolerance


@dataclasses.dataclass
class CrossCheckReport(object):
    """Results of 'cross_check'.

    Args:
        digest (str): hash of the checked configuration.
        gaps (list[Gap]): measured discrepancies.
        aborted (Optional[str]): description of the sub-run that stopped
            abnormally, if any.
        details (dict[str, Any]): auxiliary measurements (step sizes,
            statuses, number of multivalued shots).

    """
    digest: str = ''
    gaps: list[Gap] = dataclasses.field(default_factory = list)
    aborted: Optional[str] = None
    details: dict[str, Any] = dataclasses.field(default_factory = dict)

    @property
    def passed(self) -> bool:
        """Returns whether no sub-run aborted and every gap passed."""
        return self.aborted is None and all(g.passed for g in self.gaps)

    def __getitem__(self, name: str) -> Gap:
        """Returns the gap called 'name'."""
        for gap in self.gaps:
            if gap.name == name:
                return gap
        raise KeyError(f'{name} is not a measured gap')

    def add(self, name: str, value: float, tolerance: float) -> None:
        """Appends a gap."""
        self.gaps.append(Gap(name, float(value), float(tolerance)))
        return

    def block(self) -> dict[str, Any]:
        """Returns the report as a text block mapping."""
        contents: dict[str, Any] = {
            'config': self.digest,
            'passed': self.passed,
            'aborted': self.aborted or 'none'}
        for gap in self.gaps:
            contents[gap.name] = gap.value
            contents[f'{gap.name}_tolerance'] = gap.tolerance
            contents[f'{gap.name}_passed'] = gap.passed
        contents.update(self.details)
        return contents

    def lines(self) -> list[str]:
        """Returns one line per gap followed by the verdict."""
        lines = [
            f'{g.name}: {g.value:.6g} (tolerance {g.tolerance:.6g}) '
            f'{"pass" if g.passed else "FAIL"}'
            for g in self.gaps]
        if self.aborted:
            lines.append(f'aborted: {self.aborted}')
        lines.append(f'passed = {str(self.passed).lower()}')
        return lines


def limit_fitness_provider(
    record: base.RunRecord,
    cfg: model.ModelConfig) -> tuple[oracle.FitnessProvider,
                                     Callable[[float, float], float]]:
    """Returns F(t, z) and ∂_zF(t, z) with z̄(t) interpolated from 'record'."""
    times = record.times
    zbar = record.zbar

    def fitness(t: float, z: np.ndarray) -> np.ndarray:
        trait = float(np.interp(t, times, zbar))
        return np.asarray(model.fitness_dynamic(z, trait, cfg))

    def gradient(t: float, z: float) -> float:
        trait = float(np.interp(t, times, zbar))
        return float(model.fitness_dynamic(z, trait, cfg, order = 1))

    return fitness, gradient

def _renormalized(values: np.ndarray, z_min: float, z_max: float) -> np.ndarray:
    field = grid.Field1D(values = values, z_min = z_min, z_max = z_max)
    return values - grid.argmax_refined(field).value

def _dp_gap(
    cfg: model.ModelConfig,
    dp_dt: Optional[float],
    keep_every: Optional[int] = None) -> tuple[
        float, base.RunRecord, grid.Field1D, oracle.DPTable]:
    """Runs the limit solver and the dynamic program on the same grid.

    Returns:
        tuple: sup norm gap over [z̄(T) - 1, μ + 1], the limit record, its
            final u and the table.

    """
    record = limit_solver.run(
        cfg,
        snapshot_stride = max(1, int(math.ceil(cfg.T / cfg.dt))),
        stop_on_convergence = False)
    if record.status not in USABLE:
        raise base.PraxError(f'limit run stopped with status {record.status}')
    t_end, u_end = record.snapshots[-1]
    fitness, _ = limit_fitness_provider(record, cfg)
    u0 = limit_solver.init_state(cfg).u
    dt = dp_dt or cfg.dz
    table = oracle.hopf_lax_dp(
        u0 = u0,
        fitness_provider = fitness,
        dt = dt,
        T = t_end,
        keep_every = keep_every or max(1, int(round(1.0 / dt))))
    nodes = u_end.nodes
    window = (nodes >= record.events['zbar_final'] - 1.0) & (
        nodes <= cfg.mu + 1.0)
    difference = (
        _renormalized(table.values[-1], table.z_min, table.z_max)
        - _renormalized(u_end.values, u_end.z_min, u_end.z_max))
    return float(np.max(np.abs(difference[window]))), record, u_end, table

def _shoot_gradients(
    cfg: model.ModelConfig,
    record: base.RunRecord,
    u_end: grid.Field1D,
    table: oracle.DPTable,
    shots: int,
    window: float,
    seed: int) -> dict[str, float]:
    """Shoots Euler-Lagrange trajectories to random nodes at the final time.

    Trajectories start from the cubic spline of the DP slice nearest to
    T - 'window', or from the initial datum when T <= 'window'.

    """
    t_end = float(table.times[-1])
    start = int(np.argmin(np.abs(table.times - max(t_end - window, 0.0))))
    t_start = float(table.times[start])
    nodes = table.nodes
    dz = float(nodes[1] - nodes[0])
    fitness, gradient = limit_fitness_provider(record, cfg)
    if start == 0:
        u0_fn = lambda x: -cfg.c * (x - cfg.z0)**2
        u0_grad_fn = lambda x: -2.0 * cfg.c * (x - cfg.z0)
        p_max = 2.0 * cfg.c * (cfg.half_width + abs(cfg.z0))
        domain = None
    else:
        spline = interpolate.CubicSpline(nodes, table.values[start])
        u0_fn = lambda x: float(spline(x))
        u0_grad_fn = lambda x: float(spline(x, 1))
        p_max = grid.gradient_bound(table.field(start))
        domain = (table.z_min, table.z_max)
    inside = np.flatnonzero(
        (nodes >= record.events['zbar_final'] - 1.0) & (nodes <= cfg.mu + 1.0))
    inside = inside[(inside > 0) & (inside < nodes.size - 1)]
    generator = np.random.default_rng(seed)
    chosen = generator.choice(
        inside, size = min(shots, inside.size), replace = False)
    lipschitz = float(np.max(np.abs(np.diff(fitness(t_end, nodes))))) / dz
    slack = 2.0 * (dz**2 / (4.0 * table.dt) + table.dt * lipschitz)
    worst_gradient = 0.0
    worst_excess = -math.inf
    multivalued = 0
    for j in sorted(int(i) for i in chosen):
        shot = oracle.euler_lagrange_shoot(
            t = t_end - t_start,
            z = float(nodes[j]),
            fitness_provider = lambda s, z: fitness(t_start + s, z),
            u0_fn = u0_fn,
            u0_grad_fn = u0_grad_fn,
            p_max = p_max,
            steps = 200,
            fitness_gradient = lambda s, z: gradient(t_start + s, z),
            samples = 32,
            domain = domain)
        if shot.multivalued:
            multivalued += 1
            continue
        centered = (u_end.values[j + 1] - u_end.values[j - 1]) / (2.0 * dz)
        worst_gradient = max(worst_gradient, abs(shot.gradient - centered))
        worst_excess = max(worst_excess, shot.action - table.values[-1][j])
    return {
        't_start': t_start,
        'gradient': worst_gradient if multivalued < len(chosen) else math.nan,
        'excess': worst_excess,
        'slack': slack,
        'multivalued': float(multivalued),
        'shots': float(len(chosen))}

def _trait_gap(
    first: base.RunRecord,
    second: base.RunRecord) -> float:
    """Returns sup_t |z̄₁(t) - z̄₂(t)| on the times of 'first'."""
    end = min(first.times[-1], second.times[-1])
    times = first.times[first.times <= end]
    other = np.interp(times, second.times, second.zbar)
    return float(np.max(np.abs(np.interp(times, first.times, first.zbar)
                               - other)))

def cross_check(
    cfg: model.ModelConfig,
    epsilons: Sequence[float] = EPSILONS,
    shots: int = 20,
    dp_dt: Optional[float] = None,
    shoot_window: float = 4.0,
    refine: bool = False,
    workers: int = 1,
    seed: int = 0) -> CrossCheckReport:
    """Validates the limit solver against the oracles and the ε-problem.

    Gaps measured:
        dp: sup norm distance between the renormalized dynamic programming
            value and the limit solver's u(T) over [z̄(T) - 1, μ + 1], held
            to 5(Δt + Δz).
        dp_refinement: 1.5 divided by the ratio between the dp gap and the
            gap with halved Δt, Δz and DP step, held to 1 (only with
            'refine').
        gradient: largest distance between -γ̇(T)/2 from shooting and the
            centered difference of the limit solver's u(T), held to 5Δz².
        dominance: largest excess of a shot action over the DP value at T,
            held to 2(Δz²/(4Δt) + Δt Lip F) with the DP step Δt.
        eps_order: sup_t|z̄_{ε₂} - z̄_{ε₃}| minus sup_t|z̄_{ε₁} - z̄_{ε₂}|,
            which must not be positive.
        eps_limit: sup_t|z̄_ε - z̄| for the smallest ε, held to 0.05.
        drift: max|z̄(t) - μ| when z₀ = μ, held to 1e-8.

    Args:
        cfg (model.ModelConfig): parameters of the checked run.
        epsilons (Sequence[float]): three decreasing mutation scales.
            Defaults to EPSILONS.
        shots (int): number of shooting targets. Defaults to 20.
        dp_dt (Optional[float]): dynamic programming time step. Defaults to
            None, which uses Δz.
        shoot_window (float): length of the final time window the shots
            cross. Defaults to 4.0.
        refine (bool): whether to repeat the dp check on a refined grid.
            Defaults to False.
        workers (int): processes for the ε-runs. Defaults to 1.
        seed (int): seed for the shooting targets. Defaults to 0.

    Raises:
        ConfigError: if 'cfg' is invalid.

    Returns:
        CrossCheckReport: gaps, tolerances and verdicts.

    """
    cfg = cfg.replace(solver = 'limit').validate()
    report = CrossCheckReport(digest = cfg.digest)
    regime = model.classify_regime(cfg)
    report.details['regime'] = regime.regime
    if regime.regime == 'beyond-mu1':
        logger.warning('mu = %g exceeds mu1 = %g', regime.mu, regime.mu1)
    dt = dp_dt or cfg.dz
    try:
        gap, record, u_end, table = _dp_gap(cfg, dt)
    except base.PraxError as e:
        report.aborted = f'limit: {e}'
        return report
    report.details.update({
        'limit_status': record.status,
        'dp_dt': table.dt,
        'dz': cfg.dz})
    report.add('dp', gap, 5.0 * (cfg.dt + cfg.dz))
    if refine:
        finer = cfg.replace(N = 2 * cfg.N - 1, dt = cfg.dt / 2)
        try:
            finer_gap, _, _, _ = _dp_gap(
                finer, dt / 2, keep_every = max(1, int(math.ceil(cfg.T / dt))))
        except base.PraxError as e:
            report.aborted = f'refined limit: {e}'
            return report
        ratio = gap / finer_gap if finer_gap > 0 else math.inf
        report.details['dp_refined'] = finer_gap
        report.add('dp_refinement', 1.5 / ratio if ratio > 0 else math.inf, 1.0)
    found = _shoot_gradients(
        cfg, record, u_end, table, shots, shoot_window, seed)
    report.details.update({
        'shoot_t_start': found['t_start'],
        'multivalued_shots': found['multivalued']})
    report.add('gradient', found['gradient'], 5.0 * cfg.dz**2)
    report.add('dominance', max(found['excess'], 0.0), found['slack'])
    if abs(cfg.z0 - cfg.mu) < cfg.tol_converge:
        drift = float(np.max(np.abs(record.zbar - cfg.mu)))
        report.add('drift', drift, 1e-8)
    configs = [
        cfg.replace(solver = 'eps', epsilon = e)
        for e in sorted(epsilons, reverse = True)]
    try:
        runs = sweep(configs, workers = workers)
    except base.PraxError as e:
        report.aborted = f'eps: {e}'
        return report
    for e, run in zip(sorted(epsilons, reverse = True), runs):
        report.details[f'eps_status_{e:g}'] = run.status
        if run.status != 'horizon':
            report.aborted = f'eps run {e:g} stopped with status {run.status}'
    if report.aborted:
        return report
    coarse = _trait_gap(runs[0], runs[1])
    fine = _trait_gap(runs[1], runs[2])
    report.details.update({'eps_gap_coarse': coarse, 'eps_gap_fine': fine})
    report.add('eps_order', max(fine - coarse, 0.0), 0.0)
    report.add('eps_limit', _trait_gap(runs[-1], record), 0.05)
    for line in report.lines():
        logger.info('cross-check %s', line)
    return report
