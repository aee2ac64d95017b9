"""Independent evaluators used to validate the solvers.

Contents:
    FitnessProvider: signature of the fitness callables, F(t, z).
    DPTable (object): time slices of the discrete Lax-Oleinik solution.
    Shot (NamedTuple): result of 'euler_lagrange_shoot'.
    lax_oleinik_step: one step of the discrete Lax-Oleinik recursion.
    continuous_lax_oleinik_step: the same maximum over a cubic interpolant.
    hopf_lax_dp: repeated Lax-Oleinik steps from an initial field.
    integrate_rk4: classic fourth order integration of an autonomous system.
    euler_lagrange_shoot: optimal trajectory ending at (t, z) by shooting.
    mass_relaxation: closed form of the logistic relaxation 𝒥' = R - e^𝒥.

To Do:


"""
from __future__ import annotations
from collections.abc import Callable
import dataclasses
import logging
import math
from typing import NamedTuple, Optional

import numpy as np
from scipy import interpolate
from scipy import optimize

from . import base
from . import grid


logger = logging.getLogger(__name__)

FitnessProvider = Callable[[float, np.ndarray], np.ndarray]

_GRADIENT_STEP = 1e-5
_BRACKET_SAMPLES = 64
_NEWTON_ITERATIONS = 8


""" Dynamic Programming """

@dataclasses.dataclass
class DPTable(object):
    """Stored time slices of a dynamic programming solution.

    Args:
        z_min (float): leftmost node.
        z_max (float): rightmost node.
        times (np.ndarray): times of the stored slices.
        values (np.ndarray): (slices x nodes) values; the first slice is u₀.
        dt (float): time step of the recursion.

    """
    z_min: float
    z_max: float
    times: np.ndarray
    values: np.ndarray
    dt: float = math.nan

    def __post_init__(self) -> None:
        """Checks that every stored value is finite."""
        self.times = np.asarray(self.times, dtype = float)
        self.values = np.asarray(self.values, dtype = float)
        if not np.all(np.isfinite(self.values)):
            raise base.NumericalBreakdown('non-finite dynamic programming value')

    @property
    def nodes(self) -> np.ndarray:
        """Returns the grid nodes."""
        return grid.make_grid(self.z_min, self.z_max, self.values.shape[1])

    def field(self, index: int = -1) -> grid.Field1D:
        """Returns the slice at 'index' as a field."""
        return grid.Field1D(
            values = self.values[index],
            z_min = self.z_min,
            z_max = self.z_max)

    def at(self, t: float) -> grid.Field1D:
        """Returns the stored slice closest to time 't'."""
        return self.field(int(np.argmin(np.abs(self.times - t))))


def lax_oleinik_step(
    values: np.ndarray,
    dz: float,
    dt: float,
    reach: Optional[int] = None) -> np.ndarray:
    """Returns max_i [u(z_i) - (z_j - z_i)²/(4Δt)] at every node z_j.

    Args:
        values (np.ndarray): u at the nodes.
        dz (float): grid spacing.
        dt (float): time step.
        reach (Optional[int]): largest |i - j| searched. Defaults to None,
            which scans the whole grid.

    Returns:
        np.ndarray: the inf-convolution at the nodes.

    """
    return _node_search(values, dz, dt, reach)[0]

def continuous_lax_oleinik_step(
    values: np.ndarray,
    z_min: float,
    dz: float,
    dt: float,
    reach: Optional[int] = None,
    iterations: int = _NEWTON_ITERATIONS) -> np.ndarray:
    """Returns max_y [ū(y) - (z_j - y)²/(4Δt)] with ū the cubic spline of u.

    The node maximum seeds a Newton iteration for the maximizer on the
    spline. Newton updates are taken only where the objective is locally
    concave, and the refined value replaces the node value only where it is
    larger, so the result never falls below 'lax_oleinik_step'.

    Args:
        values (np.ndarray): u at the nodes.
        z_min (float): leftmost node.
        dz (float): grid spacing.
        dt (float): time step.
        reach (Optional[int]): largest |i - j| searched for the seed.
            Defaults to None, which scans the whole grid.
        iterations (int): Newton iterations. Defaults to 8.

    Returns:
        np.ndarray: the inf-convolution of the interpolant at the nodes.

    """
    best, source = _node_search(values, dz, dt, reach)
    nodes = grid.make_grid(z_min, z_min + dz * (values.size - 1), values.size)
    spline = interpolate.CubicSpline(nodes, values)
    y = nodes[source]
    for _ in range(iterations):
        slope = spline(y, 1) + (nodes - y) / (2.0 * dt)
        curvature = spline(y, 2) - 1.0 / (2.0 * dt)
        update = np.divide(
            slope, curvature, out = np.zeros_like(slope), where = curvature < 0)
        y = np.clip(y - update, nodes[0], nodes[-1])
    refined = spline(y) - (nodes - y)**2 / (4.0 * dt)
    return np.where(np.isfinite(refined), np.maximum(best, refined), best)

def _node_search(
    values: np.ndarray,
    dz: float,
    dt: float,
    reach: Optional[int]) -> tuple[np.ndarray, np.ndarray]:
    """Returns the node maximum and the index attaining it."""
    size = values.size
    reach = size - 1 if reach is None else min(reach, size - 1)
    best = values.copy()
    source = np.arange(size)
    for shift in range(1, reach + 1):
        cost = (shift * dz)**2 / (4.0 * dt)
        right = values[:-shift] - cost
        better = right > best[shift:]
        best[shift:][better] = right[better]
        source[shift:][better] = np.flatnonzero(better)
        left = values[shift:] - cost
        better = left > best[:-shift]
        best[:-shift][better] = left[better]
        source[:-shift][better] = np.flatnonzero(better) + shift
    return best, source

def hopf_lax_dp(
    u0: grid.Field1D,
    fitness_provider: FitnessProvider,
    dt: float,
    T: float,
    windowed: bool = True,
    safety: float = 2.0,
    keep_every: int = 1,
    continuous: bool = True) -> DPTable:
    """Solves ∂_t u = (∂_z u)² + F by repeated Lax-Oleinik steps.

    With 'continuous' each step is

        w = u_k + (Δt/2) F(t_k, ·),
        u_{k+1}(z_j) = max_y [w̄(y) - (z_j - y)²/(4Δt)] + (Δt/2) F(t_{k+1}, z_j),

    where w̄ is the cubic spline of w. On smooth data the error is second
    order in Δt plus O(Δz⁴/Δt) from the interpolant. Otherwise the node
    recursion u_{k+1}(z_j) = max_i [u_k(z_i) - (z_j - z_i)²/(4Δt)]
    + Δt F(t_k, z_j) is used; its error grows like T Δz²/Δt and does not
    vanish at fixed Δt/Δz. The first step scans the whole grid. Later steps
    restrict the search to |z_i - z_j| <= 2 safety Δt max|∂_z u_k| unless
    'windowed' is False.

    Args:
        u0 (grid.Field1D): initial values.
        fitness_provider (FitnessProvider): F(t, z) for arrays of z.
        dt (float): time step; adjusted so that T is a whole number of steps.
        T (float): final time.
        windowed (bool): whether to restrict the search window. Defaults to
            True.
        safety (float): window enlargement factor. Defaults to 2.0.
        keep_every (int): steps between stored slices. Defaults to 1.
        continuous (bool): whether to maximize over the interpolant.
            Defaults to True.

    Raises:
        NumericalBreakdown: if a value stops being finite.

    Returns:
        DPTable: stored slices, always including t = 0 and t = T.

    """
    if dt <= 0 or T < 0:
        raise ValueError('dt must be positive and T nonnegative')
    steps = max(1, int(round(T / dt))) if T > 0 else 0
    dt = T / steps if steps else dt
    nodes = u0.nodes
    fitness = lambda t: np.asarray(fitness_provider(t, nodes), dtype = float)
    values = np.array(u0.values, dtype = float)
    times = [0.0]
    slices = [values.copy()]
    for k in range(steps):
        reach = None
        if windowed and k > 0:
            slope = float(np.max(np.abs(np.diff(values)))) / u0.dz
            reach = max(1, math.ceil(2.0 * safety * dt * slope / u0.dz))
        t = k * dt
        if continuous:
            values = values + 0.5 * dt * fitness(t)
            _require_finite(values, t)
            values = continuous_lax_oleinik_step(
                values, u0.z_min, u0.dz, dt, reach)
            values = values + 0.5 * dt * fitness(t + dt)
        else:
            values = lax_oleinik_step(values, u0.dz, dt, reach) + (
                dt * fitness(t))
        _require_finite(values, t + dt)
        if (k + 1) % keep_every == 0 or k + 1 == steps:
            times.append((k + 1) * dt)
            slices.append(values.copy())
    logger.debug('dynamic programming: %d steps of %g', steps, dt)
    return DPTable(
        z_min = u0.z_min,
        z_max = u0.z_max,
        times = np.asarray(times),
        values = np.vstack(slices),
        dt = dt)

def _require_finite(values: np.ndarray, t: float) -> None:
    if not np.all(np.isfinite(values)):
        raise base.NumericalBreakdown(
            f'non-finite dynamic programming value at t = {t:.6g}')


""" Euler-Lagrange Trajectories """

class Shot(NamedTuple):
    """Optimal trajectory found by shooting.

    Args:
        times (np.ndarray): integration times from 0 to t.
        path (np.ndarray): γ at 'times'.
        velocity (np.ndarray): γ̇ at 'times'.
        action (float): u₀(γ(0)) + ∫ (-|γ̇|²/4 + F(s, γ)) ds.
        gradient (float): -γ̇(t)/2, the z-derivative of u at (t, z).
        multivalued (bool): whether no unique trajectory was found.
        candidates (int): number of trajectories reaching (t, z).

    """
    times: np.ndarray
    path: np.ndarray
    velocity: np.ndarray
    action: float
    gradient: float
    multivalued: bool = False
    candidates: int = 1


def integrate_rk4(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    t0: float,
    t1: float,
    steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Integrates y' = rhs(t, y) with the classic Runge-Kutta method.

    Args:
        rhs (Callable[[float, np.ndarray], np.ndarray]): right-hand side.
        y0 (np.ndarray): initial state.
        t0 (float): initial time.
        t1 (float): final time.
        steps (int): number of equal steps.

    Returns:
        tuple[np.ndarray, np.ndarray]: the times and the (steps + 1) x n
            states.

    """
    h = (t1 - t0) / steps
    times = t0 + h * np.arange(steps + 1)
    states = np.empty((steps + 1, np.size(y0)))
    y = np.asarray(y0, dtype = float)
    states[0] = y
    for j in range(steps):
        t = times[j]
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h * k1 / 2)
        k3 = rhs(t + h / 2, y + h * k2 / 2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        states[j + 1] = y
    return times, states

def _fitness_gradient(
    fitness_provider: FitnessProvider) -> Callable[[float, float], float]:
    """Returns a centered difference of F in z."""
    def gradient(s: float, z: float) -> float:
        points = np.array([z - _GRADIENT_STEP, z + _GRADIENT_STEP])
        values = np.asarray(fitness_provider(s, points), dtype = float)
        return float(values[1] - values[0]) / (2 * _GRADIENT_STEP)
    return gradient

def euler_lagrange_shoot(
    t: float,
    z: float,
    fitness_provider: FitnessProvider,
    u0_fn: Callable[[float], float],
    u0_grad_fn: Callable[[float], float],
    p_max: Optional[float] = None,
    steps: int = 400,
    fitness_gradient: Optional[Callable[[float, float], float]] = None,
    tolerance: float = 1e-12,
    samples: int = _BRACKET_SAMPLES,
    domain: Optional[tuple[float, float]] = None) -> Shot:
    """Finds the trajectory γ̈ = -2∂_zF, γ̇(0) = -2u₀'(γ(0)), γ(t) = z.

    The initial point is bracketed in [z - 2t p_max, z + 2t p_max], the
    bracket is scanned for sign changes of γ(t) - z and every sign change is
    refined with Brent's method. The bracket is clipped to 'domain' when the
    initial datum is only known there. When several trajectories reach z
    the one with the largest action is returned and 'multivalued' is set;
    when none does, the action is NaN.

    Args:
        t (float): final time.
        z (float): final point.
        fitness_provider (FitnessProvider): F(s, z) for arrays of z.
        u0_fn (Callable[[float], float]): initial datum.
        u0_grad_fn (Callable[[float], float]): its derivative.
        p_max (Optional[float]): bound on |u₀'|. Defaults to None, which
            samples |u₀'| on [z - 10, z + 10].
        steps (int): Runge-Kutta steps per trajectory. Defaults to 400.
        fitness_gradient (Optional[Callable[[float, float], float]]):
            ∂_zF(s, z). Defaults to None, which differentiates numerically.
        tolerance (float): accuracy of γ(0). Defaults to 1e-12.
        samples (int): bracket subintervals scanned for sign changes.
            Defaults to 64.
        domain (Optional[tuple[float, float]]): interval holding γ(0).
            Defaults to None, which leaves the bracket unclipped.

    Returns:
        Shot: the trajectory, its action and the implied gradient.

    """
    gradient = fitness_gradient or _fitness_gradient(fitness_provider)
    if p_max is None:
        points = np.linspace(z - 10.0, z + 10.0, 201)
        p_max = max(abs(float(u0_grad_fn(x))) for x in points)
    half = 2.0 * t * max(p_max, 1e-12)

    def system(s: float, y: np.ndarray) -> np.ndarray:
        position, velocity, _ = y
        fitness = float(np.asarray(
            fitness_provider(s, np.array([position])))[0])
        return np.array([
            velocity,
            -2.0 * gradient(s, position),
            -velocity**2 / 4.0 + fitness])

    def shoot(start: float) -> tuple[np.ndarray, np.ndarray]:
        y0 = np.array([start, -2.0 * u0_grad_fn(start), u0_fn(start)])
        return integrate_rk4(system, y0, 0.0, t, steps)

    miss = lambda start: float(shoot(start)[1][-1, 0] - z)
    lo, hi = z - half, z + half
    if domain is not None:
        lo, hi = max(lo, domain[0]), min(hi, domain[1])
    starts = np.linspace(lo, hi, samples + 1)
    misses = np.array([miss(s) for s in starts])
    roots = [float(s) for s, m in zip(starts, misses) if m == 0.0]
    for index in np.flatnonzero(np.sign(misses[:-1]) * np.sign(misses[1:]) < 0):
        roots.append(float(optimize.brentq(
            miss, starts[index], starts[index + 1], xtol = tolerance)))
    if not roots:
        logger.debug('no trajectory reaches z = %g at t = %g', z, t)
        times, states = shoot(z)
        return Shot(
            times = times,
            path = states[:, 0],
            velocity = states[:, 1],
            action = math.nan,
            gradient = math.nan,
            multivalued = True,
            candidates = 0)
    shots = [shoot(root) for root in roots]
    best = max(range(len(shots)), key = lambda i: shots[i][1][-1, 2])
    times, states = shots[best]
    return Shot(
        times = times,
        path = states[:, 0],
        velocity = states[:, 1],
        action = float(states[-1, 2]),
        gradient = float(-states[-1, 1] / 2.0),
        multivalued = len(roots) > 1,
        candidates = len(roots))


""" Mass Relaxation """

def mass_relaxation(J0: float, Rz: float, s: float) -> float:
    """Returns the solution of 𝒥' = R - e^𝒥, 𝒥(0) = J0, at time s.

    The closed form ln R + Rs - ln(R e^(-J0) + e^(Rs) - 1) is evaluated in a
    form that neither overflows for large Rs nor takes logarithms of
    negative numbers when R < 0. For |R| < 1e-12 the limit
    -ln(e^(-J0) + s) is used.

    Args:
        J0 (float): initial value, the logarithm of the initial mass.
        Rz (float): growth rate R(z).
        s (float): time.

    Raises:
        MassDomainError: if the logarithm argument is not positive.

    Returns:
        float: 𝒥(s).

    """
    if not all(math.isfinite(v) for v in (J0, Rz, s)):
        raise base.MassDomainError(
            f'non-finite arguments J0 = {J0}, Rz = {Rz}, s = {s}')
    if abs(Rz) < 1e-12:
        argument = math.exp(-J0) + s
        if argument <= 0:
            raise base.MassDomainError(f'e^(-J0) + s = {argument} <= 0')
        return -math.log(argument)
    if Rz > 0:
        argument = 1.0 + (Rz * math.exp(-J0) - 1.0) * math.exp(-Rz * s)
        if argument <= 0:
            raise base.MassDomainError(f'logarithm argument {argument} <= 0')
        return math.log(Rz) - math.log(argument)
    argument = (Rz * math.exp(-J0) + math.expm1(Rz * s)) / Rz
    if not (argument > 0 and math.isfinite(argument)):
        raise base.MassDomainError(f'logarithm argument {argument} <= 0')
    return Rz * s - math.log(argument)
