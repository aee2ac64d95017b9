"""Uniform one-dimensional grid fields and the operators built on them.

Contents:
    Field1D (object): samples of a function on a uniform grid.
    Peak (NamedTuple): result of 'argmax_refined'.
    Measure (NamedTuple): result of 'softmax_measure'.
    make_grid: returns the node coordinates of a uniform grid.
    argmax_refined: parabolic refinement of the discrete maximum.
    refine_at: parabolic refinement of a local maximum.
    second_derivative_at: five-point second derivative at the nearest node.
    softmax_measure: overflow-free mass and probability weights of e^(u/ε).
    transfer_matrix: antisymmetric matrix of kernel values H(z_j - y_i).
    transfer_field: transfer flux Φ of a probability vector.
    upwind_hamiltonian: Godunov numerical Hamiltonian for p -> p².
    eno_slopes: second order ENO one-sided slopes.
    eno_hamiltonian: Godunov flux of the ENO slopes.
    gradient_bound: largest one-sided slope magnitude of a field.
    positivity_intervals: sign scan with root refinement of endpoints.

To Do:


"""
from __future__ import annotations
import dataclasses
import logging
from collections.abc import Callable
from typing import NamedTuple, Optional, TYPE_CHECKING

import numpy as np
from scipy import optimize

from . import base
from . import defaults

if TYPE_CHECKING:
    from . import kernels


logger = logging.getLogger(__name__)

MINIMUM_NODES = 8


@dataclasses.dataclass(frozen = True)
class Field1D(object):
    """Samples of a real function on a uniform grid.

    Fields are value-semantic: operations return new fields and never modify
    'values' in place.

    Args:
        values (np.ndarray): samples at the N grid nodes.
        z_min (float): leftmost node.
        z_max (float): rightmost node.

    """
    values: np.ndarray
    z_min: float
    z_max: float

    """ Initialization Methods """

    def __post_init__(self) -> None:
        """Validates the samples and freezes a private copy."""
        values = np.array(self.values, dtype = float)
        if values.ndim != 1 or values.size < MINIMUM_NODES:
            raise ValueError(
                f'a field needs at least {MINIMUM_NODES} samples on a line')
        if not self.z_max > self.z_min:
            raise ValueError('z_max must be larger than z_min')
        if not np.all(np.isfinite(values)):
            raise base.NumericalBreakdown('field values must be finite')
        values.setflags(write = False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def from_function(
        cls,
        function: Callable[[np.ndarray], np.ndarray],
        z_min: float,
        z_max: float,
        size: int) -> Field1D:
        """Samples 'function' on a uniform grid.

        Args:
            function (Callable): vectorized function of the node coordinates.
            z_min (float): leftmost node.
            z_max (float): rightmost node.
            size (int): number of nodes.

        Returns:
            Field1D: the sampled function.

        """
        nodes = make_grid(z_min, z_max, size)
        return cls(
            values = np.asarray(function(nodes), dtype = float)
            * np.ones_like(nodes),
            z_min = z_min,
            z_max = z_max)

    """ Properties """

    @property
    def size(self) -> int:
        """Returns the number of nodes."""
        return self.values.size

    @property
    def dz(self) -> float:
        """Returns the grid spacing."""
        return (self.z_max - self.z_min) / (self.size - 1)

    @property
    def nodes(self) -> np.ndarray:
        """Returns the node coordinates."""
        return make_grid(self.z_min, self.z_max, self.size)

    """ Public Methods """

    def index_of(self, z: float) -> int:
        """Returns the index of the node nearest to 'z'."""
        index = int(np.rint((z - self.z_min) / self.dz))
        return int(np.clip(index, 0, self.size - 1))

    def like(self, values: np.ndarray) -> Field1D:
        """Returns a field on the same grid holding 'values'."""
        return Field1D(values = values, z_min = self.z_min, z_max = self.z_max)

    def shifted(self, amount: float) -> Field1D:
        """Returns the field plus a constant."""
        return self.like(self.values + amount)

    def integrate(self) -> float:
        """Returns the trapezoid quadrature of the samples."""
        return float(np.dot(trapezoid_weights(self.size, self.dz), self.values))

    def interpolate(self, z: float | np.ndarray) -> float | np.ndarray:
        """Returns piecewise linear interpolation of the samples at 'z'."""
        return np.interp(z, self.nodes, self.values)


class Peak(NamedTuple):
    """Refined maximum of a field.

    Args:
        z (float): refined location of the maximum.
        value (float): refined maximum value.
        index (int): index of the discrete maximum.
        boundary (bool): whether the discrete maximum is in a boundary cell.
        flat (bool): whether the maximum is attained at several nodes.

    """
    z: float
    value: float
    index: int
    boundary: bool = False
    flat: bool = False


class Measure(NamedTuple):
    """Mass and normalized weights of the density e^(u/ε).

    Args:
        log_rho (float): natural logarithm of the mass.
        rho (float): the mass; may underflow to 0 while 'log_rho' stays
            finite.
        weights (np.ndarray): normalized integrand, summing to 1.

    """
    log_rho: float
    rho: float
    weights: np.ndarray


def make_grid(z_min: float, z_max: float, size: int) -> np.ndarray:
    """Returns 'size' uniformly spaced nodes from 'z_min' to 'z_max'."""
    return np.linspace(z_min, z_max, size)

def trapezoid_weights(size: int, dz: float) -> np.ndarray:
    """Returns trapezoid quadrature weights for a uniform grid."""
    weights = np.full(size, dz)
    weights[0] = weights[-1] = dz / 2
    return weights

def argmax_refined(field: Field1D) -> Peak:
    """Locates the maximum of 'field' to sub-grid accuracy.

    The discrete maximum is refined by the vertex of the parabola through the
    three surrounding samples, clamped to the bracketing cells. Samples within
    defaults.ARGMAX_TIE of the maximum count as ties; ties resolve to the
    leftmost index and raise the 'flat' flag.

    Args:
        field (Field1D): samples to search.

    Returns:
        Peak: refined location, value and flags.

    """
    values = field.values
    ties = np.flatnonzero(values >= np.max(values) - defaults.ARGMAX_TIE)
    index = int(ties[0])
    flat = ties.size > 1
    peak = refine_at(field, index)
    if peak.boundary:
        logger.warning(
            'maximum in boundary cell at z = %g; domain may be too small',
            peak.z)
    if flat:
        return peak._replace(
            z = float(field.nodes[index]),
            value = float(values[index]),
            flat = True)
    return peak

def refine_at(field: Field1D, index: int) -> Peak:
    """Returns the parabolic refinement of the local maximum at 'index'.

    Boundary nodes are returned unrefined with the 'boundary' flag set.

    """
    values = field.values
    top = values[index]
    if index <= 0 or index >= field.size - 1:
        return Peak(
            z = float(field.nodes[index]),
            value = float(top),
            index = index,
            boundary = True)
    left, right = values[index - 1], values[index + 1]
    curvature = left - 2 * top + right
    if curvature >= 0:
        offset = 0.0
    else:
        offset = 0.5 * (left - right) / curvature
        offset = float(np.clip(offset, -1.0, 1.0))
    z = field.nodes[index] + offset * field.dz
    value = top + 0.5 * (right - left) * offset + 0.5 * curvature * offset**2
    return Peak(z = float(z), value = float(value), index = index)

def second_derivative_at(field: Field1D, z: float) -> float:
    """Returns the five-point second derivative at the node nearest to 'z'.

    The stencil is exact for polynomials of degree four and fourth-order
    accurate for smooth samples.

    Args:
        field (Field1D): samples to differentiate.
        z (float): evaluation point.

    Raises:
        KernelRangeError: if 'z' is closer than two cells to the boundary.

    Returns:
        float: the approximate second derivative.

    """
    index = int(np.rint((z - field.z_min) / field.dz))
    if index < 2 or index > field.size - 3:
        raise base.KernelRangeError(
            f'z = {z} is within two cells of the boundary')
    v = field.values[index - 2:index + 3]
    stencil = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / 12
    return float(stencil / field.dz**2)

def softmax_measure(u: Field1D, epsilon: float) -> Measure:
    """Returns the mass of e^(u/ε) and its normalized weights.

    The integrand is evaluated after shifting by max u, so no scale of 'u'
    overflows; the mass is carried as its logarithm.

    Args:
        u (Field1D): Hopf-Cole transformed density.
        epsilon (float): mutation scale.

    Raises:
        ValueError: if 'epsilon' is not positive.

    Returns:
        Measure: log mass, mass and probability weights.

    """
    if epsilon <= 0:
        raise ValueError('epsilon must be positive')
    top = float(np.max(u.values))
    integrand = trapezoid_weights(u.size, u.dz) * np.exp(
        (u.values - top) / epsilon)
    total = float(np.sum(integrand))
    log_rho = top / epsilon + np.log(total)
    with np.errstate(over = 'ignore', under = 'ignore'):
        rho = float(np.exp(log_rho))
    return Measure(
        log_rho = float(log_rho),
        rho = rho,
        weights = integrand / total)

def transfer_matrix(
    nodes: np.ndarray,
    kernel: kernels.TransferKernel) -> np.ndarray:
    """Returns the matrix A[j, i] = H(z_j - z_i) on the grid.

    Built-in kernels are evaluated from |x| and the sign, so the matrix is
    exactly antisymmetric.

    Args:
        nodes (np.ndarray): grid nodes.
        kernel (kernels.TransferKernel): transfer kernel H.

    Returns:
        np.ndarray: (N x N) kernel values.

    """
    differences = nodes[:, np.newaxis] - nodes[np.newaxis, :]
    return np.asarray(kernel.evaluate(differences, 0), dtype = float)

def transfer_field(
    weights: np.ndarray,
    nodes: np.ndarray,
    kernel: kernels.TransferKernel,
    tau: float,
    matrix: Optional[np.ndarray] = None) -> Field1D:
    """Returns the transfer flux Φ(z_j) = τ Σ_i p_i H(z_j - y_i).

    Args:
        weights (np.ndarray): probability weights p_i (summing to 1).
        nodes (np.ndarray): grid nodes, shared by z and y.
        kernel (kernels.TransferKernel): transfer kernel H.
        tau (float): transfer strength.
        matrix (Optional[np.ndarray]): precomputed 'transfer_matrix' for the
            same nodes and kernel. Defaults to None.

    Returns:
        Field1D: the flux on the grid.

    """
    if matrix is None:
        matrix = transfer_matrix(nodes = nodes, kernel = kernel)
    return Field1D(
        values = tau * (matrix @ weights),
        z_min = float(nodes[0]),
        z_max = float(nodes[-1]))

def one_sided_slopes(u: Field1D) -> tuple[np.ndarray, np.ndarray]:
    """Returns the backward and forward differences at every node.

    At the boundaries the missing one-sided slope copies the available one.

    """
    forward_cells = np.diff(u.values) / u.dz
    backward = np.empty(u.size)
    forward = np.empty(u.size)
    backward[1:] = forward_cells
    backward[0] = forward_cells[0]
    forward[:-1] = forward_cells
    forward[-1] = forward_cells[-1]
    return backward, forward

def upwind_hamiltonian(u: Field1D) -> Field1D:
    """Returns the Godunov numerical Hamiltonian for ∂_t u = (∂_z u)².

    With backward slope p⁻ and forward slope p⁺ the flux is
    max(min(p⁻, 0)², max(p⁺, 0)²). It is nondecreasing in every neighbour
    value, reduces to (u')² on smooth monotone data and vanishes at a concave
    kink, where the viscosity solution keeps its maximum.

    Args:
        u (Field1D): field to differentiate.

    Returns:
        Field1D: numerical Hamiltonian at every node.

    """
    return u.like(_godunov_flux(*one_sided_slopes(u)))

def eno_slopes(u: Field1D) -> tuple[np.ndarray, np.ndarray]:
    """Returns second order ENO backward and forward slopes at every node.

    Each one-sided difference is corrected by half a cell times the minmod of
    the two adjacent second differences, so the slopes are exact on
    quadratics and fall back to first order where the second differences
    change sign. The boundary nodes reuse the nearest second difference.

    """
    backward, forward = one_sided_slopes(u)
    curvature = np.zeros(u.size)
    curvature[1:-1] = np.diff(u.values, 2) / u.dz**2
    curvature[0], curvature[-1] = curvature[1], curvature[-2]
    half = 0.5 * u.dz
    backward[1:] += half * _minmod(curvature[1:], curvature[:-1])
    forward[:-1] -= half * _minmod(curvature[:-1], curvature[1:])
    backward[0], forward[-1] = forward[0], backward[-1]
    return backward, forward

def eno_hamiltonian(u: Field1D) -> Field1D:
    """Returns the Godunov flux of 'eno_slopes'.

    Second order accurate on smooth data: its steady states have centered
    differences accurate to O(Δz²).

    """
    return u.like(_godunov_flux(*eno_slopes(u)))

def _godunov_flux(backward: np.ndarray, forward: np.ndarray) -> np.ndarray:
    return np.maximum(
        np.minimum(backward, 0.0)**2,
        np.maximum(forward, 0.0)**2)

def _minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    smaller = np.where(np.abs(a) < np.abs(b), a, b)
    return np.where(a * b > 0, smaller, 0.0)

def gradient_bound(u: Field1D) -> float:
    """Returns the largest one-sided slope magnitude of 'u'."""
    return float(np.max(np.abs(np.diff(u.values))) / u.dz)

def positivity_intervals(
    function: Callable[[np.ndarray], np.ndarray],
    nodes: np.ndarray,
    tolerance: float = 1e-10) -> list[tuple[float, float]]:
    """Returns the intervals where 'function' is positive.

    Signs are scanned at the nodes and every sign change is refined by
    bisection to 'tolerance'. Intervals reaching the end of the grid keep the
    end node as their endpoint.

    Args:
        function (Callable[[np.ndarray], np.ndarray]): vectorized function.
        nodes (np.ndarray): increasing scan points.
        tolerance (float): endpoint accuracy. Defaults to 1e-10.

    Returns:
        list[tuple[float, float]]: sorted, disjoint (lo, hi) pairs.

    """
    values = np.asarray(function(nodes), dtype = float)
    positive = values > 0
    if not np.any(positive):
        return []
    scalar = lambda z: float(function(np.asarray([z]))[0])
    intervals = []
    edges = np.flatnonzero(np.diff(positive.astype(int)))
    starts = [0] if positive[0] else []
    stops = []
    for index in edges:
        if positive[index + 1]:
            starts.append(index + 1)
        else:
            stops.append(index)
    if positive[-1]:
        stops.append(nodes.size - 1)
    for start, stop in zip(starts, stops):
        lo = float(nodes[start])
        if start > 0:
            lo = _refine_sign_change(
                scalar, float(nodes[start - 1]), lo, tolerance)
        hi = float(nodes[stop])
        if stop < nodes.size - 1:
            hi = _refine_sign_change(
                scalar, hi, float(nodes[stop + 1]), tolerance)
        intervals.append((lo, hi))
    return intervals

def _refine_sign_change(
    function: Callable[[float], float],
    left: float,
    right: float,
    tolerance: float) -> float:
    """Locates the sign change of 'function' between 'left' and 'right'."""
    return float(optimize.brentq(function, left, right, xtol = tolerance))
