"""Structural analysis of solver states and runs.

Contents:
    PositivityReport (object): positivity sets of a fitness function.
    MonomorphismReport (object): loss of monomorphism and jumps of z̄.
    positivity_sets: splits {F > 0} into I(t), J(t) and degenerate pieces.
    zero_set: refined maxima of a renormalized u that reach 0.
    monomorphism_monitor: scans a RunRecord for multiple maxima and jumps.

To Do:


"""
from __future__ import annotations
from collections.abc import Callable
import dataclasses
import logging
import math
from typing import Any, Optional, Union

import numpy as np

from . import base
from . import check
from . import grid


logger = logging.getLogger(__name__)

Interval = tuple[float, float]


@dataclasses.dataclass
class PositivityReport(object):
    """Positivity sets of a fitness function around the dominant trait.

    Args:
        intervals (list[Interval]): sorted, disjoint sets where F > 0 that
            are at least two cells wide.
        contains_zbar (Optional[int]): index in 'intervals' of the set I(t)
            touching z̄.
        left_set_J (Optional[Interval]): the set J(t) closest to z̄ among
            those entirely left of it.
        degenerate (list[Interval]): positivity sets narrower than two cells
            (tangencies at grid resolution).
        zbar (float): dominant trait the report refers to.

    """
    intervals: list[Interval] = dataclasses.field(default_factory = list)
    contains_zbar: Optional[int] = None
    left_set_J: Optional[Interval] = None
    degenerate: list[Interval] = dataclasses.field(default_factory = list)
    zbar: float = math.nan

    @property
    def n_components(self) -> int:
        """Returns the number of nondegenerate positivity sets."""
        return len(self.intervals)

    @property
    def has_left_set(self) -> bool:
        """Returns whether J(t) is nonempty."""
        return self.left_set_J is not None

    @property
    def current_set(self) -> Optional[Interval]:
        """Returns I(t), if any."""
        if self.contains_zbar is None:
            return None
        return self.intervals[self.contains_zbar]

    def block(self) -> dict[str, Any]:
        """Returns the report as a text block mapping."""
        describe = lambda i: 'none' if i is None else f'({i[0]:.8g}, {i[1]:.8g})'
        return {
            'zbar': self.zbar,
            'n_components': self.n_components,
            'I': describe(self.current_set),
            'J': describe(self.left_set_J),
            'degenerate': ' '.join(describe(i) for i in self.degenerate) or 'none'}


def positivity_sets(
    fitness: Union[grid.Field1D, Callable[[np.ndarray], np.ndarray]],
    zbar: float,
    nodes: Optional[np.ndarray] = None,
    tolerance: float = 1e-10) -> PositivityReport:
    """Finds the sets where the fitness is positive and classifies them.

    Args:
        fitness (Union[grid.Field1D, Callable]): sampled fitness, or a
            vectorized fitness function scanned at 'nodes'.
        zbar (float): current dominant trait.
        nodes (Optional[np.ndarray]): scan points for a callable 'fitness'.
            Defaults to None.
        tolerance (float): endpoint accuracy. Defaults to 1e-10.

    Returns:
        PositivityReport: I(t), J(t) and degenerate sets.

    """
    if check.is_field(fitness):
        nodes = fitness.nodes
        samples = fitness.values
        function = lambda z: np.interp(z, nodes, samples)
    else:
        if nodes is None:
            raise ValueError('nodes are required for a fitness function')
        function = fitness
    dz = float(nodes[1] - nodes[0])
    report = PositivityReport(zbar = float(zbar))
    found = grid.positivity_intervals(
        function = function,
        nodes = nodes,
        tolerance = tolerance)
    for lo, hi in found:
        if hi - lo < 2 * dz:
            report.degenerate.append((lo, hi))
        else:
            report.intervals.append((lo, hi))
    for index, (lo, hi) in enumerate(report.intervals):
        if lo - dz <= zbar <= hi + dz:
            report.contains_zbar = index
        elif hi < zbar:
            report.left_set_J = (lo, hi)
    return report

def zero_set(
    u: grid.Field1D,
    tol: Optional[float] = None,
    dt: float = 0.0) -> list[float]:
    """Returns the refined local maxima of 'u' whose value is at least -tol.

    'u' is expected to be renormalized so that max u = 0. Flat tops count
    once, at their leftmost node.

    Args:
        u (grid.Field1D): renormalized field.
        tol (Optional[float]): admission threshold. Defaults to None, which
            means 10(Δz² + Δt).
        dt (float): time step used for the default threshold. Defaults to
            0.0.

    Returns:
        list[float]: sorted trait values.

    """
    tol = 10.0 * (u.dz**2 + dt) if tol is None else tol
    values = u.values
    left = np.concatenate([[-np.inf], values[:-1]])
    right = np.concatenate([values[1:], [-np.inf]])
    candidates = np.flatnonzero((values > left) & (values >= right))
    points = []
    for index in candidates:
        peak = grid.refine_at(u, int(index))
        if peak.value >= -tol:
            points.append(peak.z)
    return sorted(points)


@dataclasses.dataclass
class MonomorphismReport(object):
    """Observations on the number of dominant traits along a run.

    Args:
        t_m (Optional[float]): first recorded time with more than one
            maximum reaching 0 (candidate monomorphism horizon).
        jumps (list[tuple[float, float, float]]): (t, z̄ before, z̄ after)
            for every jump larger than 'threshold'.
        threshold (float): jump detection scale 5Δz·stride.
        discontinuous (bool): whether any jump was detected.
        reversals (int): jumps whose direction is opposite to the previous
            jump.
        period (float): mean time between consecutive jumps (NaN with fewer
            than two jumps).
        max_maxima (int): largest recorded number of maxima.
        t_left_set (Optional[float]): first recorded time with a nonempty
            J(t).

    """
    t_m: Optional[float] = None
    jumps: list[tuple[float, float, float]] = dataclasses.field(
        default_factory = list)
    threshold: float = math.nan
    discontinuous: bool = False
    reversals: int = 0
    period: float = math.nan
    max_maxima: int = 0
    t_left_set: Optional[float] = None

    @property
    def oscillations(self) -> int:
        """Returns the number of detected switches of the dominant trait."""
        return len(self.jumps)

    @property
    def monomorphic(self) -> bool:
        """Returns whether a single maximum persisted without jumps."""
        return self.t_m is None and not self.discontinuous

    def block(self) -> dict[str, Any]:
        """Returns the report as a text block mapping."""
        optional = lambda v: 'none' if v is None else v
        return {
            't_m': optional(self.t_m),
            'max_maxima': self.max_maxima,
            'jump_threshold': self.threshold,
            'discontinuous': self.discontinuous,
            'oscillations': self.oscillations,
            'reversals': self.reversals,
            'period': self.period,
            't_left_set': optional(self.t_left_set)}


def monomorphism_monitor(
    record: base.RunRecord,
    threshold: Optional[float] = None) -> MonomorphismReport:
    """Scans the recorded maxima counts and z̄ trajectory.

    Args:
        record (base.RunRecord): completed run.
        threshold (Optional[float]): jump detection scale. Defaults to None,
            which means 5Δz times the output stride.

    Returns:
        MonomorphismReport: the observations.

    """
    if threshold is None:
        threshold = 5.0 * record.dz * record.stride
    report = MonomorphismReport(threshold = threshold)
    if not len(record):
        return report
    times = record.times
    zbar = record.zbar
    maxima = record.column('n_maxima')
    left_set = record.column('left_set')
    finite = maxima[np.isfinite(maxima)]
    report.max_maxima = int(finite.max()) if finite.size else 0
    multiple = np.flatnonzero(maxima > 1)
    if multiple.size:
        report.t_m = float(times[multiple[0]])
    flagged = np.flatnonzero(left_set > 0)
    if flagged.size:
        report.t_left_set = float(times[flagged[0]])
    steps = np.diff(zbar)
    previous = 0.0
    for index in np.flatnonzero(np.abs(steps) > threshold):
        report.jumps.append((
            float(times[index + 1]),
            float(zbar[index]),
            float(zbar[index + 1])))
        if previous and np.sign(steps[index]) != np.sign(previous):
            report.reversals += 1
        previous = steps[index]
    report.discontinuous = bool(report.jumps)
    if len(report.jumps) > 1:
        report.period = float(np.mean(np.diff([j[0] for j in report.jumps])))
    if report.t_m is not None:
        logger.info('more than one maximum first recorded at t = %g', report.t_m)
    return report
