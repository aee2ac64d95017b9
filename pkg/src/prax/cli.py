"""Command line interface.

Contents:
    EXIT_OK, EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_ABORT, EXIT_FAILED: exit
        codes.
    build_parser: returns the argparse parser with every subcommand.
    attach_diagnostics: adds the monomorphism and positivity blocks to a run.
    main: entry point of the 'prax' script.

To Do:


"""
from __future__ import annotations
import argparse
from collections.abc import Sequence
import logging
import math
import pathlib
import sys
from typing import Optional

from . import base
from . import diagnostics
from . import eps_solver
from . import export
from . import kernels
from . import limit_solver
from . import model
from . import workshop


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_HYPOTHESIS = 2
EXIT_ABORT = 3
EXIT_FAILED = 4

ABORTED: tuple[str, ...] = ('boundary-argmax',)


""" Parser """

def build_parser() -> argparse.ArgumentParser:
    """Returns the parser for the 'prax' command."""
    common = argparse.ArgumentParser(add_help = False)
    common.add_argument(
        '--config',
        type = pathlib.Path,
        default = None,
        help = 'key=value configuration file (defaults apply when omitted)')
    common.add_argument(
        '--out',
        type = pathlib.Path,
        default = pathlib.Path('.'),
        help = 'output directory for run files')
    common.add_argument(
        '--set',
        dest = 'overrides',
        action = 'append',
        default = [],
        metavar = 'KEY=VALUE',
        help = 'override a configuration key; may be repeated')
    common.add_argument(
        '--snapshots',
        type = int,
        default = 0,
        metavar = 'STRIDE',
        help = 'store u every STRIDE steps (0 disables snapshots)')
    common.add_argument(
        '--verbose',
        action = 'store_true',
        help = 'log at DEBUG level')
    parser = argparse.ArgumentParser(
        prog = 'prax',
        description = (
            'Selection dynamics of a trait-structured population with '
            'horizontal transfer'))
    commands = parser.add_subparsers(dest = 'command', required = True)
    commands.add_parser(
        'thresholds',
        parents = [common],
        help = 'print d1, mu1, z_H, mu, 2 sqrt(g) and the regime')
    commands.add_parser(
        'classify',
        parents = [common],
        help = 'print the regime and the initial fitness type')
    commands.add_parser(
        'hypotheses',
        parents = [common],
        help = 'check the kernel and growth hypotheses')
    commands.add_parser(
        'simulate-eps',
        parents = [common],
        help = 'run the epsilon-problem solver')
    commands.add_parser(
        'simulate-limit',
        parents = [common],
        help = 'run the constrained limit solver')
    cross = commands.add_parser(
        'cross-check',
        parents = [common],
        help = 'compare the limit solver with the oracles and epsilon runs')
    cross.add_argument(
        '--workers',
        type = int,
        default = 1,
        help = 'processes for the three epsilon runs')
    cross.add_argument(
        '--refine',
        action = 'store_true',
        help = 'repeat the dynamic programming check on a refined grid')
    return parser


""" Helpers """

def _emit(lines: Sequence[str]) -> None:
    sys.stdout.write('\n'.join(lines) + '\n')
    return

def _hypotheses(
    cfg: model.ModelConfig,
    with_tau: bool) -> kernels.HypothesisReport:
    return kernels.verify_hypotheses(
        kernel = cfg.kernel,
        growth = cfg.growth,
        nodes = cfg.nodes,
        tau = cfg.tau if with_tau else None)

def attach_diagnostics(
    record: base.RunRecord,
    cfg: model.ModelConfig) -> base.RunRecord:
    """Adds the monomorphism block and the final positivity block.

    The positivity sets are those of the limit fitness around the final
    dominant trait.

    """
    if not len(record):
        return record
    record.add_block(
        'monomorphism', diagnostics.monomorphism_monitor(record).block())
    zbar = record.events.get('zbar_final', record.final['zbar'])
    if math.isfinite(zbar):
        report = diagnostics.positivity_sets(
            lambda z: model.fitness_dynamic(z, zbar, cfg),
            zbar = zbar,
            nodes = cfg.nodes)
        record.add_block('positivity', report.block())
    return record

def _write_run(
    record: base.RunRecord,
    cfg: model.ModelConfig,
    out: pathlib.Path) -> pathlib.Path:
    stem = f'{record.solver}_{cfg.digest}'
    path = export.write_record(record, out / f'{stem}.csv')
    if record.snapshots:
        export.write_snapshots(record, out / stem)
    return path


""" Subcommands """

def _thresholds(cfg: model.ModelConfig) -> int:
    report = _hypotheses(cfg, with_tau = False)
    if not report.passed:
        _emit(report.lines())
        return EXIT_HYPOTHESIS
    _emit(model.classify_regime(cfg).lines())
    return EXIT_OK

def _classify(cfg: model.ModelConfig) -> int:
    report = _hypotheses(cfg, with_tau = False)
    if not report.passed:
        _emit(report.lines())
        return EXIT_HYPOTHESIS
    lines = model.classify_regime(cfg).lines()
    lines.append(
        f'initial_fitness_type = {model.classify_initial_fitness_type(cfg)}')
    _emit(lines)
    return EXIT_OK

def _check_hypotheses(cfg: model.ModelConfig) -> int:
    report = _hypotheses(cfg, with_tau = True)
    _emit(report.lines())
    return EXIT_OK if report.passed else EXIT_HYPOTHESIS

def _simulate(
    cfg: model.ModelConfig,
    args: argparse.Namespace,
    solver: str) -> int:
    cfg = cfg.replace(solver = solver)
    try:
        if solver == 'eps':
            record = eps_solver.run(cfg, snapshot_stride = args.snapshots)
        else:
            record = limit_solver.run(cfg, snapshot_stride = args.snapshots)
    except base.NumericalBreakdown as e:
        logger.error('numerical abort: %s', e)
        sys.stderr.write(f'numerical abort: {e}\n')
        return EXIT_ABORT
    attach_diagnostics(record, cfg)
    path = _write_run(record, cfg, args.out)
    _emit([f'status = {record.status}', f'output = {path}'])
    return EXIT_ABORT if record.status in ABORTED else EXIT_OK

def _cross_check(cfg: model.ModelConfig, args: argparse.Namespace) -> int:
    try:
        report = workshop.cross_check(
            cfg,
            refine = args.refine,
            workers = args.workers)
    except base.NumericalBreakdown as e:
        sys.stderr.write(f'numerical abort: {e}\n')
        return EXIT_ABORT
    lines = ['[cross-check]'] + [
        f'{k} = {export.format_value(v)}' for k, v in report.block().items()]
    export.write_text(
        '\n'.join(lines) + '\n',
        args.out / f'cross_check_{cfg.digest}.txt')
    _emit(report.lines())
    if report.aborted:
        return EXIT_ABORT
    return EXIT_OK if report.passed else EXIT_FAILED


""" Entry Point """

def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parses 'argv', runs the subcommand and returns its exit code.

    Exit codes: 0 success, 1 configuration error, 2 hypothesis failure,
    3 numerical or boundary abort (or an aborted cross-check sub-run) and 4
    failed cross-check gaps.

    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level = logging.DEBUG if args.verbose else logging.WARNING,
        format = '%(levelname)s %(name)s: %(message)s')
    try:
        cfg = model.load_config(args.config, args.overrides)
        if args.snapshots < 0:
            raise base.ConfigError('--snapshots must be nonnegative')
        if args.command == 'thresholds':
            return _thresholds(cfg)
        if args.command == 'classify':
            return _classify(cfg)
        if args.command == 'hypotheses':
            return _check_hypotheses(cfg)
        if args.command == 'simulate-eps':
            return _simulate(cfg, args, 'eps')
        if args.command == 'simulate-limit':
            return _simulate(cfg, args, 'limit')
        return _cross_check(cfg, args)
    except base.ConfigError as e:
        sys.stderr.write(f'configuration error: {e}\n')
        return EXIT_CONFIG
    except (base.HypothesisViolation, base.DegenerateKernelError) as e:
        sys.stderr.write(f'hypothesis failure: {e}\n')
        return EXIT_HYPOTHESIS
