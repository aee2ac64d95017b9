"""Plain text writers and readers for runs, snapshots and reports.

Contents:
    write_text: atomically writes a string to a path.
    format_value: renders a block value.
    record_to_text: renders a RunRecord with its header and report blocks.
    write_record: writes a RunRecord file.
    read_record: parses a file written by 'write_record'.
    field_to_text: renders one snapshot.
    write_snapshots: writes every snapshot stored in a RunRecord.
    write_dp_table: writes the slices of a DPTable as snapshot files.
    read_field: parses a snapshot file.

To Do:


"""
from __future__ import annotations
import datetime
import io
import logging
import math
import os
import pathlib
import tempfile
from collections.abc import Mapping
from typing import Any, Optional, TYPE_CHECKING

import numpy as np

from . import base
from . import grid

if TYPE_CHECKING:
    from . import oracle


logger = logging.getLogger(__name__)

_FORMAT = '%.12g'
_DELIMITER = ','


""" Files """

def write_text(text: str, path: str | pathlib.Path) -> pathlib.Path:
    """Writes 'text' to 'path' through a temporary file and os.replace.

    Args:
        text (str): contents.
        path (str | pathlib.Path): destination. Missing parent folders are
            created.

    Returns:
        pathlib.Path: the destination.

    """
    path = pathlib.Path(path)
    path.parent.mkdir(parents = True, exist_ok = True)
    handle, temporary = tempfile.mkstemp(
        prefix = f'.{path.name}.',
        dir = path.parent)
    try:
        with os.fdopen(handle, 'w', encoding = 'utf-8') as a_file:
            a_file.write(text)
        os.replace(temporary, path)
    except BaseException:
        pathlib.Path(temporary).unlink(missing_ok = True)
        raise
    logger.debug('wrote %s', path)
    return path

def format_value(value: Any) -> str:
    """Renders 'value' for a 'key = value' line."""
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return _FORMAT % value
    return str(value)

def _parse_value(text: str) -> Any:
    """Inverts 'format_value' for numbers and booleans."""
    if text in ('true', 'false'):
        return text == 'true'
    try:
        return float(text)
    except ValueError:
        return text

def _block_lines(name: str, contents: Mapping[str, Any]) -> list[str]:
    lines = [f'[{name}]']
    lines.extend(f'{k} = {format_value(v)}' for k, v in contents.items())
    return lines

def _table(rows: np.ndarray, header: str) -> str:
    buffer = io.StringIO()
    np.savetxt(
        buffer,
        rows,
        fmt = _FORMAT,
        delimiter = _DELIMITER,
        header = header,
        comments = '')
    return buffer.getvalue()


""" Run Records """

def record_to_text(
    record: base.RunRecord,
    created: Optional[str] = None) -> str:
    """Renders 'record' as header lines, a CSV table and report blocks.

    Args:
        record (base.RunRecord): run to render.
        created (Optional[str]): timestamp for the '# created' line.
            Defaults to None, which uses the current UTC time.

    Returns:
        str: the file contents.

    """
    created = created or datetime.datetime.now(
        tz = datetime.timezone.utc).isoformat(timespec = 'seconds')
    header = [
        '# prax run',
        f'# created {created}',
        f'# solver {record.solver}',
        f'# config {record.digest}',
        f'# epsilon {format_value(float(record.epsilon))}',
        f'# dz {format_value(float(record.dz))}',
        f'# dt {format_value(float(record.dt))}',
        f'# stride {record.stride}',
        f'# status {record.status}']
    text = '\n'.join(header) + '\n'
    text += _table(record.as_array(), _DELIMITER.join(record.columns))
    blocks = []
    if record.events:
        blocks.extend(_block_lines('events', record.events))
    for name, contents in record.blocks.items():
        blocks.extend(_block_lines(name, contents))
    if blocks:
        text += '\n'.join(blocks) + '\n'
    return text

def write_record(
    record: base.RunRecord,
    path: str | pathlib.Path,
    created: Optional[str] = None) -> pathlib.Path:
    """Writes 'record' to 'path' atomically."""
    return write_text(record_to_text(record, created), path)

def read_record(path: str | pathlib.Path) -> base.RunRecord:
    """Parses a RunRecord file.

    Args:
        path (str | pathlib.Path): file written by 'write_record'.

    Raises:
        ValueError: if the file is not a prax run.

    Returns:
        base.RunRecord: rows, events and blocks. Snapshots are not
            restored.

    """
    lines = pathlib.Path(path).read_text(encoding = 'utf-8').splitlines()
    if not lines or lines[0] != '# prax run':
        raise ValueError(f'{path} is not a prax run file')
    header: dict[str, str] = {}
    index = 0
    while index < len(lines) and lines[index].startswith('#'):
        key, _, value = lines[index][2:].partition(' ')
        header[key] = value
        index += 1
    columns = tuple(lines[index].split(_DELIMITER))
    if columns != base.COLUMNS:
        raise ValueError(f'unexpected columns {columns}')
    index += 1
    start = index
    while index < len(lines) and not lines[index].startswith('['):
        index += 1
    table = '\n'.join(lines[start:index])
    rows = np.loadtxt(
        io.StringIO(table),
        delimiter = _DELIMITER,
        ndmin = 2) if table.strip() else np.empty((0, len(columns)))
    record = base.RunRecord(
        solver = header.get('solver', ''),
        digest = header.get('config', ''),
        epsilon = float(header.get('epsilon', 0.0)),
        dz = float(header.get('dz', 0.0)),
        dt = float(header.get('dt', 0.0)),
        stride = int(header.get('stride', 1)),
        rows = [tuple(float(v) for v in row) for row in rows],
        status = header.get('status', 'running'))
    block = None
    for line in lines[index:]:
        if line.startswith('[') and line.endswith(']'):
            block = line[1:-1]
            continue
        if block is None or '=' not in line:
            continue
        key, _, value = line.partition('=')
        parsed = _parse_value(value.strip())
        if block == 'events':
            record.events[key.strip()] = parsed
        else:
            record.add_block(block, {key.strip(): parsed})
    return record


""" Snapshots """

def field_to_text(
    field: grid.Field1D,
    t: float,
    epsilon: float = 0.0,
    digest: str = '') -> str:
    """Renders 'field' as a header line and z,value rows."""
    header = (
        f'# t={format_value(float(t))} '
        f'epsilon={format_value(float(epsilon))} config={digest}\n'
        f'z{_DELIMITER}value')
    return _table(np.column_stack([field.nodes, field.values]), header)

def write_snapshots(
    record: base.RunRecord,
    directory: str | pathlib.Path,
    stem: str = 'snapshot') -> list[pathlib.Path]:
    """Writes each snapshot of 'record' to its own numbered file.

    Args:
        record (base.RunRecord): run with stored snapshots.
        directory (str | pathlib.Path): output folder.
        stem (str): file name prefix. Defaults to 'snapshot'.

    Returns:
        list[pathlib.Path]: written files in time order.

    """
    directory = pathlib.Path(directory)
    paths = []
    for number, (t, field) in enumerate(record.snapshots):
        text = field_to_text(field, t, record.epsilon, record.digest)
        paths.append(write_text(text, directory / f'{stem}_{number:05d}.csv'))
    return paths

def write_dp_table(
    table: oracle.DPTable,
    directory: str | pathlib.Path,
    digest: str = '',
    every: int = 1,
    stem: str = 'dp') -> list[pathlib.Path]:
    """Writes every 'every'-th slice of 'table' as a snapshot file."""
    directory = pathlib.Path(directory)
    paths = []
    indices = list(range(0, len(table.times), max(1, every)))
    if indices[-1] != len(table.times) - 1:
        indices.append(len(table.times) - 1)
    for number, index in enumerate(indices):
        text = field_to_text(table.field(index), table.times[index], 0.0, digest)
        paths.append(write_text(text, directory / f'{stem}_{number:05d}.csv'))
    return paths

def read_field(path: str | pathlib.Path) -> tuple[float, grid.Field1D]:
    """Parses a snapshot file into its time and field.

    Raises:
        ValueError: if the header line is missing.

    """
    path = pathlib.Path(path)
    with open(path, encoding = 'utf-8') as a_file:
        first = a_file.readline().strip()
    if not first.startswith('# t='):
        raise ValueError(f'{path} is not a snapshot file')
    items = dict(item.split('=', 1) for item in first[2:].split())
    data = np.loadtxt(path, delimiter = _DELIMITER, skiprows = 2, ndmin = 2)
    field = grid.Field1D(
        values = data[:, 1],
        z_min = float(data[0, 0]),
        z_max = float(data[-1, 0]))
    t = float(items.get('t', math.nan))
    return t, field
