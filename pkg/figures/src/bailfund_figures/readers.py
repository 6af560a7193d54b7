"""Strict readers for the bailfund CLI's CSV contracts.

Each reader validates the header and row shape; a short or long row raises
:class:`RaggedCsv` carrying the 1-based row number.  No simulation code is
imported here -- these scripts are downstream consumers of files only.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass


class RaggedCsv(Exception):
    def __init__(self, path: str, row: int, detail: str):
        super().__init__(f"{path}: row {row}: {detail}")
        self.path = path
        self.row = row


class MissingInput(Exception):
    """Input CSV absent; the message names the CLI command that produces it."""

    def __init__(self, path: str, produce_cmd: str):
        super().__init__(f"missing input {path}; produce it with: {produce_cmd}")
        self.path = path
        self.produce_cmd = produce_cmd


@dataclass(frozen=True)
class Table:
    header: tuple
    columns: dict  # name -> list of float (or None for blank cells)


def read_table(path: str, expected_header: tuple, produce_cmd: str) -> Table:
    try:
        fh = open(path, newline="")
    except OSError:
        raise MissingInput(path, produce_cmd) from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise RaggedCsv(path, 1, "empty file, expected a header row") from None
        if header != expected_header:
            raise RaggedCsv(path, 1, f"header {header} != expected {expected_header}")
        cols: dict = {name: [] for name in header}
        for rownum, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise RaggedCsv(path, rownum, f"{len(row)} cells, expected {len(header)}")
            for name, cell in zip(header, row):
                if cell == "":
                    cols[name].append(None)
                    continue
                try:
                    cols[name].append(float(cell))
                except ValueError:
                    raise RaggedCsv(path, rownum, f"non-numeric cell {cell!r}") from None
    return Table(header, cols)


def read_path(path: str, produce_cmd: str) -> tuple[list, list]:
    """A `t,value` trajectory (t0 row, breakpoints, t_end sentinel)."""
    t = read_table(path, ("t", "value"), produce_cmd)
    return t.columns["t"], t.columns["value"]


def read_mean(path: str, produce_cmd: str):
    t = read_table(path, ("t", "sample_mean", "sample_std", "theory_mean"), produce_cmd)
    return t.columns


def read_convergence(path: str, produce_cmd: str):
    t = read_table(path, ("eta", "rep", "sup_error"), produce_cmd)
    return t.columns
