"""Piecewise-constant cadlag balance trajectories and the reflection map."""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from enum import Enum

import numpy as np


class DomainMismatch(Exception):
    """Raised when two paths are compared over different time windows."""


class EventKind(Enum):
    DONATION = "donation"
    BAIL_ACCEPTED = "bail_accepted"
    BAIL_BLOCKED = "bail_blocked"
    BAIL_PARTIAL = "bail_partial"
    RETURN_CREDIT = "return_credit"


@dataclass(frozen=True)
class PathEvent:
    time: float
    kind: EventKind
    amount: float
    request_id: int = -1


@dataclass(frozen=True)
class CadlagPath:
    """Right-continuous piecewise-constant path on [t0, t_end].

    ``value(t)`` is the ``value_after`` of the last breakpoint at or before t,
    or ``value_at_t0`` if there is none.  A breakpoint exactly at t0 is allowed
    and then ``value_at_t0`` acts as the left limit of the initial jump.
    """

    t0: float
    value_at_t0: float
    breakpoints: tuple
    t_end: float

    def __post_init__(self):
        prev = self.t0
        first = True
        for t, _ in self.breakpoints:
            if first:
                if t < self.t0:
                    raise ValueError(f"breakpoint at {t} before t0={self.t0}")
                first = False
            elif t <= prev:
                raise ValueError(f"breakpoint times must strictly increase at {t}")
            if t > self.t_end:
                raise ValueError(f"breakpoint at {t} beyond t_end={self.t_end}")
            prev = t

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.breakpoints])

    @property
    def step_values(self) -> np.ndarray:
        return np.array([v for _, v in self.breakpoints])

    def value(self, t: float) -> float:
        if t < self.t0 or t > self.t_end:
            raise ValueError(f"t={t} outside [{self.t0}, {self.t_end}]")
        idx = bisect.bisect_right([bt for bt, _ in self.breakpoints], t)
        return self.breakpoints[idx - 1][1] if idx else self.value_at_t0

    def left_limit(self, t: float) -> float:
        if t <= self.t0:
            return self.value_at_t0
        idx = bisect.bisect_left([bt for bt, _ in self.breakpoints], t)
        return self.breakpoints[idx - 1][1] if idx else self.value_at_t0

    def values_at(self, ts: np.ndarray) -> np.ndarray:
        """Vectorized right-continuous evaluation at sorted or unsorted times."""
        ts = np.asarray(ts, dtype=float)
        bt = self.times
        vals = np.concatenate(([self.value_at_t0], self.step_values))
        idx = np.searchsorted(bt, ts, side="right")
        return vals[idx]

    def final_value(self) -> float:
        return self.breakpoints[-1][1] if self.breakpoints else self.value_at_t0


def running_infimum(p: CadlagPath) -> CadlagPath:
    """Running infimum of {0, p(s)} for s <= t; nonincreasing and <= 0."""
    run = min(0.0, p.value_at_t0)
    bps = []
    for t, v in p.breakpoints:
        run = min(run, v)
        bps.append((t, run))
    return CadlagPath(p.t0, min(0.0, p.value_at_t0), tuple(bps), p.t_end)


def skorokhod_map(p: CadlagPath) -> CadlagPath:
    """Reflection at zero: p(t) minus the running infimum of {0, p(s)}."""
    run = min(0.0, p.value_at_t0)
    bps = []
    for t, v in p.breakpoints:
        run = min(run, v)
        bps.append((t, v - run))
    return CadlagPath(p.t0, p.value_at_t0 - min(0.0, p.value_at_t0), tuple(bps), p.t_end)


def sup_norm_distance(a: CadlagPath, b: CadlagPath) -> float:
    """Exact sup |a - b| over [t0, t_end] for two piecewise-constant paths."""
    if a.t0 != b.t0 or a.t_end != b.t_end:
        raise DomainMismatch(
            f"time windows differ: [{a.t0}, {a.t_end}] vs [{b.t0}, {b.t_end}]"
        )
    ts = np.union1d(
        np.concatenate(([a.t0, a.t_end], a.times)),
        np.concatenate(([b.t0, b.t_end], b.times)),
    )
    return float(np.max(np.abs(a.values_at(ts) - b.values_at(ts)))) if ts.size else 0.0


def paths_close(a: CadlagPath, b: CadlagPath, rel: float = 1e-12) -> tuple[bool, float]:
    """Relative path identity check with absolute floor 1.0 on the denominator.

    Returns (within tolerance, max relative deviation).
    """
    if a.t0 != b.t0 or a.t_end != b.t_end:
        raise DomainMismatch("time windows differ")
    ts = np.union1d(
        np.concatenate(([a.t0, a.t_end], a.times)),
        np.concatenate(([b.t0, b.t_end], b.times)),
    )
    va, vb = a.values_at(ts), b.values_at(ts)
    denom = np.maximum(1.0, np.maximum(np.abs(va), np.abs(vb)))
    dev = float(np.max(np.abs(va - vb) / denom)) if ts.size else 0.0
    return dev <= rel, dev


def write_path_csv(p: CadlagPath, fileobj) -> None:
    """CSV form: header t,value; row at t0, one row per breakpoint, closing row at t_end."""
    fileobj.write("t,value\r\n")
    fileobj.write(f"{p.t0:.17g},{p.value_at_t0:.17g}\r\n")
    for t, v in p.breakpoints:
        fileobj.write(f"{t:.17g},{v:.17g}\r\n")
    fileobj.write(f"{p.t_end:.17g},{p.final_value():.17g}\r\n")


def read_path_csv(fileobj) -> CadlagPath:
    header = fileobj.readline().strip()
    if header.split(",")[:2] != ["t", "value"]:
        raise ValueError(f"bad path CSV header: {header!r}")
    rows = []
    for line in fileobj:
        line = line.strip()
        if not line:
            continue
        t_s, v_s = line.split(",")
        rows.append((float(t_s), float(v_s)))
    if len(rows) < 2:
        raise ValueError("path CSV needs at least the t0 and t_end rows")
    t0, v0 = rows[0]
    t_end = rows[-1][0]
    bps = []
    for t, v in rows[1:]:
        if bps and t == bps[-1][0] and v == bps[-1][1]:
            continue  # closing sentinel duplicating the last breakpoint
        if t == t_end and (not bps or t > bps[-1][0]):
            cur = bps[-1][1] if bps else v0
            if v == cur:
                continue  # closing sentinel with no jump at t_end
        bps.append((t, v))
    return CadlagPath(t0, v0, tuple(bps), t_end)
