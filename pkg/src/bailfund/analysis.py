"""Monte Carlo harnesses: fluid convergence, pathwise orderings, compensator checks."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .distributions import ModelParams
from .fluid import FluidCurve, blocking_fluid, expected_value_inf, inf_fluid, skorokhod_fluid
from .paths import CadlagPath, EventKind
from .simulate import EventStream, ModelKind, generate_stream, simulate, simulate_coupled

NO_RETURNS_FAMILY = (
    ModelKind.INF_NR,
    ModelKind.SKOROKHOD_NR,
    ModelKind.PARTIAL_NR,
    ModelKind.BLOCKING_NR,
)
WITH_RETURNS_FAMILY = (
    ModelKind.INF_RETURNS,
    ModelKind.PARTIAL_RETURNS,
    ModelKind.SKOROKHOD_RETURNS,
)


class UnsupportedKind(Exception):
    """Raised when a model variant has no matching fluid curve."""


@dataclass(frozen=True)
class EtaCell:
    eta: float
    replications: int
    sup_errors: np.ndarray
    median: float
    q90: float


@dataclass(frozen=True)
class ConvergenceReport:
    model: ModelKind
    etas: tuple
    cells: tuple  # EtaCell per eta
    fluid_reference: str  # params hash of the reference curve

    def medians(self) -> list[float]:
        return [c.median for c in self.cells]


@dataclass(frozen=True)
class OrderingViolation:
    seed: int
    time: float
    pair: str
    lhs: float
    rhs: float

    @property
    def magnitude(self) -> float:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class OrderingReport:
    family: str
    runs: int
    violations: tuple
    max_violation: float
    max_equality_gap: float  # largest |reflected - partial| gap in the no-returns family

    @property
    def passed(self) -> bool:
        return self.max_violation <= 1e-9


@dataclass(frozen=True)
class CheckpointStat:
    t: float
    empirical_mean: float
    std_error: float
    replications: int


@dataclass(frozen=True)
class CompensatorDiagnostic:
    component: str
    eta: float
    checkpoints: tuple  # CheckpointStat per checkpoint time


def sup_norm_path_vs_curve(path: CadlagPath, curve: FluidCurve) -> float:
    """Sup |path - curve| over [0, T]: both sides of each jump plus every grid node."""
    bt = path.times
    fvals_at_bt = curve.value_at(bt)
    right = path.values_at(bt) if bt.size else np.array([])
    vals = np.concatenate(([path.value_at_t0], path.step_values[:-1])) if bt.size else np.array([])
    dev = 0.0
    if bt.size:
        dev = max(
            float(np.max(np.abs(right - fvals_at_bt))),
            float(np.max(np.abs(vals - fvals_at_bt))),  # left limits at each jump
        )
    grid_dev = float(np.max(np.abs(path.values_at(curve.times) - curve.values)))
    return max(dev, grid_dev)


def _fluid_reference(kind: ModelKind, params: ModelParams, T: float, dt: float) -> FluidCurve:
    if kind is ModelKind.INF_RETURNS:
        return inf_fluid(params, T, dt)
    if kind is ModelKind.BLOCKING_RETURNS:
        return blocking_fluid(params, T, dt)
    if kind is ModelKind.SKOROKHOD_RETURNS:
        return skorokhod_fluid(params, T, dt).curve
    raise UnsupportedKind(f"no fluid limit paired with {kind.value}")


def _convergence_one(args):
    kind, params, eta, seed, T, curve = args
    stream = generate_stream(params, eta, seed, T)
    result = simulate(kind, params, stream)
    return sup_norm_path_vs_curve(result.path, curve)


def _run_jobs(fn, tasks, jobs: int):
    if jobs <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def convergence_study(
    kind: ModelKind,
    params: ModelParams,
    etas,
    reps: int,
    T: float,
    seed0: int = 0,
    dt: float = 0.01,
    jobs: int = 1,
) -> ConvergenceReport:
    """Median sup-norm error against the fluid curve, per scale factor.

    Replicate r uses seed0 + r at every eta, so the mark sequences stay
    coupled across scales.
    """
    etas = tuple(float(e) for e in etas)
    if any(b <= a for a, b in zip(etas, etas[1:])) or reps < 1:
        raise ValueError("etas must be strictly increasing and reps >= 1")
    curve = _fluid_reference(kind, params, T, dt)
    cells = []
    for eta in etas:
        tasks = [(kind, params, eta, seed0 + r, T, curve) for r in range(reps)]
        errs = np.array(_run_jobs(_convergence_one, tasks, jobs))
        cells.append(
            EtaCell(eta, reps, errs, float(np.median(errs)), float(np.quantile(errs, 0.9)))
        )
    return ConvergenceReport(kind, etas, tuple(cells), curve.params_hash)


def _ordering_checks(family: str):
    if family == "no_returns":
        kinds = NO_RETURNS_FAMILY
        pairs = [("block-nr>=skorokhod-nr", 3, 1), ("partial-nr>=inf-nr", 2, 0)]
        eq_pair = (1, 2)  # reflected recursion equals partial fulfillment
    elif family == "with_returns":
        kinds = WITH_RETURNS_FAMILY
        pairs = [("partial>=inf", 1, 0), ("skorokhod>=partial", 2, 1)]
        eq_pair = None
    else:
        raise ValueError(f"unknown ordering family {family!r}")
    return kinds, pairs, eq_pair


def check_ordering_on_stream(
    family: str, params: ModelParams, stream: EventStream, seed: int = -1, tol: float = 1e-9
):
    """Evaluate a family's pathwise inequalities at every event time of one stream."""
    kinds, pairs, eq_pair = _ordering_checks(family)
    results = simulate_coupled(list(kinds), params, stream)
    ts = np.unique(np.concatenate([r.path.times for r in results] + [np.array([0.0])]))
    vals = [r.path.values_at(ts) for r in results]
    violations = []
    max_violation = 0.0
    for label, hi, lo in pairs:
        gap = vals[lo] - vals[hi]  # positive gap = violation of hi >= lo
        worst = float(np.max(gap)) if gap.size else 0.0
        max_violation = max(max_violation, worst)
        if worst > tol:
            k = int(np.argmax(gap))
            violations.append(
                OrderingViolation(seed, float(ts[k]), label, float(vals[hi][k]), float(vals[lo][k]))
            )
    eq_gap = 0.0
    if eq_pair is not None:
        a, b = eq_pair
        eq_gap = float(np.max(np.abs(vals[a] - vals[b]))) if ts.size else 0.0
        if eq_gap > 1e-12:
            k = int(np.argmax(np.abs(vals[a] - vals[b])))
            violations.append(
                OrderingViolation(
                    seed, float(ts[k]), "skorokhod-nr==partial-nr", float(vals[a][k]), float(vals[b][k])
                )
            )
            max_violation = max(max_violation, eq_gap)
    return violations, max_violation, eq_gap


def _ordering_one(args):
    family, params, seed, T = args
    stream = generate_stream(params, 1.0, seed, T)
    return check_ordering_on_stream(family, params, stream, seed)


def ordering_study(
    family: str,
    params: ModelParams,
    reps: int,
    T: float,
    seed0: int = 0,
    jobs: int = 1,
) -> OrderingReport:
    tasks = [(family, params, seed0 + r, T) for r in range(reps)]
    outs = _run_jobs(_ordering_one, tasks, jobs)
    violations = []
    max_violation = 0.0
    max_eq = 0.0
    for v, mv, eq in outs:
        violations.extend(v)
        max_violation = max(max_violation, mv)
        max_eq = max(max_eq, eq)
    return OrderingReport(family, reps, tuple(violations), max_violation, max_eq)


def _piecewise_H_integral(params: ModelParams, path: CadlagPath, t: float) -> float:
    """Exact ∫_0^t H(path(u)) du for a piecewise-constant path."""
    H = params.dist_b.truncated_mean
    bt = path.times
    n_in = int(np.searchsorted(bt, t, side="right"))
    edges = np.concatenate(([path.t0], bt[:n_in], [t]))
    vals = np.concatenate(([path.value_at_t0], path.step_values[:n_in]))
    seg = np.diff(edges)
    return float(np.dot(np.asarray(H(vals)), seg))


def _piecewise_H_delay_integral(params: ModelParams, path: CadlagPath, t: float) -> float:
    """Exact ∫_0^t H(path(u)) F_s(t-u) du via the integrated trial-delay cdf."""
    H = params.dist_b.truncated_mean
    bt = path.times
    n_in = int(np.searchsorted(bt, t, side="right"))
    edges = np.concatenate(([path.t0], bt[:n_in], [t]))
    vals = np.concatenate(([path.value_at_t0], path.step_values[:n_in]))
    icdf = np.asarray(params.dist_s.integrated_cdf(t - edges))
    weights = icdf[:-1] - icdf[1:]  # ∫_{u_k}^{u_{k+1}} F_s(t-u) du
    return float(np.dot(np.asarray(H(vals)), weights))


def centered_component(
    component: str, params: ModelParams, stream: EventStream, checkpoints
) -> np.ndarray:
    """Realized component minus its compensator for one blocking-model run."""
    checkpoints = np.asarray(checkpoints, dtype=float)
    if component == "donation":
        cum = np.concatenate(([0.0], np.cumsum(stream.donation_sizes / stream.eta)))
        idx = np.searchsorted(stream.donation_times, checkpoints, side="right")
        return cum[idx] - params.lambda_d * params.d_star * checkpoints

    result = simulate(ModelKind.BLOCKING_RETURNS, params, stream)
    if component == "bail_blocking":
        ev = [(e.time, e.amount) for e in result.events if e.kind is EventKind.BAIL_ACCEPTED]
        comp = np.array(
            [params.lambda_b * _piecewise_H_integral(params, result.path, t) for t in checkpoints]
        )
    elif component == "return_blocking":
        ev = [(e.time, e.amount) for e in result.events if e.kind is EventKind.RETURN_CREDIT]
        coef = (1.0 - params.p_star) * params.lambda_b
        comp = coef * np.array(
            [_piecewise_H_delay_integral(params, result.path, t) for t in checkpoints]
        )
    else:
        raise ValueError(f"unknown component {component!r}")
    times = np.array([t for t, _ in ev])
    cum = np.concatenate(([0.0], np.cumsum([a for _, a in ev])))
    idx = np.searchsorted(times, checkpoints, side="right") if ev else np.zeros(
        len(checkpoints), dtype=int
    )
    return cum[idx] - comp


def _compensator_one(args):
    component, params, eta, seed, checkpoints, horizon = args
    stream = generate_stream(params, eta, seed, horizon)
    return centered_component(component, params, stream, checkpoints)


def compensator_diagnostic(
    component: str,
    params: ModelParams,
    eta: float,
    reps: int,
    checkpoints,
    seed0: int = 0,
    jobs: int = 1,
) -> CompensatorDiagnostic:
    """Replication mean and standard error of a centered (martingale) component."""
    checkpoints = tuple(float(t) for t in checkpoints)
    horizon = max(checkpoints) * (1.0 + 1e-9) + 1e-9
    tasks = [(component, params, eta, seed0 + r, checkpoints, horizon) for r in range(reps)]
    rows = np.array(_run_jobs(_compensator_one, tasks, jobs))
    stats = tuple(
        CheckpointStat(
            t=checkpoints[k],
            empirical_mean=float(np.mean(rows[:, k])),
            std_error=float(np.std(rows[:, k], ddof=1) / np.sqrt(reps)),
            replications=reps,
        )
        for k in range(len(checkpoints))
    )
    return CompensatorDiagnostic(component, eta, stats)


def _mean_variance_one(args):
    kind, params, eta, seed, grid, horizon = args
    stream = generate_stream(params, eta, seed, horizon)
    return simulate(kind, params, stream).path.values_at(np.asarray(grid))


def mean_variance_study(
    kind: ModelKind,
    params: ModelParams,
    reps: int,
    grid,
    seed0: int = 0,
    eta: float = 1.0,
    jobs: int = 1,
):
    """Pointwise sample mean/std over replicates; rows (t, mean, std, theory_mean?)."""
    if reps < 2:
        raise ValueError("reps must be >= 2")
    grid = np.asarray(grid, dtype=float)
    horizon = float(grid.max()) * (1.0 + 1e-9) + 1e-9
    tasks = [(kind, params, eta, seed0 + r, grid, horizon) for r in range(reps)]
    rows = np.array(_run_jobs(_mean_variance_one, tasks, jobs))
    means = rows.mean(axis=0)
    stds = rows.std(axis=0, ddof=1)
    theory = (
        np.array([expected_value_inf(params, t) for t in grid])
        if kind is ModelKind.INF_RETURNS
        else None
    )
    out = []
    for k, t in enumerate(grid):
        out.append((float(t), float(means[k]), float(stds[k]), None if theory is None else float(theory[k])))
    return out
