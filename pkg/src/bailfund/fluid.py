"""Deterministic fluid limits of the bail-fund models.

The unconstrained limit has a closed form; the reflected limit is its
reflection at zero; the blocking limit solves a Volterra integral equation
whose kernel is the trial-delay cdf, by explicit first-order time stepping
with full-history trapezoidal quadrature.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .distributions import ModelParams, lipschitz_bound_H


class StepTooLarge(Exception):
    """Raised when dt violates the blocking solver's stability guard."""


class FluidModel(Enum):
    INF_FLUID = "inf"
    SKOROKHOD_FLUID = "skorokhod"
    BLOCKING_FLUID = "block"


class SteadyStateCase(Enum):
    BALANCED = "balanced"
    DIVERGES_PLUS = "plus"
    DIVERGES_MINUS = "minus"


@dataclass(frozen=True)
class FluidCurve:
    times: np.ndarray
    values: np.ndarray
    model: FluidModel
    dt: float
    params_hash: str

    def value_at(self, t):
        return np.interp(t, self.times, self.values)


@dataclass(frozen=True)
class SteadyStateVerdict:
    case: SteadyStateCase
    drift: float
    blocking_fixed_point: float | None


def _params_hash(params: ModelParams) -> str:
    return hashlib.sha1(repr(params).encode()).hexdigest()[:12]


def _grid(T: float, dt: float) -> tuple[np.ndarray, int]:
    if T <= 0 or dt <= 0 or dt > T:
        raise ValueError(f"need 0 < dt <= T, got dt={dt}, T={T}")
    n = int(round(T / dt))
    return np.linspace(0.0, n * dt, n + 1), n


def inf_fluid(params: ModelParams, T: float, dt: float) -> FluidCurve:
    """Closed-form unconstrained limit: linear drift plus the delayed-return integral."""
    times, _ = _grid(T, dt)
    values = _inf_values(params, times)
    return FluidCurve(times, values, FluidModel.INF_FLUID, dt, _params_hash(params))


def _inf_values(params: ModelParams, times: np.ndarray) -> np.ndarray:
    d_rate = params.d_star * params.lambda_d
    b_rate = params.b_star * params.lambda_b
    ret_rate = (1.0 - params.p_star) * params.b_star * params.lambda_b
    return params.m0 + (d_rate - b_rate) * times + ret_rate * params.dist_s.integrated_cdf(times)


def expected_value_inf(params: ModelParams, t: float) -> float:
    """Expected unconstrained balance at time t; identical to the fluid limit value."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return float(_inf_values(params, np.asarray([t]))[0])


def steady_state_classify(params: ModelParams) -> SteadyStateVerdict:
    """Trichotomy on the long-run drift d*·lambda_d - p*·b*·lambda_b.

    Also solves H(m) = lambda_d d* / (p* lambda_b) for the blocking balance
    plateau when a root exists (strictly below the full mean b*).
    """
    drift = params.d_star * params.lambda_d - params.p_star * params.b_star * params.lambda_b
    if drift > 0:
        case = SteadyStateCase.DIVERGES_PLUS
    elif drift < 0:
        case = SteadyStateCase.DIVERGES_MINUS
    else:
        case = SteadyStateCase.BALANCED

    fixed_point = None
    denom = params.p_star * params.lambda_b
    if denom > 0:
        target = params.d_star * params.lambda_d / denom
        if 0.0 <= target < params.b_star:
            H = params.dist_b.truncated_mean
            hi = max(params.b_star, 1.0)
            while H(hi) <= target:
                hi *= 2.0
            fixed_point = 0.0 if target == 0.0 else float(
                brentq(lambda m: H(m) - target, 0.0, hi, xtol=1e-12, rtol=1e-14)
            )
    return SteadyStateVerdict(case, drift, fixed_point)


@dataclass(frozen=True)
class SkorokhodFluidResult:
    curve: FluidCurve
    regime: str  # "nonnegative-drift", "monotone-deficit", "mixed", or "unclassified"


def skorokhod_fluid(params: ModelParams, T: float, dt: float) -> SkorokhodFluidResult:
    """Reflection of the unconstrained limit, with the parameter regime label.

    The reflection formula covers all regimes; the label reports which of the
    three drift conditions holds at grid resolution (the delayed-return rate
    is monotone in time, so the endpoints decide each inequality).
    """
    base = inf_fluid(params, T, dt)
    shift = np.minimum(np.minimum.accumulate(base.values), 0.0)
    curve = FluidCurve(
        base.times, base.values - shift, FluidModel.SKOROKHOD_FLUID, dt, base.params_hash
    )

    d_rate = params.d_star * params.lambda_d
    b_rate = params.b_star * params.lambda_b
    ret_cap = (1.0 - params.p_star) * params.b_star * params.lambda_b
    fs_end = params.dist_s.cdf(T)
    if d_rate >= b_rate:
        regime = "nonnegative-drift"
    elif d_rate + ret_cap * fs_end <= b_rate:
        regime = "monotone-deficit"
    elif b_rate - ret_cap <= d_rate <= b_rate:
        regime = "mixed"
    else:
        regime = "unclassified"
    return SkorokhodFluidResult(curve, regime)


def blocking_fluid(params: ModelParams, T: float, dt: float) -> FluidCurve:
    """Volterra solver for the blocking limit.

    At each node the balance is re-evaluated from the integral equation:
    outflow integrates the truncated mean of the history, inflow-by-return
    convolves it with the trial-delay cdf.  The newest node enters both
    integrals through a one-step predictor, making the scheme first order.
    """
    L = lipschitz_bound_H(params.dist_b).value
    if params.lambda_b * L * dt >= 0.5:
        raise StepTooLarge(
            f"lambda_b * L * dt = {params.lambda_b * L * dt:.3g} >= 0.5; reduce dt"
        )
    times, n = _grid(T, dt)
    H = params.dist_b.truncated_mean
    lam_d, lam_b = params.lambda_d, params.lambda_b
    d_star = params.d_star
    ret_coef = (1.0 - params.p_star) * lam_b

    kernel = np.asarray(params.dist_s.cdf(times))  # F_s at lag j*dt
    krev = kernel[::-1].copy()  # krev[n - j] == F_s(j*dt)

    m = np.empty(n + 1)
    hv = np.empty(n + 1)
    m[0] = params.m0
    hv[0] = H(m[0])
    hsum = 0.0  # sum of hv[0..i-1]
    for i in range(1, n + 1):
        hsum += hv[i - 1]
        h_pred = hv[i - 1]
        # plain history integral, trapezoid over nodes 0..i
        i1 = dt * (hsum + h_pred - 0.5 * hv[0] - 0.5 * h_pred)
        # delayed-return integral with weight F_s(t_i - t_k); weight at node k is krev[n - i + k]
        hv[i] = h_pred
        s = float(np.dot(hv[: i + 1], krev[n - i:]))
        i2 = dt * (s - 0.5 * hv[0] * kernel[i] - 0.5 * h_pred * kernel[0])
        m[i] = params.m0 + lam_d * d_star * times[i] - lam_b * i1 + ret_coef * i2
        hv[i] = H(m[i])
    return FluidCurve(times, m, FluidModel.BLOCKING_FLUID, dt, _params_hash(params))


def blocking_refinement_error(params: ModelParams, T: float, dt: float) -> float:
    """Max discrepancy between the dt and dt/2 blocking solutions on the coarse grid."""
    coarse = blocking_fluid(params, T, dt)
    fine = blocking_fluid(params, T, dt / 2.0)
    return float(np.max(np.abs(coarse.values - fine.values[::2])))


def blocking_ode_rhs(params: ModelParams, curve: FluidCurve) -> np.ndarray:
    """Right-hand side of the blocking limit's delay ODE evaluated on the grid.

    Requires a trial-delay density, so point-mass delay distributions are not
    supported here.  Used as a residual diagnostic against finite differences.
    """
    H = params.dist_b.truncated_mean
    hv = np.asarray(H(curve.values))
    times = curve.times
    dt = curve.dt
    fs = np.asarray(params.dist_s.pdf(times))
    fsrev = fs[::-1].copy()
    n = len(times) - 1
    conv = np.empty(n + 1)
    for i in range(n + 1):
        w = fsrev[n - i:]
        s = float(np.dot(hv[: i + 1], w))
        conv[i] = dt * (s - 0.5 * hv[0] * fs[i] - 0.5 * hv[i] * fs[0])
    return (
        params.lambda_d * params.d_star
        - params.lambda_b * hv
        + (1.0 - params.p_star) * params.lambda_b * conv
    )


def format_verdict(v: SteadyStateVerdict) -> str:
    fp = "none" if v.blocking_fixed_point is None else f"{v.blocking_fixed_point:.17g}"
    return f"case={v.case.value} drift={v.drift:.17g} fixed_point={fp}"
