"""Jump-size distributions and model parameters.

Convention used everywhere in this package: ``exponential(theta)`` is the
exponential distribution with MEAN theta (not rate theta).  All closed forms
below follow that convention; the textual mini-grammar is ``exp:<mean>``,
``unif:<lo>:<hi>``, ``point:<value>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class DistKind(Enum):
    EXPONENTIAL = "exp"
    UNIFORM = "unif"
    POINT = "point"


class UnboundedSlope(Exception):
    """Raised when sup_m m*f(m) is infinite for a distribution family."""


@dataclass(frozen=True)
class DistSpec:
    """A jump-size distribution: exponential (mean-parameterized), uniform, or point mass."""

    kind: DistKind
    a: float
    b: float = 0.0

    def __post_init__(self):
        if self.kind is DistKind.EXPONENTIAL:
            if not self.a > 0:
                raise ValueError(f"exponential mean must be > 0, got {self.a}")
        elif self.kind is DistKind.UNIFORM:
            if not self.a < self.b:
                raise ValueError(f"uniform needs lo < hi, got [{self.a}, {self.b}]")
        elif self.kind is DistKind.POINT:
            if self.a < 0:
                raise ValueError(f"point mass must be >= 0, got {self.a}")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def exponential(mean: float) -> "DistSpec":
        return DistSpec(DistKind.EXPONENTIAL, float(mean))

    @staticmethod
    def uniform(lo: float, hi: float) -> "DistSpec":
        return DistSpec(DistKind.UNIFORM, float(lo), float(hi))

    @staticmethod
    def point(value: float) -> "DistSpec":
        return DistSpec(DistKind.POINT, float(value))

    # -- basic functionals -------------------------------------------------

    def mean(self) -> float:
        if self.kind is DistKind.EXPONENTIAL:
            return self.a
        if self.kind is DistKind.UNIFORM:
            return 0.5 * (self.a + self.b)
        return self.a

    def second_moment(self) -> float:
        if self.kind is DistKind.EXPONENTIAL:
            return 2.0 * self.a * self.a
        if self.kind is DistKind.UNIFORM:
            lo, hi = self.a, self.b
            return (hi**3 - lo**3) / (3.0 * (hi - lo))
        return self.a * self.a

    def cdf(self, x):
        """F(x); accepts scalars or numpy arrays."""
        x = np.asarray(x, dtype=float)
        if self.kind is DistKind.EXPONENTIAL:
            out = np.where(x < 0, 0.0, -np.expm1(-np.maximum(x, 0.0) / self.a))
        elif self.kind is DistKind.UNIFORM:
            out = np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)
        else:
            out = np.where(x >= self.a, 1.0, 0.0)
        return out if out.ndim else float(out)

    def pdf(self, x):
        """Density f(x).  Point masses have no density."""
        if self.kind is DistKind.POINT:
            raise UnboundedSlope("point mass has no density")
        x = np.asarray(x, dtype=float)
        if self.kind is DistKind.EXPONENTIAL:
            out = np.where(x < 0, 0.0, np.exp(-np.maximum(x, 0.0) / self.a) / self.a)
        else:
            out = np.where((x >= self.a) & (x <= self.b), 1.0 / (self.b - self.a), 0.0)
        return out if out.ndim else float(out)

    def integrated_cdf(self, t):
        """∫_0^t F(v) dv for t >= 0; accepts scalars or numpy arrays."""
        t = np.asarray(t, dtype=float)
        if self.kind is DistKind.EXPONENTIAL:
            th = self.a
            out = t - th * (-np.expm1(-t / th))
        elif self.kind is DistKind.UNIFORM:
            lo, hi = self.a, self.b
            out = self._unif_icdf(t, lo, hi) - self._unif_icdf(np.zeros_like(t), lo, hi)
        else:
            out = np.maximum(0.0, t - self.a)
        return out if out.ndim else float(out)

    @staticmethod
    def _unif_icdf(v, lo, hi):
        # continuous antiderivative of the uniform cdf, zero at v = lo
        w = hi - lo
        vc = np.clip(v, lo, hi)
        ramp = (vc - lo) ** 2 / (2.0 * w)
        return ramp + np.maximum(0.0, v - hi)

    def truncated_mean(self, m):
        """H(m) = ∫_0^m x f(x) dx; accepts scalars or numpy arrays.

        Point masses use the exact-event form c * 1{c <= m} instead of a density.
        """
        m = np.asarray(m, dtype=float)
        if self.kind is DistKind.EXPONENTIAL:
            th = self.a
            mm = np.maximum(m, 0.0)
            out = th - (th + mm) * np.exp(-mm / th)
        elif self.kind is DistKind.UNIFORM:
            lo, hi = self.a, self.b
            l = max(lo, 0.0)
            u = np.clip(m, l, hi)
            out = np.maximum(0.0, (u * u - l * l) / (2.0 * (hi - lo)))
        else:
            out = np.where(m >= self.a, self.a, 0.0)
        return out if out.ndim else float(out)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind is DistKind.EXPONENTIAL:
            return rng.exponential(self.a, size=n)
        if self.kind is DistKind.UNIFORM:
            return rng.uniform(self.a, self.b, size=n)
        return np.full(n, self.a)

    def support(self) -> tuple[float, float]:
        if self.kind is DistKind.EXPONENTIAL:
            return (0.0, math.inf)
        if self.kind is DistKind.UNIFORM:
            return (self.a, self.b)
        return (self.a, self.a)

    # -- textual form ------------------------------------------------------

    def to_text(self) -> str:
        if self.kind is DistKind.EXPONENTIAL:
            return f"exp:{self.a:g}"
        if self.kind is DistKind.UNIFORM:
            return f"unif:{self.a:g}:{self.b:g}"
        return f"point:{self.a:g}"

    @staticmethod
    def from_text(text: str) -> "DistSpec":
        parts = text.strip().split(":")
        try:
            if parts[0] == "exp" and len(parts) == 2:
                return DistSpec.exponential(float(parts[1]))
            if parts[0] == "unif" and len(parts) == 3:
                return DistSpec.uniform(float(parts[1]), float(parts[2]))
            if parts[0] == "point" and len(parts) == 2:
                return DistSpec.point(float(parts[1]))
        except ValueError as exc:
            raise ValueError(f"bad distribution spec {text!r}: {exc}") from exc
        raise ValueError(
            f"bad distribution spec {text!r} (expected exp:<mean>, unif:<lo>:<hi>, or point:<value>)"
        )


@dataclass(frozen=True)
class LipschitzBound:
    """sup_m m*f(m), the Lipschitz constant of the truncated mean.

    For point masses there is no density; ``value`` is the jump magnitude and
    ``density_based`` is False (exact-event logic applies instead).
    """

    value: float
    density_based: bool = True


def dist_mean(d: DistSpec) -> float:
    return d.mean()


def dist_cdf(d: DistSpec, x: float) -> float:
    return d.cdf(x)


def truncated_mean_H(dist_b: DistSpec, m: float):
    return dist_b.truncated_mean(m)


def lipschitz_bound_H(dist_b: DistSpec) -> LipschitzBound:
    if dist_b.kind is DistKind.EXPONENTIAL:
        # m * f(m) = (m/theta) e^{-m/theta} is maximized at m = theta
        return LipschitzBound(math.exp(-1.0))
    if dist_b.kind is DistKind.UNIFORM:
        lo, hi = dist_b.a, dist_b.b
        if hi <= 0:
            return LipschitzBound(0.0)
        return LipschitzBound(hi / (hi - lo))
    return LipschitzBound(dist_b.a, density_based=False)


@dataclass(frozen=True)
class ModelParams:
    """All rates, distributions, and initial capital of a bail-fund model."""

    m0: float
    lambda_d: float
    lambda_b: float
    dist_d: DistSpec
    dist_b: DistSpec
    dist_p: DistSpec
    dist_s: DistSpec

    def __post_init__(self):
        if self.m0 < 0:
            raise ValueError("initial capital must be >= 0")
        if self.lambda_d <= 0 or self.lambda_b <= 0:
            raise ValueError("arrival rates must be > 0")
        lo, hi = self.dist_p.support()
        if lo < 0 or hi > 1:
            raise ValueError(f"poundage support must lie in [0, 1], got [{lo}, {hi}]")
        lo_s, _ = self.dist_s.support()
        if lo_s < 0:
            raise ValueError("trial delays must be >= 0")
        for name in ("dist_d", "dist_b"):
            lo_j, _ = getattr(self, name).support()
            if lo_j < 0:
                raise ValueError(f"{name} support must be >= 0")

    @property
    def d_star(self) -> float:
        return self.dist_d.mean()

    @property
    def b_star(self) -> float:
        return self.dist_b.mean()

    @property
    def p_star(self) -> float:
        return self.dist_p.mean()


@dataclass(frozen=True)
class ScalingSpec:
    """Scale factor: arrival rates multiplied by eta, jump sizes divided by eta."""

    eta: float = 1.0

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be > 0")


def example1_params() -> ModelParams:
    """Default parameter set: M0=10, unit rates, exp(1) jumps, unif[0,1] poundage, exp(10) delays."""
    return ModelParams(
        m0=10.0,
        lambda_d=1.0,
        lambda_b=1.0,
        dist_d=DistSpec.exponential(1.0),
        dist_b=DistSpec.exponential(1.0),
        dist_p=DistSpec.uniform(0.0, 1.0),
        dist_s=DistSpec.exponential(10.0),
    )


def blocking_example2_params() -> ModelParams:
    """Heavier bail requests (mean 10): the blocking balance settles near 8.2."""
    return ModelParams(
        m0=10.0,
        lambda_d=1.0,
        lambda_b=1.0,
        dist_d=DistSpec.exponential(1.0),
        dist_b=DistSpec.exponential(10.0),
        dist_p=DistSpec.uniform(0.0, 1.0),
        dist_s=DistSpec.exponential(10.0),
    )
