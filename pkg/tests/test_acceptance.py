"""End-to-end acceptance gate.

Each test covers one headline guarantee of the package and prints a single
PASS line with the measured numbers (visible with ``pytest -v -s`` or on
failure).  Tolerances are part of the contract; do not loosen them casually.
"""
import dataclasses
import math
import time

import numpy as np
import pytest

from bailfund import (
    DistSpec,
    ModelKind,
    ModelParams,
    SteadyStateCase,
    blocking_example2_params,
    blocking_fluid,
    blocking_refinement_error,
    compensator_diagnostic,
    convergence_study,
    example1_params,
    example_table_stream,
    expected_value_inf,
    generate_stream,
    mean_variance_study,
    ordering_study,
    simulate,
    skorokhod_equivalence_check,
    steady_state_classify,
)
from bailfund.fluid import blocking_ode_rhs


def report(line: str) -> None:
    print(f"PASS {line}")


def test_blocking_fluid_steady_state():
    params = blocking_example2_params()
    t0 = time.perf_counter()
    curve = blocking_fluid(params, 400.0, 0.01)
    elapsed = time.perf_counter() - t0
    final = float(curve.values[-1])
    assert elapsed < 60.0
    assert 8.0 <= final <= 8.4

    m = steady_state_classify(params).blocking_fixed_point
    residual = abs(10 - (10 + m) * math.exp(-m / 10) - 2.0)
    assert residual < 1e-8
    report(
        f"blocking steady state: final={final:.6f} in [8.0, 8.4], "
        f"fixed point {m:.6f} residual {residual:.2e}, solver {elapsed:.2f}s"
    )


def test_infinite_acceptance_mean_identity():
    params = example1_params()
    t0 = time.perf_counter()
    rows = mean_variance_study(ModelKind.INF_RETURNS, params, reps=10_000, grid=[5.0, 10.0, 20.0])
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    for t, mean, std, theory in rows:
        se = std / math.sqrt(10_000)
        assert abs(mean - theory) <= 3 * se, f"t={t}: |{mean}-{theory}| > 3*{se}"
    theory10 = expected_value_inf(params, 10.0)
    assert abs(theory10 - 11.8394) < 1e-3
    report(
        f"mean identity: sample means at t=5,10,20 within 3 SE of theory, "
        f"theory(10)={theory10:.6f}, {elapsed:.1f}s"
    )


def test_reflection_equals_partial_identity():
    params = example1_params()
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(1000):
        stream = generate_stream(params, 1.0, seed, 50.0)
        check = skorokhod_equivalence_check(params, stream)
        worst = max(worst, check.max_deviation)
        assert check.passed, f"seed {seed}: deviation {check.max_deviation}"
    elapsed = time.perf_counter() - t0
    assert worst <= 1e-12
    assert elapsed < 60.0
    report(f"reflection=partial identity: 1000 seeds, worst deviation {worst:.2e}, {elapsed:.1f}s")


def test_example_table_reproduction():
    params = dataclasses.replace(example1_params(), m0=0.0)
    stream = example_table_stream()
    ts = np.arange(7.0)
    rows = {
        ModelKind.INF_RETURNS: [5.0, -1.0, -1.0, -5.0, 1.0, 1.0, 5.0],
        ModelKind.SKOROKHOD_RETURNS: [5.0, 0.0, 0.0, 0.0, 6.0, 6.0, 10.0],
        ModelKind.BLOCKING_RETURNS: [5.0, 5.0, 5.0, 1.0, 1.0, 1.0, 5.0],
    }
    for kind, expected in rows.items():
        got = list(simulate(kind, params, stream).path.values_at(ts))
        assert got == expected, f"{kind.value}: {got}"
    diff = np.array(rows[ModelKind.BLOCKING_RETURNS]) - np.array(rows[ModelKind.SKOROKHOD_RETURNS])
    assert np.any(diff > 0) and np.any(diff < 0)  # no ordering either way
    report("example table: all three rows exact; blocking vs reflected non-monotone")


def test_fluid_convergence_in_eta():
    params = example1_params()
    etas = [1.0, 4.0, 16.0, 64.0, 256.0]
    t0 = time.perf_counter()
    summaries = []
    for kind in (ModelKind.INF_RETURNS, ModelKind.BLOCKING_RETURNS):
        rep = convergence_study(kind, params, etas, reps=200, T=50.0, seed0=0, dt=0.01)
        meds = rep.medians()
        assert all(b <= a for a, b in zip(meds, meds[1:])), f"{kind.value}: {meds}"
        assert meds[0] / meds[-1] >= 3.0, f"{kind.value}: {meds}"
        summaries.append(f"{kind.value} medians {['%.3f' % m for m in meds]}")
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0
    report(f"convergence: {'; '.join(summaries)}, {elapsed:.0f}s")


def test_stochastic_orderings():
    params = example1_params()
    nr = ordering_study("no_returns", params, reps=1000, T=50.0, seed0=0)
    wr = ordering_study("with_returns", params, reps=1000, T=50.0, seed0=0)
    assert not nr.violations and nr.max_violation <= 1e-9
    assert nr.max_equality_gap <= 1e-12
    assert not wr.violations and wr.max_violation <= 1e-9
    report(
        f"orderings: 1000 coupled seeds, zero violations "
        f"(no-returns equality gap {nr.max_equality_gap:.1e})"
    )


def test_compensator_diagnostics():
    params = example1_params()
    checkpoints = [2.0, 5.0, 10.0]
    lines = []
    for component in ("bail_blocking", "return_blocking"):
        ses = {}
        for eta in (1.0, 100.0):
            diag = compensator_diagnostic(component, params, eta, 500, checkpoints, seed0=0)
            for st in diag.checkpoints:
                assert abs(st.empirical_mean) <= 3 * st.std_error, (
                    f"{component} eta={eta} t={st.t}: mean {st.empirical_mean} "
                    f"vs 3*SE {3 * st.std_error}"
                )
            ses[eta] = diag.checkpoints[-1].std_error
        ratio = ses[1.0] / ses[100.0]
        assert 5.0 <= ratio <= 20.0, f"{component}: SE ratio {ratio}"
        lines.append(f"{component} SE ratio {ratio:.1f}")
    report(f"compensators: means within 3 SE at all checkpoints; {', '.join(lines)}")


def test_steady_state_trichotomy():
    plus = example1_params()
    assert steady_state_classify(plus).case is SteadyStateCase.DIVERGES_PLUS
    minus = dataclasses.replace(plus, dist_b=DistSpec.exponential(50.0))
    assert steady_state_classify(minus).case is SteadyStateCase.DIVERGES_MINUS
    balanced = ModelParams(
        m0=1.0, lambda_d=1.0, lambda_b=1.0,
        dist_d=DistSpec.point(1.0), dist_b=DistSpec.point(1.0),
        dist_p=DistSpec.point(1.0), dist_s=DistSpec.exponential(1.0),
    )
    v = steady_state_classify(balanced)
    assert v.case is SteadyStateCase.BALANCED and v.drift == 0.0
    report("trichotomy: drift >0, <0, and exact-cancellation =0 all classified")


def test_volterra_self_consistency():
    ratios = []
    dt = 0.05
    for params in (example1_params(), blocking_example2_params()):
        e1 = blocking_refinement_error(params, 50.0, 0.1)
        e2 = blocking_refinement_error(params, 50.0, 0.05)
        ratios.append(e1 / e2)
        assert e1 / e2 >= 1.8

        curve = blocking_fluid(params, 50.0, dt)
        rhs = blocking_ode_rhs(params, curve)
        fd = np.gradient(curve.values, dt)
        scale = max(1.0, float(np.max(np.abs(curve.values))))
        resid = float(np.max(np.abs(fd[1:-1] - rhs[1:-1])))
        assert resid < 10 * dt * scale
    report(f"Volterra solver: refinement ratios {['%.2f' % r for r in ratios]}, residuals in bound")
