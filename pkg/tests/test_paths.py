import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bailfund import (
    CadlagPath,
    DomainMismatch,
    read_path_csv,
    running_infimum,
    skorokhod_map,
    sup_norm_distance,
    write_path_csv,
)
from bailfund.paths import paths_close


def step_path(values, t_end=None):
    """Unit-spaced step path taking `values` at t=0,1,2,..."""
    t_end = float(len(values) - 1) if t_end is None else t_end
    return CadlagPath(0.0, values[0], tuple((float(k), v) for k, v in enumerate(values)), t_end)


def test_validation():
    with pytest.raises(ValueError):
        CadlagPath(0.0, 1.0, ((1.0, 2.0), (1.0, 3.0)), 5.0)  # non-strict times
    with pytest.raises(ValueError):
        CadlagPath(0.0, 1.0, ((-1.0, 2.0),), 5.0)  # before t0
    with pytest.raises(ValueError):
        CadlagPath(0.0, 1.0, ((6.0, 2.0),), 5.0)  # beyond t_end


def test_right_continuity_and_left_limits():
    p = step_path([5.0, -1.0, 3.0])
    assert p.value(0.0) == 5.0
    assert p.value(0.5) == 5.0
    assert p.value(1.0) == -1.0  # right-continuous at the jump
    assert p.left_limit(1.0) == 5.0
    assert p.left_limit(2.0) == -1.0
    assert p.final_value() == 3.0
    with pytest.raises(ValueError):
        p.value(2.5)


def test_values_at_matches_scalar():
    p = step_path([5.0, -1.0, 3.0], t_end=4.0)
    ts = np.array([0.0, 0.3, 1.0, 1.7, 2.0, 4.0])
    np.testing.assert_array_equal(p.values_at(ts), [p.value(t) for t in ts])


def test_skorokhod_map_example_table():
    # step values (5,-1,-1,-5,1,1,5) reflect to (5,0,0,0,6,6,10)
    p = step_path([5.0, -1.0, -1.0, -5.0, 1.0, 1.0, 5.0])
    q = skorokhod_map(p)
    np.testing.assert_array_equal(q.step_values, [5.0, 0.0, 0.0, 0.0, 6.0, 6.0, 10.0])


def test_skorokhod_map_nonnegative_path_unchanged():
    p = step_path([2.0, 0.0, 1.0, 5.0])
    q = skorokhod_map(p)
    np.testing.assert_array_equal(q.step_values, p.step_values)
    assert q.value_at_t0 == p.value_at_t0


def test_running_infimum_monotone():
    p = step_path([3.0, -2.0, 4.0, -5.0])
    r = running_infimum(p)
    np.testing.assert_array_equal(r.step_values, [0.0, -2.0, -2.0, -5.0])
    assert np.all(np.diff(r.step_values) <= 0)


@settings(max_examples=100)
@given(st.lists(st.floats(-100, 100), min_size=1, max_size=30))
def test_skorokhod_map_properties(values):
    p = step_path(values, t_end=float(len(values)))
    q = skorokhod_map(p)
    # output is the input minus the running infimum of {0, input}, hence >= 0
    assert q.value_at_t0 >= 0.0
    run = min(0.0, values[0])
    for (t, v), orig in zip(q.breakpoints, values):
        run = min(run, orig)
        assert v == orig - run
        assert v >= 0.0
    assert len(q.breakpoints) == len(p.breakpoints)


def test_sup_norm_distance():
    a = step_path([1.0, 2.0, 3.0])
    b = step_path([1.0, 2.5, 2.0])
    assert sup_norm_distance(a, b) == 1.0
    assert sup_norm_distance(a, a) == 0.0
    with pytest.raises(DomainMismatch):
        sup_norm_distance(a, step_path([1.0, 2.0, 3.0], t_end=9.0))


def test_sup_norm_sees_offset_breakpoints():
    a = CadlagPath(0.0, 0.0, ((1.0, 4.0),), 3.0)
    b = CadlagPath(0.0, 0.0, ((2.0, 4.0),), 3.0)
    assert sup_norm_distance(a, b) == 4.0


def test_paths_close_relative_floor():
    a = CadlagPath(0.0, 1000.0, (), 1.0)
    b = CadlagPath(0.0, 1000.0 + 1e-10, (), 1.0)
    ok, dev = paths_close(a, b, rel=1e-12)
    assert ok and dev <= 1e-12


def test_csv_roundtrip():
    p = step_path([5.0, -1.0, 0.3333333333333333, 7.0], t_end=10.0)
    buf = io.StringIO()
    write_path_csv(p, buf)
    text = buf.getvalue()
    assert text.startswith("t,value\r\n")
    assert text.endswith("\r\n")
    q = read_path_csv(io.StringIO(text))
    assert q == p


def test_csv_roundtrip_jump_at_t_end():
    p = CadlagPath(0.0, 1.0, ((0.5, 2.0), (3.0, 9.0)), 3.0)
    buf = io.StringIO()
    write_path_csv(p, buf)
    assert read_path_csv(io.StringIO(buf.getvalue())) == p


def test_csv_bad_header():
    with pytest.raises(ValueError):
        read_path_csv(io.StringIO("time,val\r\n0,1\r\n1,1\r\n"))
