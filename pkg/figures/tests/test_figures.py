import bisect
import subprocess
import sys

import pytest

from bailfund_figures.cli import parse_and_dispatch
from bailfund_figures.readers import RaggedCsv, read_path
from bailfund_figures.recipes import RECIPES


def bailfund(*argv):
    """Drive the producer CLI the way a user would: as a subprocess."""
    proc = subprocess.run(
        [sys.executable, "-m", "bailfund.cli", *argv], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("figdata")
    common = ["--seed", "1", "--t-end", "30"]
    for model, name in [
        ("block-nr", "block_nr.csv"),
        ("skorokhod-nr", "skorokhod_nr.csv"),
        ("partial-nr", "partial_nr.csv"),
        ("inf-nr", "inf_nr.csv"),
        ("skorokhod", "skorokhod_r.csv"),
        ("partial", "partial_r.csv"),
        ("inf", "inf_r.csv"),
        ("skorokhod", "skorokhod_path.csv"),
        ("partial", "partial_path.csv"),
    ]:
        bailfund("simulate", "--model", model, *common, "-o", str(d / name))
    bailfund("mean", "--model", "inf", "--reps", "20", *common, "-o", str(d / "inf_mean.csv"))
    bailfund("fluid", "--model", "inf", *common, "--dt", "0.5", "-o", str(d / "inf_fluid.csv"))
    bailfund(
        "converge", "--model", "inf", "--etas", "1,4", "--reps", "3", *common,
        "--dt", "0.1", "-o", str(d / "blk_converge.csv"),
    )
    return d


@pytest.mark.parametrize("recipe_id", sorted(RECIPES))
def test_every_recipe_renders(data_dir, tmp_path, recipe_id):
    out = tmp_path / f"{recipe_id}.png"
    code = parse_and_dispatch([recipe_id, "--data-dir", str(data_dir), "--out", str(out)])
    assert code == 0
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def step_value(ts, vs, t):
    """Right-continuous lookup in a t,value trajectory readback."""
    return vs[bisect.bisect_right(ts, t) - 1]


def test_order_nr_readback_is_stacked(data_dir):
    paths = {}
    for spec in RECIPES["order-nr"].inputs:
        paths[spec.filename] = read_path(str(data_dir / spec.filename), spec.produce_cmd)
    times = sorted({t for ts, _ in paths.values() for t in ts})
    for t in times:
        block = step_value(*paths["block_nr.csv"], t)
        skrk = step_value(*paths["skorokhod_nr.csv"], t)
        part = step_value(*paths["partial_nr.csv"], t)
        inf = step_value(*paths["inf_nr.csv"], t)
        assert block >= skrk - 1e-9
        assert abs(skrk - part) <= 1e-9
        assert part >= inf - 1e-9


def test_missing_input_names_producer(tmp_path, capsys):
    code = parse_and_dispatch(["order-nr", "--data-dir", str(tmp_path)])
    assert code == 2
    err = capsys.readouterr().err
    assert "bailfund simulate --model block-nr" in err


def test_ragged_csv_reports_row(tmp_path, capsys):
    bad = tmp_path / "inf_fluid.csv"
    bad.write_text("t,value\r\n0,10\r\n1\r\n")
    (tmp_path / "inf_mean.csv").write_text(
        "t,sample_mean,sample_std,theory_mean\r\n0,10,0,10\r\n"
    )
    code = parse_and_dispatch(["inf-mean", "--data-dir", str(tmp_path)])
    assert code == 2
    assert "row 3" in capsys.readouterr().err


def test_header_only_csv_renders_empty_axes(tmp_path):
    (tmp_path / "blk_converge.csv").write_text("eta,rep,sup_error\r\n")
    out = tmp_path / "fig.png"
    code = parse_and_dispatch(["blk-converge", "--data-dir", str(tmp_path), "--out", str(out)])
    assert code == 0 and out.exists()


def test_unknown_recipe_exit_2(capsys):
    assert parse_and_dispatch(["nope"]) == 2
    capsys.readouterr()


def test_render_is_deterministic(data_dir, tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    for out in (a, b):
        assert parse_and_dispatch(
            ["order-r", "--data-dir", str(data_dir), "--out", str(out)]
        ) == 0
    assert a.read_bytes() == b.read_bytes()
