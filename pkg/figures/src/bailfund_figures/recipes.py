"""Figure recipes: which CSVs each figure needs and how to draw it.

Every recipe reads files from a data directory (default ``.``) and writes one
image.  The inputs are produced by the ``bailfund`` CLI; each declared input
records the exact command so error messages are actionable.
"""
from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .readers import read_convergence, read_mean, read_path  # noqa: E402


@dataclass(frozen=True)
class InputSpec:
    filename: str
    produce_cmd: str


@dataclass(frozen=True)
class FigureRecipe:
    figure_id: str
    inputs: tuple  # InputSpec per CSV
    title: str


def _step(ax, ts, vs, label):
    ax.step(ts, vs, where="post", label=label)


def _path_overlay(recipe, data_dir, labels):
    fig, ax = plt.subplots(figsize=(8, 5))
    for spec, label in zip(recipe.inputs, labels):
        ts, vs = read_path(f"{data_dir}/{spec.filename}", spec.produce_cmd)
        _step(ax, ts, vs, label)
    ax.set_xlabel("t")
    ax.set_ylabel("balance")
    ax.set_title(recipe.title)
    ax.legend()
    return fig


def _render_inf_mean(recipe, data_dir):
    mean_spec, fluid_spec = recipe.inputs
    cols = read_mean(f"{data_dir}/{mean_spec.filename}", mean_spec.produce_cmd)
    ft, fv = read_path(f"{data_dir}/{fluid_spec.filename}", fluid_spec.produce_cmd)
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(cols["t"], cols["sample_mean"], label="sample mean (inf)")
    theory = [v for v in cols["theory_mean"] if v is not None]
    if len(theory) == len(cols["t"]):
        ax.plot(cols["t"], theory, linestyle=":", label="expected value")
    ax.plot(ft, fv, linestyle="--", label="fluid limit")
    ax.set_xlabel("t")
    ax.set_ylabel("balance")
    ax.set_title(recipe.title)
    ax.legend()
    return fig


def _render_blk_converge(recipe, data_dir):
    (spec,) = recipe.inputs
    cols = read_convergence(f"{data_dir}/{spec.filename}", spec.produce_cmd)
    by_eta: dict = {}
    for eta, err in zip(cols["eta"], cols["sup_error"]):
        by_eta.setdefault(eta, []).append(err)
    fig, ax = plt.subplots(figsize=(8, 5))
    etas = sorted(by_eta)
    if etas:
        ax.boxplot([by_eta[e] for e in etas], tick_labels=[f"{e:g}" for e in etas])
        medians = [sorted(by_eta[e])[len(by_eta[e]) // 2] for e in etas]
        ax.plot(range(1, len(etas) + 1), medians, marker="o", label="median")
        ax.set_yscale("log")
        ax.legend()
    ax.set_xlabel("scale factor eta")
    ax.set_ylabel("sup-norm error vs fluid limit")
    ax.set_title(recipe.title)
    return fig


RECIPES = {
    "inf-mean": FigureRecipe(
        "inf-mean",
        (
            InputSpec("inf_mean.csv", "bailfund mean --model inf --reps 200 -o inf_mean.csv"),
            InputSpec("inf_fluid.csv", "bailfund fluid --model inf -o inf_fluid.csv"),
        ),
        "Sample mean and fluid limit, unconstrained model",
    ),
    "blk-converge": FigureRecipe(
        "blk-converge",
        (
            InputSpec(
                "blk_converge.csv",
                "bailfund converge --model block --reps 200 -o blk_converge.csv",
            ),
        ),
        "Blocking model: sup-norm error vs scale factor",
    ),
    "skrk-vs-partial": FigureRecipe(
        "skrk-vs-partial",
        (
            InputSpec(
                "skorokhod_path.csv",
                "bailfund simulate --model skorokhod --seed 1 -o skorokhod_path.csv",
            ),
            InputSpec(
                "partial_path.csv",
                "bailfund simulate --model partial --seed 1 -o partial_path.csv",
            ),
        ),
        "Reflected model vs partial fulfillment (with returns)",
    ),
    "order-nr": FigureRecipe(
        "order-nr",
        (
            InputSpec("block_nr.csv", "bailfund simulate --model block-nr --seed 1 -o block_nr.csv"),
            InputSpec(
                "skorokhod_nr.csv",
                "bailfund simulate --model skorokhod-nr --seed 1 -o skorokhod_nr.csv",
            ),
            InputSpec(
                "partial_nr.csv", "bailfund simulate --model partial-nr --seed 1 -o partial_nr.csv"
            ),
            InputSpec("inf_nr.csv", "bailfund simulate --model inf-nr --seed 1 -o inf_nr.csv"),
        ),
        "Pathwise ordering, no-returns family (one coupled seed)",
    ),
    "order-r": FigureRecipe(
        "order-r",
        (
            InputSpec(
                "skorokhod_r.csv", "bailfund simulate --model skorokhod --seed 1 -o skorokhod_r.csv"
            ),
            InputSpec(
                "partial_r.csv", "bailfund simulate --model partial --seed 1 -o partial_r.csv"
            ),
            InputSpec("inf_r.csv", "bailfund simulate --model inf --seed 1 -o inf_r.csv"),
        ),
        "Pathwise ordering, with-returns family (one coupled seed)",
    ),
}

_LABELS = {
    "skrk-vs-partial": ["skorokhod", "partial"],
    "order-nr": ["block-nr", "skorokhod-nr", "partial-nr", "inf-nr"],
    "order-r": ["skorokhod", "partial", "inf"],
}


def render(recipe: FigureRecipe, data_dir: str, out_path: str) -> None:
    """Read the recipe's CSVs from data_dir and write one image to out_path."""
    if recipe.figure_id == "inf-mean":
        fig = _render_inf_mean(recipe, data_dir)
    elif recipe.figure_id == "blk-converge":
        fig = _render_blk_converge(recipe, data_dir)
    else:
        fig = _path_overlay(recipe, data_dir, _LABELS[recipe.figure_id])
    fig.savefig(out_path, dpi=120, metadata={"Software": None})
    plt.close(fig)
