"""Figure-reproduction scripts for bailfund CLI CSV outputs."""

from .readers import MissingInput, RaggedCsv, read_convergence, read_mean, read_path
from .recipes import RECIPES, FigureRecipe, InputSpec, render

__all__ = [
    "MissingInput",
    "RaggedCsv",
    "read_convergence",
    "read_mean",
    "read_path",
    "RECIPES",
    "FigureRecipe",
    "InputSpec",
    "render",
]
__version__ = "0.1.0"
