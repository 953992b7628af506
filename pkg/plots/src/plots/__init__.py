"""Static figures from the experiment harness's CSV tables."""

from .render import FIGURE_KINDS, PlotSpec, SchemaError, render

__all__ = ["FIGURE_KINDS", "PlotSpec", "SchemaError", "render"]
