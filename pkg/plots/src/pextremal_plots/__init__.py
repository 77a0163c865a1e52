"""Figure rendering for pextremal CSV outputs."""

__version__ = "0.1.0"

from .render import (
    DEFAULT_LEVELS,
    DEFAULT_STYLE,
    InputError,
    PlotSpec,
    RenderResult,
    load_contour_grid,
    load_decay_table,
    q_label_from_name,
    render,
    render_contours,
    render_decay,
)
