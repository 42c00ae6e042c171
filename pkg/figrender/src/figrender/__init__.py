"""Multi-panel figure rendering for experiment CSV logs."""

from .render import (
    PanelData,
    RenderResult,
    build_figure,
    load_columns,
    normalized,
    per_trial_curves,
    render,
)
from .spec import FORMATS, NORMALIZERS, FigureSpec, PanelSpec, load_figure_spec

__version__ = "0.1.0"
