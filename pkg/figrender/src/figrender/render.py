"""Turn experiment CSVs into multi-panel figures.

Each panel draws every trial's curve as a faint cloud plus the across-trial
mean as one bold line. The renderer only reads the CSVs — it never recomputes
experiment quantities, so the mean it draws is exactly the column mean after
the chosen normalization.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .spec import FigureSpec, PanelSpec

CLOUD_COLOR = "tab:blue"
CLOUD_ALPHA = 0.25
MEAN_COLOR = "#13315c"

_POWERS = {"sqrt_t": 0.5, "t_23": 2.0 / 3.0, "t": 1.0}
_YLABEL_SUFFIX = {"sqrt_t": " / sqrt(t)", "t_23": " / t^(2/3)", "t": " / t"}


@dataclass(frozen=True)
class PanelData:
    """What one panel actually plotted."""

    title: str
    metric: str
    normalizer: str
    t: np.ndarray
    curves: np.ndarray  # (trials, len(t)) after normalization
    mean: np.ndarray


@dataclass(frozen=True)
class RenderResult:
    path: Path
    panels: tuple[PanelData, ...]


def load_columns(path, wanted) -> dict[str, np.ndarray]:
    """Read the named numeric columns of one CSV into float arrays."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            has_rows = next(reader, None) is not None
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    if header is None:
        raise ValueError(f"{path} is empty")
    missing = [c for c in wanted if c not in header]
    if missing:
        raise ValueError(f"{path} has no column(s) {missing}; header is {header}")
    if not has_rows:
        raise ValueError(f"{path} has no data rows")
    cols = [header.index(c) for c in wanted]
    data = np.loadtxt(path, delimiter=",", skiprows=1, usecols=cols, ndmin=2)
    return {c: data[:, k] for k, c in enumerate(wanted)}


def per_trial_curves(trial, t, y):
    """Pivot long-form (trial, t, y) rows into one curve per trial.

    Returns ``(grid, curves)`` where every trial shares the same time grid.
    """
    order = np.lexsort((t, trial))
    trial, t, y = trial[order], t[order], y[order]
    _, starts = np.unique(trial, return_index=True)
    chunks = np.split(np.arange(trial.size), starts[1:])
    grid = t[chunks[0]]
    curves = np.empty((len(chunks), grid.size))
    for k, idx in enumerate(chunks):
        if not np.array_equal(t[idx], grid):
            raise ValueError("trials cover different time grids")
        curves[k] = y[idx]
    return grid, curves


def normalized(grid, curves, kind: str):
    if kind == "none":
        return curves
    if np.any(grid <= 0):
        raise ValueError(f"normalizer {kind!r} needs t > 0 on every row")
    return curves / grid ** _POWERS[kind]


def _panel_data(panel: PanelSpec, table) -> PanelData:
    grid, curves = per_trial_curves(table["trial"], table["t"], table[panel.metric])
    curves = normalized(grid, curves, panel.normalizer)
    return PanelData(
        title=panel.title,
        metric=panel.metric,
        normalizer=panel.normalizer,
        t=grid,
        curves=curves,
        mean=curves.mean(axis=0),
    )


def build_figure(spec: FigureSpec):
    """Load the data and draw the figure; returns ``(fig, panel_data_tuple)``."""
    tables = {}
    for panel in spec.panels:
        key = (panel.source, panel.metric)
        if key not in tables:
            tables[key] = load_columns(
                spec.inputs[panel.source], ["trial", "t", panel.metric]
            )

    n = len(spec.panels)
    fig, axes = plt.subplots(
        1, n, figsize=(spec.panel_width * n, spec.panel_height), squeeze=False
    )
    panel_data = []
    for ax, panel in zip(axes[0], spec.panels):
        data = _panel_data(panel, tables[(panel.source, panel.metric)])
        panel_data.append(data)
        for curve in data.curves:
            ax.plot(data.t, curve, color=CLOUD_COLOR, alpha=CLOUD_ALPHA, lw=0.8)
        ax.plot(data.t, data.mean, color=MEAN_COLOR, lw=2.2)
        ax.set_xlabel("t")
        ax.set_ylabel(panel.metric + _YLABEL_SUFFIX.get(panel.normalizer, ""))
        if panel.title:
            ax.set_title(panel.title)
        if panel.logy:
            ax.set_yscale("log")
    fig.tight_layout()
    return fig, tuple(panel_data)


def render(spec: FigureSpec, out_dir) -> RenderResult:
    """Write ``<out_dir>/<name>.<format>`` and report what was plotted."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fig, panels = build_figure(spec)
    path = out / f"{spec.name}.{spec.fmt}"
    try:
        # strip volatile metadata so identical inputs give identical bytes
        meta = {"Date": None} if spec.fmt == "svg" else None
        fig.savefig(path, dpi=spec.dpi, format=spec.fmt, metadata=meta)
    finally:
        plt.close(fig)
    return RenderResult(path=path, panels=panels)
