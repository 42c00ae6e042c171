"""Figure specs: which CSVs to read and what each panel shows.

A spec file uses the same flat ``[section] key = value`` format as the
experiment configs. ``[figure]`` names the output, ``[data]`` maps labels to
CSV paths, and each ``[panel...]`` section (any suffix, file order kept)
describes one subplot: the data source, the metric column, a horizon
normalizer, and an optional log-scale toggle.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

NORMALIZERS = ("none", "sqrt_t", "t_23", "t")
FORMATS = ("png", "svg")

_FIGURE_KEYS = {"name", "format", "dpi", "panel_width", "panel_height"}
_PANEL_KEYS = {"source", "metric", "normalizer", "title", "logy"}


@dataclass(frozen=True)
class PanelSpec:
    source: str
    metric: str
    normalizer: str = "none"
    title: str = ""
    logy: bool = False


@dataclass(frozen=True)
class FigureSpec:
    name: str
    inputs: dict[str, Path]
    panels: tuple[PanelSpec, ...]
    fmt: str = "png"
    dpi: int = 150
    panel_width: float = 4.2
    panel_height: float = 3.4

    def __post_init__(self):
        if self.fmt not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.fmt!r}")
        if self.dpi < 1:
            raise ValueError("dpi must be >= 1")
        if not self.panels:
            raise ValueError("spec needs at least one panel")
        for p in self.panels:
            if p.normalizer not in NORMALIZERS:
                raise ValueError(
                    f"normalizer must be one of {NORMALIZERS}, got {p.normalizer!r}"
                )
            if p.source not in self.inputs:
                raise ValueError(
                    f"panel source {p.source!r} is not a [data] entry "
                    f"(have {sorted(self.inputs)})"
                )


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def load_figure_spec(path) -> FigureSpec:
    """Parse and validate a figure spec file; unknown keys are errors."""
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    if not parser.read(path):
        raise ValueError(f"spec file not found: {path}")

    if "figure" not in parser:
        raise ValueError("spec needs a [figure] section")
    if "data" not in parser:
        raise ValueError("spec needs a [data] section")

    fig = dict(parser.items("figure"))
    unknown = set(fig) - _FIGURE_KEYS
    if unknown:
        raise ValueError(f"unknown keys in [figure]: {sorted(unknown)}")
    if "name" not in fig:
        raise ValueError("[figure] needs a name")

    base = Path(path).parent
    inputs = {
        label: (base / raw if not Path(raw).is_absolute() else Path(raw))
        for label, raw in parser.items("data")
    }
    if not inputs:
        raise ValueError("[data] section is empty")

    panels = []
    for section in parser.sections():
        if not section.startswith("panel"):
            if section in ("figure", "data"):
                continue
            raise ValueError(f"unknown section [{section}]")
        kv = dict(parser.items(section))
        unknown = set(kv) - _PANEL_KEYS
        if unknown:
            raise ValueError(f"unknown keys in [{section}]: {sorted(unknown)}")
        for req in ("source", "metric"):
            if req not in kv:
                raise ValueError(f"[{section}] needs '{req}'")
        panels.append(
            PanelSpec(
                source=kv["source"],
                metric=kv["metric"],
                normalizer=kv.get("normalizer", "none"),
                title=kv.get("title", ""),
                logy=_parse_bool(kv.get("logy", "false")),
            )
        )

    return FigureSpec(
        name=fig["name"],
        inputs=inputs,
        panels=tuple(panels),
        fmt=fig.get("format", "png"),
        dpi=int(fig.get("dpi", "150")),
        panel_width=float(fig.get("panel_width", "4.2")),
        panel_height=float(fig.get("panel_height", "3.4")),
    )
