"""Acceptance check: faithful three-panel rendering of a real experiment run.

Prints one PASS/FAIL line (visible with ``pytest -s``), mirroring the
experiment package's acceptance battery.
"""

import csv

import numpy as np

from figrender import FigureSpec, PanelSpec, render

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _report(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {name} ({detail})"
    print(line, flush=True)
    assert ok, line


def _csv_mean_at_final_t(path, metric):
    final_t, values = 0.0, {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            t = float(row["t"])
            final_t = max(final_t, t)
            values.setdefault(t, []).append(float(row[metric]))
    return final_t, float(np.mean(values[final_t]))


def test_three_panel_figure_is_faithful(ellipsoid_csvs, tmp_path):
    regret = ellipsoid_csvs / "regret.csv"
    spec = FigureSpec(
        name="ellipsoid_overview",
        inputs={"regret": regret},
        panels=(
            PanelSpec("regret", "cum_alpha_regret", "none", "cumulative"),
            PanelSpec("regret", "cum_alpha_regret", "sqrt_t", "per sqrt(t)"),
            PanelSpec("regret", "cum_alpha_regret", "t", "per step"),
        ),
    )
    result = render(spec, tmp_path)

    blob = result.path.read_bytes()
    image_ok = blob.startswith(PNG_MAGIC) and len(blob) > 0

    final_t, csv_mean = _csv_mean_at_final_t(regret, "cum_alpha_regret")
    powers = {"none": 0.0, "sqrt_t": 0.5, "t": 1.0}
    rel_errs = []
    for panel in result.panels:
        want = csv_mean / final_t ** powers[panel.normalizer]
        rel_errs.append(abs(float(panel.mean[-1]) - want) / abs(want))
    worst = max(rel_errs)

    ok = image_ok and len(result.panels) == 3 and worst <= 1e-6
    _report(
        "rendered means match the CSV at the final step",
        ok,
        f"3 panels, worst relative error {worst:.2e} <= 1e-6, "
        f"image {len(blob)} bytes",
    )
