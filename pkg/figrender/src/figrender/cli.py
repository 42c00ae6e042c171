"""Command line front end: ``figrender render --spec <file> --out <dir>``."""

from __future__ import annotations

import argparse
import sys

from .render import render
from .spec import load_figure_spec


def _cmd_render(args) -> int:
    spec = load_figure_spec(args.spec)
    result = render(spec, args.out)
    print(f"wrote {result.path}")
    for data in result.panels:
        label = data.title or data.metric
        print(
            f"panel '{label}': {data.curves.shape[0]} trials, "
            f"{data.t.size} points, mean at t={int(data.t[-1])} is {float(data.mean[-1])!r}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figrender",
        description="Render multi-panel figures from experiment CSV logs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser("render", help="render one figure spec")
    p_render.add_argument("--spec", required=True, help="path to a figure spec file")
    p_render.add_argument("--out", required=True, help="output directory")
    p_render.set_defaults(func=_cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
