"""Sign distributions of synthetic shapes over plane separation.

Writes one CSV plus bar and pie SVGs per (shape, mode, d) into --out and
prints a table of section counts and convergence widths.

    python scripts/sign_sweep_study.py --out results/sweeps
"""

import argparse
from pathlib import Path

from emrotmatch import shapes
from emrotmatch.analysis import SweepParams, sweep_moment_signs
from emrotmatch.edgecurrent import EdgeParams
from emrotmatch.emfield import SceneConfig
from emrotmatch.viz import sign_bar_svg, sign_pie_svg

SHAPES = {
    "rect_centered": lambda: shapes.rectangle(64, 16.5, 9.5),
    "rect_offset14": lambda: shapes.rectangle(64, 12.5, 5.5, offset=(14.0, 0.0)),
    "rect_offset16": lambda: shapes.rectangle(64, 10.5, 6.5, offset=(16.0, 0.0)),
    "ellipse_offset": lambda: shapes.ellipse(64, 14.0, 7.0, offset=(10.0, 4.0), angle=20.0),
    "two_blobs": lambda: shapes.composite(shapes.ellipse(64, 9.0, 5.0, offset=(-12.0, 0.0)),
                                          shapes.rectangle(64, 5.5, 10.5, offset=(14.0, -6.0))),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/sweeps"))
    ap.add_argument("--intervals", type=int, default=120)
    ap.add_argument("--distances", type=float, nargs="+", default=[0, 10, 20, 30, 40])
    ap.add_argument("--shapes", nargs="+", default=list(SHAPES), choices=list(SHAPES))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    print(f"{'shape':<16}{'mode':<11}{'d':>5}{'sections':>10}{'width':>8}  convergence / oscillating")
    for name in args.shapes:
        img = SHAPES[name]()
        for quantize in (True, False):
            mode = "quantized" if quantize else "continuous"
            for d in args.distances:
                params = SweepParams(args.intervals, SceneConfig(z_separation=d),
                                     edge_params=EdgeParams(quantize_directions=quantize))
                dist = sweep_moment_signs(img, params)
                stem = args.out / f"{name}_{mode}_d{d:g}"
                dist.write_csv(stem.with_suffix(".csv"))
                title = f"{name}, {mode}, d={d:g}"
                sign_bar_svg(dist, f"{stem}_bar.svg", title)
                sign_pie_svg(dist, f"{stem}_pie.svg", title)
                width = sum(r.width for r in dist.convergence)
                conv = ", ".join(str(r) for r in dist.convergence) or "none"
                osc = ", ".join(f"{a:g}" for a in dist.oscillating_angles) or "-"
                print(f"{name:<16}{mode:<11}{d:>5g}{len(dist.sections):>10}{width:>8g}  {conv} / {osc}")


if __name__ == "__main__":
    main()
